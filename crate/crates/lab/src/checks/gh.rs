use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shrinker_core::gh::{gh_exact_small, gh_lower, gh_upper, Correspondence, FiniteMetricSpace};
use shrinker_core::Result;

use crate::report::{check, CheckReport};

pub const SANDWICH_TOL: f64 = 1e-12;
pub const TWO_POINT_TRIALS: usize = 50;

fn planar(pts: &[(f64, f64)]) -> Result<FiniteMetricSpace> {
    let n = pts.len();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            d[i * n + j] = (pts[i].0 - pts[j].0).hypot(pts[i].1 - pts[j].1);
        }
    }
    FiniteMetricSpace::new(n, d, 0)
}

fn cloud(rng: &mut ChaCha8Rng, max: usize) -> Vec<(f64, f64)> {
    let n = rng.gen_range(1..=max);
    (0..n).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect()
}

/// Surjective relation: every x gets a random partner, then every y does.
fn random_correspondence(rng: &mut ChaCha8Rng, nx: usize, ny: usize) -> Result<Correspondence> {
    let mut pairs: Vec<(usize, usize)> = (0..nx).map(|i| (i, rng.gen_range(0..ny))).collect();
    pairs.extend((0..ny).map(|j| (rng.gen_range(0..nx), j)));
    Correspondence::new(pairs, nx, ny)
}

pub fn sandwich(seed: u64, pairs: usize, max_points: usize) -> CheckReport {
    check(format!("gh.sandwich.seed{seed}"), "gh-sandwich", |rec| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut low_excess, mut up_excess) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for _ in 0..pairs {
            let (a, b) = (cloud(&mut rng, max_points), cloud(&mut rng, max_points));
            let (x, y) = (planar(&a)?, planar(&b)?);
            let corr = random_correspondence(&mut rng, a.len(), b.len())?;
            let exact = gh_exact_small(&x, &y)?;
            low_excess = low_excess.max(gh_lower(&x, &y) - exact);
            up_excess = up_excess.max(exact - gh_upper(&x, &y, &corr)?);
        }
        rec.value("pairs", pairs as f64);
        rec.bounded("max_lower_minus_exact", low_excess, SANDWICH_TOL);
        rec.bounded("max_exact_minus_upper", up_excess, SANDWICH_TOL);
        Ok((low_excess <= SANDWICH_TOL && up_excess <= SANDWICH_TOL).into())
    })
}

/// d_GH({0, a}, {0, b}) = |a − b|/2, compared bit for bit.
pub fn two_point(seed: u64) -> CheckReport {
    check(format!("gh.two-point.seed{seed}"), "gh-two-point", |rec| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x2b);
        let mut mismatches = 0usize;
        let mut worst = 0.0_f64;
        for _ in 0..TWO_POINT_TRIALS {
            let (a, b) = (rng.gen_range(0.01..10.0), rng.gen_range(0.01..10.0));
            let x = FiniteMetricSpace::from_upper(2, 0, &[a])?;
            let y = FiniteMetricSpace::from_upper(2, 0, &[b])?;
            let v = gh_exact_small(&x, &y)?;
            let want = (a - b).abs() / 2.0;
            if v != want {
                mismatches += 1;
            }
            worst = worst.max((v - want).abs());
        }
        rec.value("trials", TWO_POINT_TRIALS as f64);
        rec.bounded("mismatches", mismatches as f64, 0.0);
        rec.value("max_abs_difference", worst);
        Ok((mismatches == 0).into())
    })
}

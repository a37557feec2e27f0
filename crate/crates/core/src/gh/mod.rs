//! Finite pointed metric spaces and Gromov–Hausdorff bounds between them.
//!
//! `gh_upper` is half the distortion of a given correspondence, `gh_lower`
//! compares diameters and packing profiles, and `gh_exact_small` decides the
//! minimal distortion exactly for spaces of at most seven points.

pub mod net;

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

pub use net::{sample_net, NetRegion, SectionPoint};

/// Largest space accepted by [`gh_exact_small`].
pub const EXACT_MAX_POINTS: usize = 7;
/// Largest space for which the packing profile is computed exactly.
pub const PACKING_EXACT_MAX: usize = 16;

/// Where a space came from.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Provenance {
    pub model: String,
    pub region: String,
    pub eps_net: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    pub n: usize,
    /// row-major n×n
    pub d: Vec<f64>,
    pub basepoint: usize,
    pub provenance: Provenance,
    /// extra absolute error carried by distances that came from the graph fallback
    pub fallback_tolerance: f64,
}

impl FiniteMetricSpace {
    /// Validates symmetry, zero diagonal and the triangle inequality. Numerical distances
    /// are accepted up to `tol` (absolute).
    pub fn with_tolerance(n: usize, d: Vec<f64>, basepoint: usize, provenance: Provenance, tol: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Contract("empty metric space"));
        }
        if d.len() != n * n {
            return Err(Error::Contract("distance matrix has the wrong size"));
        }
        if basepoint >= n {
            return Err(Error::Contract("basepoint index out of range"));
        }
        for i in 0..n {
            if d[i * n + i] != 0.0 {
                return Err(Error::Contract("nonzero diagonal"));
            }
            for j in 0..n {
                let v = d[i * n + j];
                if !(v >= 0.0) || !v.is_finite() {
                    return Err(Error::Contract("distances must be finite and nonnegative"));
                }
                if libm::fabs(v - d[j * n + i]) > tol {
                    return Err(Error::Contract("distance matrix is not symmetric"));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let dij = d[i * n + j];
                for k in 0..n {
                    if dij > d[i * n + k] + d[k * n + j] + tol {
                        return Err(Error::Contract("triangle inequality fails"));
                    }
                }
            }
        }
        Ok(Self { n, d, basepoint, provenance, fallback_tolerance: 0.0 })
    }

    pub fn new(n: usize, d: Vec<f64>, basepoint: usize) -> Result<Self> {
        let scale = d.iter().fold(0.0_f64, |a, &b| a.max(b));
        Self::with_tolerance(n, d, basepoint, Provenance::default(), 1e-12 * scale.max(1.0))
    }

    /// From the row-wise flattened strict upper triangle (the JSON layout).
    pub fn from_upper(n: usize, basepoint: usize, upper: &[f64]) -> Result<Self> {
        if upper.len() != n * n.saturating_sub(1) / 2 {
            return Err(Error::Contract("upper triangle has the wrong length"));
        }
        let mut d = vec![0.0; n * n];
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                d[i * n + j] = upper[k];
                d[j * n + i] = upper[k];
                k += 1;
            }
        }
        Self::new(n, d, basepoint)
    }

    pub fn upper_triangle(&self) -> Vec<f64> {
        let n = self.n;
        let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                out.push(self.d[i * n + j]);
            }
        }
        out
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    pub fn diam(&self) -> f64 {
        self.d.iter().fold(0.0, |a: f64, &b| a.max(b))
    }

    /// sep(k) = max over k-subsets of the minimal pairwise distance, for k = 1..=n
    /// (sep(1) = ∞). Exact, exponential in n.
    pub fn packing_profile(&self) -> Option<Vec<f64>> {
        let n = self.n;
        if n > PACKING_EXACT_MAX {
            return None;
        }
        let mut best = vec![0.0; n + 1];
        best[1] = f64::INFINITY;
        // min pairwise distance per subset, built from the subset minus its top bit
        let mut minpair = vec![f64::INFINITY; 1 << n];
        for mask in 1usize..(1 << n) {
            let top = usize::BITS as usize - 1 - mask.leading_zeros() as usize;
            let rest = mask & !(1 << top);
            let mut v = minpair[rest];
            let mut r = rest;
            while r != 0 {
                let j = r.trailing_zeros() as usize;
                v = v.min(self.dist(top, j));
                r &= r - 1;
            }
            minpair[mask] = v;
            let k = mask.count_ones() as usize;
            if k >= 2 && v > best[k] {
                best[k] = v;
            }
        }
        Some(best)
    }

    /// Greedy farthest-point lower bound on sep(k).
    fn greedy_separation(&self, k: usize) -> f64 {
        if k <= 1 {
            return f64::INFINITY;
        }
        if k > self.n {
            return 0.0;
        }
        let mut chosen = vec![self.basepoint];
        let mut near: Vec<f64> = (0..self.n).map(|j| self.dist(self.basepoint, j)).collect();
        let mut sep = f64::INFINITY;
        while chosen.len() < k {
            let (j, &v) = near
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(core::cmp::Ordering::Equal))
                .unwrap_or((0, &0.0));
            sep = sep.min(v);
            chosen.push(j);
            for (i, x) in near.iter_mut().enumerate() {
                *x = x.min(self.dist(j, i));
            }
        }
        sep
    }
}

/// A relation R ⊂ X × Y whose projections are onto.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Correspondence {
    pub pairs: Vec<(usize, usize)>,
}

impl Correspondence {
    pub fn new(pairs: Vec<(usize, usize)>, nx: usize, ny: usize) -> Result<Self> {
        let mut hx = vec![false; nx];
        let mut hy = vec![false; ny];
        for &(i, j) in &pairs {
            if i >= nx || j >= ny {
                return Err(Error::Contract("correspondence index out of range"));
            }
            hx[i] = true;
            hy[j] = true;
        }
        if hx.iter().any(|h| !h) || hy.iter().any(|h| !h) {
            return Err(Error::Contract("correspondence is not surjective"));
        }
        Ok(Self { pairs })
    }

    pub fn identity(n: usize) -> Self {
        Self { pairs: (0..n).map(|i| (i, i)).collect() }
    }

    pub fn distortion(&self, x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
        let mut dis = 0.0_f64;
        for (a, &(i, j)) in self.pairs.iter().enumerate() {
            for &(k, l) in &self.pairs[a + 1..] {
                dis = dis.max(libm::fabs(x.dist(i, k) - y.dist(j, l)));
            }
        }
        dis
    }
}

/// ½ · distortion of `corr`.
pub fn gh_upper(x: &FiniteMetricSpace, y: &FiniteMetricSpace, corr: &Correspondence) -> Result<f64> {
    Correspondence::new(corr.pairs.clone(), x.n, y.n)?;
    Ok(0.5 * corr.distortion(x, y))
}

/// max(½|diam X − diam Y|, ½ max_k |sep_X(k) − sep_Y(k)|).
///
/// A correspondence of distortion δ sends a k-set with separation σ to k points of
/// separation ≥ σ − δ, and to a repeated point when k exceeds the other space's size.
pub fn gh_lower(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
    let mut lb = 0.5 * libm::fabs(x.diam() - y.diam());
    match (x.packing_profile(), y.packing_profile()) {
        (Some(px), Some(py)) => {
            let kmax = x.n.max(y.n);
            for k in 2..=kmax {
                let a = px.get(k).copied().unwrap_or(0.0);
                let b = py.get(k).copied().unwrap_or(0.0);
                lb = lb.max(0.5 * libm::fabs(a - b));
            }
        }
        _ => {
            // only the pigeonhole case survives without exact profiles
            if x.n > y.n {
                lb = lb.max(0.5 * x.greedy_separation(y.n + 1));
            } else if y.n > x.n {
                lb = lb.max(0.5 * y.greedy_separation(x.n + 1));
            }
        }
    }
    lb
}

struct Search<'a> {
    x: &'a FiniteMetricSpace,
    y: &'a FiniteMetricSpace,
    t: f64,
    pairs: Vec<(usize, usize)>,
}

impl Search<'_> {
    fn fits(&self, i: usize, j: usize) -> bool {
        self.pairs.iter().all(|&(k, l)| libm::fabs(self.x.dist(i, k) - self.y.dist(j, l)) <= self.t)
    }

    /// Assign a partner to every x, then to every y still uncovered.
    fn extend(&mut self, step: usize) -> bool {
        let (nx, ny) = (self.x.n, self.y.n);
        if step < nx {
            for j in 0..ny {
                if self.fits(step, j) {
                    self.pairs.push((step, j));
                    if self.extend(step + 1) {
                        return true;
                    }
                    self.pairs.pop();
                }
            }
            return false;
        }
        let covered = |pairs: &[(usize, usize)], l: usize| pairs.iter().any(|&(_, b)| b == l);
        let Some(l) = (0..ny).find(|&l| !covered(&self.pairs, l)) else {
            return true;
        };
        for i in 0..nx {
            if self.fits(i, l) {
                self.pairs.push((i, l));
                if self.extend(step) {
                    return true;
                }
                self.pairs.pop();
            }
        }
        false
    }
}

/// Exact d_GH for spaces of at most seven points: bisection over the finitely many
/// candidate distortions, each decided by backtracking with partial-distortion pruning.
pub fn gh_exact_small(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<f64> {
    if x.n > EXACT_MAX_POINTS || y.n > EXACT_MAX_POINTS {
        return Err(Error::Capability("exact GH search is limited to 7 points"));
    }
    let (ux, uy) = (x.upper_triangle(), y.upper_triangle());
    let mut cand: Vec<f64> = vec![0.0];
    cand.extend(ux.iter().copied());
    cand.extend(uy.iter().copied());
    for a in &ux {
        for b in &uy {
            cand.push(libm::fabs(a - b));
        }
    }
    cand.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    cand.dedup();
    let feasible = |t: f64| {
        let mut s = Search { x, y, t: t + 1e-12 * t.max(1.0), pairs: Vec::new() };
        s.extend(0)
    };
    let (mut lo, mut hi) = (0usize, cand.len() - 1);
    if feasible(cand[0]) {
        return Ok(0.0);
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if feasible(cand[mid]) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * cand[hi])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::SplitMix64;

    fn two_point(a: f64) -> FiniteMetricSpace {
        FiniteMetricSpace::from_upper(2, 0, &[a]).unwrap()
    }

    /// Points in the plane, so the metric axioms hold by construction.
    fn random_space(rng: &mut SplitMix64, n: usize) -> FiniteMetricSpace {
        let p: Vec<[f64; 2]> = (0..n).map(|_| [rng.uniform(0.0, 3.0), rng.uniform(0.0, 3.0)]).collect();
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                d[i * n + j] = libm::hypot(p[i][0] - p[j][0], p[i][1] - p[j][1]);
            }
        }
        FiniteMetricSpace::new(n, d, 0).unwrap()
    }

    /// Brute force over every relation (tiny sizes only).
    fn brute_force(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
        let cells = x.n * y.n;
        let mut best = f64::INFINITY;
        for mask in 1u64..(1 << cells) {
            let pairs: Vec<(usize, usize)> =
                (0..cells).filter(|b| mask >> b & 1 == 1).map(|b| (b / y.n, b % y.n)).collect();
            if let Ok(c) = Correspondence::new(pairs, x.n, y.n) {
                best = best.min(c.distortion(x, y));
            }
        }
        0.5 * best
    }

    #[test]
    fn one_point_spaces() {
        let p = FiniteMetricSpace::new(1, vec![0.0], 0).unwrap();
        assert_eq!(gh_exact_small(&p, &p).unwrap(), 0.0);
    }

    #[test]
    fn two_point_gap() {
        let (a, b) = (two_point(1.0), two_point(3.0));
        assert_eq!(gh_exact_small(&a, &b).unwrap(), 1.0);
        let c = Correspondence::new(vec![(0, 0), (1, 1)], 2, 2).unwrap();
        assert_eq!(gh_upper(&a, &b, &c).unwrap(), 1.0);
        assert_eq!(gh_lower(&a, &b), 1.0);
    }

    #[test]
    fn identity_on_same_space_is_zero() {
        let mut rng = SplitMix64(3);
        let x = random_space(&mut rng, 6);
        assert_eq!(gh_exact_small(&x, &x).unwrap(), 0.0);
        assert_eq!(gh_upper(&x, &x, &Correspondence::identity(6)).unwrap(), 0.0);
    }

    #[test]
    fn validation_rejects_bad_matrices() {
        assert!(FiniteMetricSpace::from_upper(3, 0, &[1.0, 5.0, 1.0]).is_err());
        assert!(FiniteMetricSpace::new(2, vec![0.0, 1.0, 2.0, 0.0], 0).is_err());
        assert!(FiniteMetricSpace::new(2, vec![0.0, -1.0, -1.0, 0.0], 0).is_err());
        assert!(FiniteMetricSpace::new(2, vec![0.0, 1.0, 1.0, 0.0], 2).is_err());
        assert!(Correspondence::new(vec![(0, 0)], 2, 1).is_err());
        let x = two_point(1.0);
        let bad = Correspondence { pairs: vec![(0, 0)] };
        assert!(gh_upper(&x, &x, &bad).is_err());
    }

    #[test]
    fn upper_triangle_round_trip() {
        let mut rng = SplitMix64(8);
        let x = random_space(&mut rng, 5);
        let y = FiniteMetricSpace::from_upper(5, 0, &x.upper_triangle()).unwrap();
        assert_eq!(x.d, y.d);
    }

    #[test]
    fn exact_matches_brute_force() {
        let mut rng = SplitMix64(11);
        for _ in 0..12 {
            let nx = 1 + (rng.next_u64() % 3) as usize;
            let ny = 1 + (rng.next_u64() % 3) as usize;
            let x = random_space(&mut rng, nx);
            let y = random_space(&mut rng, ny);
            let e = gh_exact_small(&x, &y).unwrap();
            let b = brute_force(&x, &y);
            assert!(libm::fabs(e - b) < 1e-12, "{e} vs {b}");
        }
    }

    #[test]
    fn size_cap() {
        let mut rng = SplitMix64(1);
        let x = random_space(&mut rng, 8);
        assert!(matches!(gh_exact_small(&x, &x), Err(Error::Capability(_))));
    }

    #[test]
    fn packing_profile_of_a_square() {
        let s = libm::sqrt(2.0);
        let x = FiniteMetricSpace::from_upper(4, 0, &[1.0, s, 1.0, 1.0, s, 1.0]).unwrap();
        let p = x.packing_profile().unwrap();
        assert_eq!(&p[2..], &[s, 1.0, 1.0]);
        assert_eq!(x.greedy_separation(2), s);
    }
}

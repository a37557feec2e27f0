use proptest::prelude::*;
use shrinker_core::catalog::{make_cylinder, make_gaussian, make_model, make_sphere, verify_model, MODEL_NAMES};
use shrinker_core::conformal::build_chart;
use shrinker_core::entropy::{minimize_mu, EntropyProblem};
use shrinker_core::gh::{gh_exact_small, gh_lower, gh_upper, Correspondence, FiniteMetricSpace};
use shrinker_core::radii::{bold_cap, bold_radii, capped_volume_radius, volume_radius, DEFAULT_DELTA, DEFAULT_EPS};
use shrinker_core::warped::geodesic::{geodesic_between, PathOptions, SlicePoint};
use shrinker_core::warped::profile::{Potential, WarpedProfile};
use shrinker_core::warped::slice::{curvature_at, SliceMetric};
use shrinker_core::warped::volume::volume_ratio;

fn planar(points: &[(f64, f64)]) -> FiniteMetricSpace {
    let n = points.len();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            d[i * n + j] = ((points[i].0 - points[j].0).powi(2) + (points[i].1 - points[j].1).powi(2)).sqrt();
        }
    }
    FiniteMetricSpace::new(n, d, 0).unwrap()
}

fn cloud(max: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.0..1.0f64, 0.0..1.0f64), 1..=max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn gh_bounds_sandwich_the_exact_value(a in cloud(6), b in cloud(6), seed in prop::collection::vec(0usize..64, 12)) {
        let (x, y) = (planar(&a), planar(&b));
        let (nx, ny) = (a.len(), b.len());
        let mut pairs: Vec<(usize, usize)> = (0..nx).map(|i| (i, seed[i] % ny)).collect();
        pairs.extend((0..ny).map(|j| (seed[6 + j] % nx, j)));
        let corr = Correspondence::new(pairs, nx, ny).unwrap();
        let exact = gh_exact_small(&x, &y).unwrap();
        prop_assert!(gh_lower(&x, &y) <= exact + 1e-12);
        prop_assert!(exact <= gh_upper(&x, &y, &corr).unwrap() + 1e-12);
    }

    #[test]
    fn round_profile_has_constant_curvature(r0 in 0.5..3.0f64, u in 0.01..0.99f64) {
        let p = WarpedProfile::round(4, r0);
        let s = 0.01 + u * (std::f64::consts::PI * r0 - 0.02);
        let c = curvature_at(&p, s).unwrap();
        let k = 1.0 / (r0 * r0);
        prop_assert!((c.k_rad - k).abs() < 1e-10 && (c.k_sph - k).abs() < 1e-10);
    }

    #[test]
    fn profile_jets_match_finite_differences(k in 0usize..3, u in 0.05..0.95f64) {
        let model = make_model(MODEL_NAMES[k], 4).unwrap();
        let p = &model.profile;
        let (lo, hi) = p.domain;
        let s = lo + u * (hi - lo);
        let h = 1e-3;
        let j = p.jet(s);
        let d1 = (p.phi(s - 2.0 * h) - 8.0 * p.phi(s - h) + 8.0 * p.phi(s + h) - p.phi(s + 2.0 * h)) / (12.0 * h);
        prop_assert!((d1 - j[1]).abs() <= 1e-5 * j[1].abs().max(1.0));
    }

    #[test]
    fn chart_of_a_zero_potential_is_the_metric(q in 0.5..5.0f64, s in 0.1..6.0f64) {
        let mut model = make_sphere(4).unwrap();
        model.potential = Potential::constant(0.0, 0.0);
        let chart = build_chart(&model, q.min(7.0), None).unwrap();
        let (c, b) = (chart.coeffs(s), model.profile.coeffs(s));
        prop_assert_eq!(c.a, 1.0);
        prop_assert_eq!(c.b, b.b);
        // s̄ comes from a quadrature table, so only rounding separates it from s
        prop_assert!((chart.sbar(s) - chart.sbar(0.0) - s).abs() < 1e-12);
    }

    #[test]
    fn sbar_is_monotone_and_bi_lipschitz(q in -3.0..3.0f64, a in -5.0..5.0f64, w in 0.01..3.0f64) {
        let model = make_cylinder(4).unwrap();
        let chart = build_chart(&model, q, None).unwrap();
        let b = a + w;
        let slope = (chart.sbar(b) - chart.sbar(a)) / w;
        let lip = (chart.max_abs_fbar(a, b) / 2.0).exp();
        prop_assert!(slope > 0.0);
        prop_assert!(slope <= lip * (1.0 + 1e-9) && slope >= (1.0 - 1e-9) / lip);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn gh_exact_is_a_metric_on_five_point_spaces(a in cloud(5), b in cloud(5), c in cloud(5)) {
        let (x, y, z) = (planar(&a), planar(&b), planar(&c));
        let xy = gh_exact_small(&x, &y).unwrap();
        prop_assert!((xy - gh_exact_small(&y, &x).unwrap()).abs() < 1e-12);
        prop_assert_eq!(gh_exact_small(&x, &x).unwrap(), 0.0);
        let yz = gh_exact_small(&y, &z).unwrap();
        let xz = gh_exact_small(&x, &z).unwrap();
        prop_assert!(xz <= xy + yz + 1e-12);
    }

    #[test]
    fn sphere_geodesics_conserve_energy_and_clairaut(s1 in 0.3..7.0f64, s2 in 0.3..7.0f64, t in 0.1..3.0f64) {
        let g = WarpedProfile::round(4, 6f64.sqrt());
        let path = geodesic_between(&g, SlicePoint::new(s1, 0.0), SlicePoint::new(s2, t), PathOptions::default()).unwrap();
        prop_assert!(path.energy_defect(&g) < 1e-6);
        prop_assert!(path.clairaut_drift(&g) < 1e-6);
    }

    #[test]
    fn entropy_is_scale_invariant(c in 0.5..2.0f64, tau in 1.0..2.0f64) {
        let model = make_sphere(4).unwrap();
        let p = EntropyProblem::new(&model, 256, tau).unwrap();
        let base = minimize_mu(&model, &p).unwrap();
        let scaled = shrinker_core::entropy::minimize_mu_from(&p.scaled(c), &base.u).unwrap();
        prop_assert!((scaled.mu - base.mu).abs() < 1e-6);
    }
}

#[test]
fn sphere_volume_ratio_is_non_increasing() {
    let g = WarpedProfile::round(4, 6f64.sqrt());
    let tot = g.total_axis_length();
    let ratios: Vec<f64> = (1..=20).map(|i| volume_ratio(&g, 0.0, tot * i as f64 / 20.0).unwrap()).collect();
    assert!(ratios.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{ratios:?}");
}

#[test]
fn shrinker_normalization_is_rigid() {
    for m in 3..=6 {
        for name in MODEL_NAMES {
            let model = make_model(name, m).unwrap();
            assert!(verify_model(&model, 1e-10).unwrap().pass);
            for lambda in [0.9, 1.1] {
                let r = verify_model(&model.scaled(lambda).unwrap(), 1e-10).unwrap();
                assert!(r.soliton.max(r.normalization) > 1e-4, "{name} m={m} λ={lambda}: {r:?}");
            }
        }
    }
}

#[test]
fn capped_radii_agree_with_uncapped_below_the_cap() {
    let sp = make_sphere(4).unwrap();
    let free = volume_radius(&sp.profile, 0.0, DEFAULT_DELTA).unwrap();
    let capped = capped_volume_radius(&sp.profile, 0.0, DEFAULT_DELTA, 5.0).unwrap();
    assert!(free.value < 5.0);
    assert!((free.value - capped).abs() < 2e-6, "{} vs {}", free.value, capped);
    for model in [make_gaussian(5).unwrap(), make_cylinder(5).unwrap()] {
        let x = model.p() + 0.7;
        let b = bold_radii(&model, x, DEFAULT_DELTA, DEFAULT_EPS).unwrap();
        let cap = bold_cap(&model, x);
        assert!(b.vr <= cap && b.gr <= cap && b.sr <= cap);
    }
}

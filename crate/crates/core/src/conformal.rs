//! The local chart ḡ = e^{2(f(q)−f)/(m−2)} g around an axis point q.
//!
//! ḡ is again rotationally symmetric: in the coordinate s it reads
//! e^{2w} ds² + (e^w φ)² g_{S^{m-1}} with w = (f(q) − f)/(m−2), so it plugs into the
//! slice geodesic engine unchanged. Arclength s̄ is tabulated once and inverted by Newton.

use alloc::vec::Vec;

use crate::catalog::ShrinkerModel;
use crate::error::{Error, Result};
use crate::gh::net::{distance_matrix, point_distance, section_dim, section_point};
use crate::gh::{gh_upper, sample_net, Correspondence, NetRegion, Provenance};
use crate::num::{halton, HermiteTable, PI};
use crate::warped::geodesic::{exp_slice, slice_distance};
use crate::warped::slice::{slice_curvature, SliceCoeffs, SliceMetric};
use crate::warped::volume::pole_side;

/// Intervals of the s̄ table.
pub const SBAR_INTERVALS: usize = 8192;
/// Fraction of the 2Dρ² budget the GH discretization may use by default.
pub const GH_SLACK_FRACTION: f64 = 0.1;
/// Quasi-random pairs for the distance distortion check.
pub const DISTORTION_PAIRS: usize = 64;
/// Pairs are drawn from B(q, 0.09 r), inside the 0.1 r of the statement.
pub const DISTORTION_SAMPLE_RADIUS: f64 = 0.09;

// 5-point Gauss–Legendre on [0, 1]
const GL_X: [f64; 5] = [
    0.046_910_077_030_668_004,
    0.230_765_344_947_158_45,
    0.5,
    0.769_234_655_052_841_6,
    0.953_089_922_969_332,
];
const GL_W: [f64; 5] = [
    0.118_463_442_528_094_54,
    0.239_314_335_249_683_23,
    0.284_444_444_444_444_44,
    0.239_314_335_249_683_23,
    0.118_463_442_528_094_54,
];

#[derive(Debug, Clone, PartialEq)]
pub struct ConformalChart {
    pub base: ShrinkerModel,
    pub q: f64,
    pub fq: f64,
    /// scale constant, ≥ 10m
    pub d: f64,
    sbar: HermiteTable,
}

/// Default D = d(p, q) + 10m.
pub fn default_scale(model: &ShrinkerModel, q: f64) -> f64 {
    libm::fabs(q - model.p()) + 10.0 * model.m() as f64
}

pub fn build_chart(model: &ShrinkerModel, q: f64, d: Option<f64>) -> Result<ConformalChart> {
    let m = model.m();
    if m <= 2 {
        return Err(Error::UnsupportedDimension { m, min: 3 });
    }
    if !model.profile.contains(q) {
        return Err(Error::Domain { what: "chart center", value: q });
    }
    let d = d.unwrap_or_else(|| default_scale(model, q));
    // the default equals 10m at q = p, so the boundary value is admitted
    if !(d >= 10.0 * m as f64) {
        return Err(Error::Domain { what: "scale constant D (needs D ≥ 10m)", value: d });
    }
    let fq = model.potential.f(q);
    let mut chart = ConformalChart {
        base: model.clone(),
        q,
        fq,
        d,
        sbar: HermiteTable { x: Vec::new(), y: Vec::new(), dy: Vec::new() },
    };
    let (lo, hi) = model.profile.domain;
    let n = SBAR_INTERVALS;
    let h = (hi - lo) / n as f64;
    let mut x = Vec::with_capacity(n + 1);
    let mut y = Vec::with_capacity(n + 1);
    let mut dy = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    for i in 0..=n {
        let xi = if i == n { hi } else { lo + h * i as f64 };
        if i > 0 {
            let x0 = x[i - 1];
            acc += (0..5).map(|k| GL_W[k] * chart.factor(x0 + GL_X[k] * (xi - x0))).sum::<f64>() * (xi - x0);
        }
        x.push(xi);
        y.push(acc);
        dy.push(chart.factor(xi));
    }
    chart.sbar = HermiteTable { x, y, dy };
    Ok(chart)
}

impl ConformalChart {
    pub fn m(&self) -> usize {
        self.base.m()
    }

    fn k(&self) -> f64 {
        1.0 / (self.m() as f64 - 2.0)
    }

    /// f̄ = f − f(q)
    pub fn fbar(&self, s: f64) -> f64 {
        self.base.potential.f(s) - self.fq
    }

    /// w = −f̄/(m−2), so ḡ = e^{2w} g
    pub fn w(&self, s: f64) -> f64 {
        -self.fbar(s) * self.k()
    }

    /// e^w, the length distortion factor at s
    pub fn factor(&self, s: f64) -> f64 {
        libm::exp(self.w(s))
    }

    /// s̄(s) = ∫ e^w ds from the lower end of the domain
    pub fn sbar(&self, s: f64) -> f64 {
        self.sbar.eval(s)
    }

    /// Inverse of `sbar`.
    pub fn s_of_sbar(&self, v: f64) -> f64 {
        let (lo, hi) = self.base.profile.domain;
        let mut x = self.sbar.inverse_guess(v);
        for _ in 0..8 {
            let r = self.sbar.eval(x) - v;
            let step = r / self.factor(x);
            x = (x - step).clamp(lo, hi);
            if libm::fabs(step) <= 1e-15 * (1.0 + libm::fabs(x)) {
                break;
            }
        }
        x
    }

    /// φ̄ = e^w φ
    pub fn phibar(&self, s: f64) -> f64 {
        self.factor(s) * self.base.profile.phi(s)
    }

    /// Largest |f̄| over the axis interval [a, b] (clipped to the domain), sampled densely.
    pub fn max_abs_fbar(&self, a: f64, b: f64) -> f64 {
        let (lo, hi) = self.base.profile.domain;
        let (a, b) = (a.max(lo), b.min(hi));
        let mut best = libm::fabs(self.fbar(a)).max(libm::fabs(self.fbar(b)));
        for i in 0..=256 {
            best = best.max(libm::fabs(self.fbar(a + (b - a) * i as f64 / 256.0)));
        }
        best
    }

    /// Axis interval {s : |s̄(s) − s̄(q)| < radius}, the s-range of B_ḡ(q, radius).
    pub fn sbar_ball_range(&self, radius: f64) -> (f64, f64) {
        let c = self.sbar(self.q);
        let tot = self.total_axis_length();
        (self.s_of_sbar((c - radius).max(0.0)), self.s_of_sbar((c + radius).min(tot)))
    }
}

impl SliceMetric for ConformalChart {
    fn dim(&self) -> usize {
        self.m()
    }
    fn x_range(&self) -> (f64, f64) {
        self.base.profile.domain
    }
    fn coeffs(&self, x: f64) -> SliceCoeffs {
        let k = self.k();
        let j = self.base.profile.jet(x);
        let f = self.base.potential.jet(x);
        let (w1, w2) = (-f[1] * k, -f[2] * k);
        let e = libm::exp(-(f[0] - self.fq) * k);
        SliceCoeffs {
            a: e,
            da: w1 * e,
            b: e * j[0],
            db: e * (w1 * j[0] + j[1]),
            d2b: e * ((w1 * w1 + w2) * j[0] + 2.0 * w1 * j[1] + j[2]),
        }
    }
    fn caps(&self) -> (bool, bool) {
        self.base.profile.caps
    }
    fn tips(&self) -> (bool, bool) {
        self.base.profile.tips()
    }
    fn axis_length(&self, x: f64) -> f64 {
        self.sbar(x)
    }
    fn axis_point(&self, len: f64) -> f64 {
        self.s_of_sbar(len)
    }
}

/// Ricci eigenvalues of ḡ (radial, spherical) and the ḡ-norm of the tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RicciBar {
    pub s: f64,
    pub rad: f64,
    pub sph: f64,
    pub norm: f64,
}

impl RicciBar {
    fn new(m: usize, s: f64, rad: f64, sph: f64) -> Self {
        let norm = libm::sqrt(rad * rad + (m as f64 - 1.0) * sph * sph);
        Self { s, rad, sph, norm }
    }
}

/// (m−2) R̄c = df⊗df + (m−1−f) e^{2f̄/(m−2)} ḡ, read off in a ḡ-orthonormal frame.
pub fn ricci_bar_formula(chart: &ConformalChart, s: f64) -> RicciBar {
    let m = chart.m();
    let k = chart.k();
    let f = chart.base.potential.jet(s);
    let e2 = libm::exp(2.0 * (f[0] - chart.fq) * k);
    let c = m as f64 - 1.0 - f[0];
    RicciBar::new(m, s, e2 * (f[1] * f[1] + c) * k, e2 * c * k)
}

/// The same eigenvalues from the sectional curvatures of the slice metric of ḡ.
pub fn ricci_direct(chart: &ConformalChart, s: f64) -> RicciBar {
    let c = slice_curvature(chart, s);
    RicciBar::new(chart.m(), s, c.ric_rad, c.ric_sph)
}

/// Largest eigenvalue discrepancy between the two routes over `grid`.
pub fn ricci_crosscheck(chart: &ConformalChart, grid: &[f64]) -> f64 {
    grid.iter()
        .map(|&s| {
            let (a, b) = (ricci_bar_formula(chart, s), ricci_direct(chart, s));
            libm::fabs(a.rad - b.rad).max(libm::fabs(a.sph - b.sph))
        })
        .fold(0.0, f64::max)
}

/// `n` evenly spaced points of [q − half, q + half] clipped to the domain.
pub fn centered_grid(chart: &ConformalChart, half: f64, n: usize) -> Vec<f64> {
    let (lo, hi) = chart.base.profile.domain;
    let (a, b) = ((chart.q - half).max(lo), (chart.q + half).min(hi));
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1).max(1) as f64).collect()
}

/// ((m−1)/(m−2)) (1 + |m−1−f|/√(m−1)) e^{2/(5(m−2))}, valid where |f̄| ≤ 0.1.
pub fn ricci_norm_bound(chart: &ConformalChart, s: f64) -> f64 {
    let mf = chart.m() as f64;
    let f = chart.base.potential.f(s);
    (mf - 1.0) * chart.k() * (1.0 + libm::fabs(mf - 1.0 - f) / libm::sqrt(mf - 1.0)) * libm::exp(0.4 * chart.k())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureBoundReport {
    pub r: f64,
    /// radius r/(10D) of the ḡ-ball
    pub radius: f64,
    pub samples: usize,
    pub max_norm: f64,
    pub d_squared: f64,
    /// smallest slack of the explicit bound among samples with |f̄| ≤ 0.1
    pub explicit_bound_margin: f64,
    pub pass: bool,
}

/// |R̄c|_ḡ < D² at sampled points of B_ḡ(q, r/(10D)).
pub fn curvature_bound_check(chart: &ConformalChart, r: f64, samples: usize) -> Result<CurvatureBoundReport> {
    check_radius(chart, r)?;
    let radius = r / (10.0 * chart.d);
    let (a, b) = chart.sbar_ball_range(radius);
    let mut max_norm = 0.0_f64;
    let mut margin = f64::INFINITY;
    for i in 0..samples {
        let s = a + (b - a) * (i as f64 + 0.5) / samples as f64;
        let rc = ricci_bar_formula(chart, s);
        max_norm = max_norm.max(rc.norm);
        if libm::fabs(chart.fbar(s)) <= 0.1 {
            margin = margin.min(ricci_norm_bound(chart, s) - rc.norm);
        }
    }
    let d_squared = chart.d * chart.d;
    Ok(CurvatureBoundReport {
        r,
        radius,
        samples,
        max_norm,
        d_squared,
        explicit_bound_margin: margin,
        pass: max_norm < d_squared && margin >= 0.0,
    })
}

fn check_radius(chart: &ConformalChart, r: f64) -> Result<()> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::Domain { what: "radius r (needs 0 < r ≤ 1)", value: r });
    }
    if libm::fabs(chart.q - chart.base.p()) + r >= chart.d {
        return Err(Error::Domain { what: "B(q, r) must lie in B(p, D)", value: r });
    }
    Ok(())
}

fn distortion_exponent(chart: &ConformalChart, r: f64) -> f64 {
    libm::exp(chart.d * r * chart.k())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SandwichReport {
    pub r: f64,
    /// e^{Dr/(m−2)}
    pub factor: f64,
    /// min over samples of e^{Dr/(m−2)} − d̄/d
    pub outer_margin: f64,
    /// min over samples of d̄/d − e^{−Dr/(m−2)}
    pub inner_margin: f64,
    pub samples: usize,
    pub pass: bool,
}

/// B_ḡ(q, e^{−Dr/(m−2)} r) ⊆ B(q, r) ⊆ B_ḡ(q, e^{Dr/(m−2)} r).
///
/// Both inclusions follow from e^{−Dr/(m−2)} d(q, x) ≤ d_ḡ(q, x) ≤ e^{Dr/(m−2)} d(q, x) on
/// the closed ball B(q, r), which is what is sampled: along the axis, and along g-geodesics
/// leaving q in eight directions when q is not a pole.
pub fn ball_sandwich_check(chart: &ConformalChart, r: f64) -> Result<SandwichReport> {
    check_radius(chart, r)?;
    let factor = distortion_exponent(chart, r);
    let g = &chart.base.profile;
    let (lo, hi) = g.domain;
    let q = chart.q;
    let mut ratios = Vec::new();
    for k in 1..=8 {
        let t = r * k as f64 / 8.0;
        for s in [q - t, q + t] {
            if s >= lo && s <= hi {
                ratios.push(libm::fabs(chart.sbar(s) - chart.sbar(q)) / t);
            }
        }
    }
    if pole_side(g, q).is_none() {
        for j in 0..8 {
            let beta = PI * (j as f64 + 0.5) / 8.0;
            for k in 1..=4 {
                let t = r * k as f64 / 4.0;
                let (s, th) = exp_slice(g, q, beta, t).ok_or(Error::Range { what: "geodesic left the model", value: t })?;
                let d = slice_distance(g, q, s, th)?;
                let db = slice_distance(chart, q, s, th)?;
                ratios.push(db / d);
            }
        }
    }
    let outer = ratios.iter().map(|&x| factor - x).fold(f64::INFINITY, f64::min);
    let inner = ratios.iter().map(|&x| x - 1.0 / factor).fold(f64::INFINITY, f64::min);
    Ok(SandwichReport {
        r,
        factor,
        outer_margin: outer,
        inner_margin: inner,
        samples: ratios.len(),
        pass: outer >= 0.0 && inner >= 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistortionReport {
    pub r: f64,
    pub factor: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub pairs: usize,
    pub pass: bool,
}

/// Tangent vector of length < radius from a point of the unit cube.
fn cube_to_ball(u: &[f64], dim: usize, radius: f64) -> [f64; 3] {
    let t = radius * libm::pow(u[0], 1.0 / dim as f64);
    if dim == 2 {
        let a = 2.0 * PI * u[1];
        [t * libm::cos(a), t * libm::sin(a), 0.0]
    } else {
        let z = 2.0 * u[1] - 1.0;
        let rr = libm::sqrt((1.0 - z * z).max(0.0));
        let a = 2.0 * PI * u[2];
        [t * z, t * rr * libm::cos(a), t * rr * libm::sin(a)]
    }
}

/// e^{−Dr/(m−2)} d(x, y) ≤ d_ḡ(x, y) ≤ e^{Dr/(m−2)} d(x, y) on 64 Halton pairs in B(q, 0.09r).
pub fn distance_distortion_check(chart: &ConformalChart, r: f64) -> Result<DistortionReport> {
    check_radius(chart, r)?;
    let factor = distortion_exponent(chart, r);
    let g = &chart.base.profile;
    let dim = section_dim(g, chart.q);
    let radius = DISTORTION_SAMPLE_RADIUS * r;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
    let mut pairs = 0;
    for i in 1..=DISTORTION_PAIRS as u64 {
        let u = halton::<6>(i);
        let x = section_point(g, chart.q, cube_to_ball(&u[0..3], dim, radius))?;
        let y = section_point(g, chart.q, cube_to_ball(&u[3..6], dim, radius))?;
        let (d, _) = point_distance(g, &x, &y);
        if d < 1e-9 * r {
            continue;
        }
        let (db, _) = point_distance(chart, &x, &y);
        lo = lo.min(db / d);
        hi = hi.max(db / d);
        pairs += 1;
    }
    Ok(DistortionReport { r, factor, min_ratio: lo, max_ratio: hi, pairs, pass: lo >= 1.0 / factor && hi <= factor })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhBoundReport {
    pub rho: f64,
    pub r: f64,
    /// ρ < r/D
    pub hypothesis: bool,
    pub budget: f64,
    /// ½ distortion of the identity on a point net (module gh)
    pub net_upper: f64,
    pub net_points: usize,
    /// largest |d_ḡ − d| over the pair grid
    pub grid_distortion: f64,
    pub grid_pairs: usize,
    /// sup |f̄|/(m−2) near the ball
    pub eta: f64,
    /// discretization plus ball-mismatch slack added to the grid value
    pub slack: f64,
    pub bound: f64,
    pub pass: bool,
}

/// d_GH(B_ḡ(q, ρ), B(q, ρ)) < 2Dρ².
///
/// Any pair in B(q, ρ) is carried by an isometry of both metrics into the section, so
/// |d_ḡ − d| is a function of (s₁, s₂, γ) and its supremum is bounded by a grid maximum
/// plus Lipschitz slack. With η = sup|f̄|/(m−2) on B(q, 2ρ):
///
/// d_GH ≤ ½ sup|d_ḡ − d| + e^η (e^η − 1) ρ,
///
/// the second term moving points between B(q, ρ) and B_ḡ(q, ρ). `fraction` of the budget
/// sizes the grid; more than half the budget in slack is a resolution error.
pub fn gh_bound_check(chart: &ConformalChart, rho: f64, r: f64, fraction: f64) -> Result<GhBoundReport> {
    check_radius(chart, r)?;
    if !(rho > 0.0) {
        return Err(Error::Domain { what: "ball radius rho", value: rho });
    }
    let budget = 2.0 * chart.d * rho * rho;
    let g = &chart.base.profile;
    let q = chart.q;
    let (lo, hi) = g.domain;
    let eta = chart.max_abs_fbar(q - 2.0 * rho, q + 2.0 * rho) * chart.k();
    let ee = libm::exp(eta);
    if ee > 2.0 {
        return Err(Error::Range { what: "conformal factor too large near q", value: eta });
    }
    let mismatch = ee * (ee - 1.0) * rho;
    let allowance = fraction * budget - mismatch;
    if !(allowance > 0.0) {
        return Err(Error::Resolution { slack: mismatch, allowance: fraction * budget });
    }

    // axis range and angle range covering every pair of the ball
    let pole = pole_side(g, q);
    let (s_a, s_b, gamma_hi) = match pole {
        Some(false) => (lo, (lo + rho).min(hi), PI),
        Some(true) => ((hi - rho).max(lo), hi, PI),
        None => {
            let (a, b) = ((q - rho).max(lo), (q + rho).min(hi));
            let bmin = (0..=64).map(|i| g.phi(a + (b - a) * i as f64 / 64.0)).fold(f64::INFINITY, f64::min);
            (a, b, (2.0 * rho / bmin).min(PI))
        }
    };
    let (mut amax, mut bmax, mut bbmax) = (0.0_f64, 0.0_f64, 0.0_f64);
    for i in 0..=64 {
        let s = s_a + (s_b - s_a) * i as f64 / 64.0;
        let c = chart.coeffs(s);
        amax = amax.max(c.a);
        bmax = bmax.max(g.phi(s));
        bbmax = bbmax.max(c.b);
    }
    // |∂_s| ≤ 1 + ā, |∂_γ| ≤ b + b̄; each of the three coordinates gets a third of the slack
    let l_s = 1.0 + amax;
    let l_g = bmax + bbmax;
    let hs = 2.0 * allowance / (3.0 * l_s);
    let hg = 2.0 * allowance / (3.0 * l_g);
    let ns = (libm::ceil((s_b - s_a) / (2.0 * hs)) as usize).max(1);
    let ng = (libm::ceil(gamma_hi / (2.0 * hg)) as usize).max(1);
    let (ds, dg) = ((s_b - s_a) / ns as f64, gamma_hi / ng as f64);
    let mut grid_dis = 0.0_f64;
    let mut grid_pairs = 0;
    for i in 0..=ns {
        let s1 = s_a + ds * i as f64;
        for j in i..=ns {
            let s2 = s_a + ds * j as f64;
            for k in 0..=ng {
                let gamma = dg * k as f64;
                let d = slice_distance(g, s1, s2, gamma)?;
                let db = slice_distance(chart, s1, s2, gamma)?;
                grid_dis = grid_dis.max(libm::fabs(db - d));
                grid_pairs += 1;
            }
        }
    }
    let dis_slack = l_s * ds + l_g * 0.5 * dg;
    let slack = 0.5 * dis_slack + mismatch;
    if slack > 0.5 * budget {
        return Err(Error::Resolution { slack, allowance: 0.5 * budget });
    }
    let bound = 0.5 * grid_dis + slack;

    let region = NetRegion { center: q, radius: rho };
    let (pts, x) = sample_net(g, &chart.base.name, region, 0.5 * rho)?;
    let y = distance_matrix(chart, &pts, Provenance { eps_net: 0.5 * rho, ..x.provenance.clone() })?;
    let net_upper = gh_upper(&x, &y, &Correspondence::identity(pts.len()))?;

    Ok(GhBoundReport {
        rho,
        r,
        hypothesis: rho < r / chart.d,
        budget,
        net_upper,
        net_points: pts.len(),
        grid_distortion: grid_dis,
        grid_pairs,
        eta,
        slack,
        bound,
        pass: bound < budget && net_upper <= bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{make_cylinder, make_gaussian, make_sphere};
    use crate::warped::profile::Potential;

    #[test]
    fn rejects_small_dimension_and_small_scale() {
        let g = make_gaussian(4).unwrap();
        assert!(matches!(build_chart(&g, 0.0, Some(39.0)), Err(Error::Domain { .. })));
        assert!(matches!(build_chart(&g, -1.0, None), Err(Error::Domain { .. })));
        assert_eq!(build_chart(&g, 0.0, None).unwrap().d, 40.0);
        assert_eq!(build_chart(&g, 2.5, None).unwrap().d, 42.5);
    }

    #[test]
    fn gaussian_sbar_matches_erf() {
        let c = build_chart(&make_gaussian(4).unwrap(), 0.0, None).unwrap();
        for s in [0.0, 0.3, 1.0, 2.7, 6.0, 19.0] {
            // ∫₀ˢ e^{−u²/8} du = √(2π) erf(s/√8)
            let e = libm::sqrt(2.0 * PI) * libm::erf(s / libm::sqrt(8.0));
            assert!(libm::fabs(c.sbar(s) - e) < 1e-12, "s={s}: {} vs {e}", c.sbar(s));
            let v = c.sbar(s);
            assert!(libm::fabs(c.sbar(c.s_of_sbar(v)) - v) < 1e-12);
            if c.factor(s) > 1e-6 {
                assert!(libm::fabs(c.s_of_sbar(v) - s) < 1e-8);
            }
        }
    }

    #[test]
    fn sphere_chart_is_the_identity() {
        let sp = make_sphere(4).unwrap();
        let c = build_chart(&sp, 1.0, None).unwrap();
        for s in [0.0, 0.5, 3.0, 7.0] {
            assert!(libm::fabs(c.sbar(s) - s) < 1e-12);
            assert_eq!(c.phibar(s), sp.profile.phi(s));
        }
        let rc = ricci_bar_formula(&c, 2.0);
        assert_eq!((rc.rad, rc.sph), (0.5, 0.5));
    }

    #[test]
    fn zero_potential_returns_the_metric() {
        let mut cyl = make_cylinder(4).unwrap();
        cyl.potential = Potential::constant(0.0, 0.0);
        let c = build_chart(&cyl, 0.0, None).unwrap();
        for s in [-3.0, 0.0, 0.7, 12.0] {
            let k = c.coeffs(s);
            assert_eq!((k.a, k.da, k.b), (1.0, 0.0, cyl.profile.phi(s)));
            assert!(libm::fabs(c.sbar(s) - (s + 40.0)) < 1e-12);
        }
    }

    #[test]
    fn cylinder_profile_example() {
        let c = build_chart(&make_cylinder(4).unwrap(), 0.0, None).unwrap();
        for s in [-1.0, 0.0, 0.4, 2.0] {
            assert!(libm::fabs(c.fbar(s) - s * s / 4.0) < 1e-15);
            assert!(libm::fabs(c.phibar(s) - 2.0 * libm::exp(-s * s / 8.0)) < 1e-14);
        }
    }

    #[test]
    fn formula_values() {
        let c = build_chart(&make_gaussian(4).unwrap(), 0.0, None).unwrap();
        let rc = ricci_bar_formula(&c, 0.0);
        assert_eq!((rc.rad, rc.sph), (1.5, 1.5));
    }

    /// Conformal change of flat R^m by e^{2u}, u = −s²/8 (m = 4): the standard formula
    /// Rc̃ = −(m−2)(∇²u − du⊗du) − (Δu + (m−2)|∇u|²) g, written out by hand.
    #[test]
    fn gaussian_direct_matches_hand_formula() {
        let c = build_chart(&make_gaussian(4).unwrap(), 0.0, None).unwrap();
        for s in [0.2, 1.0, 2.5] {
            let (u1, u2) = (-s / 4.0, -0.25);
            let lap = u2 + 3.0 * u1 / s;
            let grad2 = u1 * u1;
            let rad_g = -2.0 * (u2 - u1 * u1) - (lap + 2.0 * grad2);
            let sph_g = -2.0 * (u1 / s) - (lap + 2.0 * grad2);
            let e = libm::exp(-2.0 * (-s * s / 8.0));
            let d = ricci_direct(&c, s);
            assert!(libm::fabs(d.rad - rad_g * e) < 1e-10, "{} vs {}", d.rad, rad_g * e);
            assert!(libm::fabs(d.sph - sph_g * e) < 1e-10);
        }
    }

    #[test]
    fn crosscheck_examples() {
        let sp = build_chart(&make_sphere(4).unwrap(), 0.0, None).unwrap();
        let grid: Vec<f64> = (0..512).map(|i| 7.6 * i as f64 / 511.0).collect();
        assert!(ricci_crosscheck(&sp, &grid) < 1e-12);
        let ga = build_chart(&make_gaussian(4).unwrap(), 0.0, None).unwrap();
        let grid: Vec<f64> = (0..512).map(|i| 3.0 * i as f64 / 511.0).collect();
        assert!(ricci_crosscheck(&ga, &grid) < 1e-6);
        let cy = build_chart(&make_cylinder(5).unwrap(), 0.0, None).unwrap();
        let grid: Vec<f64> = (0..512).map(|i| -2.0 + 4.0 * i as f64 / 511.0).collect();
        assert!(ricci_crosscheck(&cy, &grid) < 1e-6);
    }

    #[test]
    fn reparametrized_flat_slice_has_euclidean_distances() {
        // the plane as a² dx² + b² dθ² with a = 2, b = 2x
        struct Stretched;
        impl SliceMetric for Stretched {
            fn dim(&self) -> usize {
                4
            }
            fn x_range(&self) -> (f64, f64) {
                (0.0, 10.0)
            }
            fn coeffs(&self, x: f64) -> SliceCoeffs {
                SliceCoeffs { a: 2.0, da: 0.0, b: 2.0 * x, db: 2.0, d2b: 0.0 }
            }
            fn caps(&self) -> (bool, bool) {
                (true, false)
            }
            fn tips(&self) -> (bool, bool) {
                (true, false)
            }
            fn axis_length(&self, x: f64) -> f64 {
                2.0 * x
            }
            fn axis_point(&self, len: f64) -> f64 {
                len / 2.0
            }
        }
        let d = slice_distance(&Stretched, 1.0, 1.5, 0.9).unwrap();
        let e = libm::sqrt(4.0 + 9.0 - 12.0 * libm::cos(0.9));
        assert!(libm::fabs(d - e) < 1e-9, "{d} vs {e}");
    }

    #[test]
    fn sphere_checks_are_exact() {
        let c = build_chart(&make_sphere(4).unwrap(), 1.0, None).unwrap();
        let s = ball_sandwich_check(&c, 0.5).unwrap();
        assert!(s.pass);
        let d = distance_distortion_check(&c, 0.5).unwrap();
        assert!(libm::fabs(d.min_ratio - 1.0) < 1e-9 && libm::fabs(d.max_ratio - 1.0) < 1e-9);
        let g = gh_bound_check(&c, 0.02, 1.0, GH_SLACK_FRACTION).unwrap();
        assert!(g.grid_distortion < 1e-9 && g.net_upper < 1e-9 && g.pass, "{g:?}");
    }

    #[test]
    fn comparison_checks_on_gaussian_and_cylinder() {
        for c in [
            build_chart(&make_gaussian(4).unwrap(), 0.0, None).unwrap(),
            build_chart(&make_cylinder(4).unwrap(), 0.0, None).unwrap(),
        ] {
            for r in [0.1, 0.5] {
                let s = ball_sandwich_check(&c, r).unwrap();
                assert!(s.pass, "{s:?}");
                let d = distance_distortion_check(&c, r).unwrap();
                assert!(d.pass && d.pairs == 64, "{d:?}");
            }
            for r in [0.1, 0.5, 1.0] {
                let k = curvature_bound_check(&c, r, 64).unwrap();
                assert!(k.pass, "{k:?}");
            }
        }
    }

    #[test]
    fn gh_bound_small_ball() {
        let c = build_chart(&make_cylinder(4).unwrap(), 0.0, None).unwrap();
        let g = gh_bound_check(&c, 0.02, 1.0, GH_SLACK_FRACTION).unwrap();
        assert!(g.pass && g.hypothesis, "{g:?}");
        assert!(g.slack <= GH_SLACK_FRACTION * g.budget + 1e-15);
    }
}

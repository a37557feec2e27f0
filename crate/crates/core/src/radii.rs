//! Regularity radii at axis points.
//!
//! Volume, GH and strongly-convex radii, the variants restricted to r < 1/(100D)
//! (plain under g, barred under the conformal chart ḡ), and the Harnack, equivalence
//! and density checks built from them. Every point of a warped model lies on the axis
//! up to an isometry, so all radii are functions of the axis coordinate.

use alloc::vec::Vec;

use crate::catalog::ShrinkerModel;
use crate::conformal::{build_chart, default_scale, ConformalChart};
use crate::error::{Error, Result};
use crate::gh::net::{distance_matrix, section_dim, section_point, tangent_net};
use crate::gh::{gh_upper, Correspondence, FiniteMetricSpace, Provenance};
use crate::num::{simpson, sphere_area, sq, unit_ball_volume};
use crate::warped::geodesic::ray_with_jacobi;
use crate::warped::slice::{curvature_at, sectional, SliceMetric};
use crate::warped::volume::{ball_integral, pole_side, polar_ball_integral, polar_radius_limit, DEFAULT_ANGLE_PANELS};

pub const DEFAULT_DELTA: f64 = 0.05;
pub const DEFAULT_EPS: f64 = 0.01;
/// bisection tolerance for volume and convexity radii
pub const RADIUS_TOL: f64 = 1e-6;
/// GH radius bisection stops at this fraction of the first scan mark
pub const GH_RADIUS_REL_TOL: f64 = 1e-3;
/// net spacing of GH radius nets, relative to the ball radius
pub const GH_NET_FRACTION: f64 = 0.5;
/// floor below which differentiated quantities are not trusted
pub const NOISE_FLOOR: f64 = 1e-6;
pub const DEFAULT_HARNACK_FRACTION: f64 = 0.5;

const VOLUME_SCAN: usize = 64;
const OPEN_END_INSET: f64 = 1e-6;
const GH_SCAN: usize = 8;
/// fine grid cells per 10r in the convexity check
const CONVEX_CELLS: usize = 16;
const DENSITY_NODES: usize = 17;

/// A radius from a sup search. `saturated` means the defining condition still held at
/// the search limit (so `value` is that limit, standing in for +∞ on flat balls).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Radius {
    pub value: f64,
    pub saturated: bool,
}

/// 1/(100 D) with D = d(p, x) + 10m.
pub fn bold_cap(model: &ShrinkerModel, x: f64) -> f64 {
    1.0 / (100.0 * default_scale(model, x))
}

/// Largest radius up to `cap` at which balls around x can be measured in polar
/// coordinates (0 when x sits in the cap zone of a pole).
pub fn search_limit<M: SliceMetric + ?Sized>(g: &M, x: f64, cap: f64) -> Result<f64> {
    let (lo, hi) = g.x_range();
    if !(x >= lo && x <= hi) {
        return Err(Error::Domain { what: "axis point", value: x });
    }
    let full = g.total_axis_length();
    Ok(match pole_side(g, x) {
        Some(upper) => {
            let (tl, th) = g.tips();
            // stay off the cut made by a truncated far end
            let far_closed = if upper { tl } else { th };
            let reach = if far_closed { full } else { full * (1.0 - OPEN_END_INSET) };
            reach.min(cap)
        }
        None => polar_radius_limit(g, x, full.min(cap)),
    })
}

fn require_limit(lim: f64) -> Result<f64> {
    if lim > 0.0 {
        Ok(lim)
    } else {
        Err(Error::Capability("no polar neighbourhood at this point"))
    }
}

/// Lower bound for ω_m^{-1} r^{-m} |B(x, r)| from the largest sectional curvature K on
/// the axis within r of x (Günther), assuming r stays below the injectivity radius.
pub fn comparison_ratio_floor<M: SliceMetric + ?Sized>(g: &M, x: f64, r: f64) -> f64 {
    let k = max_sectional(g, x, r);
    let m = g.dim();
    let sn = |t: f64| {
        if k > 0.0 {
            libm::sin(libm::sqrt(k) * t) / libm::sqrt(k)
        } else if k < 0.0 {
            libm::sinh(libm::sqrt(-k) * t) / libm::sqrt(-k)
        } else {
            t
        }
    };
    let v = sphere_area(m - 1) * simpson(|t| libm::pow(sn(t), (m - 1) as f64), 0.0, r, 1024);
    v / (unit_ball_volume(m) * libm::pow(r, m as f64))
}

/// Sup of r ∈ (0, limit] passing `test`, resolved on `scan` marks and then by bisection
/// between the largest passing mark and its failing successor.
fn sup_radius<F>(mut test: F, limit: f64, scan: usize, tol: f64) -> Result<Radius>
where
    F: FnMut(&[f64]) -> Result<Vec<bool>>,
{
    let marks: Vec<f64> = (1..=scan).map(|i| limit * i as f64 / scan as f64).collect();
    let ok = test(&marks)?;
    if ok[scan - 1] {
        return Ok(Radius { value: limit, saturated: true });
    }
    let last = ok.iter().rposition(|&b| b);
    let (mut lo, mut hi) = match last {
        Some(i) => (marks[i], marks[i + 1]),
        None => (0.0, marks[0]),
    };
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if test(&[mid])?[0] {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Radius { value: 0.5 * (lo + hi), saturated: false })
}

/// Like `sup_radius` for costly monotone tests: the limit is tried first, then marks
/// in increasing order up to the first failure.
fn first_crossing<F>(mut test: F, limit: f64, scan: usize, tol: f64) -> Result<Radius>
where
    F: FnMut(f64) -> Result<bool>,
{
    if test(limit)? {
        return Ok(Radius { value: limit, saturated: true });
    }
    let (mut lo, mut hi) = (0.0, limit);
    for i in 1..scan {
        let r = limit * i as f64 / scan as f64;
        if test(r)? {
            lo = r;
        } else {
            hi = r;
            break;
        }
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if test(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Radius { value: 0.5 * (lo + hi), saturated: false })
}

/// ω_m^{-1} r^{-m} |B(x, r)| at increasing radii.
pub fn volume_ratios<M: SliceMetric + ?Sized>(g: &M, x: f64, radii: &[f64]) -> Result<Vec<f64>> {
    let m = g.dim();
    let norm = |r: f64| unit_ball_volume(m) * libm::pow(r, m as f64);
    if pole_side(g, x).is_some() {
        radii.iter().map(|&r| Ok(ball_integral(g, x, r, &|_| 1.0)? / norm(r))).collect()
    } else {
        let v = polar_ball_integral(g, x, radii, &|_| 1.0, DEFAULT_ANGLE_PANELS)?;
        Ok(v.iter().zip(radii).map(|(v, &r)| v / norm(r)).collect())
    }
}

fn volume_sup<M: SliceMetric + ?Sized>(g: &M, x: f64, floor: f64, strict: bool, limit: f64) -> Result<Radius> {
    sup_radius(
        |rs| {
            let v = volume_ratios(g, x, rs)?;
            Ok(v.iter().map(|&q| if strict { q > floor } else { q >= floor }).collect())
        },
        limit,
        VOLUME_SCAN,
        RADIUS_TOL,
    )
}

/// vr_δ(x): sup of r with ω_m^{-1} r^{-m} |B(x, r)| > 1 − δ.
pub fn volume_radius<M: SliceMetric + ?Sized>(g: &M, x: f64, delta: f64) -> Result<Radius> {
    check_unit("δ", delta)?;
    volume_sup(g, x, 1.0 - delta, true, require_limit(search_limit(g, x, f64::INFINITY)?)?)
}

/// Same search restricted to r < cap with the non-strict ≥ 1 − δ. Where polar
/// coordinates do not reach the cap (near a pole) the comparison floor decides, and
/// only a certified pass is accepted.
pub fn capped_volume_radius<M: SliceMetric + ?Sized>(g: &M, x: f64, delta: f64, cap: f64) -> Result<f64> {
    check_unit("δ", delta)?;
    let lim = search_limit(g, x, cap)?;
    if lim < cap {
        if comparison_ratio_floor(g, x, cap) >= 1.0 - delta {
            return Ok(cap);
        }
        return Err(Error::Capability("volume near a pole not certified by comparison"));
    }
    Ok(volume_sup(g, x, 1.0 - delta, false, lim)?.value)
}

fn check_unit(what: &'static str, v: f64) -> Result<()> {
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::Domain { what, value: v });
    }
    Ok(())
}

/// r^{-1} times the identity-correspondence GH upper bound between exp-map nets of
/// B(x, r) and of the Euclidean ball, with net spacing `fraction`·r. The fallback
/// tolerance of any graph distances is added.
pub fn gh_normalized<M: SliceMetric + ?Sized>(g: &M, x: f64, r: f64, fraction: f64) -> Result<f64> {
    let dim = section_dim(g, x);
    let tv = tangent_net(dim, r, fraction * r);
    let pts = tv.iter().map(|&v| section_point(g, x, v)).collect::<Result<Vec<_>>>()?;
    let model = distance_matrix(g, &pts, Provenance::default())?;
    let n = tv.len();
    let mut d = alloc::vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            d[i * n + j] = libm::sqrt(sq(tv[i][0] - tv[j][0]) + sq(tv[i][1] - tv[j][1]) + sq(tv[i][2] - tv[j][2]));
        }
    }
    let flat = FiniteMetricSpace::with_tolerance(n, d, 0, Provenance::default(), 1e-12 * r.max(1.0))?;
    let up = gh_upper(&model, &flat, &Correspondence::identity(n))?;
    Ok((up + 0.5 * model.fallback_tolerance) / r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhRadius {
    pub radius: Radius,
    /// normalized bound at the returned radius
    pub bound: f64,
    /// change of the normalized bound when the net is made twice as coarse
    pub slack: f64,
}

fn gh_sup<M: SliceMetric + ?Sized>(g: &M, x: f64, threshold: f64, limit: f64, fraction: f64) -> Result<GhRadius> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Domain { what: "net resolution", value: fraction });
    }
    let tol = GH_RADIUS_REL_TOL * limit / GH_SCAN as f64;
    let radius = first_crossing(|r| Ok(gh_normalized(g, x, r, fraction)? < threshold), limit, GH_SCAN, tol)?;
    let r = radius.value;
    let bound = gh_normalized(g, x, r, fraction)?;
    let coarse = gh_normalized(g, x, r, (2.0 * fraction).min(1.0))?;
    let slack = libm::fabs(bound - coarse);
    if slack > 0.5 * threshold {
        return Err(Error::Resolution { slack, allowance: 0.5 * threshold });
    }
    Ok(GhRadius { radius, bound, slack })
}

/// gr_ε(x) with nets of spacing `fraction`·r.
pub fn gh_radius<M: SliceMetric + ?Sized>(g: &M, x: f64, eps: f64, fraction: f64) -> Result<GhRadius> {
    check_unit("ε", eps)?;
    let lim = require_limit(search_limit(g, x, f64::INFINITY)?)?;
    gh_sup(g, x, eps, lim.min(curvature_scale(g, x, lim)), fraction)
}

/// π/(2√K) for the largest sectional curvature K on the axis within `reach` of x
/// (+∞ when K ≤ 0).
pub fn curvature_scale<M: SliceMetric + ?Sized>(g: &M, x: f64, reach: f64) -> f64 {
    let k = max_sectional(g, x, reach);
    if k > 0.0 {
        0.5 * core::f64::consts::PI / libm::sqrt(k)
    } else {
        f64::INFINITY
    }
}

fn max_sectional<M: SliceMetric + ?Sized>(g: &M, x: f64, reach: f64) -> f64 {
    let (lo, hi) = g.x_range();
    let l0 = g.axis_length(x);
    let tot = g.total_axis_length();
    let n = 64;
    let mut k = f64::NEG_INFINITY;
    for i in 0..=n {
        let len = (l0 - reach + 2.0 * reach * i as f64 / n as f64).clamp(0.0, tot);
        let (a, b) = sectional(g, g.axis_point(len).clamp(lo, hi));
        k = k.max(a).max(b);
    }
    k
}

pub fn capped_gh_radius<M: SliceMetric + ?Sized>(g: &M, x: f64, eps: f64, cap: f64, fraction: f64) -> Result<GhRadius> {
    check_unit("ε", eps)?;
    gh_sup(g, x, eps, require_limit(search_limit(g, x, cap)?)?, fraction)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Marginal,
    Fail,
}

impl Verdict {
    /// Within a factor 10 of the threshold on either side is marginal.
    pub fn classify(value: f64, threshold: f64) -> Self {
        if value < 0.1 * threshold {
            Verdict::Pass
        } else if value > 10.0 * threshold {
            Verdict::Fail
        } else {
            Verdict::Marginal
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexReport {
    pub x: f64,
    pub r: f64,
    /// sup|h − δ|, then r^k Σ_{|β|=k} sup|∂^β h| for k = 1..5
    pub terms: [f64; 6],
    pub value: f64,
    /// Richardson estimate of the differentiation error in `value`
    pub error: f64,
    pub threshold: f64,
    pub below: bool,
    pub verdict: Verdict,
}

/// Central second-order stencils for derivatives of order 0..=5 (offsets −3..=3).
const STENCILS: [[f64; 7]; 6] = [
    [0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, -0.5, 0.0, 0.5, 0.0, 0.0],
    [0.0, 0.0, 1.0, -2.0, 1.0, 0.0, 0.0],
    [0.0, -0.5, 1.0, 0.0, -1.0, 0.5, 0.0],
    [0.0, 1.0, -4.0, 6.0, -4.0, 1.0, 0.0],
    [-0.5, 2.0, -2.5, 0.0, 2.5, -2.0, 0.5],
];

/// h − δ at w in the plane through the axis direction: components (11, 12, 22) of the
/// planar block and the common value on the normal directions.
fn pullback_defect<M: SliceMetric + ?Sized>(g: &M, x: f64, w: [f64; 2]) -> Result<[f64; 4]> {
    let t = libm::hypot(w[0], w[1]);
    if t == 0.0 {
        return Ok([0.0; 4]);
    }
    let (psi_in, psi_perp) = match pole_side(g, x) {
        Some(upper) => {
            let tot = g.total_axis_length();
            let xt = g.axis_point(if upper { tot - t } else { t });
            let p = g.coeffs(xt).b / t;
            (p, p)
        }
        None => {
            let beta = libm::atan2(libm::fabs(w[1]), w[0]);
            let ray = ray_with_jacobi(g, x, beta, &[t], &|_| 1.0)[0];
            if !ray.valid {
                return Err(Error::Range { what: "convexity ball beyond injectivity", value: t });
            }
            (ray.j_in / t, ray.j_perp / t)
        }
    };
    let eta = psi_in * psi_in - 1.0;
    let (u0, u1) = (w[0] / t, w[1] / t);
    Ok([eta * u1 * u1, -eta * u0 * u1, eta * u0 * u0, psi_perp * psi_perp - 1.0])
}

/// Evaluates the strongly-convex expression of the pullback h = exp_x^* g on B(0, 10r).
///
/// h is sampled in the two-dimensional plane spanned by the axis and one normal
/// direction; multi-index derivatives are taken in that plane by central differences
/// at steps k and k/2 and combined by Richardson extrapolation.
pub fn convex_radius_check<M: SliceMetric + ?Sized>(g: &M, x: f64, r: f64) -> Result<ConvexReport> {
    if !(r > 0.0) {
        return Err(Error::Domain { what: "convexity radius", value: r });
    }
    let big = 10.0 * r;
    let e = big / CONVEX_CELLS as f64;
    let k = 2.0 * e;
    let reach = big + 3.0 * k * core::f64::consts::SQRT_2;
    let lim = require_limit(search_limit(g, x, f64::INFINITY)?)?;
    let closed_far = match pole_side(g, x) {
        Some(upper) => {
            let (tl, th) = g.tips();
            if upper { tl } else { th }
        }
        None => false,
    };
    if reach > lim || (closed_far && reach >= lim) {
        return Err(Error::Range { what: "10r (with stencil reach) beyond injectivity", value: big });
    }
    let half = CONVEX_CELLS as i64 + 6;
    let side = (2 * half + 1) as usize;
    let mut h = alloc::vec![[f64::NAN; 4]; side * side];
    for i in 0..side {
        for j in 0..side {
            let w = [(i as i64 - half) as f64 * e, (j as i64 - half) as f64 * e];
            if libm::hypot(w[0], w[1]) <= reach * (1.0 + 1e-12) {
                h[i * side + j] = pullback_defect(g, x, w)?;
            }
        }
    }
    let deriv = |i: usize, j: usize, a: usize, b: usize, q: i64| -> [f64; 4] {
        let mut acc = [0.0; 4];
        for p in -3..=3i64 {
            let ca = STENCILS[a][(p + 3) as usize];
            if ca == 0.0 {
                continue;
            }
            for s in -3..=3i64 {
                let cb = STENCILS[b][(s + 3) as usize];
                if cb == 0.0 {
                    continue;
                }
                let ii = (i as i64 + q * p) as usize;
                let jj = (j as i64 + q * s) as usize;
                let v = h[ii * side + jj];
                for c in 0..4 {
                    acc[c] += ca * cb * v[c];
                }
            }
        }
        let step = libm::pow(q as f64 * e, (a + b) as f64);
        acc.map(|v| v / step)
    };
    let centers: Vec<(usize, usize)> = (0..side)
        .flat_map(|i| (0..side).map(move |j| (i, j)))
        .filter(|&(i, j)| {
            let w = [(i as i64 - half) as f64 * e, (j as i64 - half) as f64 * e];
            libm::hypot(w[0], w[1]) <= big * (1.0 + 1e-12)
        })
        .collect();
    let mut terms = [0.0; 6];
    let mut err = 0.0;
    terms[0] = centers
        .iter()
        .map(|&(i, j)| h[i * side + j].iter().fold(0.0_f64, |a, v| a.max(libm::fabs(*v))))
        .fold(0.0, f64::max);
    for order in 1..=5usize {
        let mut sum = 0.0;
        let mut sum_err = 0.0;
        for a in 0..=order {
            let b = order - a;
            let (mut sup, mut sup_err) = (0.0_f64, 0.0_f64);
            for &(i, j) in &centers {
                let fine = deriv(i, j, a, b, 1);
                let coarse = deriv(i, j, a, b, 2);
                for c in 0..4 {
                    sup = sup.max(libm::fabs((4.0 * fine[c] - coarse[c]) / 3.0));
                    sup_err = sup_err.max(libm::fabs(fine[c] - coarse[c]) / 3.0);
                }
            }
            sum += sup;
            sum_err += sup_err;
        }
        let rk = libm::pow(r, order as f64);
        terms[order] = rk * sum;
        err += rk * sum_err;
    }
    let value: f64 = terms.iter().sum();
    let threshold = libm::pow(10.0, -(g.dim() as f64));
    Ok(ConvexReport {
        x,
        r,
        terms,
        value,
        error: err,
        threshold,
        below: value < threshold,
        verdict: Verdict::classify(value, threshold),
    })
}

fn convex_sup<M: SliceMetric + ?Sized>(g: &M, x: f64, limit: f64) -> Result<Radius> {
    first_crossing(|r| Ok(convex_radius_check(g, x, r)?.below), limit, 1, RADIUS_TOL)
}

/// Largest r whose convexity stencils stay inside the polar neighbourhood.
pub fn convex_limit<M: SliceMetric + ?Sized>(g: &M, x: f64) -> Result<f64> {
    let per_r = 10.0 * (1.0 + 6.0 * core::f64::consts::SQRT_2 / CONVEX_CELLS as f64);
    Ok(require_limit(search_limit(g, x, f64::INFINITY)?)? / per_r * (1.0 - 1e-9))
}

/// sr(x): sup of r whose expression stays below 10^{-m}.
pub fn convex_radius<M: SliceMetric + ?Sized>(g: &M, x: f64) -> Result<Radius> {
    convex_sup(g, x, convex_limit(g, x)?)
}

pub fn capped_convex_radius<M: SliceMetric + ?Sized>(g: &M, x: f64, cap: f64) -> Result<f64> {
    Ok(convex_sup(g, x, convex_limit(g, x)?.min(cap))?.value)
}

/// The three capped radii at one point, in the order (vr, gr, sr).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoldRadii {
    pub vr: f64,
    pub gr: f64,
    pub sr: f64,
}

impl BoldRadii {
    fn as_array(&self) -> [f64; 3] {
        [self.vr, self.gr, self.sr]
    }
}

/// Capped radii under g: thresholds δ/100 and ε/100.
pub fn bold_radii(model: &ShrinkerModel, x: f64, delta: f64, eps: f64) -> Result<BoldRadii> {
    let cap = bold_cap(model, x);
    let g = &model.profile;
    Ok(BoldRadii {
        vr: capped_volume_radius(g, x, delta / 100.0, cap)?,
        gr: capped_gh_radius(g, x, eps / 100.0, cap, GH_NET_FRACTION)?.radius.value,
        sr: capped_convex_radius(g, x, cap)?,
    })
}

/// Capped radii under the chart ḡ centred at q with its own D: thresholds δ and ε.
pub fn bold_radii_bar(chart: &ConformalChart, delta: f64, eps: f64) -> Result<BoldRadii> {
    let cap = 1.0 / (100.0 * chart.d);
    let x = chart.q;
    Ok(BoldRadii {
        vr: capped_volume_radius(chart, x, delta, cap)?,
        gr: capped_gh_radius(chart, x, eps, cap, GH_NET_FRACTION)?.radius.value,
        sr: capped_convex_radius(chart, x, cap)?,
    })
}

pub fn bold_vr(model: &ShrinkerModel, x: f64, delta: f64) -> Result<f64> {
    capped_volume_radius(&model.profile, x, delta / 100.0, bold_cap(model, x))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadiiReport {
    pub point: f64,
    pub delta: f64,
    pub eps: f64,
    pub vr: Radius,
    pub gr: GhRadius,
    pub sr: Radius,
    pub cap: f64,
    pub bold: BoldRadii,
    /// |Rm|^{-1/2}; None on flat points
    pub rm_scale: Option<f64>,
}

pub fn radii_report(model: &ShrinkerModel, x: f64, delta: f64, eps: f64) -> Result<RadiiReport> {
    let g = &model.profile;
    let rm = curvature_at(g, x)?.norm_rm;
    Ok(RadiiReport {
        point: x,
        delta,
        eps,
        vr: volume_radius(g, x, delta)?,
        gr: gh_radius(g, x, eps, GH_NET_FRACTION)?,
        sr: convex_radius(g, x)?,
        cap: bold_cap(model, x),
        bold: bold_radii(model, x, delta, eps)?,
        rm_scale: if rm > 0.0 { Some(1.0 / libm::sqrt(rm)) } else { None },
    })
}

/// Axis coordinates of points of B(x, ρ), evenly spread (excluding x itself).
fn ball_axis_samples(model: &ShrinkerModel, x: f64, rho: f64, n: usize) -> Vec<f64> {
    let g = &model.profile;
    let (lo, hi) = g.domain;
    match pole_side(g, x) {
        Some(upper) => (1..=n)
            .map(|i| {
                let t = rho * i as f64 / n as f64;
                if upper { hi - t } else { lo + t }
            })
            .collect(),
        None => (1..=n)
            .map(|i| -rho + 2.0 * rho * i as f64 / n as f64)
            .filter(|&d| d != 0.0)
            .map(|d| (x + d).clamp(lo, hi))
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarnackReport {
    pub x: f64,
    pub r: f64,
    pub fraction: f64,
    /// (axis coordinate, capped volume radius) of the sampled neighbours
    pub samples: Vec<(f64, f64)>,
    /// min over samples of min(vr(y)/r, r/vr(y))
    pub c_emp: f64,
    pub pass: bool,
}

/// c·r < vr(y) < r/c for y ∈ B(x, c·r), r = vr(x), using the capped volume radius.
pub fn harnack_check(model: &ShrinkerModel, x: f64, fraction: f64, delta: f64) -> Result<HarnackReport> {
    check_unit("Harnack fraction", fraction)?;
    let r = bold_vr(model, x, delta)?;
    let mut samples = Vec::new();
    let mut c_emp = f64::INFINITY;
    for y in ball_axis_samples(model, x, fraction * r, 8) {
        let v = bold_vr(model, y, delta)?;
        c_emp = c_emp.min((v / r).min(r / v));
        samples.push((y, v));
    }
    Ok(HarnackReport { x, r, fraction, samples, c_emp, pass: c_emp > fraction })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceRow {
    pub x: f64,
    pub g: BoldRadii,
    pub gbar: BoldRadii,
    /// vr/gr, vr/sr, gr/sr under g, the same under ḡ, then g/ḡ for vr, gr, sr
    pub ratios: [f64; 9],
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub model: alloc::string::String,
    pub rows: Vec<EquivalenceRow>,
    /// min over all ratios of min(ratio, 1/ratio)
    pub c_emp: f64,
    pub finite: bool,
}

pub fn equivalence_row(model: &ShrinkerModel, x: f64, delta: f64, eps: f64) -> Result<EquivalenceRow> {
    let g = bold_radii(model, x, delta, eps)?;
    let chart = build_chart(model, x, None)?;
    let gbar = bold_radii_bar(&chart, delta, eps)?;
    let (a, b) = (g.as_array(), gbar.as_array());
    let ratios = [
        a[0] / a[1],
        a[0] / a[2],
        a[1] / a[2],
        b[0] / b[1],
        b[0] / b[2],
        b[1] / b[2],
        a[0] / b[0],
        a[1] / b[1],
        a[2] / b[2],
    ];
    Ok(EquivalenceRow { x, g, gbar, ratios })
}

pub fn equivalence_report(model: &ShrinkerModel, points: &[f64], delta: f64, eps: f64) -> Result<EquivalenceReport> {
    let rows = points.iter().map(|&x| equivalence_row(model, x, delta, eps)).collect::<Result<Vec<_>>>()?;
    Ok(summarize_equivalence(model, rows))
}

/// Folds rows computed elsewhere (e.g. in parallel) into a report.
pub fn summarize_equivalence(model: &ShrinkerModel, rows: Vec<EquivalenceRow>) -> EquivalenceReport {
    let all = rows.iter().flat_map(|r| r.ratios.iter().copied());
    let finite = rows.iter().all(|r| r.ratios.iter().all(|v| v.is_finite() && *v > 0.0));
    let c_emp = all.fold(f64::INFINITY, |c, v| c.min(v.min(1.0 / v)));
    EquivalenceReport { model: model.name.clone(), rows, c_emp, finite }
}

/// Normalized integral r^{−2θ+4−m} ∫_{B(x,r)} vr^{2θ−4} dv with the capped
/// volume radius standing in for the harmonic radius.
pub fn density_integral(model: &ShrinkerModel, x: f64, r: f64, theta: f64, delta: f64) -> Result<f64> {
    check_unit("θ", theta)?;
    if !(r > 0.0) {
        return Err(Error::Domain { what: "ball radius", value: r });
    }
    let g = &model.profile;
    let (lo, hi) = g.domain;
    let (a, b) = match pole_side(g, x) {
        Some(false) => (lo, (lo + r).min(hi)),
        Some(true) => ((hi - r).max(lo), hi),
        None => ((x - r).max(lo), (x + r).min(hi)),
    };
    // the capped radius divided by its cap, tabulated and interpolated linearly
    let nodes: Vec<f64> = (0..DENSITY_NODES).map(|i| (a + (b - a) * i as f64 / (DENSITY_NODES - 1) as f64).min(b)).collect();
    let frac = nodes
        .iter()
        .map(|&s| Ok(bold_vr(model, s, delta)? / bold_cap(model, s)))
        .collect::<Result<Vec<f64>>>()?;
    let expo = 2.0 * theta - 4.0;
    let integrand = |s: f64| {
        let u = if b > a { ((s - a) / (b - a) * (DENSITY_NODES - 1) as f64).clamp(0.0, (DENSITY_NODES - 1) as f64) } else { 0.0 };
        let i = (libm::floor(u) as usize).min(DENSITY_NODES - 2);
        let t = u - i as f64;
        let q = frac[i] * (1.0 - t) + frac[i + 1] * t;
        libm::pow(q * bold_cap(model, s), expo)
    };
    let v = ball_integral(g, x, r, &integrand)?;
    Ok(libm::pow(r, -expo - model.m() as f64) * v)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityReport {
    pub x: f64,
    pub r: f64,
    pub theta: f64,
    pub value: f64,
    pub value_half: f64,
    /// log₂ of value / value_half
    pub exponent: f64,
    /// 4 − 2θ, the exponent of a bounded integrand
    pub expected: f64,
    pub pass: bool,
}

pub const DENSITY_EXPONENT_TOL: f64 = 0.05;

pub fn density_check(model: &ShrinkerModel, x: f64, r: f64, theta: f64, delta: f64) -> Result<DensityReport> {
    let value = density_integral(model, x, r, theta, delta)?;
    let value_half = density_integral(model, x, 0.5 * r, theta, delta)?;
    let exponent = libm::log2(value / value_half);
    let expected = 4.0 - 2.0 * theta;
    let pass = value.is_finite() && value_half.is_finite() && libm::fabs(exponent - expected) < DENSITY_EXPONENT_TOL;
    Ok(DensityReport { x, r, theta, value, value_half, exponent, expected, pass })
}

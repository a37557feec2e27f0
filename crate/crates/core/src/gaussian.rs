//! The Gaussian shrinker compressed by the global factor e^{-2f/(m-2)}.
//!
//! In the arclength s of the compressed metric, s = ∫_r^∞ e^{-βρ²/2} dρ with
//! β = 1/(2(m-2)), so s = 0 is the point at infinity and the origin sits at
//! s(0) = √(π/(2β)). The profile is φ(s) = A(as)B(as)/a with a = √(2β/π),
//! A = erfc⁻¹ and B = (2/√π)e^{-A²}.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::num::{bisect, d1_5pt, d2_5pt, PI};
use crate::special::{erfc, erfc_inv_unchecked, erfc_inverse, FRAC_2_SQRT_PI};
use crate::warped::geodesic::{graph_distance, wrap_family, GraphGrid, PathOptions};
use crate::warped::profile::{Shape, WarpedProfile};

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// φ and five derivatives. With y = A(as), each s-derivative maps p(y)e^{ky²} to
/// κ(p' + 2kyp)e^{(k+1)y²}, κ = -a√π/2.
pub(crate) fn profile_jet(beta: f64, s: f64) -> [f64; 6] {
    let a = libm::sqrt(2.0 * beta / PI);
    let x = a * s;
    if x == 0.0 {
        // the point at infinity: φ → 0 with φ' → ∞
        return [0.0, f64::INFINITY, f64::NEG_INFINITY, f64::NAN, f64::NAN, f64::NAN];
    }
    if !(x > 0.0 && x < 2.0) {
        return [f64::NAN; 6];
    }
    let y = erfc_inv_unchecked(x);
    let kappa = -a * SQRT_PI / 2.0;
    let mut p = [0.0_f64; 8];
    p[1] = 2.0 / (a * SQRT_PI);
    let mut k = -1.0;
    let eval = |p: &[f64; 8]| p.iter().rev().fold(0.0, |acc, c| acc * y + c);
    let mut out = [0.0; 6];
    out[0] = eval(&p) * libm::exp(k * y * y);
    for slot in out.iter_mut().skip(1) {
        let mut q = [0.0; 8];
        for i in 0..8 {
            if i + 1 < 8 {
                q[i] += (i + 1) as f64 * p[i + 1];
            }
            if i >= 1 {
                q[i] += 2.0 * k * p[i - 1];
            }
        }
        for c in q.iter_mut() {
            *c *= kappa;
        }
        p = q;
        k += 1.0;
        *slot = eval(&p) * libm::exp(k * y * y);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConformalGaussian {
    pub m: usize,
    pub beta: f64,
    pub a: f64,
    /// arclength of the origin, √(π/(2β))
    pub s_origin: f64,
    /// largest s₀ with φ ≥ s on [0, s₀]
    pub s0: f64,
    pub profile: WarpedProfile,
}

impl ConformalGaussian {
    pub fn new(m: usize) -> Result<Self> {
        if m < 3 {
            return Err(Error::UnsupportedDimension { m, min: 3 });
        }
        let beta = 1.0 / (2.0 * (m as f64 - 2.0));
        let a = libm::sqrt(2.0 * beta / PI);
        let s_origin = 1.0 / a;
        let profile = WarpedProfile {
            m,
            domain: (0.0, s_origin),
            caps: (false, true),
            shape: Shape::ConformalGaussian { beta },
        };
        let s_star = erfc(core::f64::consts::FRAC_1_SQRT_2) / a;
        let s0 = bisect(|s| profile.phi(s) - s, s_star, s_origin * (1.0 - 1e-12), 1e-13)?;
        Ok(Self { m, beta, a, s_origin, s0, profile })
    }

    /// s(r) = ∫_r^∞ e^{-βρ²/2} dρ
    pub fn s_of_r(&self, r: f64) -> f64 {
        erfc(r * libm::sqrt(self.beta / 2.0)) / self.a
    }

    /// Euclidean radius of the point at arclength s.
    pub fn r_of_s(&self, s: f64) -> Result<f64> {
        let t = erfc_inverse(self.a * s)?;
        Ok(libm::sqrt(2.0 / self.beta) * t.a)
    }

    pub fn phi(&self, s: f64) -> f64 {
        self.profile.phi(s)
    }

    /// φ' from the closed form 2A(as)² − 1.
    pub fn phi_prime_closed(&self, s: f64) -> f64 {
        let y = erfc_inv_unchecked(self.a * s);
        2.0 * y * y - 1.0
    }

    /// Critical point of φ: A(as*) = 1/√2.
    pub fn s_star(&self) -> f64 {
        erfc(core::f64::consts::FRAC_1_SQRT_2) / self.a
    }

    /// Ten ε values (s₀/4)·k/11, k = 1..10.
    pub fn eps_grid(&self) -> Vec<f64> {
        (1..=10).map(|k| self.s0 / 4.0 * k as f64 / 11.0).collect()
    }
}

/// Sufficient Euclidean threshold: the radius of the point at arclength s₀/4.
pub fn threshold_l(cg: &ConformalGaussian) -> Result<f64> {
    cg.r_of_s(cg.s0 / 4.0)
}

/// Residuals of the erfc⁻¹ derivative identities and the two small-x limits.
#[derive(Debug, Clone, PartialEq)]
pub struct ErfcInverseReport {
    /// A' = -1/B, A'' = 2A/B², B' = 2A, B'' = 2A'; relative to max(1, |closed form|)
    pub max_residuals: [f64; 4],
    pub worst_x: [f64; 4],
    pub limit_x: f64,
    /// A(x)/√log(1/x)
    pub limit_a: f64,
    /// B(x)/(2x√log(1/x))
    pub limit_b: f64,
    pub identities_ok: bool,
    pub limits_ok: bool,
}

pub const LIMIT_X: f64 = 1e-6;

fn a_of(x: f64) -> f64 {
    erfc_inv_unchecked(x)
}

fn b_of(x: f64) -> f64 {
    let a = a_of(x);
    FRAC_2_SQRT_PI * libm::exp(-a * a)
}

pub fn erfc_inverse_suite(x_grid: &[f64]) -> Result<ErfcInverseReport> {
    let mut max_res = [0.0_f64; 4];
    let mut worst = [f64::NAN; 4];
    for &x in x_grid {
        let t = erfc_inverse(x)?;
        let (a, b) = (t.a, t.b);
        let h = 1e-3 * x.min(2.0 - x);
        let closed = [-1.0 / b, 2.0 * a / (b * b), 2.0 * a, -2.0 / b];
        let fd = [d1_5pt(a_of, x, h), d2_5pt(a_of, x, h), d1_5pt(b_of, x, h), d2_5pt(b_of, x, h)];
        for k in 0..4 {
            let r = libm::fabs(fd[k] - closed[k]) / libm::fabs(closed[k]).max(1.0);
            if r > max_res[k] || worst[k].is_nan() {
                max_res[k] = max_res[k].max(r);
                worst[k] = x;
            }
        }
    }
    let (limit_a, limit_b) = limit_ratios(LIMIT_X);
    let identities_ok = max_res.iter().all(|&r| r < 1e-6);
    let limits_ok = libm::fabs(limit_a - 1.0) < 0.02 && libm::fabs(limit_b - 1.0) < 0.02;
    Ok(ErfcInverseReport { max_residuals: max_res, worst_x: worst, limit_x: LIMIT_X, limit_a, limit_b, identities_ok, limits_ok })
}

/// (A/√log(1/x), B/(2x√log(1/x))) at x, evaluated without the erfc⁻¹ range guard.
pub fn limit_ratios(x: f64) -> (f64, f64) {
    let l = libm::sqrt(libm::log(1.0 / x));
    let a = a_of(x);
    let b = FRAC_2_SQRT_PI * libm::exp(-a * a);
    (a / l, b / (2.0 * x * l))
}

/// Outcome of the antipodal experiment at one ε.
#[derive(Debug, Clone, PartialEq)]
pub struct GapReport {
    pub eps: f64,
    /// shortest cap-avoiding connection found
    pub l_geo: f64,
    /// the path through the tip, 2ε
    pub through_tip: f64,
    pub gap: f64,
    pub c_star: f64,
    pub c_min: f64,
    /// length of a connecting geodesic with c > 0 if the scan found one
    pub pure_geodesic: Option<f64>,
    /// lengths along the family as c → 0⁺, approaching 2ε
    pub degenerate_limit: f64,
    /// every path leaving (ε, 0) outward is at least this long
    pub outward_lower_bound: f64,
    /// true when the minimum sits on the exclusion boundary (infimum over the family)
    pub infimum_flag: bool,
    pub scan: Vec<(f64, f64)>,
}

pub const EXCLUSION: f64 = 1e-4;

pub fn antipodal_gap(cg: &ConformalGaussian, eps: f64) -> Result<GapReport> {
    antipodal_gap_with(cg, eps, EXCLUSION)
}

pub fn antipodal_gap_with(cg: &ConformalGaussian, eps: f64, exclusion: f64) -> Result<GapReport> {
    if !(eps > 0.0 && eps < cg.s0 / 4.0) {
        return Err(Error::Domain { what: "antipodal ε (needs 0 < ε < s₀/4)", value: eps });
    }
    let opts = PathOptions { exclude_caps: true, exclusion_radius: exclusion, scan_points: 64 };
    let g = &cg.profile;
    let wrap = wrap_family(g, eps, eps, PI, false, opts)?;
    // an outward start must turn where φ = c ≤ φ(ε) beyond s*, then come back
    let s_far = bisect(|s| cg.phi(s) - cg.phi(eps), cg.s_star(), cg.s_origin, 1e-12)?;
    let outward_lower_bound = 2.0 * (s_far - eps);
    let (l_geo, c_star) = (wrap.length, wrap.c_star);
    // shrinking exclusion drives the family toward the through-tip path
    let tiny = PathOptions { exclusion_radius: exclusion * 1e-3, ..opts };
    let degenerate_limit = wrap_family(g, eps, eps, PI, false, tiny).map(|w| w.length).unwrap_or(f64::NAN);
    let through_tip = 2.0 * eps;
    Ok(GapReport {
        eps,
        l_geo,
        through_tip,
        gap: l_geo - through_tip,
        c_star,
        c_min: wrap.c_min,
        pure_geodesic: wrap.pure_geodesic.map(|p| p.0),
        degenerate_limit,
        outward_lower_bound,
        infimum_flag: libm::fabs(c_star - wrap.c_min) <= 1e-9 * wrap.c_min.max(1e-300) + 1e-15,
        scan: wrap.scan,
    })
}

/// Graph oracle for the antipodal problem: 800 × 400 grid on [δ, ·] × [0, π] with ε a node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphOracle {
    pub length: f64,
    pub ds: f64,
    pub dtheta: f64,
}

pub fn antipodal_graph_oracle(cg: &ConformalGaussian, eps: f64, exclusion: f64) -> GraphOracle {
    let (ns, nt) = (800, 400);
    let ds = (eps - exclusion) / 400.0;
    let grid = GraphGrid { s_lo: exclusion, s_hi: exclusion + ds * ns as f64, ns, nt, knight_moves: false };
    let length = graph_distance(&cg.profile, &grid, (400, 0), (400, nt));
    GraphOracle { length, ds, dtheta: grid.dt() }
}

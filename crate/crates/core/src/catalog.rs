//! Exact model shrinkers and the checks that hold on them.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::num::{simpson, sphere_area, sq};
use crate::warped::profile::{Potential, Shape, WarpedProfile};
use crate::warped::slice::{curvature_at, potential_hessian, CurvatureData, SliceCoeffs};
use crate::warped::volume::ball_volume;

/// Gaussian truncation radius; e^{-f} beyond it is below 1e-40.
pub const GAUSSIAN_S_MAX: f64 = 20.0;
pub const CYLINDER_HALF_LENGTH: f64 = 40.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ShrinkerModel {
    pub name: String,
    pub profile: WarpedProfile,
    pub potential: Potential,
    /// closed-form μ with a short derivation tag
    pub mu_exact: Option<(f64, &'static str)>,
}

fn check_dim(m: usize) -> Result<()> {
    if m < 3 {
        return Err(Error::UnsupportedDimension { m, min: 3 });
    }
    Ok(())
}

/// R^m with f = |x|²/4.
pub fn make_gaussian(m: usize) -> Result<ShrinkerModel> {
    check_dim(m)?;
    Ok(ShrinkerModel {
        name: "gaussian".into(),
        profile: WarpedProfile::flat(m, GAUSSIAN_S_MAX),
        potential: Potential::quadratic(0.25, 0.0, 0.0),
        mu_exact: Some((0.0, "gaussian integral of e^{-|x|²/4}")),
    })
}

/// S^m of radius √(2(m−1)) with f ≡ m/2.
pub fn make_sphere(m: usize) -> Result<ShrinkerModel> {
    check_dim(m)?;
    let mf = m as f64;
    let r0 = libm::sqrt(2.0 * (mf - 1.0));
    // log((4π)^{-m/2} e^{-m/2} |S^m| r₀^m)
    let mu = libm::log(sphere_area(m)) + mf * libm::log(r0) - mf / 2.0 - mf / 2.0 * libm::log(4.0 * crate::num::PI);
    Ok(ShrinkerModel {
        name: "sphere".into(),
        profile: WarpedProfile::round(m, r0),
        potential: Potential::constant(mf / 2.0, 0.0),
        mu_exact: Some((mu, "constant potential times sphere volume")),
    })
}

/// R × S^{m−1} of radius √(2(m−2)) with f = s²/4 + (m−1)/2, truncated to |s| ≤ 40.
pub fn make_cylinder(m: usize) -> Result<ShrinkerModel> {
    check_dim(m)?;
    let mf = m as f64;
    let rho = libm::sqrt(2.0 * (mf - 2.0));
    let mu = 0.5 * libm::log(4.0 * crate::num::PI) - (mf - 1.0) / 2.0
        + libm::log(sphere_area(m - 1))
        + (mf - 1.0) * libm::log(rho)
        - mf / 2.0 * libm::log(4.0 * crate::num::PI);
    Ok(ShrinkerModel {
        name: "cylinder".into(),
        profile: WarpedProfile::cylinder(m, rho, CYLINDER_HALF_LENGTH),
        potential: Potential::quadratic(0.25, 0.0, (mf - 1.0) / 2.0),
        mu_exact: Some((mu, "line gaussian times sphere volume")),
    })
}

pub const MODEL_NAMES: [&str; 3] = ["gaussian", "sphere", "cylinder"];

pub fn make_model(name: &str, m: usize) -> Result<ShrinkerModel> {
    match name {
        "gaussian" => make_gaussian(m),
        "sphere" => make_sphere(m),
        "cylinder" => make_cylinder(m),
        _ => Err(Error::Capability("unknown model name")),
    }
}

impl ShrinkerModel {
    pub fn m(&self) -> usize {
        self.profile.m
    }

    /// Axis coordinate of the minimum point p.
    pub fn p(&self) -> f64 {
        self.potential.f_min_location
    }

    /// Metric λ²g: φ and arclength scaled by λ, f(s) replaced by f(s/λ).
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::Domain { what: "scale factor", value: lambda });
        }
        let p = &self.profile;
        let shape = match &p.shape {
            Shape::Flat => Shape::Flat,
            Shape::Round { radius } => Shape::Round { radius: radius * lambda },
            Shape::Cylinder { radius } => Shape::Cylinder { radius: radius * lambda },
            Shape::Sampled(sp) => {
                let y = sp.samples().iter().map(|v| v * lambda).collect();
                return Ok(Self {
                    name: self.name.clone(),
                    profile: WarpedProfile::sampled(p.m, (p.domain.0 * lambda, p.domain.1 * lambda), y, p.caps)?,
                    potential: self.potential.rescaled(lambda),
                    mu_exact: None,
                });
            }
            Shape::ConformalGaussian { .. } => return Err(Error::Capability("scaling a compressed profile")),
        };
        Ok(Self {
            name: self.name.clone(),
            profile: WarpedProfile { m: p.m, domain: (p.domain.0 * lambda, p.domain.1 * lambda), caps: p.caps, shape },
            potential: self.potential.rescaled(lambda),
            mu_exact: None,
        })
    }

    /// Same model with φ multiplied by `factor` (only the round sphere changes its radius).
    pub fn with_radius_factor(&self, factor: f64) -> Result<Self> {
        match self.profile.shape {
            Shape::Round { radius } => {
                let mut out = self.clone();
                out.profile = WarpedProfile::round(self.m(), radius * factor);
                out.mu_exact = None;
                Ok(out)
            }
            Shape::Cylinder { radius } => {
                let mut out = self.clone();
                out.profile.shape = Shape::Cylinder { radius: radius * factor };
                out.mu_exact = None;
                Ok(out)
            }
            _ => Err(Error::Capability("radius perturbation needs a round factor")),
        }
    }
}

/// Sup-norms of Rc + Hess f − g/2 and R + |∇f|² − f.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    pub soliton: f64,
    pub normalization: f64,
    pub tol: f64,
    pub pass: bool,
}

pub const VERIFY_GRID: usize = 512;

pub fn verify_model(model: &ShrinkerModel, tol: f64) -> Result<ResidualReport> {
    let (lo, hi) = model.profile.domain;
    let mut sol = 0.0_f64;
    let mut norm = 0.0_f64;
    for i in 0..VERIFY_GRID {
        let s = (lo + (hi - lo) * i as f64 / (VERIFY_GRID - 1) as f64).min(hi);
        let c = curvature_at(&model.profile, s)?;
        let (hr, hs, g2) = potential_hessian(&model.profile, &model.potential, s)?;
        sol = sol.max(libm::fabs(c.ric_rad + hr - 0.5)).max(libm::fabs(c.ric_sph + hs - 0.5));
        norm = norm.max(libm::fabs(c.r + g2 - model.potential.f(s)));
    }
    Ok(ResidualReport { soliton: sol, normalization: norm, tol, pass: sol <= tol && norm <= tol })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthPoint {
    pub d: f64,
    pub f: f64,
    pub lower: f64,
    pub upper: f64,
    pub ok: bool,
}

/// ¼(d − 5m)₊² ≤ f ≤ ¼(d + √(2m))² at axis distance d from p.
pub fn f_growth_check(model: &ShrinkerModel, d_grid: &[f64]) -> Result<Vec<GrowthPoint>> {
    let m = model.m() as f64;
    let p = model.p();
    let (lo, hi) = model.profile.domain;
    d_grid
        .iter()
        .map(|&d| {
            let s = if p + d <= hi { p + d } else { p - d };
            if !(d >= 0.0) || s < lo {
                return Err(Error::Domain { what: "distance from p", value: d });
            }
            let f = model.potential.f(s);
            let lower = 0.25 * sq((d - 5.0 * m).max(0.0));
            let upper = 0.25 * sq(d + libm::sqrt(2.0 * m));
            Ok(GrowthPoint { d, f, lower, upper, ok: lower <= f && f <= upper })
        })
        .collect()
}

/// Pulled-back flow g(t) = (1 − t)ψ_t* g sampled along the axis.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub t: f64,
    pub s0: Vec<f64>,
    pub psi: Vec<f64>,
    /// f(·, t) = f ∘ ψ_t
    pub f: Vec<f64>,
    /// R(t) at each sample
    pub r: Vec<f64>,
    /// sup |R(t) + |∇f(t)|² − f(t)/(1 − t)|
    pub identity_residual: f64,
    /// sup |Rc(t) + Hess f(t) − g(t)/(2(1 − t))|
    pub soliton_residual: f64,
    /// sup (|∂_t f| − f(x, 0)), nonpositive when the bound holds; NaN outside t ∈ [−2, 0]
    pub dtf_excess: f64,
}

pub const FLOW_STEPS: usize = 2000;
pub const FLOW_SAMPLES: usize = 64;

/// Integrates ψ together with its first two s-derivatives: dψ/dτ = f'(ψ)/(1 − τ).
fn flow_map(pot: &Potential, s0: f64, t: f64) -> [f64; 3] {
    let rhs = |tau: f64, y: &[f64; 3]| {
        let f = pot.jet(y[0]);
        let k = 1.0 / (1.0 - tau);
        [f[1] * k, f[2] * y[1] * k, (f[3] * y[1] * y[1] + f[2] * y[2]) * k]
    };
    let mut y = [s0, 1.0, 0.0];
    let h = t / FLOW_STEPS as f64;
    for i in 0..FLOW_STEPS {
        let tau = h * i as f64;
        let add = |y: &[f64; 3], k: &[f64; 3], c: f64| [y[0] + c * k[0], y[1] + c * k[1], y[2] + c * k[2]];
        let k1 = rhs(tau, &y);
        let k2 = rhs(tau + h / 2.0, &add(&y, &k1, h / 2.0));
        let k3 = rhs(tau + h / 2.0, &add(&y, &k2, h / 2.0));
        let k4 = rhs(tau + h, &add(&y, &k3, h));
        for j in 0..3 {
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
    }
    y
}

pub fn flow_identity_check(model: &ShrinkerModel, t: f64) -> Result<FlowState> {
    if !(-2.0..=0.9).contains(&t) {
        return Err(Error::Range { what: "flow time", value: t });
    }
    let p = &model.profile;
    let (lo, hi) = p.domain;
    let margin = 1e-2 * (hi - lo);
    let scale = libm::sqrt(1.0 - t);
    let mut st = FlowState {
        t,
        s0: Vec::new(),
        psi: Vec::new(),
        f: Vec::new(),
        r: Vec::new(),
        identity_residual: 0.0,
        soliton_residual: 0.0,
        dtf_excess: if (-2.0..=0.0).contains(&t) { f64::NEG_INFINITY } else { f64::NAN },
    };
    for i in 0..FLOW_SAMPLES {
        let s0 = lo + margin + (hi - lo - 2.0 * margin) * i as f64 / (FLOW_SAMPLES - 1) as f64;
        let [psi, d1, d2] = flow_map(&model.potential, s0, t);
        if !(psi > lo + margin / 2.0 && psi < hi - margin / 2.0) || !psi.is_finite() {
            continue;
        }
        let j = p.jet(psi);
        let fj = model.potential.jet(psi);
        let c = SliceCoeffs {
            a: scale * d1,
            da: scale * d2,
            b: scale * j[0],
            db: scale * j[1] * d1,
            d2b: scale * (j[2] * d1 * d1 + j[1] * d2),
        };
        let ps = c.db / c.a;
        let pss = (c.d2b * c.a - c.db * c.da) / (c.a * c.a * c.a);
        let curv = CurvatureData::from_sectional(p.m, s0, -pss / c.b, (1.0 - ps * ps) / (c.b * c.b));
        let df = fj[1] * d1;
        let d2f = fj[2] * d1 * d1 + fj[1] * d2;
        let grad2 = df * df / (c.a * c.a);
        let hess_rad = d2f / (c.a * c.a) - df * c.da / (c.a * c.a * c.a);
        let hess_sph = df * c.db / (c.a * c.a * c.b);
        let k = 0.5 / (1.0 - t);
        st.identity_residual = st.identity_residual.max(libm::fabs(curv.r + grad2 - fj[0] / (1.0 - t)));
        st.soliton_residual =
            st.soliton_residual.max(libm::fabs(curv.ric_rad + hess_rad - k)).max(libm::fabs(curv.ric_sph + hess_sph - k));
        if (-2.0..=0.0).contains(&t) {
            // ∂_t f(x, t) = f'(ψ) ∂_t ψ = f'(ψ)²/(1 − t)
            let dtf = fj[1] * fj[1] / (1.0 - t);
            st.dtf_excess = st.dtf_excess.max(dtf - model.potential.f(s0));
        }
        st.s0.push(s0);
        st.psi.push(psi);
        st.f.push(fj[0]);
        st.r.push(curv.r);
    }
    if st.s0.is_empty() {
        return Err(Error::Range { what: "flow map leaves the model domain", value: t });
    }
    Ok(st)
}

/// Weighted ratio ∫_{B(p,r)} e^{-f} / ∫_{B(p,ρ)} e^{-f} against (r/ρ)^m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedRatio {
    pub rho: f64,
    pub r: f64,
    pub ratio: f64,
    pub bound: f64,
    pub ok: bool,
}

pub fn weighted_ratio_check(model: &ShrinkerModel, rho: f64, r: f64) -> Result<WeightedRatio> {
    if !(r >= rho && rho > 0.0) {
        return Err(Error::Domain { what: "radii (need r ≥ ρ > 0)", value: r });
    }
    let p = model.p();
    let big = ball_volume(&model.profile, Some(&model.potential), p, r, true)?;
    let small = ball_volume(&model.profile, Some(&model.potential), p, rho, true)?;
    let ratio = big / small;
    let bound = libm::pow(r / rho, model.m() as f64);
    Ok(WeightedRatio { rho, r, ratio, bound, ok: ratio <= bound * (1.0 + 1e-9) })
}

/// ∫_M e^{-f} dv over the whole (possibly truncated) model.
pub fn total_weighted_volume(model: &ShrinkerModel) -> f64 {
    let p = &model.profile;
    let m = p.m;
    sphere_area(m - 1)
        * simpson(
            |s| libm::pow(p.phi(s).max(0.0), (m - 1) as f64) * libm::exp(-model.potential.f(s)),
            p.domain.0,
            p.domain.1,
            8192,
        )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_is_exact() {
        for m in [3, 4, 5, 6] {
            for name in MODEL_NAMES {
                let model = make_model(name, m).unwrap();
                let r = verify_model(&model, 1e-10).unwrap();
                assert!(r.pass, "{name} m={m}: {r:?}");
            }
        }
        assert!(matches!(make_sphere(2), Err(Error::UnsupportedDimension { .. })));
    }

    #[test]
    fn sphere_and_cylinder_constants() {
        let s = make_sphere(4).unwrap();
        assert_eq!(s.potential.f(1.0), 2.0);
        assert!(libm::fabs(curvature_at(&s.profile, 1.0).unwrap().r - 2.0) < 1e-14);
        let c = make_cylinder(4).unwrap();
        assert_eq!(c.potential.f(0.0), 1.5);
        assert!(libm::fabs(curvature_at(&c.profile, 0.0).unwrap().r - 1.5) < 1e-14);
        assert_eq!(make_cylinder(5).unwrap().potential.f(0.0), 2.0);
    }

    #[test]
    fn perturbed_sphere_fails() {
        let s = make_sphere(4).unwrap().with_radius_factor(1.01).unwrap();
        let r = verify_model(&s, 1e-10).unwrap();
        // (m−1)/r₀² changes from 1/2 to 3/(6·1.0201)
        let expect = 0.5 - 3.0 / (6.0 * 1.0201);
        assert!(libm::fabs(r.soliton - expect) < 1e-10, "{}", r.soliton);
        assert!(r.soliton > 1e-3 && !r.pass);
    }

    #[test]
    fn perturbed_grid_ends_on_the_domain() {
        // π·√8·1.01 is not reproduced by hi·511/511
        let s = make_sphere(5).unwrap().with_radius_factor(1.01).unwrap();
        assert!(verify_model(&s, 1e-10).unwrap().soliton > 1e-3);
    }

    #[test]
    fn scaling_breaks_normalization() {
        for name in MODEL_NAMES {
            let model = make_model(name, 4).unwrap();
            for lambda in [0.9, 1.1] {
                let r = verify_model(&model.scaled(lambda).unwrap(), 1e-10).unwrap();
                assert!(r.soliton.max(r.normalization) > 1e-4, "{name} λ={lambda}");
            }
            assert!(verify_model(&model.scaled(1.0).unwrap(), 1e-10).unwrap().pass);
        }
    }

    #[test]
    fn growth_examples() {
        let g = make_gaussian(4).unwrap();
        let r = f_growth_check(&g, &[10.0]).unwrap()[0];
        assert_eq!(r.f, 25.0);
        assert_eq!(r.lower, 0.0);
        assert!(libm::fabs(r.upper - 0.25 * sq(10.0 + libm::sqrt(8.0))) < 1e-12 && r.ok);
        let c = make_cylinder(4).unwrap();
        let r = f_growth_check(&c, &[30.0]).unwrap()[0];
        assert_eq!(r.f, 226.5);
        assert_eq!(r.lower, 25.0);
        assert!(libm::fabs(r.upper - 269.426_406_871_192_85) < 1e-9 && r.ok);
        let s = make_sphere(4).unwrap();
        let r = f_growth_check(&s, &[s.profile.domain.1]).unwrap()[0];
        assert!(r.ok && r.lower == 0.0);
    }

    #[test]
    fn gaussian_flow_is_a_dilation() {
        let g = make_gaussian(4).unwrap();
        let st = flow_identity_check(&g, 0.5).unwrap();
        for (s0, psi) in st.s0.iter().zip(&st.psi) {
            assert!(libm::fabs(psi - s0 / libm::sqrt(0.5)) < 1e-9 * psi.max(1.0));
        }
        assert!(st.identity_residual < 1e-6);
    }

    #[test]
    fn flow_identities_on_catalog() {
        for name in MODEL_NAMES {
            let model = make_model(name, 4).unwrap();
            for t in [-2.0, -1.0, -0.5, 0.0, 0.5] {
                let st = flow_identity_check(&model, t).unwrap();
                assert!(st.identity_residual < 1e-5, "{name} t={t} {}", st.identity_residual);
                assert!(st.soliton_residual < 1e-5, "{name} t={t} {}", st.soliton_residual);
                if t <= 0.0 {
                    assert!(st.dtf_excess <= 1e-12, "{name} t={t}");
                }
            }
        }
        let c = flow_identity_check(&make_cylinder(4).unwrap(), -1.0).unwrap();
        assert!(c.r.iter().all(|r| libm::fabs(r - 0.75) < 1e-10));
        let z = flow_identity_check(&make_sphere(4).unwrap(), 0.0).unwrap();
        assert!(z.s0 == z.psi && z.identity_residual < 1e-12);
        assert!(matches!(flow_identity_check(&z_model(), 0.95), Err(Error::Range { .. })));
    }

    fn z_model() -> ShrinkerModel {
        make_gaussian(4).unwrap()
    }

    #[test]
    fn weighted_ratio_gaussian_and_cylinder() {
        for name in ["gaussian", "cylinder"] {
            let model = make_model(name, 4).unwrap();
            for k in [2.0, 4.0] {
                let w = weighted_ratio_check(&model, 0.5, 0.5 * k).unwrap();
                assert!(w.ok, "{name} {w:?}");
            }
        }
    }

    #[test]
    fn mu_exact_matches_quadrature() {
        for name in MODEL_NAMES {
            let model = make_model(name, 4).unwrap();
            let m = model.m() as f64;
            let mu = libm::log(total_weighted_volume(&model)) - m / 2.0 * libm::log(4.0 * crate::num::PI);
            assert!(libm::fabs(mu - model.mu_exact.unwrap().0) < 1e-10, "{name} {mu}");
        }
        assert!(libm::fabs(make_sphere(4).unwrap().mu_exact.unwrap().0 - (libm::log(6.0) - 2.0)) < 1e-13);
    }
}

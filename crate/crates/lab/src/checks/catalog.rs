use shrinker_core::catalog::{f_growth_check, flow_identity_check, make_sphere, verify_model, weighted_ratio_check, ShrinkerModel};
use shrinker_core::entropy::volume_mu_check;

use crate::report::{check, CheckReport, Status};

pub const FLOW_TIMES: [f64; 5] = [-2.0, -1.0, -0.5, 0.0, 0.5];
pub const FLOW_TOL: f64 = 1e-5;
pub const PERTURBED_FACTOR: f64 = 1.01;
pub const PERTURBED_MIN: f64 = 1e-3;
pub const RIGIDITY_MIN: f64 = 1e-4;
pub const GROWTH_POINTS: usize = 20;

fn tag(model: &ShrinkerModel) -> String {
    format!("{}.m{}", model.name, model.m())
}

pub fn soliton(model: &ShrinkerModel, tol: f64) -> CheckReport {
    check(format!("catalog.soliton.{}", tag(model)), "soliton-identity", |rec| {
        let r = verify_model(model, tol)?;
        rec.bounded("soliton_residual", r.soliton, tol);
        rec.bounded("normalization_residual", r.normalization, tol);
        Ok(r.pass.into())
    })
}

/// The round sphere with its radius off by 1% must fail the identity.
pub fn perturbed_sphere(m: usize) -> CheckReport {
    check(format!("catalog.perturbed-sphere.m{m}"), "soliton-identity", |rec| {
        let model = make_sphere(m)?.with_radius_factor(PERTURBED_FACTOR)?;
        let r = verify_model(&model, 1e-10)?;
        rec.bounded("soliton_residual", r.soliton, PERTURBED_MIN);
        Ok((r.soliton > PERTURBED_MIN).into())
    })
}

pub fn rigidity(model: &ShrinkerModel) -> CheckReport {
    check(format!("catalog.rigidity.{}", tag(model)), "normalization-rigidity", |rec| {
        let mut ok = true;
        for lambda in [0.9, 1.1] {
            let r = verify_model(&model.scaled(lambda)?, 1e-10)?;
            let worst = r.soliton.max(r.normalization);
            rec.bounded(format!("residual_lambda_{lambda}"), worst, RIGIDITY_MIN);
            ok &= worst > RIGIDITY_MIN;
        }
        Ok(ok.into())
    })
}

pub fn flow(model: &ShrinkerModel) -> CheckReport {
    check(format!("catalog.flow.{}", tag(model)), "flow-identity", |rec| {
        let mut ok = true;
        for t in FLOW_TIMES {
            let st = flow_identity_check(model, t)?;
            rec.bounded(format!("identity_t{t}"), st.identity_residual, FLOW_TOL);
            rec.bounded(format!("soliton_t{t}"), st.soliton_residual, FLOW_TOL);
            ok &= st.identity_residual < FLOW_TOL && st.soliton_residual < FLOW_TOL;
            if t <= 0.0 {
                // |∂_t f| ≤ f(x, 0) on t ∈ [−2, 0]
                rec.bounded(format!("dtf_excess_t{t}"), st.dtf_excess, 0.0);
                ok &= st.dtf_excess <= 1e-12;
            }
        }
        Ok(ok.into())
    })
}

/// Growth bounds at 20 distances spread over the model.
pub fn growth(model: &ShrinkerModel) -> CheckReport {
    check(format!("volume.growth.{}", tag(model)), "quadratic-growth", |rec| {
        let (lo, hi) = model.profile.domain;
        let reach = (hi - model.p()).max(model.p() - lo);
        let grid: Vec<f64> = (1..=GROWTH_POINTS).map(|k| reach * k as f64 / GROWTH_POINTS as f64).collect();
        let pts = f_growth_check(model, &grid)?;
        let lower_slack = pts.iter().map(|p| p.f - p.lower).fold(f64::INFINITY, f64::min);
        let upper_slack = pts.iter().map(|p| p.upper - p.f).fold(f64::INFINITY, f64::min);
        rec.value("points", pts.len() as f64);
        rec.bounded("min_lower_slack", lower_slack, 0.0);
        rec.bounded("min_upper_slack", upper_slack, 0.0);
        Ok(pts.iter().all(|p| p.ok).into())
    })
}

pub fn weighted_ratio(model: &ShrinkerModel, rho: f64) -> CheckReport {
    check(format!("volume.weighted-ratio.{}", tag(model)), "weighted-volume-ratio", |rec| {
        let mut ok = true;
        for k in [2.0, 4.0] {
            let w = weighted_ratio_check(model, rho, k * rho)?;
            rec.bounded(format!("ratio_r_over_rho_{k}"), w.ratio, w.bound);
            ok &= w.ok;
        }
        Ok(ok.into())
    })
}

pub fn volume_entropy(model: &ShrinkerModel) -> CheckReport {
    check(format!("volume.entropy-bracket.{}", tag(model)), "volume-entropy-bracket", |rec| {
        let r = volume_mu_check(model)?;
        rec.value("mu", r.mu);
        rec.value("ball_volume", r.volume);
        rec.bounded("log_ratio", r.log_ratio, r.log_upper);
        rec.value("log_lower", r.log_lower);
        Ok(Status::from(r.pass))
    })
}

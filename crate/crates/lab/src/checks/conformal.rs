use shrinker_core::catalog::ShrinkerModel;
use shrinker_core::conformal::{
    ball_sandwich_check, build_chart, centered_grid, curvature_bound_check, distance_distortion_check, gh_bound_check,
    ricci_crosscheck, ConformalChart,
};
use shrinker_core::Result;

use crate::report::{check, CheckReport};

pub const CROSSCHECK_POINTS: usize = 512;
pub const CROSSCHECK_TOL: f64 = 1e-6;
/// half-width of the cross-check grid on open models
pub const CROSSCHECK_HALF: f64 = 3.0;
pub const GH_SLACK_LIMIT: f64 = 0.2;

fn chart_at(model: &ShrinkerModel, q: Option<f64>) -> Result<ConformalChart> {
    build_chart(model, q.unwrap_or(model.p()), None)
}

fn tag(model: &ShrinkerModel) -> String {
    format!("{}.m{}", model.name, model.m())
}

/// Ricci of ḡ by formula against the warped curvature of (s̄, φ̄), on the whole model if closed.
pub fn ricci(model: &ShrinkerModel, q: Option<f64>) -> CheckReport {
    check(format!("conformal.ricci.{}", tag(model)), "conformal-ricci", |rec| {
        let chart = chart_at(model, q)?;
        let (lo, hi) = model.profile.domain;
        let half = if model.profile.caps == (true, true) { hi - lo } else { CROSSCHECK_HALF };
        let grid = centered_grid(&chart, half, CROSSCHECK_POINTS);
        let err = ricci_crosscheck(&chart, &grid);
        rec.value("q", chart.q);
        rec.value("grid_points", grid.len() as f64);
        rec.bounded("max_discrepancy", err, CROSSCHECK_TOL);
        Ok((err < CROSSCHECK_TOL).into())
    })
}

pub fn curvature_bound(model: &ShrinkerModel, q: Option<f64>, r: f64) -> CheckReport {
    check(format!("conformal.curvature-bound.{}.r{r}", tag(model)), "conformal-curvature-bound", |rec| {
        let chart = chart_at(model, q)?;
        let k = curvature_bound_check(&chart, r, CROSSCHECK_POINTS)?;
        rec.value("ball_radius", k.radius);
        rec.bounded("max_ricci_norm", k.max_norm, k.d_squared);
        rec.bounded("explicit_bound_margin", k.explicit_bound_margin, 0.0);
        Ok(k.pass.into())
    })
}

pub fn sandwich(model: &ShrinkerModel, q: Option<f64>, r: f64) -> CheckReport {
    check(format!("conformal.sandwich.{}.r{r}", tag(model)), "conformal-ball-sandwich", |rec| {
        let chart = chart_at(model, q)?;
        let s = ball_sandwich_check(&chart, r)?;
        rec.value("factor", s.factor);
        rec.bounded("outer_margin", s.outer_margin, 0.0);
        rec.bounded("inner_margin", s.inner_margin, 0.0);
        rec.value("samples", s.samples as f64);
        Ok(s.pass.into())
    })
}

pub fn distortion(model: &ShrinkerModel, q: Option<f64>, r: f64) -> CheckReport {
    check(format!("conformal.distortion.{}.r{r}", tag(model)), "conformal-distance-distortion", |rec| {
        let chart = chart_at(model, q)?;
        let d = distance_distortion_check(&chart, r)?;
        rec.value("factor", d.factor);
        rec.bounded("min_ratio", d.min_ratio, 1.0 / d.factor);
        rec.bounded("max_ratio", d.max_ratio, d.factor);
        rec.value("pairs", d.pairs as f64);
        Ok(d.pass.into())
    })
}

pub fn gh_bound(model: &ShrinkerModel, q: Option<f64>, r: f64, rho: f64, fraction: f64) -> CheckReport {
    check(format!("conformal.gh-bound.{}.r{r}.rho{rho}", tag(model)), "conformal-gh-bound", |rec| {
        let chart = chart_at(model, q)?;
        let g = gh_bound_check(&chart, rho, r, fraction)?;
        rec.value("hypothesis_rho_below_r_over_d", if g.hypothesis { 1.0 } else { 0.0 });
        rec.bounded("bound", g.bound, g.budget);
        rec.value("net_upper", g.net_upper);
        rec.value("grid_distortion", g.grid_distortion);
        rec.bounded("slack", g.slack, GH_SLACK_LIMIT * g.budget);
        Ok((g.pass && g.slack < GH_SLACK_LIMIT * g.budget).into())
    })
}

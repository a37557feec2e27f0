use shrinker_core::catalog::{make_gaussian, ShrinkerModel};
use shrinker_core::radii::{
    bold_radii, convex_radius_check, density_check, gh_radius, harnack_check, radii_report, search_limit, summarize_equivalence,
    volume_radius, EquivalenceReport, EquivalenceRow, Verdict, DEFAULT_HARNACK_FRACTION, GH_NET_FRACTION,
};
use shrinker_core::Result;

use crate::report::{check, CheckReport, Status};

/// offsets from the minimum point at which local comparisons are made
pub const OFFSETS: [f64; 3] = [0.0, 0.5, 1.0];
pub const STABILITY_FACTOR: f64 = 2.0;
pub const DENSITY_THETA: f64 = 0.5;
pub const DENSITY_RADIUS: f64 = 0.5;
pub const FLAT_CONVEX_RADIUS: f64 = 1.0;

fn tag(model: &ShrinkerModel) -> String {
    format!("{}.m{}", model.name, model.m())
}

pub fn points(model: &ShrinkerModel) -> Vec<f64> {
    let hi = model.profile.domain.1;
    OFFSETS.iter().map(|d| (model.p() + d).min(hi)).collect()
}

/// Radius searches at the origin of R^m: the limit is reached and the defect vanishes.
pub fn flat_degeneracy(m: usize, delta: f64, eps: f64) -> CheckReport {
    check(format!("radii.flat-degeneracy.m{m}"), "radii-flat-degeneracy", |rec| {
        let g = make_gaussian(m)?.profile;
        let limit = search_limit(&g, 0.0, f64::INFINITY)?;
        let vr = volume_radius(&g, 0.0, delta)?;
        let gr = gh_radius(&g, 0.0, eps, GH_NET_FRACTION)?;
        let sr = convex_radius_check(&g, 0.0, FLAT_CONVEX_RADIUS)?;
        rec.value("search_limit", limit);
        rec.value("vr", vr.value);
        rec.value("vr_saturated", vr.saturated as u8 as f64);
        rec.value("gr", gr.radius.value);
        rec.value("gr_saturated", gr.radius.saturated as u8 as f64);
        rec.bounded("convex_value", sr.value, 0.0);
        Ok((vr.saturated && gr.radius.saturated && sr.value == 0.0 && sr.verdict == Verdict::Pass).into())
    })
}

pub fn harnack(model: &ShrinkerModel, x: f64, delta: f64) -> CheckReport {
    check(format!("radii.harnack.{}.x{x}", tag(model)), "radii-harnack", |rec| {
        let h = harnack_check(model, x, DEFAULT_HARNACK_FRACTION, delta)?;
        rec.value("r", h.r);
        rec.bounded("c_emp", h.c_emp, h.fraction);
        rec.value("samples", h.samples.len() as f64);
        Ok(h.pass.into())
    })
}

pub fn equivalence_rows(model: &ShrinkerModel, delta: f64, eps: f64) -> Result<Vec<EquivalenceRow>> {
    points(model).into_iter().map(|x| shrinker_core::radii::equivalence_row(model, x, delta, eps)).collect()
}

pub fn equivalence(model: &ShrinkerModel, delta: f64, eps: f64) -> (CheckReport, Option<EquivalenceReport>) {
    let mut out = None;
    let report = check(format!("radii.equivalence.{}", tag(model)), "radii-equivalence", |rec| {
        let rep = summarize_equivalence(model, equivalence_rows(model, delta, eps)?);
        rec.value("rows", rep.rows.len() as f64);
        rec.value("c_emp", rep.c_emp);
        rec.value("finite", rep.finite as u8 as f64);
        let ok = rep.finite;
        out = Some(rep);
        Ok(ok.into())
    });
    (report, out)
}

/// Every ratio column varies by at most a factor 2 over all rows of all models.
pub fn stability(tables: &[EquivalenceReport]) -> CheckReport {
    check("radii.equivalence-stability", "radii-equivalence", |rec| {
        let mut worst = 1.0_f64;
        for col in 0..9 {
            let vals = tables.iter().flat_map(|t| t.rows.iter().map(move |r| r.ratios[col]));
            let (lo, hi) = vals.fold((f64::INFINITY, 0.0_f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
            worst = worst.max(hi / lo);
        }
        rec.value("models", tables.len() as f64);
        rec.bounded("max_column_spread", worst, STABILITY_FACTOR);
        Ok((!tables.is_empty() && worst <= STABILITY_FACTOR).into())
    })
}

pub fn density(model: &ShrinkerModel, delta: f64) -> CheckReport {
    check(format!("radii.density.{}", tag(model)), "radii-density", |rec| {
        let d = density_check(model, model.p(), DENSITY_RADIUS, DENSITY_THETA, delta)?;
        rec.value("value", d.value);
        rec.value("value_half", d.value_half);
        rec.bounded("exponent_error", (d.exponent - d.expected).abs(), shrinker_core::radii::DENSITY_EXPONENT_TOL);
        rec.value("exponent", d.exponent);
        Ok(d.pass.into())
    })
}

/// Radii at one axis point; the uncapped GH search is the slow part and can be skipped.
pub fn profile(model: &ShrinkerModel, x: f64, delta: f64, eps: f64, bold_only: bool) -> CheckReport {
    check(format!("radii.profile.{}.x{x}", tag(model)), "radii-profile", |rec| {
        if bold_only {
            let b = bold_radii(model, x, delta, eps)?;
            rec.value("cap", shrinker_core::radii::bold_cap(model, x));
            rec.value("bold_vr", b.vr);
            rec.value("bold_gr", b.gr);
            rec.value("bold_sr", b.sr);
            return Ok(Status::Pass);
        }
        let r = radii_report(model, x, delta, eps)?;
        rec.value("vr", r.vr.value);
        rec.value("vr_saturated", r.vr.saturated as u8 as f64);
        rec.value("gr", r.gr.radius.value);
        rec.value("gr_saturated", r.gr.radius.saturated as u8 as f64);
        rec.value("gr_bound", r.gr.bound);
        rec.value("gr_slack", r.gr.slack);
        rec.value("sr", r.sr.value);
        rec.value("sr_saturated", r.sr.saturated as u8 as f64);
        rec.value("cap", r.cap);
        rec.value("bold_vr", r.bold.vr);
        rec.value("bold_gr", r.bold.gr);
        rec.value("bold_sr", r.bold.sr);
        if let Some(s) = r.rm_scale {
            rec.value("rm_scale", s);
        }
        Ok(Status::Pass)
    })
}

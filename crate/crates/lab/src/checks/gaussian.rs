use serde::Serialize;
use shrinker_core::gaussian::{antipodal_gap, antipodal_graph_oracle, erfc_inverse_suite, ConformalGaussian, EXCLUSION};
use shrinker_core::Result;

use crate::report::{check, CheckReport};

pub const IDENTITY_TOL: f64 = 1e-6;
pub const LIMIT_TOL: f64 = 0.02;
pub const SLOPE_TOL: f64 = 1e-8;
pub const SLOPE_POINTS: usize = 400;
/// required excess over 2ε, relative to 2ε
pub const GAP_MARGIN: f64 = 1e-3;
pub const ORACLE_UNITS: f64 = 2.0;

/// x = 0.01, 0.02, ..., 1.99
pub fn identity_grid() -> Vec<f64> {
    (1..=199).map(|k| k as f64 / 100.0).collect()
}

pub fn identities() -> CheckReport {
    check("erfcinv.identities", "erfcinv-derivatives", |rec| {
        let r = erfc_inverse_suite(&identity_grid())?;
        for (k, name) in ["a_prime", "a_second", "b_prime", "b_second"].iter().enumerate() {
            rec.bounded(format!("{name}_residual"), r.max_residuals[k], IDENTITY_TOL);
            rec.value(format!("{name}_worst_x"), r.worst_x[k]);
        }
        Ok(r.identities_ok.into())
    })
}

pub fn limits() -> CheckReport {
    check("erfcinv.limits", "erfcinv-limits", |rec| {
        let r = erfc_inverse_suite(&[1.0])?;
        rec.value("x", r.limit_x);
        rec.bounded("a_ratio_minus_one", (r.limit_a - 1.0).abs(), LIMIT_TOL);
        rec.bounded("b_ratio_minus_one", (r.limit_b - 1.0).abs(), LIMIT_TOL);
        if !r.limits_ok {
            rec.note("ratios approach 1 at a logarithmic rate");
        }
        Ok(r.limits_ok.into())
    })
}

pub fn slope(m: usize) -> CheckReport {
    check(format!("erfcinv.profile-slope.m{m}"), "compressed-profile-slope", |rec| {
        let cg = ConformalGaussian::new(m)?;
        let mut worst = 0.0_f64;
        for i in 1..SLOPE_POINTS {
            let s = cg.s_origin * i as f64 / SLOPE_POINTS as f64;
            let jet = cg.profile.jet(s)[1];
            let closed = cg.phi_prime_closed(s);
            worst = worst.max((jet - closed).abs() / closed.abs().max(1.0));
        }
        rec.bounded("max_relative_residual", worst, SLOPE_TOL);
        Ok((worst < SLOPE_TOL).into())
    })
}

/// One row of the antipodal table.
#[derive(Debug, Clone, Serialize)]
pub struct AntipodalRow {
    pub eps: f64,
    pub l_geo: f64,
    pub through_tip: f64,
    pub gap: f64,
    pub outward_lower_bound: f64,
    pub infimum_on_exclusion: bool,
    pub oracle: f64,
    pub oracle_ds: f64,
}

pub fn antipodal_row(cg: &ConformalGaussian, eps: f64) -> Result<AntipodalRow> {
    let g = antipodal_gap(cg, eps)?;
    let o = antipodal_graph_oracle(cg, eps, EXCLUSION);
    Ok(AntipodalRow {
        eps,
        l_geo: g.l_geo,
        through_tip: g.through_tip,
        gap: g.gap,
        outward_lower_bound: g.outward_lower_bound,
        infimum_on_exclusion: g.infimum_flag,
        oracle: o.length,
        oracle_ds: o.ds,
    })
}

/// Gap and oracle agreement at the k-th grid value of ε.
pub fn antipodal(cg: &ConformalGaussian, k: usize, eps: f64) -> (Vec<CheckReport>, Option<AntipodalRow>) {
    let mut row = None;
    let gap = check(format!("geodesic.antipodal-gap.m{}.k{k}", cg.m), "antipodal-gap", |rec| {
        let r = antipodal_row(cg, eps)?;
        rec.value("eps", eps);
        rec.value("l_geo", r.l_geo);
        rec.bounded("relative_gap", r.gap / r.through_tip, GAP_MARGIN);
        rec.bounded("outward_lower_bound", r.outward_lower_bound, r.through_tip);
        let ok = r.gap > GAP_MARGIN * r.through_tip && r.outward_lower_bound > r.through_tip;
        row = Some(r);
        Ok(ok.into())
    });
    let oracle = check(format!("geodesic.antipodal-oracle.m{}.k{k}", cg.m), "antipodal-oracle", |rec| {
        let r = row.as_ref().ok_or(shrinker_core::Error::Contract("antipodal experiment failed"))?;
        let units = (r.oracle - r.l_geo).abs() / r.oracle_ds;
        rec.value("oracle", r.oracle);
        rec.bounded("difference_in_grid_units", units, ORACLE_UNITS);
        Ok((units <= ORACLE_UNITS).into())
    });
    (vec![gap, oracle], row)
}

pub fn antipodal_sweep(m: usize, eps_list: Option<&[f64]>) -> Result<(Vec<CheckReport>, Vec<AntipodalRow>)> {
    let cg = ConformalGaussian::new(m)?;
    let grid = eps_list.map(|e| e.to_vec()).unwrap_or_else(|| cg.eps_grid());
    let mut reports = Vec::new();
    let mut rows = Vec::new();
    for (k, eps) in grid.into_iter().enumerate() {
        let (r, row) = antipodal(&cg, k, eps);
        reports.extend(r);
        rows.extend(row);
    }
    Ok((reports, rows))
}

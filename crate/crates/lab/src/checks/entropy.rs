use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use shrinker_core::catalog::{make_gaussian, ShrinkerModel};
use shrinker_core::entropy::{
    initial_guess, minimize_mu, mu_from_potential, nu_check, scaling_check, sobolev_check, EntropyProblem, DEFAULT_NODES,
};
use shrinker_core::Result;

use crate::report::{check, CheckReport};

pub const MU_TOL: f64 = 1e-3;
pub const GAUSSIAN_MU_TOL: f64 = 1e-10;
pub const SCALING_TOL: f64 = 1e-6;
pub const GRADIENT_TOL: f64 = 1e-6;
pub const GRADIENT_DIRECTIONS: usize = 20;
pub const SCALES: [f64; 2] = [0.5, 2.0];

fn tag(model: &ShrinkerModel) -> String {
    format!("{}.m{}", model.name, model.m())
}

pub fn problem(model: &ShrinkerModel, tau: f64) -> Result<EntropyProblem> {
    EntropyProblem::new(model, DEFAULT_NODES, tau)
}

/// Optimizer at τ = 1 against the closed form and the potential integral.
pub fn mu_at_one(model: &ShrinkerModel) -> CheckReport {
    check(format!("entropy.mu.{}", tag(model)), "entropy-sphere-mu", |rec| {
        let r = minimize_mu(model, &problem(model, 1.0)?)?;
        let from_f = mu_from_potential(model);
        rec.value("mu", r.mu);
        rec.value("el_residual", r.residual);
        let mut ok = (r.mu - from_f).abs() < MU_TOL;
        rec.bounded("mu_minus_potential_integral", (r.mu - from_f).abs(), MU_TOL);
        if let Some((exact, _)) = model.mu_exact {
            rec.bounded("mu_minus_closed_form", (r.mu - exact).abs(), MU_TOL);
            ok &= (r.mu - exact).abs() < MU_TOL;
        }
        Ok(ok.into())
    })
}

pub fn gaussian_mu(m: usize) -> CheckReport {
    check(format!("entropy.mu.gaussian.m{m}"), "entropy-gaussian-mu", |rec| {
        let mu = mu_from_potential(&make_gaussian(m)?);
        rec.bounded("mu_abs", mu.abs(), GAUSSIAN_MU_TOL);
        Ok((mu.abs() <= GAUSSIAN_MU_TOL).into())
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MuRow {
    pub tau: f64,
    pub mu: f64,
    pub is_min: bool,
    /// minimized over rotationally symmetric u only
    pub upper_bound: bool,
}

/// μ(g, τ) along `taus` with the argmin and monotonicity verdict.
pub fn tau_curve(model: &ShrinkerModel, taus: &[f64]) -> (CheckReport, Vec<MuRow>) {
    let mut rows = Vec::new();
    let report = check(format!("entropy.tau-curve.{}", tag(model)), "entropy-tau-curve", |rec| {
        let r = nu_check(model, &problem(model, 1.0)?, taus)?;
        rec.value("nu", r.nu);
        rec.value("argmin_tau", r.argmin_tau);
        rec.value("points", r.taus.len() as f64);
        rows = r
            .taus
            .iter()
            .zip(&r.mus)
            .map(|(&tau, &mu)| MuRow { tau, mu, is_min: tau == r.argmin_tau, upper_bound: tau != 1.0 })
            .collect();
        if rows.iter().any(|row| row.upper_bound) {
            rec.note("values at τ ≠ 1 are symmetric minima, hence upper bounds");
        }
        Ok((r.argmin_nearest_one && r.monotone).into())
    });
    (report, rows)
}

pub fn scaling(model: &ShrinkerModel) -> CheckReport {
    check(format!("entropy.scaling.{}", tag(model)), "entropy-scaling", |rec| {
        let p = problem(model, 1.0)?;
        let mut ok = true;
        for c in SCALES {
            let d = scaling_check(model, &p, c)?;
            rec.bounded(format!("difference_c{c}"), d, SCALING_TOL);
            ok &= d < SCALING_TOL;
        }
        Ok(ok.into())
    })
}

/// Directional derivatives of W along random directions by central differences.
pub fn gradient(model: &ShrinkerModel, seed: u64) -> CheckReport {
    check(format!("entropy.gradient.{}", tag(model)), "entropy-gradient", |rec| {
        let p = problem(model, 1.0)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u: Vec<f64> = initial_guess(model, &p).iter().map(|x| x * (1.0 + 0.3 * rng.gen::<f64>())).collect();
        let g = p.energy_gradient(&u);
        let h = 1e-4;
        let mut worst = 0.0_f64;
        for _ in 0..GRADIENT_DIRECTIONS {
            let d: Vec<f64> = (0..p.len()).map(|_| rng.gen_range(-1.0..1.0) * u[0]).collect();
            let shift = |sign: f64| u.iter().zip(&d).map(|(a, b)| a + sign * h * b).collect::<Vec<f64>>();
            let fd = (p.energy(&shift(1.0)) - p.energy(&shift(-1.0))) / (2.0 * h);
            let an: f64 = g.iter().zip(&d).map(|(a, b)| a * b).sum();
            worst = worst.max((fd - an).abs() / an.abs());
        }
        rec.bounded("max_relative_error", worst, GRADIENT_TOL);
        Ok((worst < GRADIENT_TOL).into())
    })
}

/// Constant and bump trial functions through the Sobolev quotient.
pub fn sobolev(model: &ShrinkerModel) -> CheckReport {
    check(format!("entropy.sobolev.{}", tag(model)), "sobolev-jensen", |rec| {
        let p = problem(model, 1.0)?;
        let (lo, hi) = model.profile.domain;
        let constant = vec![1.0; p.len()];
        let bump: Vec<f64> = p.nodes.iter().map(|&s| (-((s - lo) / (hi - lo) - 0.3).powi(2) * 20.0).exp()).collect();
        let r = sobolev_check(&p, &[constant, bump])?;
        rec.value("best_constant", r.best_constant);
        for (i, t) in r.trials.iter().enumerate() {
            rec.bounded(format!("jensen_gap_{i}"), t.jensen_gap, 0.0);
        }
        Ok(r.jensen_ok.into())
    })
}

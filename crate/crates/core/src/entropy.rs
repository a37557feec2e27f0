//! The W-functional and μ(g, τ) on closed rotationally symmetric models.
//!
//! Functions of s alone are discretized on a cell-centred grid. The Dirichlet form
//! ∫|∇u|² dv becomes Σ c_e (u_{i+1} − u_i)² with edge weights c_e = |S^{m-1}| φ(s_e)^{m-1}/h,
//! so no flux crosses the two caps.

use alloc::vec;
use alloc::vec::Vec;

use crate::catalog::{total_weighted_volume, ShrinkerModel};
use crate::error::{Error, Result};
use crate::num::{simpson, solve_tridiagonal, sphere_area, PI};
use crate::warped::slice::curvature_at;
use crate::warped::volume::ball_volume;

pub const DEFAULT_NODES: usize = 1024;
/// Target for the Euler–Lagrange residual (weighted L² norm).
pub const EL_TOL: f64 = 1e-8;
/// Lower floor for u inside the optimizer.
pub const U_FLOOR: f64 = 1e-12;
const DESCENT_BUDGET: usize = 4000;

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyProblem {
    pub m: usize,
    pub nodes: Vec<f64>,
    /// dv per cell
    pub weights: Vec<f64>,
    pub r: Vec<f64>,
    /// Dirichlet weights between consecutive nodes (len n − 1)
    pub edges: Vec<f64>,
    pub tau: f64,
}

impl EntropyProblem {
    /// Reduced problem on a closed model (both ends smooth caps).
    pub fn new(model: &ShrinkerModel, n: usize, tau: f64) -> Result<Self> {
        let p = &model.profile;
        if p.caps != (true, true) {
            return Err(Error::Capability("entropy minimization needs a closed model"));
        }
        if n < 8 {
            return Err(Error::Domain { what: "node count", value: n as f64 });
        }
        if !(tau > 0.0) {
            return Err(Error::Domain { what: "tau", value: tau });
        }
        let m = p.m;
        let (lo, hi) = p.domain;
        let h = (hi - lo) / n as f64;
        let area = sphere_area(m - 1);
        let vol = |s: f64| libm::pow(p.phi(s).max(0.0), (m - 1) as f64);
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        let mut r = Vec::with_capacity(n);
        for i in 0..n {
            let a = lo + h * i as f64;
            let s = a + 0.5 * h;
            nodes.push(s);
            weights.push(area * simpson(vol, a, a + h, 8));
            r.push(curvature_at(p, s)?.r);
        }
        let edges = (1..n).map(|i| area * vol(lo + h * i as f64) / h).collect();
        Ok(Self { m, nodes, weights, r, edges, tau })
    }

    pub fn with_tau(&self, tau: f64) -> Self {
        Self { tau, ..self.clone() }
    }

    /// The problem for the metric c·g at scale c·τ.
    pub fn scaled(&self, c: f64) -> Self {
        let half = libm::pow(c, self.m as f64 / 2.0);
        Self {
            m: self.m,
            nodes: self.nodes.iter().map(|s| s * libm::sqrt(c)).collect(),
            weights: self.weights.iter().map(|w| w * half).collect(),
            r: self.r.iter().map(|r| r / c).collect(),
            edges: self.edges.iter().map(|e| e * half / c).collect(),
            tau: self.tau * c,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn volume(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// ∫ u v dv
    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        self.weights.iter().zip(u).zip(v).map(|((w, a), b)| w * a * b).sum()
    }

    /// ∫ |∇u|² dv
    pub fn dirichlet(&self, u: &[f64]) -> f64 {
        self.edges.iter().enumerate().map(|(i, c)| c * (u[i + 1] - u[i]) * (u[i + 1] - u[i])).sum()
    }

    /// −Δu at the nodes (symmetric for the weighted inner product, constants in the kernel).
    pub fn neg_laplacian(&self, u: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut out = vec![0.0; n];
        for (i, c) in self.edges.iter().enumerate() {
            let flux = c * (u[i + 1] - u[i]);
            out[i] -= flux;
            out[i + 1] += flux;
        }
        out.iter_mut().zip(&self.weights).for_each(|(o, w)| *o /= w);
        out
    }

    fn normalization_constants(&self) -> f64 {
        let mf = self.m as f64;
        mf + mf / 2.0 * libm::log(4.0 * PI * self.tau)
    }

    /// ∫ τ(4|∇u|² + R u²) − u² log u² dv, without the normalization constants.
    pub fn energy(&self, u: &[f64]) -> f64 {
        let mut e = 4.0 * self.tau * self.dirichlet(u);
        for i in 0..self.len() {
            let x = u[i] * u[i];
            let ent = if x > 0.0 { x * libm::log(x) } else { 0.0 };
            e += self.weights[i] * (self.tau * self.r[i] * x - ent);
        }
        e
    }

    /// Gradient of `energy` with respect to the node values.
    pub fn energy_gradient(&self, u: &[f64]) -> Vec<f64> {
        let lap = self.neg_laplacian(u);
        (0..self.len())
            .map(|i| {
                let x = u[i] * u[i];
                let ent = if x > 0.0 { libm::log(x) + 1.0 } else { 0.0 };
                self.weights[i] * (8.0 * self.tau * lap[i] + 2.0 * self.tau * self.r[i] * u[i] - 2.0 * u[i] * ent)
            })
            .collect()
    }

    /// τ(−4Δu + Ru) − u log u² − λu, with λ = ⟨u, that operator applied to u⟩.
    pub fn euler_lagrange(&self, u: &[f64]) -> (Vec<f64>, f64) {
        let lap = self.neg_laplacian(u);
        let mut a: Vec<f64> = (0..self.len())
            .map(|i| {
                let x = u[i] * u[i];
                let l = if x > 0.0 { libm::log(x) } else { 0.0 };
                self.tau * (4.0 * lap[i] + self.r[i] * u[i]) - u[i] * l
            })
            .collect();
        let lambda = self.inner(u, &a);
        a.iter_mut().zip(u).for_each(|(v, ui)| *v -= lambda * ui);
        (a, lambda)
    }
}

fn check_normalized(p: &EntropyProblem, u: &[f64]) -> Result<()> {
    if u.len() != p.len() {
        return Err(Error::Contract("u has the wrong length"));
    }
    let i = p.inner(u, u);
    if libm::fabs(i - 1.0) > 1e-10 {
        return Err(Error::Normalization { integral: i });
    }
    Ok(())
}

/// W(g, u, τ) for ∫u² dv = 1.
pub fn w_functional(p: &EntropyProblem, u: &[f64]) -> Result<f64> {
    check_normalized(p, u)?;
    Ok(p.energy(u) - p.normalization_constants())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MuResult {
    pub tau: f64,
    pub mu: f64,
    pub u: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
    /// the search ran over rotationally symmetric u only, so away from τ = 1 the value
    /// is certified only as an upper bound
    pub symmetric_upper_bound: bool,
}

fn normalize(p: &EntropyProblem, u: &mut [f64]) {
    let k = 1.0 / libm::sqrt(p.inner(u, u));
    u.iter_mut().for_each(|x| *x = (*x * k).max(U_FLOOR));
    let k = 1.0 / libm::sqrt(p.inner(u, u));
    u.iter_mut().for_each(|x| *x *= k);
}

fn el_norm(p: &EntropyProblem, u: &[f64]) -> f64 {
    let (g, _) = p.euler_lagrange(u);
    libm::sqrt(p.inner(&g, &g))
}

/// Preconditioned projected gradient with Armijo backtracking. The preconditioner
/// is (1 − 4τΔ), one tridiagonal solve per step.
fn descend(p: &EntropyProblem, u: &mut Vec<f64>, tol: f64) -> Result<usize> {
    let n = p.len();
    let (mut sub, mut diag, mut sup) = (vec![0.0; n], vec![1.0; n], vec![0.0; n]);
    for (i, c) in p.edges.iter().enumerate() {
        let k = 4.0 * p.tau * c;
        diag[i] += k / p.weights[i];
        diag[i + 1] += k / p.weights[i + 1];
        sup[i] = -k / p.weights[i];
        sub[i + 1] = -k / p.weights[i + 1];
    }
    let mut e = p.energy(u);
    for it in 0..DESCENT_BUDGET {
        let (g, _) = p.euler_lagrange(u);
        let gn = libm::sqrt(p.inner(&g, &g));
        if gn < tol {
            return Ok(it);
        }
        let mut d = solve_tridiagonal(&sub, &diag, &sup, &g)?;
        let du = p.inner(&d, u);
        d.iter_mut().zip(u.iter()).for_each(|(x, ui)| *x -= du * ui);
        // energy decreases at rate 2⟨g, d⟩ along u − αd
        let slope = 2.0 * p.inner(&g, &d);
        let mut alpha = 1.0;
        let mut moved = false;
        for _ in 0..40 {
            let mut trial: Vec<f64> = u.iter().zip(&d).map(|(a, b)| a - alpha * b).collect();
            normalize(p, &mut trial);
            let et = p.energy(&trial);
            if et <= e - 1e-4 * alpha * slope {
                *u = trial;
                e = et;
                moved = true;
                break;
            }
            alpha *= 0.5;
        }
        if !moved {
            return Ok(it);
        }
    }
    Ok(DESCENT_BUDGET)
}

/// Newton on the bordered system for (u, λ): G(u) − λu = 0, ∫u² = 1.
fn newton_polish(p: &EntropyProblem, u: &mut Vec<f64>) -> Result<usize> {
    let n = p.len();
    for it in 0..30 {
        let (g, lambda) = p.euler_lagrange(u);
        if libm::sqrt(p.inner(&g, &g)) < 1e-13 {
            return Ok(it);
        }
        let (mut sub, mut diag, mut sup) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        for i in 0..n {
            let x = u[i] * u[i];
            diag[i] = p.tau * p.r[i] - libm::log(x) - 2.0 - lambda;
        }
        for (i, c) in p.edges.iter().enumerate() {
            let k = 4.0 * p.tau * c;
            diag[i] += k / p.weights[i];
            diag[i + 1] += k / p.weights[i + 1];
            sup[i] = -k / p.weights[i];
            sub[i + 1] = -k / p.weights[i + 1];
        }
        let neg_g: Vec<f64> = g.iter().map(|v| -v).collect();
        let y1 = solve_tridiagonal(&sub, &diag, &sup, &neg_g)?;
        let y2 = solve_tridiagonal(&sub, &diag, &sup, u)?;
        let c0 = p.inner(u, u) - 1.0;
        let dl = (-c0 - 2.0 * p.inner(u, &y1)) / (2.0 * p.inner(u, &y2));
        let before = libm::sqrt(p.inner(&g, &g));
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..20 {
            let mut trial: Vec<f64> = (0..n).map(|i| u[i] + step * (y1[i] + dl * y2[i])).collect();
            if trial.iter().all(|x| *x > 0.0) {
                normalize(p, &mut trial);
                if el_norm(p, &trial) < before {
                    *u = trial;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted {
            return Ok(it);
        }
    }
    Ok(30)
}

/// u ∝ e^{−f/2} tilted by a small first mode, so a symmetric saddle (the constant
/// below the bifurcation scale) is not mistaken for the minimizer.
pub fn initial_guess(model: &ShrinkerModel, p: &EntropyProblem) -> Vec<f64> {
    let (lo, hi) = model.profile.domain;
    let mut u: Vec<f64> = p
        .nodes
        .iter()
        .map(|&s| libm::exp(-0.5 * model.potential.f(s)) * (1.0 + 0.05 * libm::cos(PI * (s - lo) / (hi - lo))))
        .collect();
    normalize(p, &mut u);
    u
}

/// μ(g, τ) = inf W over normalized u, from a given start.
pub fn minimize_mu_from(p: &EntropyProblem, start: &[f64]) -> Result<MuResult> {
    let mut u = start.to_vec();
    normalize(p, &mut u);
    let mut iterations = descend(p, &mut u, 1e-4)?;
    iterations += newton_polish(p, &mut u)?;
    let residual = el_norm(p, &u);
    let mu = w_functional(p, &u)?;
    if !(residual < EL_TOL) {
        return Err(Error::Convergence { what: "entropy minimization (value is an upper bound)", best: mu, bracket: (residual, EL_TOL) });
    }
    Ok(MuResult { tau: p.tau, mu, u, iterations, residual, symmetric_upper_bound: p.tau != 1.0 })
}

pub fn minimize_mu(model: &ShrinkerModel, p: &EntropyProblem) -> Result<MuResult> {
    minimize_mu_from(p, &initial_guess(model, p))
}

/// log((4π)^{−m/2} ∫ e^{−f} dv).
pub fn mu_from_potential(model: &ShrinkerModel) -> f64 {
    let m = model.m() as f64;
    libm::log(total_weighted_volume(model)) - m / 2.0 * libm::log(4.0 * PI)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NuReport {
    pub taus: Vec<f64>,
    pub mus: Vec<f64>,
    pub nu: f64,
    pub argmin_tau: f64,
    pub argmin_nearest_one: bool,
    pub monotone: bool,
}

/// μ(g, τ) along a grid; ν is the grid minimum. Checks the argmin and the pattern
/// (non-increasing below τ = 1, non-decreasing above).
pub fn nu_check(model: &ShrinkerModel, p: &EntropyProblem, taus: &[f64]) -> Result<NuReport> {
    let mut taus = taus.to_vec();
    taus.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    if taus.is_empty() {
        return Err(Error::Contract("empty tau grid"));
    }
    let mut mus = Vec::with_capacity(taus.len());
    for &t in &taus {
        let q = p.with_tau(t);
        mus.push(minimize_mu(model, &q)?.mu);
    }
    let (imin, nu) = mus.iter().copied().enumerate().fold((0, f64::INFINITY), |a, (i, v)| if v < a.1 { (i, v) } else { a });
    let nearest = taus
        .iter()
        .enumerate()
        .min_by(|a, b| libm::fabs(a.1 - 1.0).partial_cmp(&libm::fabs(b.1 - 1.0)).unwrap_or(core::cmp::Ordering::Equal))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let tol = 1e-9;
    let mut monotone = true;
    for i in 1..taus.len() {
        if taus[i] <= 1.0 && mus[i] > mus[i - 1] + tol {
            monotone = false;
        }
        if taus[i - 1] >= 1.0 && mus[i] < mus[i - 1] - tol {
            monotone = false;
        }
    }
    Ok(NuReport { argmin_tau: taus[imin], argmin_nearest_one: imin == nearest, taus, mus, nu, monotone })
}

/// |μ(c g, c τ) − μ(g, τ)|.
pub fn scaling_check(model: &ShrinkerModel, p: &EntropyProblem, c: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::Domain { what: "scale factor", value: c });
    }
    let a = minimize_mu(model, p)?;
    let q = p.scaled(c);
    let b = minimize_mu_from(&q, &a.u)?;
    Ok(libm::fabs(a.mu - b.mu))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevTrial {
    /// (∫u^{2m/(m−2)})^{(m−2)/m} / ∫(4|∇u|² + Ru²)
    pub ratio: f64,
    /// (m−2)/2 · log ∫u^{2m/(m−2)} − ∫u² log u², nonnegative by Jensen
    pub jensen_gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SobolevReport {
    pub trials: Vec<SobolevTrial>,
    pub best_constant: f64,
    pub jensen_ok: bool,
}

/// Sobolev quotient and the Jensen step on each trial (normalized internally).
pub fn sobolev_check(p: &EntropyProblem, trials: &[Vec<f64>]) -> Result<SobolevReport> {
    if p.r.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::Capability("Sobolev check needs positive scalar curvature"));
    }
    let m = p.m as f64;
    let q = 2.0 * m / (m - 2.0);
    let mut out = Vec::with_capacity(trials.len());
    for t in trials {
        if t.len() != p.len() {
            return Err(Error::Contract("trial has the wrong length"));
        }
        let mut u: Vec<f64> = t.iter().map(|x| libm::fabs(*x)).collect();
        let k = libm::sqrt(p.inner(&u, &u));
        if !(k > 0.0) {
            return Err(Error::Contract("zero trial function"));
        }
        u.iter_mut().for_each(|x| *x /= k);
        let lq: f64 = p.weights.iter().zip(&u).map(|(w, x)| w * libm::pow(*x, q)).sum();
        let denom = 4.0 * p.dirichlet(&u) + p.inner(&u, &u.iter().zip(&p.r).map(|(x, r)| x * r).collect::<Vec<_>>());
        let ent: f64 = p
            .weights
            .iter()
            .zip(&u)
            .map(|(w, x)| if *x > 0.0 { w * x * x * libm::log(x * x) } else { 0.0 })
            .sum();
        out.push(SobolevTrial { ratio: libm::pow(lq, (m - 2.0) / m) / denom, jensen_gap: (m - 2.0) / 2.0 * libm::log(lq) - ent });
    }
    let best = out.iter().map(|t| t.ratio).fold(0.0, f64::max);
    let jensen_ok = out.iter().all(|t| t.jensen_gap >= -1e-10);
    Ok(SobolevReport { trials: out, best_constant: best, jensen_ok })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeMuReport {
    pub mu: f64,
    pub volume: f64,
    pub log_ratio: f64,
    pub log_lower: f64,
    pub log_upper: f64,
    pub pass: bool,
}

/// e^{−2^{4m+7}} ≤ |B(p,1)| / ((4π)^{m/2} e^μ) ≤ e^m, compared in log space.
pub fn volume_mu_check(model: &ShrinkerModel) -> Result<VolumeMuReport> {
    let m = model.m() as f64;
    let mu = mu_from_potential(model);
    let volume = ball_volume(&model.profile, None, model.p(), 1.0, false)?;
    let log_ratio = libm::log(volume) - m / 2.0 * libm::log(4.0 * PI) - mu;
    let log_lower = -libm::pow(2.0, 4.0 * m + 7.0);
    Ok(VolumeMuReport { mu, volume, log_ratio, log_lower, log_upper: m, pass: log_ratio >= log_lower && log_ratio <= m })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{make_cylinder, make_gaussian, make_sphere};
    use crate::num::SplitMix64;

    fn sphere4() -> (ShrinkerModel, EntropyProblem) {
        let s = make_sphere(4).unwrap();
        let p = EntropyProblem::new(&s, DEFAULT_NODES, 1.0).unwrap();
        (s, p)
    }

    fn constant(p: &EntropyProblem) -> Vec<f64> {
        vec![1.0 / libm::sqrt(p.volume()); p.len()]
    }

    #[test]
    fn grid_weights_reproduce_the_volume() {
        let (_, p) = sphere4();
        assert!(libm::fabs(p.volume() / (96.0 * PI * PI) - 1.0) < 1e-12);
        assert!(p.weights.iter().all(|w| *w > 0.0));
    }

    #[test]
    fn laplacian_is_weight_symmetric_with_constant_kernel() {
        let (_, p) = sphere4();
        let mut rng = SplitMix64(5);
        let u: Vec<f64> = (0..p.len()).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let v: Vec<f64> = (0..p.len()).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let a = p.inner(&u, &p.neg_laplacian(&v));
        let b = p.inner(&p.neg_laplacian(&u), &v);
        assert!(libm::fabs(a - b) < 1e-9 * libm::fabs(a).max(1.0));
        assert!(p.neg_laplacian(&vec![2.0; p.len()]).iter().all(|x| *x == 0.0));
    }

    #[test]
    fn constant_u_on_the_sphere() {
        let (_, p) = sphere4();
        let u = constant(&p);
        // τR − log(1/V) − m − (m/2) log(4πτ) with R = 2, V = 96π²
        let w1 = w_functional(&p, &u).unwrap();
        assert!(libm::fabs(w1 - (libm::log(6.0) - 2.0)) < 1e-10, "{w1}");
        let w2 = w_functional(&p.with_tau(2.0), &u).unwrap();
        assert!(libm::fabs(w2 - libm::log(1.5)) < 1e-10, "{w2}");
    }

    #[test]
    fn unnormalized_u_is_rejected() {
        let (_, p) = sphere4();
        let u = vec![1.0; p.len()];
        assert!(matches!(w_functional(&p, &u), Err(Error::Normalization { .. })));
    }

    #[test]
    fn gradient_matches_central_differences() {
        let (s, p) = sphere4();
        let mut rng = SplitMix64(42);
        let u: Vec<f64> = initial_guess(&s, &p).iter().map(|x| x * (1.0 + 0.3 * rng.next_f64())).collect();
        let g = p.energy_gradient(&u);
        for _ in 0..20 {
            let d: Vec<f64> = (0..p.len()).map(|_| rng.uniform(-1.0, 1.0) * u[0]).collect();
            let h = 1e-4;
            let up: Vec<f64> = u.iter().zip(&d).map(|(a, b)| a + h * b).collect();
            let dn: Vec<f64> = u.iter().zip(&d).map(|(a, b)| a - h * b).collect();
            let fd = (p.energy(&up) - p.energy(&dn)) / (2.0 * h);
            let an: f64 = g.iter().zip(&d).map(|(a, b)| a * b).sum();
            assert!(libm::fabs(fd - an) <= 1e-6 * libm::fabs(an), "{fd} vs {an}");
        }
    }

    #[test]
    fn sphere_mu_at_one_is_constant_minimizer() {
        let (s, p) = sphere4();
        let r = minimize_mu(&s, &p).unwrap();
        assert!(libm::fabs(r.mu - (libm::log(6.0) - 2.0)) < 1e-3);
        assert!(libm::fabs(r.mu - mu_from_potential(&s)) < 1e-3);
        assert!(r.residual < EL_TOL);
        let hi = r.u.iter().copied().fold(f64::MIN, f64::max);
        let lo = r.u.iter().copied().fold(f64::MAX, f64::min);
        assert!(hi - lo < 1e-6 * libm::sqrt(p.inner(&r.u, &r.u)));
        assert!(r.u.iter().all(|x| *x > 0.0));
        assert!(!r.symmetric_upper_bound);
    }

    #[test]
    fn below_the_bifurcation_the_constant_is_beaten() {
        let (s, p) = sphere4();
        let q = p.with_tau(0.5);
        let r = minimize_mu(&s, &q).unwrap();
        let c = w_functional(&q, &constant(&q)).unwrap();
        assert!(r.mu < c - 1e-4, "{} vs {c}", r.mu);
        assert!(r.symmetric_upper_bound);
    }

    #[test]
    fn potential_values() {
        assert!(libm::fabs(mu_from_potential(&make_gaussian(4).unwrap())) < 1e-10);
        let s = make_sphere(4).unwrap();
        assert!(libm::fabs(mu_from_potential(&s) - (libm::log(6.0) - 2.0)) < 1e-10);
        let c = make_cylinder(4).unwrap();
        assert!(libm::fabs(mu_from_potential(&c) - c.mu_exact.unwrap().0) < 1e-8);
    }

    #[test]
    fn scaling_is_exact() {
        let (s, p) = sphere4();
        assert!(scaling_check(&s, &p, 1.0).unwrap() < 1e-12);
        assert!(scaling_check(&s, &p, 2.0).unwrap() < 1e-6);
        assert!(scaling_check(&s, &p.with_tau(2.0), 0.5).unwrap() < 1e-6);
    }

    #[test]
    fn single_point_grid() {
        let (s, p) = sphere4();
        let r = nu_check(&s, &p, &[1.0]).unwrap();
        assert_eq!(r.argmin_tau, 1.0);
        assert!(libm::fabs(r.nu - (libm::log(6.0) - 2.0)) < 1e-3);
    }

    #[test]
    fn sphere_curve_bottoms_out_at_one() {
        let (s, p) = sphere4();
        let r = nu_check(&s, &p, &[0.5, 0.75, 1.0, 1.5, 2.0]).unwrap();
        assert_eq!(r.argmin_tau, 1.0);
        assert!(r.argmin_nearest_one && r.monotone);
        assert_eq!(r.nu, r.mus[2]);
    }

    #[test]
    fn sobolev_constant_and_bump() {
        let (_, p) = sphere4();
        let v = p.volume();
        let bump: Vec<f64> = p.nodes.iter().map(|s| 1.0 + 0.5 * libm::cos(s / libm::sqrt(6.0))).collect();
        let r = sobolev_check(&p, &[constant(&p), bump]).unwrap();
        // constant: V^{-2/m} / R
        assert!(libm::fabs(r.trials[0].ratio - libm::pow(v, -0.5) / 2.0) < 1e-12);
        assert!(libm::fabs(r.trials[0].jensen_gap) < 1e-10);
        assert!(r.trials[1].jensen_gap > 0.0 && r.jensen_ok);
    }

    #[test]
    fn volume_mu_bracket() {
        let g = volume_mu_check(&make_gaussian(4).unwrap()).unwrap();
        // ω₄ / (4π)² = 1/32
        assert!(libm::fabs(libm::exp(g.log_ratio) - 1.0 / 32.0) < 1e-9 && g.pass);
        assert!(volume_mu_check(&make_sphere(4).unwrap()).unwrap().pass);
        assert!(volume_mu_check(&make_cylinder(4).unwrap()).unwrap().pass);
    }

    #[test]
    fn open_models_are_refused() {
        assert!(matches!(
            EntropyProblem::new(&make_gaussian(4).unwrap(), 64, 1.0),
            Err(Error::Capability(_))
        ));
    }
}

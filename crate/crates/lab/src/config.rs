//! Run settings: defaults, overridden by a JSON config file, overridden by flags.

use std::path::Path;

use serde::{Deserialize, Serialize};
use shrinker_core::gh::EXACT_MAX_POINTS;

use crate::UsageError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    pub m: usize,
    pub seed: u64,
    /// volume-radius threshold
    pub delta: f64,
    /// GH-radius threshold
    pub eps: f64,
    /// conformal radii r
    pub radii: Vec<f64>,
    /// GH ball radii ρ
    pub rhos: Vec<f64>,
    pub tau_grid: Vec<f64>,
    pub gh_pairs: usize,
    pub gh_max_points: usize,
    /// share of the GH budget a net may spend on discretization slack
    pub eps_net: f64,
    pub soliton_tol: f64,
    /// execution detail, not part of the result
    #[serde(skip)]
    pub threads: Option<usize>,
}

/// τ = 0.25 · 2^{k/2}, k = 0..8: spans [0.25, 4] and contains 1.
pub fn default_tau_grid() -> Vec<f64> {
    (0..9).map(|k| 0.25 * 2f64.powf(k as f64 / 2.0)).collect()
}

/// `n` geometrically spaced values from `lo` to `hi`.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64)).collect()
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            m: 4,
            seed: 42,
            delta: shrinker_core::radii::DEFAULT_DELTA,
            eps: shrinker_core::radii::DEFAULT_EPS,
            radii: vec![0.1, 0.5],
            rhos: vec![0.02, 0.05],
            tau_grid: default_tau_grid(),
            gh_pairs: 50,
            gh_max_points: 6,
            eps_net: shrinker_core::conformal::GH_SLACK_FRACTION,
            soliton_tol: 1e-10,
            threads: None,
        }
    }
}

/// Every field optional; used for both the config file and the flag layer.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Overrides {
    pub m: Option<usize>,
    pub seed: Option<u64>,
    pub delta: Option<f64>,
    pub eps: Option<f64>,
    pub radii: Option<Vec<f64>>,
    pub rhos: Option<Vec<f64>>,
    pub tau_grid: Option<Vec<f64>>,
    pub gh_pairs: Option<usize>,
    pub gh_max_points: Option<usize>,
    pub eps_net: Option<f64>,
    pub soliton_tol: Option<f64>,
    pub threads: Option<usize>,
}

macro_rules! layer {
    ($dst:expr, $src:expr, $($f:ident),*) => {
        $( if let Some(v) = $src.$f.clone() { $dst.$f = v; } )*
    };
}

impl Overrides {
    pub fn apply(&self, s: &mut Settings) {
        layer!(s, self, m, seed, delta, eps, radii, rhos, tau_grid, gh_pairs, gh_max_points, eps_net, soliton_tol);
        if self.threads.is_some() {
            s.threads = self.threads;
        }
    }

    pub fn from_file(path: &Path) -> Result<Self, UsageError> {
        let text = std::fs::read_to_string(path).map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| UsageError(format!("malformed config {}: {e}", path.display())))
    }
}

/// defaults < config file < flags
pub fn resolve(file: Option<&Path>, flags: &Overrides) -> Result<Settings, UsageError> {
    let mut s = Settings::default();
    if let Some(p) = file {
        Overrides::from_file(p)?.apply(&mut s);
    }
    flags.apply(&mut s);
    validate(&s)?;
    Ok(s)
}

fn positive_list(name: &str, v: &[f64], max: f64) -> Result<(), UsageError> {
    if v.is_empty() || v.iter().any(|x| !(*x > 0.0 && *x <= max)) {
        return Err(UsageError(format!("{name} must be a nonempty list in (0, {max}]")));
    }
    Ok(())
}

pub fn validate(s: &Settings) -> Result<(), UsageError> {
    if !(3..=8).contains(&s.m) {
        return Err(UsageError(format!("m = {} outside 3..=8", s.m)));
    }
    for (name, v) in [("delta", s.delta), ("eps", s.eps), ("eps_net", s.eps_net)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(UsageError(format!("{name} = {v} outside (0, 1)")));
        }
    }
    if !(s.soliton_tol > 0.0) {
        return Err(UsageError("soliton_tol must be positive".into()));
    }
    positive_list("radii", &s.radii, 1.0)?;
    positive_list("rhos", &s.rhos, 1.0)?;
    positive_list("tau_grid", &s.tau_grid, 100.0)?;
    if s.gh_pairs == 0 || !(2..=EXACT_MAX_POINTS).contains(&s.gh_max_points) {
        return Err(UsageError(format!("gh_pairs ≥ 1 and gh_max_points in 2..={EXACT_MAX_POINTS}")));
    }
    if s.threads == Some(0) {
        return Err(UsageError("threads must be at least 1".into()));
    }
    Ok(())
}

/// Parses `axis:0,0.5,1` (or a bare list) into axis coordinates.
pub fn parse_points(spec: &str) -> Result<Vec<f64>, UsageError> {
    let list = spec.strip_prefix("axis:").unwrap_or(spec);
    let pts: Result<Vec<f64>, _> = list.split(',').map(|t| t.trim().parse::<f64>()).collect();
    match pts {
        Ok(v) if !v.is_empty() && v.iter().all(|x| x.is_finite()) => Ok(v),
        _ => Err(UsageError(format!("cannot parse points '{spec}' (expected axis:s1,s2,...)"))),
    }
}

/// Thread count from the settings, else SHRINKER_LAB_THREADS.
pub fn thread_cap(s: &Settings) -> Result<Option<usize>, UsageError> {
    if s.threads.is_some() {
        return Ok(s.threads);
    }
    match std::env::var("SHRINKER_LAB_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(UsageError(format!("SHRINKER_LAB_THREADS='{v}' is not a positive integer"))),
        },
        Err(_) => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_beat_file_beat_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        std::fs::write(&p, r#"{"m": 5, "seed": 7, "delta": 0.1}"#).unwrap();
        let flags = Overrides { seed: Some(9), ..Default::default() };
        let s = resolve(Some(&p), &flags).unwrap();
        assert_eq!((s.m, s.seed, s.delta, s.eps), (5, 9, 0.1, Settings::default().eps));
    }

    #[test]
    fn malformed_input_is_a_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        std::fs::write(&p, r#"{"mm": 5}"#).unwrap();
        assert!(resolve(Some(&p), &Overrides::default()).is_err());
        assert!(resolve(None, &Overrides { m: Some(2), ..Default::default() }).is_err());
        assert!(resolve(None, &Overrides { radii: Some(vec![]), ..Default::default() }).is_err());
        assert!(parse_points("axis:0,x").is_err());
    }

    #[test]
    fn points_and_grids() {
        assert_eq!(parse_points("axis:0,0.5,1").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_points("2").unwrap(), vec![2.0]);
        let g = default_tau_grid();
        assert_eq!(g.len(), 9);
        assert_eq!(g[4], 1.0);
        assert!((g[8] - 4.0).abs() < 1e-12);
        let h = geometric_grid(0.25, 4.0, 16);
        assert!((h[15] - 4.0).abs() < 1e-12 && h[0] == 0.25);
    }
}

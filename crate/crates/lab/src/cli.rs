//! Argument parsing and command execution. Nothing is written until every input has been
//! validated and every check has run.

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use shrinker_core::catalog::{ShrinkerModel, MODEL_NAMES};

use crate::checks::{self, catalog, conformal, entropy, gaussian, gh, radii};
use crate::config::{self, geometric_grid, parse_points, Overrides, Settings};
use crate::model_io::{catalog_model, load_model, ModelSpec};
use crate::output::{polyline_svg, reports_csv, reports_json, table_csv};
use crate::report::{CheckReport, Status};
use crate::UsageError;

#[derive(Debug, Parser)]
#[command(name = "shrinker-lab", version, about = "Numerical checks on rotationally symmetric Ricci shrinkers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// JSON config file; flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// volume-radius threshold
    #[arg(long)]
    pub delta: Option<f64>,
    /// GH-radius threshold
    #[arg(long)]
    pub eps: Option<f64>,
    /// conformal ball radii r, comma separated
    #[arg(long, value_delimiter = ',')]
    pub radii: Option<Vec<f64>>,
    /// GH ball radii ρ, comma separated
    #[arg(long, value_delimiter = ',')]
    pub rhos: Option<Vec<f64>>,
    /// worker threads (else SHRINKER_LAB_THREADS, else all cores)
    #[arg(long)]
    pub threads: Option<usize>,
    /// directory for report.csv / report.json
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// print the JSON report on stdout instead of the table
    #[arg(long)]
    pub json: bool,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            m: self.m,
            seed: self.seed,
            delta: self.delta,
            eps: self.eps,
            radii: self.radii.clone(),
            rhos: self.rhos.clone(),
            threads: self.threads,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ModelArg {
    /// catalog model: gaussian, sphere or cylinder
    #[arg(long, default_value = "sphere")]
    pub model: String,
    /// model JSON file (takes precedence over --model)
    #[arg(long)]
    pub model_file: Option<PathBuf>,
}

impl ModelArg {
    fn resolve(&self, m: usize) -> Result<ShrinkerModel, UsageError> {
        match &self.model_file {
            Some(p) => load_model(p),
            None => catalog_model(&self.model, m),
        }
    }
    fn resolve_closed(&self, m: usize) -> Result<ShrinkerModel, UsageError> {
        let model = self.resolve(m)?;
        if model.profile.caps != (true, true) {
            return Err(UsageError(format!("entropy needs a closed model; '{}' has an open end", model.name)));
        }
        Ok(model)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List, verify or export catalog models
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Conformal chart checks around a point
    Conformal {
        #[command(flatten)]
        model: ModelArg,
        /// chart center (default: the minimum point of f)
        #[arg(long)]
        q: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// erfc⁻¹ identities and the antipodal experiment on the compressed Gaussian
    GaussianGeodesic {
        /// ε values (default: ten points in (0, s₀/4))
        #[arg(long, value_delimiter = ',')]
        eps_list: Option<Vec<f64>>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        plot: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Entropy μ(g, τ) at one scale or along a curve
    Entropy {
        #[command(subcommand)]
        action: EntropyAction,
    },
    /// GH bound sandwich on random small metric spaces
    Gh {
        #[arg(long)]
        pairs: Option<usize>,
        #[arg(long)]
        max_points: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Volume, GH and convexity radii at axis points
    Radii {
        #[command(flatten)]
        model: ModelArg,
        /// axis coordinates, e.g. axis:0,0.5,1
        #[arg(long, default_value = "axis:0,0.5,1")]
        points: String,
        /// only the capped radii (skips the slow uncapped GH search)
        #[arg(long)]
        bold_only: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Every check group; writes report.csv, report.json, mu.csv, mu.svg, antipodal.csv
    VerifyAll {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Subcommand)]
pub enum CatalogAction {
    List,
    Verify {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Write the model as JSON
    Export {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Subcommand)]
pub enum EntropyAction {
    Mu {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        #[command(flatten)]
        common: Common,
    },
    Curve {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long, default_value_t = 0.25)]
        tau_min: f64,
        #[arg(long, default_value_t = 4.0)]
        tau_max: f64,
        #[arg(long, default_value_t = 9)]
        points: usize,
        #[arg(long, default_value = "mu.csv")]
        csv: PathBuf,
        #[arg(long)]
        plot: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

/// What a command produced; written out by the caller.
#[derive(Debug, Default)]
pub struct Outcome {
    pub command: String,
    pub settings: Option<Settings>,
    pub reports: Vec<CheckReport>,
    pub artifacts: Vec<(PathBuf, Vec<u8>)>,
    /// text for stdout when there are no reports
    pub text: String,
    pub json: bool,
}

impl Outcome {
    pub fn failed(&self) -> bool {
        self.reports.iter().any(|r| r.status == Status::Fail)
    }
}

fn settings(common: &Common) -> Result<Settings, UsageError> {
    config::resolve(common.config.as_deref(), &common.overrides())
}

fn with_reports(command: &str, s: Settings, common: &Common, reports: Vec<CheckReport>, mut artifacts: Vec<(PathBuf, Vec<u8>)>) -> Result<Outcome> {
    if let Some(dir) = &common.out_dir {
        artifacts.push((dir.join("report.csv"), reports_csv(&reports)?));
        artifacts.push((dir.join("report.json"), reports_json(command, &s, &reports)?));
    }
    Ok(Outcome { command: command.into(), settings: Some(s), reports, artifacts, text: String::new(), json: common.json })
}

fn in_dir(common: &Common, p: &PathBuf) -> PathBuf {
    match &common.out_dir {
        Some(d) if p.is_relative() => d.join(p),
        _ => p.clone(),
    }
}

/// Runs the command; artifacts come back unwritten.
pub fn execute(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Catalog { action } => match action {
            CatalogAction::List => Ok(Outcome { command: "catalog list".into(), text: MODEL_NAMES.join("\n") + "\n", ..Default::default() }),
            CatalogAction::Verify { model, tol, common } => {
                let s = settings(&common)?;
                let mdl = model.resolve(s.m)?;
                let tol = tol.unwrap_or(s.soliton_tol);
                let reports = vec![catalog::soliton(&mdl, tol), catalog::flow(&mdl)];
                with_reports("catalog verify", s, &common, reports, vec![])
            }
            CatalogAction::Export { model, out, common } => {
                let s = settings(&common)?;
                let spec = ModelSpec::from_model(&model.resolve(s.m)?)?;
                let mut bytes = serde_json::to_vec_pretty(&spec)?;
                bytes.push(b'\n');
                Ok(Outcome { command: "catalog export".into(), artifacts: vec![(in_dir(&common, &out), bytes)], ..Default::default() })
            }
        },
        Command::Conformal { model, q, common } => {
            let s = settings(&common)?;
            let mdl = model.resolve(s.m)?;
            let mut reports = vec![conformal::ricci(&mdl, q)];
            for &r in &s.radii {
                reports.push(conformal::curvature_bound(&mdl, q, r));
                reports.push(conformal::sandwich(&mdl, q, r));
                reports.push(conformal::distortion(&mdl, q, r));
                for &rho in &s.rhos {
                    reports.push(conformal::gh_bound(&mdl, q, r, rho, s.eps_net));
                }
            }
            with_reports("conformal", s, &common, reports, vec![])
        }
        Command::GaussianGeodesic { eps_list, csv, plot, common } => {
            let s = settings(&common)?;
            if let Some(e) = &eps_list {
                if e.is_empty() || e.iter().any(|v| !(*v > 0.0)) {
                    return Err(UsageError("eps-list must contain positive values".into()).into());
                }
            }
            let mut reports = vec![gaussian::identities(), gaussian::limits(), gaussian::slope(s.m)];
            let (sweep, rows) = gaussian::antipodal_sweep(s.m, eps_list.as_deref()).map_err(|e| UsageError(e.to_string()))?;
            reports.extend(sweep);
            let mut artifacts = Vec::new();
            if let Some(p) = csv {
                artifacts.push((in_dir(&common, &p), table_csv(&rows)?));
            }
            if let Some(p) = plot {
                let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.eps, r.gap / r.through_tip)).collect();
                artifacts.push((in_dir(&common, &p), polyline_svg("relative excess over 2ε", "ε", "(L − 2ε)/2ε", &pts).into_bytes()));
            }
            with_reports("gaussian-geodesic", s, &common, reports, artifacts)
        }
        Command::Entropy { action } => match action {
            EntropyAction::Mu { model, tau, common } => {
                let s = settings(&common)?;
                let mdl = model.resolve_closed(s.m)?;
                if !(tau > 0.0) {
                    return Err(UsageError(format!("tau = {tau} must be positive")).into());
                }
                let reports = if tau == 1.0 {
                    vec![entropy::mu_at_one(&mdl)]
                } else {
                    vec![entropy::tau_curve(&mdl, &[tau]).0]
                };
                with_reports("entropy mu", s, &common, reports, vec![])
            }
            EntropyAction::Curve { model, tau_min, tau_max, points, csv, plot, common } => {
                let s = settings(&common)?;
                let mdl = model.resolve_closed(s.m)?;
                if !(tau_min > 0.0 && tau_max > tau_min) || points < 2 {
                    return Err(UsageError("need 0 < tau-min < tau-max and points ≥ 2".into()).into());
                }
                let (report, rows) = entropy::tau_curve(&mdl, &geometric_grid(tau_min, tau_max, points));
                let mut artifacts = vec![(in_dir(&common, &csv), table_csv(&rows)?)];
                if let Some(p) = plot {
                    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.tau, r.mu)).collect();
                    artifacts.push((in_dir(&common, &p), polyline_svg("μ(g, τ)", "τ", "μ", &pts).into_bytes()));
                }
                with_reports("entropy curve", s, &common, vec![report], artifacts)
            }
        },
        Command::Gh { pairs, max_points, common } => {
            let mut o = common.overrides();
            o.gh_pairs = pairs;
            o.gh_max_points = max_points;
            let s = config::resolve(common.config.as_deref(), &o)?;
            let reports = vec![gh::sandwich(s.seed, s.gh_pairs, s.gh_max_points), gh::two_point(s.seed)];
            with_reports("gh", s, &common, reports, vec![])
        }
        Command::Radii { model, points, bold_only, common } => {
            let s = settings(&common)?;
            let mdl = model.resolve(s.m)?;
            let pts = parse_points(&points)?;
            let (lo, hi) = mdl.profile.domain;
            if let Some(x) = pts.iter().find(|x| !(**x >= lo && **x <= hi)) {
                return Err(UsageError(format!("point {x} outside the model's axis range [{lo}, {hi}]")).into());
            }
            let reports = pool(&s)?.install(|| {
                use rayon::prelude::*;
                pts.par_iter().map(|&x| radii::profile(&mdl, x, s.delta, s.eps, bold_only)).collect()
            });
            with_reports("radii", s, &common, reports, vec![])
        }
        Command::VerifyAll { common } => {
            let s = settings(&common)?;
            let dir = common.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
            let groups = pool(&s)?.install(|| checks::verify_all(&s));
            let mut reports = Vec::new();
            let mut artifacts = Vec::new();
            for g in groups {
                if !g.mu.is_empty() {
                    artifacts.push((dir.join("mu.csv"), table_csv(&g.mu)?));
                    let pts: Vec<(f64, f64)> = g.mu.iter().map(|r| (r.tau, r.mu)).collect();
                    artifacts.push((dir.join("mu.svg"), polyline_svg("μ(g, τ) on the round sphere", "τ", "μ", &pts).into_bytes()));
                }
                if !g.antipodal.is_empty() {
                    artifacts.push((dir.join("antipodal.csv"), table_csv(&g.antipodal)?));
                }
                reports.extend(g.reports);
            }
            let common = Common { out_dir: Some(dir), ..common };
            with_reports("verify-all", s, &common, reports, artifacts)
        }
    }
}

fn pool(s: &Settings) -> Result<rayon::ThreadPool, UsageError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = config::thread_cap(s)? {
        b = b.num_threads(n);
    }
    b.build().map_err(|e| UsageError(format!("thread pool: {e}")))
}

/// Human-readable table, one line per report.
pub fn render_table(reports: &[CheckReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let vals: Vec<String> = r
            .values
            .iter()
            .take(4)
            .map(|m| match m.tolerance {
                Some(t) => format!("{}={:.4e} (tol {:.1e})", m.name, m.value, t),
                None => format!("{}={:.6}", m.name, m.value),
            })
            .collect();
        out.push_str(&format!("{:<8} {:<48} {}", r.status.label().to_uppercase(), r.id, vals.join("  ")));
        if let Some(n) = &r.note {
            out.push_str(&format!("  [{n}]"));
        }
        out.push('\n');
    }
    let s = crate::report::summarize(reports);
    out.push_str(&format!("{} pass, {} marginal, {} fail\n", s.pass, s.marginal, s.fail));
    out
}

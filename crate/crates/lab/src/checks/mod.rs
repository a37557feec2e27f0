//! Check groups; each maps onto one block of the acceptance suite.

pub mod catalog;
pub mod conformal;
pub mod entropy;
pub mod gaussian;
pub mod gh;
pub mod radii;

use rayon::prelude::*;
use shrinker_core::catalog::{make_model, make_sphere, MODEL_NAMES};

use crate::config::Settings;
use crate::report::{check, CheckReport};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Group {
    #[default]
    Soliton,
    ConformalRicci,
    ConformalComparison,
    Erfcinv,
    Antipodal,
    Entropy,
    Volume,
    Gh,
    Radii,
}

impl Group {
    pub const ALL: [Group; 9] = [
        Group::Soliton,
        Group::ConformalRicci,
        Group::ConformalComparison,
        Group::Erfcinv,
        Group::Antipodal,
        Group::Entropy,
        Group::Volume,
        Group::Gh,
        Group::Radii,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Group::Soliton => "soliton",
            Group::ConformalRicci => "conformal-ricci",
            Group::ConformalComparison => "conformal-comparison",
            Group::Erfcinv => "erfcinv",
            Group::Antipodal => "antipodal",
            Group::Entropy => "entropy",
            Group::Volume => "volume",
            Group::Gh => "gh",
            Group::Radii => "radii",
        }
    }

    pub fn run(self, s: &Settings) -> GroupOutput {
        let mut out = GroupOutput { group: self, ..Default::default() };
        let m = s.m;
        let models = || MODEL_NAMES.iter().filter_map(move |n| make_model(n, m).ok());
        let open = || ["gaussian", "cylinder"].into_iter().filter_map(move |n| make_model(n, m).ok());
        let r = &mut out.reports;
        match self {
            Group::Soliton => {
                for dim in [m, m + 1] {
                    for n in MODEL_NAMES {
                        r.push(model_or_fail(n, dim, |model| catalog::soliton(model, s.soliton_tol)));
                    }
                    r.push(catalog::perturbed_sphere(dim));
                }
                for model in models() {
                    r.push(catalog::rigidity(&model));
                    r.push(catalog::flow(&model));
                }
            }
            Group::ConformalRicci => {
                for model in models() {
                    r.push(conformal::ricci(&model, None));
                    for &radius in &s.radii {
                        r.push(conformal::curvature_bound(&model, None, radius));
                    }
                }
            }
            Group::ConformalComparison => {
                for model in open() {
                    for &radius in &s.radii {
                        r.push(conformal::sandwich(&model, None, radius));
                        r.push(conformal::distortion(&model, None, radius));
                        for &rho in &s.rhos {
                            r.push(conformal::gh_bound(&model, None, radius, rho, s.eps_net));
                        }
                    }
                }
            }
            Group::Erfcinv => {
                r.push(gaussian::identities());
                r.push(gaussian::limits());
                r.push(gaussian::slope(m));
            }
            Group::Antipodal => match gaussian::antipodal_sweep(m, None) {
                Ok((reports, rows)) => {
                    r.extend(reports);
                    out.antipodal = rows;
                }
                Err(e) => r.push(failure(format!("geodesic.antipodal.m{m}"), "antipodal-gap", e)),
            },
            Group::Entropy => match make_sphere(m) {
                Ok(sphere) => {
                    r.push(entropy::mu_at_one(&sphere));
                    r.push(entropy::gaussian_mu(m));
                    let (rep, rows) = entropy::tau_curve(&sphere, &s.tau_grid);
                    r.push(rep);
                    out.mu = rows;
                    r.push(entropy::scaling(&sphere));
                    r.push(entropy::gradient(&sphere, s.seed));
                    r.push(entropy::sobolev(&sphere));
                }
                Err(e) => r.push(failure(format!("entropy.m{m}"), "entropy-sphere-mu", e)),
            },
            Group::Volume => {
                for model in models() {
                    r.push(catalog::growth(&model));
                    r.push(catalog::volume_entropy(&model));
                }
                for model in open() {
                    r.push(catalog::weighted_ratio(&model, 0.5));
                }
            }
            Group::Gh => {
                r.push(gh::sandwich(s.seed, s.gh_pairs, s.gh_max_points));
                r.push(gh::two_point(s.seed));
            }
            Group::Radii => {
                r.push(radii::flat_degeneracy(m, s.delta, s.eps));
                let mut tables = Vec::new();
                for model in models() {
                    for x in radii::points(&model) {
                        r.push(radii::harnack(&model, x, s.delta));
                    }
                    let (rep, table) = radii::equivalence(&model, s.delta, s.eps);
                    r.push(rep);
                    tables.extend(table);
                    r.push(radii::density(&model, s.delta));
                }
                r.push(radii::stability(&tables));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Default)]
pub struct GroupOutput {
    pub group: Group,
    pub reports: Vec<CheckReport>,
    pub mu: Vec<entropy::MuRow>,
    pub antipodal: Vec<gaussian::AntipodalRow>,
}

fn failure(id: String, anchor: &str, e: shrinker_core::Error) -> CheckReport {
    check(id, anchor, |_| Err(e))
}

fn model_or_fail(name: &str, m: usize, f: impl FnOnce(&shrinker_core::catalog::ShrinkerModel) -> CheckReport) -> CheckReport {
    match make_model(name, m) {
        Ok(model) => f(&model),
        Err(e) => failure(format!("catalog.{name}.m{m}"), "soliton-identity", e),
    }
}

/// All groups, run concurrently and reassembled in fixed order.
pub fn verify_all(s: &Settings) -> Vec<GroupOutput> {
    Group::ALL.par_iter().map(|g| g.run(s)).collect()
}

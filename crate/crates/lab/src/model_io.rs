//! JSON form of a model: `{"name", "m", "profile", "potential", "caps"}`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use shrinker_core::catalog::{make_model, ShrinkerModel, MODEL_NAMES};
use shrinker_core::num::CubicSpline;
use shrinker_core::warped::profile::{Potential, PotentialShape, Shape, WarpedProfile};

use crate::UsageError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ProfileSpec {
    Analytic {
        #[serde(rename = "expr-id")]
        expr_id: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radius: Option<f64>,
        domain: [f64; 2],
    },
    Sampled { domain: [f64; 2], samples: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PotentialSpec {
    Constant { value: f64, min_at: f64 },
    Quadratic { k: f64, center: f64, offset: f64 },
    Sampled { domain: [f64; 2], samples: Vec<f64>, min_at: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub name: String,
    pub m: usize,
    pub profile: ProfileSpec,
    pub potential: PotentialSpec,
    pub caps: [bool; 2],
}

fn bad(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

impl ModelSpec {
    pub fn from_model(model: &ShrinkerModel) -> Result<Self, UsageError> {
        let p = &model.profile;
        let domain = [p.domain.0, p.domain.1];
        let profile = match &p.shape {
            Shape::Flat => ProfileSpec::Analytic { expr_id: "flat".into(), radius: None, domain },
            Shape::Round { radius } => ProfileSpec::Analytic { expr_id: "round".into(), radius: Some(*radius), domain },
            Shape::Cylinder { radius } => ProfileSpec::Analytic { expr_id: "cylinder".into(), radius: Some(*radius), domain },
            Shape::Sampled(sp) => ProfileSpec::Sampled { domain, samples: sp.samples().to_vec() },
            Shape::ConformalGaussian { .. } => return Err(bad("the compressed Gaussian profile has no JSON form")),
        };
        let pot = &model.potential;
        let potential = match &pot.shape {
            PotentialShape::Constant(c) => PotentialSpec::Constant { value: *c, min_at: pot.f_min_location },
            PotentialShape::Quadratic { k, center, offset } => PotentialSpec::Quadratic { k: *k, center: *center, offset: *offset },
            PotentialShape::Sampled(sp) => {
                let (a, b) = sp.range();
                PotentialSpec::Sampled { domain: [a, b], samples: sp.samples().to_vec(), min_at: pot.f_min_location }
            }
        };
        Ok(Self { name: model.name.clone(), m: p.m, profile, potential, caps: p.caps.into() })
    }

    pub fn build(&self) -> Result<ShrinkerModel, UsageError> {
        if self.m < 3 {
            return Err(bad(format!("model dimension {} is below 3", self.m)));
        }
        let caps = (self.caps[0], self.caps[1]);
        let profile = match &self.profile {
            ProfileSpec::Analytic { expr_id, radius, domain } => {
                let shape = match (expr_id.as_str(), radius) {
                    ("flat", _) => Shape::Flat,
                    ("round", Some(r)) => Shape::Round { radius: *r },
                    ("cylinder", Some(r)) => Shape::Cylinder { radius: *r },
                    _ => return Err(bad(format!("unknown analytic profile '{expr_id}' (or missing radius)"))),
                };
                let p = WarpedProfile { m: self.m, domain: (domain[0], domain[1]), caps, shape };
                p.validate().map_err(|e| bad(format!("invalid profile: {e}")))?;
                p
            }
            ProfileSpec::Sampled { domain, samples } => WarpedProfile::sampled(self.m, (domain[0], domain[1]), samples.clone(), caps)
                .map_err(|e| bad(format!("invalid sampled profile: {e}")))?,
        };
        let potential = match &self.potential {
            PotentialSpec::Constant { value, min_at } => Potential::constant(*value, *min_at),
            PotentialSpec::Quadratic { k, center, offset } => Potential::quadratic(*k, *center, *offset),
            PotentialSpec::Sampled { domain, samples, min_at } => {
                let sp = CubicSpline::new(domain[0], domain[1], samples.clone(), None)
                    .map_err(|e| bad(format!("invalid sampled potential: {e}")))?;
                Potential { shape: PotentialShape::Sampled(sp), f_min_location: *min_at }
            }
        };
        // closed-form μ is only known for the catalog constructors
        let mu_exact = make_model(&self.name, self.m).ok().filter(|c| c.profile == profile && c.potential == potential).and_then(|c| c.mu_exact);
        Ok(ShrinkerModel { name: self.name.clone(), profile, potential, mu_exact })
    }
}

/// A catalog name, checked before anything is computed or written.
pub fn catalog_model(name: &str, m: usize) -> Result<ShrinkerModel, UsageError> {
    if !MODEL_NAMES.contains(&name) {
        return Err(bad(format!("unknown model '{name}' (known: {})", MODEL_NAMES.join(", "))));
    }
    make_model(name, m).map_err(|e| bad(e.to_string()))
}

pub fn load_model(path: &Path) -> Result<ShrinkerModel, UsageError> {
    let text = std::fs::read_to_string(path).map_err(|e| bad(format!("cannot read model {}: {e}", path.display())))?;
    let spec: ModelSpec = serde_json::from_str(&text).map_err(|e| bad(format!("malformed model {}: {e}", path.display())))?;
    spec.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_models_round_trip() {
        for name in MODEL_NAMES {
            let model = make_model(name, 5).unwrap();
            let json = serde_json::to_string(&ModelSpec::from_model(&model).unwrap()).unwrap();
            let back: ModelSpec = serde_json::from_str(&json).unwrap();
            assert_eq!(back.build().unwrap(), model);
        }
    }

    #[test]
    fn sampled_profiles_load() {
        let n = 65;
        let r0 = 6f64.sqrt();
        let len = std::f64::consts::PI * r0;
        let samples: Vec<f64> = (0..n).map(|i| r0 * (len * i as f64 / (n - 1) as f64 / r0).sin()).collect();
        let spec = ModelSpec {
            name: "sampled-sphere".into(),
            m: 4,
            profile: ProfileSpec::Sampled { domain: [0.0, len], samples },
            potential: PotentialSpec::Constant { value: 2.0, min_at: 0.0 },
            caps: [true, true],
        };
        let model = spec.build().unwrap();
        assert!((model.profile.phi(1.0) - r0 * (1.0 / r0).sin()).abs() < 1e-4);
        assert!(model.mu_exact.is_none());
    }

    #[test]
    fn unknown_names_are_rejected() {
        assert!(catalog_model("torus", 4).is_err());
        assert!(catalog_model("sphere", 2).is_err());
        let spec = ModelSpec {
            name: "x".into(),
            m: 4,
            profile: ProfileSpec::Analytic { expr_id: "hyperbolic".into(), radius: None, domain: [0.0, 1.0] },
            potential: PotentialSpec::Constant { value: 0.0, min_at: 0.0 },
            caps: [true, false],
        };
        assert!(spec.build().is_err());
    }
}

//! Check reports and the anchor index they point into.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use shrinker_core::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Marginal,
    Fail,
}

impl From<bool> for Status {
    fn from(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Marginal => "marginal",
            Status::Fail => "fail",
        }
    }
}

/// A measured quantity; `tolerance` is the threshold it was judged against, if any.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measure {
    pub name: String,
    pub value: f64,
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub id: String,
    pub anchor: String,
    pub status: Status,
    pub values: Vec<Measure>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// kept out of serialized output so artifacts stay byte-stable
    #[serde(skip)]
    pub wall_time: Duration,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.values.iter().find(|m| m.name == name).map(|m| m.value)
    }
}

/// Collects measures while a check runs.
#[derive(Debug, Default)]
pub struct Recorder {
    values: Vec<Measure>,
    note: Option<String>,
}

impl Recorder {
    pub fn value(&mut self, name: impl Into<String>, value: f64) -> f64 {
        self.values.push(Measure { name: name.into(), value, tolerance: None });
        value
    }

    pub fn bounded(&mut self, name: impl Into<String>, value: f64, tolerance: f64) -> f64 {
        self.values.push(Measure { name: name.into(), value, tolerance: Some(tolerance) });
        value
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.note = Some(text.into());
    }
}

/// Runs `body`, timing it; a numerical error becomes a failed report carrying the message.
pub fn check<F>(id: impl Into<String>, anchor: &str, body: F) -> CheckReport
where
    F: FnOnce(&mut Recorder) -> Result<Status, Error>,
{
    assert!(anchor_description(anchor).is_some(), "unregistered anchor {anchor}");
    let start = Instant::now();
    let mut rec = Recorder::default();
    let status = match body(&mut rec) {
        Ok(s) => s,
        Err(e) => {
            rec.note = Some(e.to_string());
            Status::Fail
        }
    };
    CheckReport { id: id.into(), anchor: anchor.to_string(), status, values: rec.values, note: rec.note, wall_time: start.elapsed() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub marginal: usize,
    pub fail: usize,
}

pub fn summarize(reports: &[CheckReport]) -> Summary {
    let mut s = Summary::default();
    for r in reports {
        match r.status {
            Status::Pass => s.pass += 1,
            Status::Marginal => s.marginal += 1,
            Status::Fail => s.fail += 1,
        }
    }
    s
}

/// Slug and one-line statement of every anchor; `docs/anchors.md` carries the same table.
pub const ANCHORS: &[(&str, &str)] = &[
    ("soliton-identity", "Rc + Hess f = g/2 and R + |∇f|² = f on every catalog model"),
    ("normalization-rigidity", "perturbing the scale of a shrinker breaks the soliton identity"),
    ("flow-identity", "R(t) + |∇f(t)|² = f(t)/(1 − t) along the rescaled pull-back flow"),
    ("quadratic-growth", "¼(d − 5m)₊² ≤ f ≤ ¼(d + √(2m))² at distance d from the minimum point"),
    ("weighted-volume-ratio", "∫_{B(p,r)} e^{−f} / ∫_{B(p,ρ)} e^{−f} ≤ (r/ρ)^m"),
    ("volume-entropy-bracket", "e^{−2^{4m+7}} ≤ |B(p,1)| / ((4π)^{m/2} e^μ) ≤ e^m"),
    ("conformal-ricci", "(m − 2) R̄c = df ⊗ df + (m − 1 − f) e^{2f̄/(m−2)} ḡ"),
    ("conformal-curvature-bound", "|R̄c|_ḡ < D² on B_ḡ(q, r/(10D))"),
    ("conformal-ball-sandwich", "B_ḡ(q, e^{−Dr/(m−2)} r) ⊆ B(q, r) ⊆ B_ḡ(q, e^{Dr/(m−2)} r)"),
    ("conformal-distance-distortion", "e^{−Dr/(m−2)} d ≤ d_ḡ ≤ e^{Dr/(m−2)} d on small balls"),
    ("conformal-gh-bound", "d_GH(B_ḡ(q, ρ), B(q, ρ)) < 2Dρ²"),
    ("erfcinv-derivatives", "A' = −1/B, A'' = 2A/B², B' = 2A, B'' = 2A' for A = erfc⁻¹, B = (2/√π)e^{−A²}"),
    ("erfcinv-limits", "A(x)/√log(1/x) → 1 and B(x)/(2x√log(1/x)) → 1 as x → 0⁺"),
    ("compressed-profile-slope", "φ'(s) = 2A(as)² − 1 for the compressed Gaussian profile"),
    ("antipodal-gap", "cap-avoiding connections of antipodal points at distance ε from the tip are longer than 2ε"),
    ("antipodal-oracle", "shooting length agrees with a graph shortest path on the slice"),
    ("entropy-sphere-mu", "μ(S^m, 1) is attained by the constant and equals the potential integral"),
    ("entropy-gaussian-mu", "μ of the Gaussian shrinker is 0"),
    ("entropy-tau-curve", "μ(g, τ) decreases to its minimum at τ = 1 and increases after"),
    ("entropy-scaling", "μ(c g, c τ) = μ(g, τ)"),
    ("entropy-gradient", "the discrete W-gradient agrees with central differences"),
    ("sobolev-jensen", "Sobolev quotient and the Jensen step behind the log-Sobolev inequality"),
    ("gh-sandwich", "lower bound ≤ exact GH distance ≤ half the distortion of any correspondence"),
    ("gh-two-point", "the GH distance between two-point spaces is |a − b|/2"),
    ("radii-flat-degeneracy", "flat balls saturate every radius search and have zero convexity defect"),
    ("radii-harnack", "c·r < vr(y) < r/c for y ∈ B(x, c·r), r = vr(x)"),
    ("radii-equivalence", "capped volume, GH and convexity radii are comparable under g and ḡ"),
    ("radii-density", "r^{−2θ+4−m} ∫_{B(x,r)} vr^{2θ−4} stays bounded and scales like r^{4−2θ}"),
    ("radii-profile", "volume, GH and convexity radii at a point with their capped values"),
];

pub fn anchor_description(slug: &str) -> Option<&'static str> {
    ANCHORS.iter().find(|(s, _)| *s == slug).map(|(_, d)| *d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn errors_become_failures() {
        let r = check("x", "gh-two-point", |_| Err(Error::Contract("boom")));
        assert_eq!(r.status, Status::Fail);
        assert!(r.note.unwrap().contains("boom"));
    }

    #[test]
    fn wall_time_is_not_serialized() {
        let r = check("x", "gh-two-point", |rec| {
            rec.bounded("v", 1.0, 2.0);
            Ok(Status::Pass)
        });
        let s = serde_json::to_string(&r).unwrap();
        assert!(!s.contains("wall"));
        assert_eq!(r.value("v"), Some(1.0));
    }

    #[test]
    fn anchor_index_matches_the_docs() {
        let doc = include_str!("../../../docs/anchors.md");
        for (slug, _) in ANCHORS {
            assert!(doc.contains(&format!("`{slug}`")), "{slug} missing from docs/anchors.md");
        }
        let mut slugs: Vec<_> = ANCHORS.iter().map(|a| a.0).collect();
        slugs.sort();
        slugs.dedup();
        assert_eq!(slugs.len(), ANCHORS.len());
    }
}

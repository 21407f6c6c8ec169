use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::{CheckKind, Scenario};

/// A labelled contribution to a check, e.g. one generator or one sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Item {
    pub label: String,
    pub value: f64,
}

/// What a scenario measured for one check before tolerances are applied.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Measurement {
    pub items: Vec<Item>,
    pub note: Option<String>,
}

impl Measurement {
    pub fn push(&mut self, label: impl Into<String>, value: f64) {
        self.items.push(Item { label: label.into(), value });
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Worst item: the largest for upper bounds, the smallest for lower ones.
    pub fn worst(&self, lower_bound: bool) -> f64 {
        let vals = self.items.iter().map(|i| i.value);
        if self.items.iter().any(|i| i.value.is_nan()) {
            return f64::NAN;
        }
        if lower_bound {
            vals.fold(f64::INFINITY, f64::min)
        } else {
            vals.fold(0.0, f64::max)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    pub inputs_digest: String,
    pub residual: f64,
    pub tolerance: f64,
    /// `"le"` when the residual must not exceed the tolerance, `"ge"` otherwise.
    pub bound: String,
    pub pass: bool,
    pub items: Vec<Item>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: String,
    pub kind: String,
    pub checks: Vec<CheckRecord>,
    pub environment: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub elapsed_ms: Option<u64>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failed(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.pass).map(|c| c.id.as_str()).collect()
    }

    pub fn check(&self, kind: CheckKind) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.id == kind.name())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Hex SHA-256 of the scenario's serialized form and the check name.
pub fn inputs_digest(scenario: &Scenario, kind: CheckKind) -> String {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(scenario).expect("scenario serializes"));
    h.update(kind.name().as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Applies the configured tolerances to the measurements, one record per
/// configured check, sorted by id.
pub fn assemble(scenario: &Scenario, measured: &BTreeMap<CheckKind, Measurement>) -> Report {
    let mut checks: Vec<CheckRecord> = scenario
        .checks
        .iter()
        .map(|spec| {
            let lower = spec.kind.lower_bound();
            let (residual, items, note) = match measured.get(&spec.kind) {
                Some(m) => (m.worst(lower), m.items.clone(), m.note.clone()),
                None => (f64::NAN, Vec::new(), Some("not measured".to_string())),
            };
            let pass = if lower { residual >= spec.tol } else { residual <= spec.tol };
            CheckRecord {
                id: spec.kind.name().to_string(),
                inputs_digest: inputs_digest(scenario, spec.kind),
                residual,
                tolerance: spec.tol,
                bound: if lower { "ge" } else { "le" }.to_string(),
                pass,
                items,
                note,
            }
        })
        .collect();
    checks.sort_by(|a, b| a.id.cmp(&b.id));
    let d = &scenario.disc;
    let mut environment = BTreeMap::new();
    environment.insert("N".into(), d.n.to_string());
    environment.insert("L".into(), d.l.to_string());
    environment.insert("M".into(), d.m.to_string());
    environment.insert("window".into(), d.window.to_string());
    environment.insert("samples".into(), d.samples.to_string());
    environment.insert("seed".into(), scenario.seed.to_string());
    environment.insert("control".into(), scenario.control.name().to_string());
    Report { scenario: scenario.name.clone(), kind: scenario.kind.name().into(), checks, environment, elapsed_ms: None }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::config::ActionKind;

    #[test]
    fn nan_never_passes() {
        let s = Scenario::new("t", ActionKind::Mult).with_check(CheckKind::Welldef, 1.0);
        let mut m = Measurement::default();
        m.push("a", 0.1);
        m.push("b", f64::NAN);
        let mut measured = BTreeMap::new();
        measured.insert(CheckKind::Welldef, m);
        let r = assemble(&s, &measured);
        assert!(!r.all_pass());
        assert_eq!(r.failed(), vec!["welldef"]);
    }

    #[test]
    fn missing_measurement_fails_and_bounds_apply() {
        let s = Scenario::new("t", ActionKind::Lie)
            .with_check(CheckKind::Refinement, 4.0)
            .with_check(CheckKind::Garding, 1e-4);
        let mut m = Measurement::default();
        m.push("ratio", 5.0);
        m.push("ratio2", 4.5);
        let mut measured = BTreeMap::new();
        measured.insert(CheckKind::Refinement, m);
        let r = assemble(&s, &measured);
        assert_eq!(r.checks.len(), 2);
        assert_eq!(r.checks[0].id, "garding");
        assert!(!r.checks[0].pass);
        assert!(r.checks[1].pass && r.checks[1].residual == 4.5);
    }

    #[test]
    fn digests_are_stable() {
        let s = Scenario::new("t", ActionKind::Mult);
        assert_eq!(inputs_digest(&s, CheckKind::Welldef), inputs_digest(&s.clone(), CheckKind::Welldef));
        assert_ne!(inputs_digest(&s, CheckKind::Welldef), inputs_digest(&s, CheckKind::Symmetry));
        assert_eq!(inputs_digest(&s, CheckKind::Welldef).len(), 64);
    }
}

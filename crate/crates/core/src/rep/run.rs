use std::collections::BTreeMap;

use nalgebra::DMatrix;

use super::config::{ActionKind, CheckKind, Scenario};
use super::report::{assemble, Measurement, Report};
use super::{lie_scenario, ostar, qplane, schrodinger, spectral, suq};
use crate::error::{CoreError, Result};
use crate::C64;

/// Runs every configured check of a validated scenario.
///
/// Failed checks are recorded in the report; errors are reserved for
/// invalid input and numeric guards, including non-finite residuals.
pub fn run_scenario(s: &Scenario) -> Result<Report> {
    let measured: BTreeMap<CheckKind, Measurement> = match s.kind {
        ActionKind::Mult => spectral::run(s)?,
        ActionKind::Lie => lie_scenario::run(s)?,
        ActionKind::Heisenberg => schrodinger::run(s)?,
        ActionKind::Qplane | ActionKind::B3 | ActionKind::B4 | ActionKind::X3 => qplane::run(s)?,
        ActionKind::Suq11 => suq::run(s)?,
        ActionKind::OstarMatrix => ostar::run(s)?,
    };
    for spec in &s.checks {
        if let Some(m) = measured.get(&spec.kind) {
            if let Some(bad) = m.items.iter().find(|i| i.value.is_nan() || i.value == f64::NEG_INFINITY) {
                return Err(CoreError::Guard(format!("check {} produced {} at {}", spec.kind.name(), bad.value, bad.label)));
            }
            if !spec.kind.lower_bound() && m.items.iter().any(|i| i.value.is_infinite()) {
                return Err(CoreError::Guard(format!("check {} diverged", spec.kind.name())));
            }
        }
    }
    Ok(assemble(s, &measured))
}

/// Named operator matrices of the induced representation, as written by
/// the CLI: `ρ̃` of each generator of `X` on the ambient space.
pub fn induced_matrices(s: &Scenario) -> Result<Vec<(String, DMatrix<C64>)>> {
    match s.kind {
        ActionKind::Mult => spectral::induced_generators(s),
        ActionKind::Heisenberg => schrodinger::induced_generators(s),
        ActionKind::Qplane | ActionKind::B3 | ActionKind::B4 | ActionKind::X3 => qplane::induced_generators(s),
        ActionKind::OstarMatrix => ostar::induced_generators(s),
        ActionKind::Suq11 => {
            let (o, _) = suq::select_orientation(s.q, s.disc.window)?;
            Ok(suq::generator_matrices(s.q, s.disc.window, o).into_iter().collect())
        }
        ActionKind::Lie => Err(CoreError::Structure("lie scenarios act on group functions, not on matrices".into())),
    }
}

//! The induced representation at finite truncation and the scenario catalogue.

mod induce;

pub use induce::{
    build_domain, evaluate, homomorphism_residual, induce, symmetry_residual, DomainBasis, FiniteRep, InducedOp,
    DEFAULT_RANK_TOL,
};

mod config;
mod report;
pub mod lie_scenario;
pub mod ostar;
pub mod qplane;
mod run;
pub mod schrodinger;
pub mod suq;
pub mod spectral;

pub use config::{ActionKind, CheckKind, CheckSpec, Control, Discretization, Scenario};
pub use report::{assemble, inputs_digest, CheckRecord, Item, Measurement, Report};
pub use run::{induced_matrices, run_scenario};

//! The `.cp` scenario format: a small line-oriented parser, a canonical
//! serializer and validation into [`crate::rep::Scenario`].

mod parse;
mod validate;

pub use parse::{parse, parse_bytes, section_keys, Diagnostic, Entry, ScenarioDoc, Section, Value, SECTIONS};
pub use validate::{load, validate};

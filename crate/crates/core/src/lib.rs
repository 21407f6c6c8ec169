//! Compatible pairs of *-algebras: exact rewriting, a numerical Weyl
//! calculus, convolution algebras on Lie groups and the induced
//! representation at finite truncation.

pub mod algebra;
pub mod dsl;
pub mod error;
pub mod gauss;
pub mod io;
pub mod lie;
pub mod rep;
pub mod weyl;

pub use error::{CoreError, Result};
pub use nalgebra;

pub type C64 = num_complex::Complex64;

//! Convolution *-algebras of the line and of the affine group, their
//! right-invariant differential operators, and Gårding vectors of the
//! (quasi-)regular representation.

mod conv;
mod function;
mod group;
mod spline;
mod unitary;

pub use conv::{
    conv_adjoint, conv_adjoint_with, convolve, default_step, lie_compat_residual, rightinv_derivative, Involution,
    LieCompatOptions,
};
pub use function::{GroupFunction, GroupGrid, Interpolant, SUPPORT_GUARD};
pub use group::{Group, LieDirection};
pub use spline::{Spline1, Spline2};
pub use unitary::UnitaryModel;

//! Numerical Weyl calculus on the line: symbols on a phase-space grid,
//! their quantizations, the twisted product, Weyl operators and the left
//! actions of the Heisenberg algebra and the quantum plane.

mod fft;
mod symbol;

pub use fft::{derivative, fourier, fourier_multiply, inverse_fourier, Axis};
pub use symbol::{lattice_ratio, symbol_adjoint, PhaseSymbol, DEFAULT_DECAY_GUARD};

mod op;
pub use op::{
    grid_to_hermite, hermite_basis, hermite_derivative, hermite_functions, hermite_momentum,
    hermite_position, momentum_multiplier, opnorm, position_multiplier, spectral_norm, weyl_op,
    weyl_op_quadrature, Basis, LinearOperatorMatrix,
};

mod star;
pub use star::star;

mod translate;
pub use translate::{translate_momentum, translate_position, translate_symbol, weyl_unitary};

mod action;
pub use action::{
    act_block, act_heisenberg, act_qplane, compat_residual, imaginary_shift, ActionParams,
    BlockSymbol, Corruption, HeisenbergGen, Layout, Pair, SymbolAction, SymbolValue,
    AMPLIFICATION_GUARD,
};

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use super::fft::{fourier_multiply, Axis};
use super::symbol::{check_grid, PhaseSymbol};
use crate::error::{CoreError, Result};

fn lattice_index(v: f64, step: f64, what: &str) -> Result<i64> {
    let k = (v / step).round();
    if (v - k * step).abs() > 1e-9 * step.max(v.abs()) {
        return Err(CoreError::Parameter(format!("{what} = {v} is not a multiple of {step}")));
    }
    Ok(k as i64)
}

/// `(W(s,t)f)(x) = e^{πist} e^{2πisx} f(x+t)` on the grid of `[−L, L)`.
/// `s` must be a multiple of `1/(2L)` and `t` of the spacing; values
/// shifted in from outside the box are zero.
pub fn weyl_unitary(s: f64, t: f64, f: &[C64], l: f64) -> Result<Vec<C64>> {
    let n = f.len();
    check_grid(n, l)?;
    let h = 2.0 * l / n as f64;
    lattice_index(s, 1.0 / (2.0 * l), "s")?;
    let shift = lattice_index(t, h, "t")?;
    let front = C64::from_polar(1.0, PI * s * t);
    Ok((0..n)
        .map(|k| {
            let x = -l + k as f64 * h;
            let src = k as i64 + shift;
            if src < 0 || src >= n as i64 {
                C64::new(0.0, 0.0)
            } else {
                front * C64::from_polar(1.0, 2.0 * PI * s * x) * f[src as usize]
            }
        })
        .collect())
}

/// `a_{s,0}(x₁,x₂) = e^{2πisx₁} a(x₁, x₂ − s/2)`.
pub fn translate_momentum(a: &PhaseSymbol, s: f64) -> Result<PhaseSymbol> {
    lattice_index(s, 1.0 / (2.0 * a.l()), "s")?;
    let shifted = fourier_multiply(a, Axis::X2, |xi| C64::from_polar(1.0, -PI * xi * s));
    Ok(shifted.weight(|x1, _| C64::from_polar(1.0, 2.0 * PI * s * x1)))
}

/// `a_{0,t}(x₁,x₂) = e^{2πitx₂} a(x₁ + t/2, x₂)`.
pub fn translate_position(a: &PhaseSymbol, t: f64) -> Result<PhaseSymbol> {
    lattice_index(t, a.delta(), "t")?;
    let shifted = fourier_multiply(a, Axis::X1, |xi| C64::from_polar(1.0, PI * xi * t));
    Ok(shifted.weight(|_, x2| C64::from_polar(1.0, 2.0 * PI * t * x2)))
}

/// `(a_{s,0})_{0,t}`.
pub fn translate_symbol(a: &PhaseSymbol, s: f64, t: f64) -> Result<PhaseSymbol> {
    translate_position(&translate_momentum(a, s)?, t)
}

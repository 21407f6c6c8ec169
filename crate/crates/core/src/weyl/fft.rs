//! Axis-wise transforms on row-major `N×N` arrays.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::symbol::PhaseSymbol;
use crate::error::{CoreError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    /// Along `x₁` (the row index).
    X1,
    /// Along `x₂` (contiguous within a row).
    X2,
}

pub(crate) fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut p = FftPlanner::new();
    if inverse {
        p.plan_fft_inverse(len)
    } else {
        p.plan_fft_forward(len)
    }
}

pub(crate) fn transpose(data: &[C64], rows: usize, cols: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); data.len()];
    for i in 0..rows {
        for j in 0..cols {
            out[j * rows + i] = data[i * cols + j];
        }
    }
    out
}

/// Applies `f` to every line along `axis`; lines are passed contiguous.
pub(crate) fn map_lines(
    data: &[C64],
    n: usize,
    axis: Axis,
    f: impl Fn(&[C64]) -> Vec<C64> + Sync,
) -> (Vec<C64>, usize) {
    let src = match axis {
        Axis::X2 => data.to_vec(),
        Axis::X1 => transpose(data, n, n),
    };
    let lines: Vec<Vec<C64>> = src.par_chunks(n).map(&f).collect();
    let m = lines.first().map_or(0, Vec::len);
    let flat: Vec<C64> = lines.into_iter().flatten().collect();
    match axis {
        Axis::X2 => (flat, m),
        Axis::X1 => (transpose(&flat, n, m), m),
    }
}

/// Signed frequency index of DFT bin `k` of length `n`, in `[−n/2, n/2)`.
pub(crate) fn signed(k: usize, n: usize) -> i64 {
    if k < n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Sign `(−1)^m`.
pub(crate) fn parity(m: i64) -> f64 {
    if m.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Band-limited interpolation of one periodic line to twice the density.
pub(crate) fn refine_line(line: &[C64]) -> Vec<C64> {
    let n = line.len();
    let mut spec = line.to_vec();
    plan(n, false).process(&mut spec);
    let mut wide = vec![C64::new(0.0, 0.0); 2 * n];
    for k in 0..n {
        let m = signed(k, n);
        if m == -(n as i64) / 2 {
            wide[n / 2] += spec[k] * 0.5;
            wide[2 * n - n / 2] += spec[k] * 0.5;
        } else {
            wide[m.rem_euclid(2 * n as i64) as usize] = spec[k];
        }
    }
    plan(2 * n, true).process(&mut wide);
    let s = 1.0 / n as f64;
    wide.iter_mut().for_each(|z| *z *= s);
    wide
}

/// Multiplies the spectrum of one line (frequency `ξ = m/(2L)`) by `mult`.
/// The Nyquist bin receives the average of both signs.
pub(crate) fn multiply_line(line: &[C64], l: f64, mult: &(impl Fn(f64) -> C64 + Sync)) -> Vec<C64> {
    let n = line.len();
    let mut spec = line.to_vec();
    plan(n, false).process(&mut spec);
    for (k, z) in spec.iter_mut().enumerate() {
        let m = signed(k, n);
        let xi = m as f64 / (2.0 * l);
        if m == -(n as i64) / 2 {
            *z *= (mult(xi) + mult(-xi)) * 0.5;
        } else {
            *z *= mult(xi);
        }
    }
    plan(n, true).process(&mut spec);
    let s = 1.0 / n as f64;
    spec.iter_mut().for_each(|z| *z *= s);
    spec
}

/// Applies the Fourier multiplier `mult(ξ)` along `axis`.
pub fn fourier_multiply(a: &PhaseSymbol, axis: Axis, mult: impl Fn(f64) -> C64 + Sync) -> PhaseSymbol {
    let l = a.l();
    let (data, _) = map_lines(a.data(), a.n(), axis, |line| multiply_line(line, l, &mult));
    PhaseSymbol::raw(a.n(), l, data)
}

/// Spectral partial derivative.
pub fn derivative(a: &PhaseSymbol, axis: Axis) -> PhaseSymbol {
    let nyq = a.n() as f64 / (4.0 * a.l());
    fourier_multiply(a, axis, |xi| {
        if (xi.abs() - nyq).abs() < 1e-12 * nyq {
            C64::new(0.0, 0.0)
        } else {
            C64::new(0.0, 2.0 * PI * xi)
        }
    })
}

/// `â(m/(2L), n/(2L)) ≈ ∬ e^{−2πi(x₁s + x₂t)} a` on the dual grid, which is
/// again a centred box with half-width `N/(4L)`.
pub fn fourier(a: &PhaseSymbol) -> Result<PhaseSymbol> {
    a.check_decay(super::symbol::DEFAULT_DECAY_GUARD)
        .map_err(|e| CoreError::Guard(format!("aliasing: {e}")))?;
    Ok(fourier_unchecked(a))
}

pub(crate) fn fourier_unchecked(a: &PhaseSymbol) -> PhaseSymbol {
    let n = a.n();
    let fwd = plan(n, false);
    let (rows, _) = map_lines(a.data(), n, Axis::X2, |line| {
        let mut v = line.to_vec();
        fwd.process(&mut v);
        v
    });
    let (both, _) = map_lines(&rows, n, Axis::X1, |line| {
        let mut v = line.to_vec();
        fwd.process(&mut v);
        v
    });
    let d2 = a.delta() * a.delta();
    let mut out = vec![C64::new(0.0, 0.0); n * n];
    for p in 0..n {
        let m = p as i64 - n as i64 / 2;
        let kp = m.rem_euclid(n as i64) as usize;
        for q in 0..n {
            let k = q as i64 - n as i64 / 2;
            let kq = k.rem_euclid(n as i64) as usize;
            out[p * n + q] = both[kp * n + kq] * (d2 * parity(m + k));
        }
    }
    PhaseSymbol::raw(n, n as f64 / (4.0 * a.l()), out)
}

/// Inverse of [`fourier`]; the position box has half-width `N/(4L̂)`.
pub fn inverse_fourier(hat: &PhaseSymbol) -> PhaseSymbol {
    let n = hat.n();
    let l = n as f64 / (4.0 * hat.l());
    let mut buf = vec![C64::new(0.0, 0.0); n * n];
    for p in 0..n {
        let m = p as i64 - n as i64 / 2;
        let kp = m.rem_euclid(n as i64) as usize;
        for q in 0..n {
            let k = q as i64 - n as i64 / 2;
            let kq = k.rem_euclid(n as i64) as usize;
            buf[kp * n + kq] = hat.get(p, q) * parity(m + k);
        }
    }
    let inv = plan(n, true);
    let (rows, _) = map_lines(&buf, n, Axis::X2, |line| {
        let mut v = line.to_vec();
        inv.process(&mut v);
        v
    });
    let (both, _) = map_lines(&rows, n, Axis::X1, |line| {
        let mut v = line.to_vec();
        inv.process(&mut v);
        v
    });
    let s = 1.0 / (4.0 * l * l);
    PhaseSymbol::raw(n, l, both.into_iter().map(|z| z * s).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::GaussianTermSymbol;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unit_gaussian_fixed_point() {
        let g = GaussianTermSymbol::radial(C64::new(1.0, 0.0), 1.0);
        let a = PhaseSymbol::from_gaussian(&g, 64, 4.0).unwrap();
        let hat = fourier(&a).unwrap();
        assert!(hat.sup_dist(&a) < 1e-13);
    }

    #[test]
    fn round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = GaussianTermSymbol::random(&mut rng, 2, 1.0, 1.0, 3.0, 1.0);
        let a = PhaseSymbol::from_gaussian(&g, 64, 4.0).unwrap();
        let back = inverse_fourier(&fourier(&a).unwrap());
        assert!(back.same_grid(&a));
        assert!(back.sup_dist(&a) <= 1e-12);
    }

    #[test]
    fn shifted_gaussian_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = GaussianTermSymbol::random(&mut rng, 1, 1.5, 1.0, 2.0, 1.0);
        let a = PhaseSymbol::from_gaussian(&g, 128, 4.0).unwrap();
        let hat = fourier(&a).unwrap();
        let exact = PhaseSymbol::from_gaussian(&g.fourier(), 128, hat.l()).unwrap();
        assert!(hat.sup_dist(&exact) < 1e-12, "{}", hat.sup_dist(&exact));
    }

    #[test]
    fn aliasing_guard() {
        let wide = GaussianTermSymbol::radial(C64::new(1.0, 0.0), 0.05);
        let a = PhaseSymbol::from_gaussian(&wide, 64, 4.0).unwrap();
        assert!(matches!(fourier(&a), Err(CoreError::Guard(_))));
    }

    #[test]
    fn refine_interpolates() {
        let n = 64;
        let l = 4.0;
        let h = 2.0 * l / n as f64;
        let f = |x: f64| C64::new((-2.0 * x * x).exp() * (3.0 * x).cos(), (-2.0 * x * x).exp());
        let line: Vec<C64> = (0..n).map(|k| f(-l + k as f64 * h)).collect();
        let fine = refine_line(&line);
        for (k, z) in fine.iter().enumerate() {
            assert!((z - f(-l + k as f64 * h / 2.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn spectral_derivative() {
        let g = GaussianTermSymbol::radial(C64::new(1.0, 0.0), 1.0).modulate([C64::new(0.0, 1.0), C64::new(0.3, 0.0)]);
        let a = PhaseSymbol::from_gaussian(&g, 64, 4.0).unwrap();
        let d1 = derivative(&a, Axis::X1);
        let d2 = derivative(&a, Axis::X2);
        for &(i, j) in &[(30usize, 33usize), (20, 40)] {
            let gr = g.gradient(a.coord(i), a.coord(j));
            assert!((d1.get(i, j) - gr[0]).norm() < 1e-11);
            assert!((d2.get(i, j) - gr[1]).norm() < 1e-11);
        }
    }
}

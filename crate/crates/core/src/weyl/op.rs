use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fft::{map_lines, plan, refine_line, signed, Axis};
use super::symbol::{check_grid, PhaseSymbol, DEFAULT_DECAY_GUARD};
use crate::error::{CoreError, Result};

/// Discretization of `L²(ℝ)` a matrix refers to.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Basis {
    /// Point values on `N` grid points of `[−L, L)`, weighted by `√Δ`.
    Grid { n: usize, l: f64 },
    /// The first `m` Hermite functions.
    Hermite { m: usize },
}

impl Basis {
    pub fn dim(&self) -> usize {
        match *self {
            Basis::Grid { n, .. } => n,
            Basis::Hermite { m } => m,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearOperatorMatrix {
    pub entries: DMatrix<C64>,
    pub basis: Basis,
}

impl LinearOperatorMatrix {
    pub fn new(entries: DMatrix<C64>, basis: Basis) -> Result<Self> {
        let d = basis.dim();
        if entries.nrows() != d || entries.ncols() != d {
            return Err(CoreError::Structure(format!(
                "{}×{} matrix does not fit a basis of dimension {d}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(LinearOperatorMatrix { entries, basis })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Largest singular value.
    pub fn norm(&self) -> f64 {
        spectral_norm(&self.entries)
    }
}

pub fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

/// Hermite functions `h_0 … h_{m−1}` normalized in `L²(ℝ)`, with
/// `h_0 = 2^{1/4} e^{−πx²}`, sampled at `x`.
pub fn hermite_functions(x: f64, m: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(m);
    if m == 0 {
        return out;
    }
    let y = (2.0 * PI).sqrt() * x;
    let scale = 2f64.powf(0.25);
    let mut prev = 0.0;
    let mut cur = (-PI * x * x).exp();
    out.push(scale * cur);
    for n in 0..m.saturating_sub(1) {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * y * cur - (nf / (nf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        out.push(scale * cur);
    }
    out
}

/// `N×M` matrix `H[i][k] = h_k(x_i)·√Δ`; its columns are orthonormal up to
/// quadrature error when the box contains the first `M` modes.
pub fn hermite_basis(n: usize, l: f64, m: usize) -> DMatrix<f64> {
    let h = 2.0 * l / n as f64;
    let sq = h.sqrt();
    let mut out = DMatrix::zeros(n, m);
    for i in 0..n {
        let v = hermite_functions(-l + i as f64 * h, m);
        for k in 0..m {
            out[(i, k)] = v[k] * sq;
        }
    }
    out
}

fn complexify(m: &DMatrix<f64>) -> DMatrix<C64> {
    m.map(|v| C64::new(v, 0.0))
}

/// Projects a grid operator onto the first `m` Hermite modes.
pub fn grid_to_hermite(op: &DMatrix<C64>, l: f64, m: usize) -> DMatrix<C64> {
    let h = complexify(&hermite_basis(op.nrows(), l, m));
    h.transpose() * op * h
}

/// Truncated position operator `x` in the Hermite basis.
pub fn hermite_position(m: usize) -> DMatrix<C64> {
    let s = 1.0 / (2.0 * PI).sqrt();
    DMatrix::from_fn(m, m, |r, c| {
        if r == c + 1 {
            C64::new(s * ((c as f64 + 1.0) / 2.0).sqrt(), 0.0)
        } else if c == r + 1 {
            C64::new(s * (c as f64 / 2.0).sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Truncated `−i d/dx` in the Hermite basis.
pub fn hermite_derivative(m: usize) -> DMatrix<C64> {
    let s = (2.0 * PI).sqrt();
    DMatrix::from_fn(m, m, |r, c| {
        let v = if r + 1 == c {
            (c as f64 / 2.0).sqrt()
        } else if r == c + 1 {
            -((c as f64 + 1.0) / 2.0).sqrt()
        } else {
            0.0
        };
        C64::new(0.0, -s * v)
    })
}

/// Truncated `P = (1/2πi) d/dx` in the Hermite basis.
pub fn hermite_momentum(m: usize) -> DMatrix<C64> {
    hermite_derivative(m) / C64::new(2.0 * PI, 0.0)
}

/// Weyl quantization `Op(a)` in the requested basis, via the integral
/// kernel `K(x,y) = ∫ a((x+y)/2, ξ) e^{2πi(x−y)ξ} dξ`.
pub fn weyl_op(a: &PhaseSymbol, basis: &Basis) -> Result<LinearOperatorMatrix> {
    a.check_decay(DEFAULT_DECAY_GUARD)?;
    match *basis {
        Basis::Grid { n, l } => {
            if n != a.n() || (l - a.l()).abs() > 1e-12 * l {
                return Err(CoreError::Structure("grid basis differs from the symbol grid".into()));
            }
            LinearOperatorMatrix::new(grid_kernel(a), *basis)
        }
        Basis::Hermite { m } => {
            if m == 0 || m > a.n() / 2 {
                return Err(CoreError::Parameter(format!("hermite size M = {m} must lie in 1..=N/2")));
            }
            let g = grid_kernel(a);
            LinearOperatorMatrix::new(grid_to_hermite(&g, a.l(), m), *basis)
        }
    }
}

/// `Δ·K(x_i, x_j)` on the symbol grid. The midpoints `(x_i+x_j)/2` are read
/// from a band-limited refinement in `x₁`.
pub(crate) fn grid_kernel(a: &PhaseSymbol) -> DMatrix<C64> {
    let n = a.n();
    let h = a.delta();
    // (2N)×N, row = refined x₁ index
    let (fine, _) = map_lines(a.data(), n, Axis::X1, refine_line);
    let sums = match super::symbol::lattice_ratio(n, a.l()) {
        Some(r) => kernel_sums_fft(&fine, n, a.l(), r),
        None => kernel_sums_direct(&fine, a),
    };
    DMatrix::from_fn(n, n, |i, j| sums[i + j][i + n - 1 - j] * h * h)
}

/// `S[s][d] = Σ_l fine[s][l] e^{2πi (d−N+1)Δ x_l}` for every refined row `s`
/// and offset `d`, by direct summation.
fn kernel_sums_direct(fine: &[C64], a: &PhaseSymbol) -> Vec<Vec<C64>> {
    let n = a.n();
    let h = a.delta();
    let xs: Vec<f64> = (0..n).map(|k| a.coord(k)).collect();
    let phase: Vec<Vec<C64>> = (0..2 * n - 1)
        .map(|d| {
            let dd = (d as f64 - (n as f64 - 1.0)) * h;
            xs.iter().map(|&x| C64::from_polar(1.0, 2.0 * PI * dd * x)).collect()
        })
        .collect();
    fine.par_chunks(n)
        .map(|sym| phase.iter().map(|ph| sym.iter().zip(ph).map(|(a, p)| a * p).sum()).collect())
        .collect()
}

/// Same sums on a lattice grid, `N = 4L²r`: then `Δ² = 1/(Nr)` and each row
/// is one zero-padded transform of length `Nr`.
fn kernel_sums_fft(fine: &[C64], n: usize, l: f64, r: usize) -> Vec<Vec<C64>> {
    let p = n * r;
    let fft = plan(p, true);
    let h = 2.0 * l / n as f64;
    fine.par_chunks(n)
        .map(|sym| {
            let mut buf = vec![C64::new(0.0, 0.0); p];
            buf[..n].copy_from_slice(sym);
            fft.process(&mut buf);
            (0..2 * n - 1)
                .map(|d| {
                    let dd = d as i64 - (n as i64 - 1);
                    // e^{2πi dΔ x_l} = e^{−2πi dΔL} e^{2πi d l / (Nr)}
                    buf[dd.rem_euclid(p as i64) as usize] * C64::from_polar(1.0, -2.0 * PI * dd as f64 * h * l)
                })
                .collect()
        })
        .collect()
}

/// Slow reference: `Op(a) = ∬ â(s,t) W(s,t) ds dt` with the transform and
/// the `s`-integral done by direct sums. Intended for small grids.
pub fn weyl_op_quadrature(a: &PhaseSymbol) -> DMatrix<C64> {
    let n = a.n();
    let l = a.l();
    let h = a.delta();
    let xs: Vec<f64> = (0..n).map(|k| a.coord(k)).collect();
    let ss: Vec<f64> = (0..n).map(|k| (k as f64 - n as f64 / 2.0) / (2.0 * l)).collect();
    // g[m][j] = Δ Σ_i e^{−2πi s_m x_i} a_ij
    let g: Vec<Vec<C64>> = ss
        .iter()
        .map(|&s| {
            (0..n)
                .map(|j| (0..n).map(|i| C64::from_polar(h, -2.0 * PI * s * xs[i]) * a.get(i, j)).sum())
                .collect()
        })
        .collect();
    // hat[m][d] = â(s_m, dΔ), d in −(N−1)..=(N−1)
    let hat: Vec<Vec<C64>> = g
        .iter()
        .map(|row| {
            (0..2 * n - 1)
                .map(|d| {
                    let t = (d as f64 - (n as f64 - 1.0)) * h;
                    (0..n).map(|j| C64::from_polar(h, -2.0 * PI * t * xs[j]) * row[j]).sum()
                })
                .collect()
        })
        .collect();
    DMatrix::from_fn(n, n, |i, j| {
        let d = j + n - 1 - i;
        let mut s = C64::new(0.0, 0.0);
        for (m, &sm) in ss.iter().enumerate() {
            s += hat[m][d] * C64::from_polar(1.0, PI * sm * (xs[i] + xs[j]));
        }
        s * (h / (2.0 * l))
    })
}

/// `‖Op(a)‖` on the first `m` Hermite modes.
pub fn opnorm(a: &PhaseSymbol, m: usize) -> Result<f64> {
    Ok(weyl_op(a, &Basis::Hermite { m })?.norm())
}

/// Grid matrix of the Fourier multiplier `f(P)` where `P` has spectrum
/// `ξ = k/(2L)`; used for `e^{2πβP}` and similar closures.
pub fn momentum_multiplier(n: usize, l: f64, f: impl Fn(f64) -> C64) -> Result<DMatrix<C64>> {
    check_grid(n, l)?;
    let fwd = plan(n, false);
    let inv = plan(n, true);
    let mut out = DMatrix::zeros(n, n);
    for col in 0..n {
        let mut v = vec![C64::new(0.0, 0.0); n];
        v[col] = C64::new(1.0, 0.0);
        fwd.process(&mut v);
        for (k, z) in v.iter_mut().enumerate() {
            let m = signed(k, n);
            let xi = m as f64 / (2.0 * l);
            *z *= if m == -(n as i64) / 2 { (f(xi) + f(-xi)) * 0.5 } else { f(xi) };
        }
        inv.process(&mut v);
        for r in 0..n {
            out[(r, col)] = v[r] / n as f64;
        }
    }
    Ok(out)
}

/// Diagonal grid matrix of `f(Q)`.
pub fn position_multiplier(n: usize, l: f64, f: impl Fn(f64) -> C64) -> Result<DMatrix<C64>> {
    check_grid(n, l)?;
    let h = 2.0 * l / n as f64;
    Ok(DMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |i, _| f(-l + i as f64 * h))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::GaussianTermSymbol;

    fn maxabs(m: &DMatrix<C64>) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn hermite_orthonormal() {
        let h = hermite_basis(256, 8.0, 32);
        let g = h.transpose() * &h;
        let err = (g - DMatrix::<f64>::identity(32, 32)).abs().max();
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn canonical_commutator() {
        let m = 24;
        let q = hermite_position(m);
        let d = hermite_derivative(m);
        let c = &d * &q - &q * &d;
        for k in 0..m - 1 {
            assert!((c[(k, k)] - C64::new(0.0, -1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn zero_symbol() {
        let a = PhaseSymbol::zeros(64, 4.0).unwrap();
        let op = weyl_op(&a, &Basis::Hermite { m: 16 }).unwrap();
        assert_eq!(op.entries.norm(), 0.0);
    }

    #[test]
    fn projector_spectrum() {
        for (n, l, m) in [(64, 4.0, 16), (128, 4.0, 32), (256, 8.0, 32)] {
            let a = PhaseSymbol::from_gaussian(&GaussianTermSymbol::a00(), n, l).unwrap();
            let op = weyl_op(&a, &Basis::Hermite { m }).unwrap();
            let e = op.entries.clone().symmetric_eigen().eigenvalues;
            let mut ev: Vec<f64> = e.iter().copied().collect();
            ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
            assert!((ev[0] - 1.0).abs() < 1e-8);
            assert!(ev[1..].iter().all(|v| v.abs() < 1e-8));
            assert!((op.norm() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn lattice_transform_matches_direct_sums() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for (n, l) in [(64, 4.0), (128, 4.0)] {
            let g = crate::gauss::GaussianTermSymbol::random(&mut rng, 2, 1.0, 1.0, 3.0, 1.0);
            let a = PhaseSymbol::from_gaussian(&g, n, l).unwrap();
            let (fine, _) = map_lines(a.data(), n, Axis::X1, refine_line);
            let r = super::super::symbol::lattice_ratio(n, l).unwrap();
            let fast = kernel_sums_fft(&fine, n, l, r);
            let slow = kernel_sums_direct(&fine, &a);
            let err = fast.iter().flatten().zip(slow.iter().flatten()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            assert!(err < 1e-10, "N={n}: {err}");
        }
    }

    #[test]
    fn kernel_matches_quadrature() {
        let a = PhaseSymbol::from_gaussian(&GaussianTermSymbol::a00(), 64, 4.0).unwrap();
        let k = grid_kernel(&a);
        let q = weyl_op_quadrature(&a);
        assert!(maxabs(&(k - q)) < 1e-10);
    }

    #[test]
    fn windowed_position_symbol() {
        let q = hermite_position(8);
        let mut errs = Vec::new();
        for rho in [0.16, 0.08, 0.04] {
            let a = PhaseSymbol::from_fn(512, 16.0, |x1, x2| {
                C64::new(x1 * (-PI * rho * (x1 * x1 + x2 * x2)).exp(), 0.0)
            })
            .unwrap();
            let op = weyl_op(&a, &Basis::Hermite { m: 8 }).unwrap();
            errs.push(maxabs(&(op.entries - &q)));
        }
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
        assert!(errs[2] < 0.25, "{errs:?}");
    }

    #[test]
    fn multipliers() {
        let e = position_multiplier(32, 2.0, |x| C64::new(x, 0.0)).unwrap();
        assert_eq!(e[(0, 0)], C64::new(-2.0, 0.0));
        let one = momentum_multiplier(32, 2.0, |_| C64::new(1.0, 0.0)).unwrap();
        assert!(maxabs(&(one - DMatrix::<C64>::identity(32, 32))) < 1e-14);
    }
}

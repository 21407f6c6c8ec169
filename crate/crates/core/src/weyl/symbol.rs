use num_complex::Complex64 as C64;

use crate::error::{CoreError, Result};
use crate::gauss::GaussianTermSymbol;

/// Default ratio between the outer-ring maximum and the global maximum.
pub const DEFAULT_DECAY_GUARD: f64 = 1e-8;

/// Samples of a function on the phase-space box `[−L, L)²`, `N` points per
/// side, stored row-major with `x₁` as the row index.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSymbol {
    n: usize,
    l: f64,
    data: Vec<C64>,
}

impl PhaseSymbol {
    pub fn new(n: usize, l: f64, data: Vec<C64>) -> Result<Self> {
        check_grid(n, l)?;
        if data.len() != n * n {
            return Err(CoreError::Structure(format!("expected {} samples, got {}", n * n, data.len())));
        }
        Ok(PhaseSymbol { n, l, data })
    }

    pub(crate) fn raw(n: usize, l: f64, data: Vec<C64>) -> Self {
        debug_assert_eq!(data.len(), n * n);
        PhaseSymbol { n, l, data }
    }

    pub fn zeros(n: usize, l: f64) -> Result<Self> {
        Self::new(n, l, vec![C64::new(0.0, 0.0); n * n])
    }

    pub fn from_fn(n: usize, l: f64, f: impl Fn(f64, f64) -> C64) -> Result<Self> {
        check_grid(n, l)?;
        let h = 2.0 * l / n as f64;
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            let x1 = -l + i as f64 * h;
            for j in 0..n {
                data.push(f(x1, -l + j as f64 * h));
            }
        }
        Ok(PhaseSymbol { n, l, data })
    }

    pub fn from_gaussian(g: &GaussianTermSymbol, n: usize, l: f64) -> Result<Self> {
        Self::from_fn(n, l, |x1, x2| g.eval(x1, x2))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    /// Grid spacing `2L/N`.
    pub fn delta(&self) -> f64 {
        2.0 * self.l / self.n as f64
    }

    pub fn coord(&self, k: usize) -> f64 {
        -self.l + k as f64 * self.delta()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.n + j]
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }


    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.n == other.n && (self.l - other.l).abs() <= 1e-12 * self.l
    }

    pub fn require_same_grid(&self, other: &Self) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(CoreError::Structure(format!(
                "grid mismatch: (N={}, L={}) vs (N={}, L={})",
                self.n, self.l, other.n, other.l
            )))
        }
    }

    /// `N/(4L²)` when it is a positive integer: then half-steps in position
    /// and momentum land on the refined grid.
    pub fn lattice_ratio(&self) -> Option<usize> {
        lattice_ratio(self.n, self.l)
    }

    pub fn sup_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn sup_dist(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Largest magnitude on the two outermost rings.
    pub fn boundary_max(&self) -> f64 {
        let n = self.n;
        let edge = |k: usize| k < 2 || k >= n - 2;
        let mut m = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if edge(i) || edge(j) {
                    m = m.max(self.data[i * n + j].norm());
                }
            }
        }
        m
    }

    pub fn check_decay(&self, guard: f64) -> Result<()> {
        let top = self.sup_norm();
        let edge = self.boundary_max();
        if edge > guard * top {
            return Err(CoreError::Guard(format!(
                "symbol does not decay inside the box: boundary/max = {:.3e} exceeds {:.1e}; enlarge L",
                edge / top,
                guard
            )));
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        PhaseSymbol { n: self.n, l: self.l, data: self.data.iter().map(|&z| f(z)).collect() }
    }

    /// Multiplies by `w(x₁, x₂)` pointwise.
    pub fn weight(&self, w: impl Fn(f64, f64) -> C64) -> Self {
        let mut out = self.clone();
        let n = self.n;
        for i in 0..n {
            let x1 = self.coord(i);
            for j in 0..n {
                out.data[i * n + j] *= w(x1, self.coord(j));
            }
        }
        out
    }

    pub fn zip(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        self.require_same_grid(other)?;
        Ok(PhaseSymbol {
            n: self.n,
            l: self.l,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    /// The involution `a⁺ = ā`.
    pub fn adjoint(&self) -> Self {
        self.map(|z| z.conj())
    }
}

pub(crate) fn check_grid(n: usize, l: f64) -> Result<()> {
    if n < 16 || !n.is_power_of_two() {
        return Err(CoreError::Parameter(format!("N = {n} must be a power of two and at least 16")));
    }
    if !(l.is_finite() && l > 0.0) {
        return Err(CoreError::Parameter(format!("L = {l} must be positive")));
    }
    Ok(())
}

pub fn lattice_ratio(n: usize, l: f64) -> Option<usize> {
    let r = n as f64 / (4.0 * l * l);
    let k = r.round();
    if k >= 1.0 && (r - k).abs() < 1e-9 {
        Some(k as usize)
    } else {
        None
    }
}

/// Pointwise complex conjugate.
pub fn symbol_adjoint(a: &PhaseSymbol) -> PhaseSymbol {
    a.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(PhaseSymbol::zeros(8, 1.0).is_err());
        assert!(PhaseSymbol::zeros(48, 1.0).is_err());
        assert!(PhaseSymbol::zeros(16, 0.0).is_err());
        assert!(PhaseSymbol::new(16, 1.0, vec![C64::new(0.0, 0.0); 10]).is_err());
    }

    #[test]
    fn decay_guard() {
        let g = GaussianTermSymbol::radial(C64::new(1.0, 0.0), 1.0);
        assert!(PhaseSymbol::from_gaussian(&g, 64, 4.0).unwrap().check_decay(DEFAULT_DECAY_GUARD).is_ok());
        let wide = GaussianTermSymbol::radial(C64::new(1.0, 0.0), 0.05);
        let e = PhaseSymbol::from_gaussian(&wide, 64, 4.0).unwrap().check_decay(DEFAULT_DECAY_GUARD);
        assert!(matches!(e, Err(CoreError::Guard(_))));
    }

    #[test]
    fn adjoint_conjugates() {
        let a = PhaseSymbol::from_fn(16, 2.0, |x, y| C64::new(x, y)).unwrap();
        let b = symbol_adjoint(&a.scale(C64::new(0.0, 1.0)));
        let expect = a.map(|z| C64::new(0.0, -1.0) * z.conj());
        assert_eq!(b, expect);
        let real = a.map(|z| C64::new(z.re, 0.0));
        assert_eq!(symbol_adjoint(&real), real);
    }

    #[test]
    fn ratio() {
        assert_eq!(lattice_ratio(256, 8.0), Some(1));
        assert_eq!(lattice_ratio(512, 8.0), Some(2));
        assert_eq!(lattice_ratio(64, 4.0), Some(1));
        assert_eq!(lattice_ratio(64, 8.0), None);
    }
}

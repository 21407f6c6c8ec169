//! Cubic B-spline interpolation on uniform grids with zero extension.

use crate::C64;

fn cubic_bspline(t: f64) -> f64 {
    let a = t.abs();
    if a < 1.0 {
        (4.0 - 6.0 * a * a + 3.0 * a * a * a) / 6.0
    } else if a < 2.0 {
        let b = 2.0 - a;
        b * b * b / 6.0
    } else {
        0.0
    }
}

/// Solves `(c[i-1] + 4 c[i] + c[i+1]) / 6 = f[i]` with `c[-1] = c[n] = 0`.
fn prefilter(f: &mut [C64]) {
    let n = f.len();
    if n == 0 {
        return;
    }
    let mut diag = vec![0.0; n];
    diag[0] = 4.0;
    for i in 1..n {
        let w = 1.0 / diag[i - 1];
        diag[i] = 4.0 - w;
        let prev = f[i - 1];
        f[i] -= prev * w;
    }
    f[n - 1] /= diag[n - 1];
    for i in (0..n - 1).rev() {
        let next = f[i + 1];
        f[i] = (f[i] - next) / diag[i];
    }
    for v in f.iter_mut() {
        *v *= 6.0;
    }
}

/// Evaluates into `weights` the four basis values touching `t` and returns the
/// first index, or `None` when `t` lies outside the support.
fn stencil(t: f64, n: usize, weights: &mut [f64; 4]) -> Option<isize> {
    if !t.is_finite() || t <= -2.0 || t >= n as f64 + 1.0 {
        return None;
    }
    let base = t.floor() as isize - 1;
    for (k, w) in weights.iter_mut().enumerate() {
        *w = cubic_bspline(t - (base + k as isize) as f64);
    }
    Some(base)
}

/// Interpolating spline of samples `f(lo + k h)`, `k < n`.
#[derive(Clone, Debug)]
pub struct Spline1 {
    lo: f64,
    h: f64,
    coef: Vec<C64>,
}

impl Spline1 {
    pub fn new(lo: f64, h: f64, samples: &[C64]) -> Self {
        let mut coef = samples.to_vec();
        prefilter(&mut coef);
        Spline1 { lo, h, coef }
    }

    pub fn eval(&self, x: f64) -> C64 {
        let n = self.coef.len();
        let mut w = [0.0; 4];
        let Some(base) = stencil((x - self.lo) / self.h, n, &mut w) else {
            return C64::new(0.0, 0.0);
        };
        let mut acc = C64::new(0.0, 0.0);
        for (k, wk) in w.iter().enumerate() {
            let i = base + k as isize;
            if i >= 0 && (i as usize) < n {
                acc += self.coef[i as usize] * wk;
            }
        }
        acc
    }
}

/// Tensor-product spline of row-major samples on `n0 × n1` nodes.
#[derive(Clone, Debug)]
pub struct Spline2 {
    lo: [f64; 2],
    h: [f64; 2],
    n: [usize; 2],
    coef: Vec<C64>,
}

impl Spline2 {
    pub fn new(lo: [f64; 2], h: [f64; 2], n: [usize; 2], samples: &[C64]) -> Self {
        assert_eq!(samples.len(), n[0] * n[1]);
        let mut coef = samples.to_vec();
        for row in coef.chunks_mut(n[1]) {
            prefilter(row);
        }
        let mut col = vec![C64::new(0.0, 0.0); n[0]];
        for j in 0..n[1] {
            for i in 0..n[0] {
                col[i] = coef[i * n[1] + j];
            }
            prefilter(&mut col);
            for i in 0..n[0] {
                coef[i * n[1] + j] = col[i];
            }
        }
        Spline2 { lo, h, n, coef }
    }

    pub fn eval(&self, x0: f64, x1: f64) -> C64 {
        let (mut w0, mut w1) = ([0.0; 4], [0.0; 4]);
        let Some(b0) = stencil((x0 - self.lo[0]) / self.h[0], self.n[0], &mut w0) else {
            return C64::new(0.0, 0.0);
        };
        let Some(b1) = stencil((x1 - self.lo[1]) / self.h[1], self.n[1], &mut w1) else {
            return C64::new(0.0, 0.0);
        };
        let mut acc = C64::new(0.0, 0.0);
        for (a, wa) in w0.iter().enumerate() {
            let i = b0 + a as isize;
            if i < 0 || i as usize >= self.n[0] {
                continue;
            }
            let row = &self.coef[i as usize * self.n[1]..(i as usize + 1) * self.n[1]];
            let mut inner = C64::new(0.0, 0.0);
            for (b, wb) in w1.iter().enumerate() {
                let j = b1 + b as isize;
                if j >= 0 && (j as usize) < self.n[1] {
                    inner += row[j as usize] * wb;
                }
            }
            acc += inner * wa;
        }
        acc
    }
}

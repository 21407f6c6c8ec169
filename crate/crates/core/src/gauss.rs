//! Closed-form Gaussian families. Sums of complex Gaussians are closed under
//! products, complex shifts, the Fourier transform and the twisted product,
//! so they serve as exact references for the sampled calculus.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::Rng;

use crate::error::{CoreError, Result};

type M2 = [[C64; 2]; 2];
type V2 = [C64; 2];

fn cz() -> C64 {
    C64::new(0.0, 0.0)
}

fn det(m: &M2) -> C64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

fn inv(m: &M2) -> M2 {
    let d = det(m);
    [[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]]
}

fn mat_mul(a: &M2, b: &M2) -> M2 {
    let mut r = [[cz(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    r
}

fn transpose(a: &M2) -> M2 {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

fn mat_add(a: &M2, b: &M2) -> M2 {
    [[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]]
}

fn mat_scale(a: &M2, s: C64) -> M2 {
    [[a[0][0] * s, a[0][1] * s], [a[1][0] * s, a[1][1] * s]]
}

fn mat_vec(a: &M2, v: &V2) -> V2 {
    [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
}

fn dot(u: &V2, v: &V2) -> C64 {
    u[0] * v[0] + u[1] * v[1]
}

fn symmetrize(a: &M2) -> M2 {
    let off = (a[0][1] + a[1][0]) * 0.5;
    [[a[0][0], off], [off, a[1][1]]]
}

/// `det(m)^{-1/2}` on the branch continued from positive definite real
/// matrices; valid when the eigenvalues of `m` have positive real part.
fn det_inv_sqrt(m: &M2) -> C64 {
    let half_tr = (m[0][0] + m[1][1]) * 0.5;
    let disc = (half_tr * half_tr - det(m)).sqrt();
    let (l1, l2) = (half_tr + disc, half_tr - disc);
    1.0 / (l1.sqrt() * l2.sqrt())
}

fn re_positive_definite(a: &M2) -> bool {
    let (p, q, r) = (a[0][0].re, 0.5 * (a[0][1].re + a[1][0].re), a[1][1].re);
    p > 0.0 && p * r - q * q > 0.0
}

/// One term `c·exp(−π⟨Az,z⟩ + ⟨b,z⟩)` with `A` complex symmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianTerm {
    pub c: C64,
    pub a: M2,
    pub b: V2,
}

impl GaussianTerm {
    pub fn new(c: C64, a: M2, b: V2) -> Result<Self> {
        if (a[0][1] - a[1][0]).norm() > 1e-14 * (1.0 + a[0][1].norm()) {
            return Err(CoreError::Parameter("quadratic form must be symmetric".into()));
        }
        if !re_positive_definite(&a) {
            return Err(CoreError::Parameter("Re A must be positive definite".into()));
        }
        Ok(GaussianTerm { c, a: symmetrize(&a), b })
    }

    pub fn exponent(&self, z: &V2) -> C64 {
        -PI * dot(z, &mat_vec(&self.a, z)) + dot(&self.b, z)
    }

    pub fn eval(&self, x1: f64, x2: f64) -> C64 {
        let z = [C64::new(x1, 0.0), C64::new(x2, 0.0)];
        self.c * self.exponent(&z).exp()
    }

    pub fn eval_complex(&self, z: &V2) -> C64 {
        self.c * self.exponent(z).exp()
    }

    fn shift(&self, w: &V2) -> Self {
        let aw = mat_vec(&self.a, w);
        GaussianTerm {
            c: self.c * (-PI * dot(w, &aw) + dot(&self.b, w)).exp(),
            a: self.a,
            b: [self.b[0] - 2.0 * PI * aw[0], self.b[1] - 2.0 * PI * aw[1]],
        }
    }

    fn fourier(&self) -> Self {
        let ai = inv(&self.a);
        let aib = mat_vec(&ai, &self.b);
        let i = C64::new(0.0, 1.0);
        GaussianTerm {
            c: self.c * det_inv_sqrt(&self.a) * (dot(&self.b, &aib) / (4.0 * PI)).exp(),
            a: symmetrize(&ai),
            b: [-i * aib[0], -i * aib[1]],
        }
    }

    /// Twisted product of two terms by exact Gaussian integration.
    fn star(&self, other: &Self) -> Self {
        let hat = self.fourier();
        let half = C64::new(0.5, 0.0);
        let k: M2 = [[cz(), half], [-half, cz()]];
        let kt = transpose(&k);
        let m = symmetrize(&mat_add(&hat.a, &mat_mul(&kt, &mat_mul(&other.a, &k))));
        let mi = symmetrize(&inv(&m));
        let kb = mat_vec(&kt, &other.b);
        let v0 = [hat.b[0] + kb[0], hat.b[1] + kb[1]];
        let two_pi_i = C64::new(0.0, 2.0 * PI);
        let ka = mat_scale(&mat_mul(&kt, &other.a), C64::new(-2.0 * PI, 0.0));
        let g = mat_add(&[[two_pi_i, cz()], [cz(), two_pi_i]], &ka);
        let gt = transpose(&g);
        let gmg = mat_mul(&gt, &mat_mul(&mi, &g));
        let a = symmetrize(&mat_add(&other.a, &mat_scale(&gmg, C64::new(-1.0 / (4.0 * PI * PI), 0.0))));
        let gmv = mat_vec(&gt, &mat_vec(&mi, &v0));
        let b = [other.b[0] + gmv[0] / (2.0 * PI), other.b[1] + gmv[1] / (2.0 * PI)];
        let c = hat.c * other.c * det_inv_sqrt(&m) * (dot(&v0, &mat_vec(&mi, &v0)) / (4.0 * PI)).exp();
        GaussianTerm { c, a, b }
    }
}

/// Finite sum of Gaussian terms on phase space.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct GaussianTermSymbol {
    pub terms: Vec<GaussianTerm>,
}

impl GaussianTermSymbol {
    pub fn new(terms: Vec<GaussianTerm>) -> Self {
        GaussianTermSymbol { terms }
    }

    pub fn single(c: C64, a: M2, b: V2) -> Result<Self> {
        Ok(GaussianTermSymbol { terms: vec![GaussianTerm::new(c, a, b)?] })
    }

    /// `c·exp(−πρ(x₁² + x₂²))`.
    pub fn radial(c: C64, rho: f64) -> Self {
        let r = C64::new(rho, 0.0);
        Self::single(c, [[r, cz()], [cz(), r]], [cz(), cz()]).expect("radial gaussian")
    }

    /// The rank-one projector symbol `2·exp(−2π(x₁² + x₂²))`.
    pub fn a00() -> Self {
        Self::radial(C64::new(2.0, 0.0), 2.0)
    }

    pub fn eval(&self, x1: f64, x2: f64) -> C64 {
        self.terms.iter().map(|t| t.eval(x1, x2)).sum()
    }

    pub fn eval_complex(&self, z: &V2) -> C64 {
        self.terms.iter().map(|t| t.eval_complex(z)).sum()
    }

    /// `(∂₁, ∂₂)` at a real point.
    pub fn gradient(&self, x1: f64, x2: f64) -> V2 {
        let z = [C64::new(x1, 0.0), C64::new(x2, 0.0)];
        let mut g = [cz(), cz()];
        for t in &self.terms {
            let v = t.eval_complex(&z);
            let az = mat_vec(&t.a, &z);
            for k in 0..2 {
                g[k] += v * (t.b[k] - 2.0 * PI * az[k]);
            }
        }
        g
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        GaussianTermSymbol { terms }
    }

    pub fn scale(&self, s: C64) -> Self {
        GaussianTermSymbol {
            terms: self.terms.iter().map(|t| GaussianTerm { c: t.c * s, ..t.clone() }).collect(),
        }
    }

    /// Pointwise complex conjugate.
    pub fn conj(&self) -> Self {
        GaussianTermSymbol {
            terms: self
                .terms
                .iter()
                .map(|t| GaussianTerm {
                    c: t.c.conj(),
                    a: [[t.a[0][0].conj(), t.a[0][1].conj()], [t.a[1][0].conj(), t.a[1][1].conj()]],
                    b: [t.b[0].conj(), t.b[1].conj()],
                })
                .collect(),
        }
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Self {
        let mut terms = Vec::new();
        for s in &self.terms {
            for t in &other.terms {
                terms.push(GaussianTerm {
                    c: s.c * t.c,
                    a: mat_add(&s.a, &t.a),
                    b: [s.b[0] + t.b[0], s.b[1] + t.b[1]],
                });
            }
        }
        GaussianTermSymbol { terms }
    }

    /// `z ↦ a(z + w)` for complex `w`.
    pub fn shift(&self, w: V2) -> Self {
        GaussianTermSymbol { terms: self.terms.iter().map(|t| t.shift(&w)).collect() }
    }

    /// `z ↦ exp(⟨λ,z⟩)·a(z)`.
    pub fn modulate(&self, lambda: V2) -> Self {
        GaussianTermSymbol {
            terms: self
                .terms
                .iter()
                .map(|t| GaussianTerm { b: [t.b[0] + lambda[0], t.b[1] + lambda[1]], ..t.clone() })
                .collect(),
        }
    }

    /// `â(ξ) = ∬ e^{−2πi⟨ξ,z⟩} a(z) dz`.
    pub fn fourier(&self) -> Self {
        GaussianTermSymbol { terms: self.terms.iter().map(GaussianTerm::fourier).collect() }
    }

    /// Exact twisted product.
    pub fn star(&self, other: &Self) -> Self {
        let mut terms = Vec::new();
        for s in &self.terms {
            for t in &other.terms {
                terms.push(s.star(t));
            }
        }
        GaussianTermSymbol { terms }
    }

    /// A random sum of `count` terms: centres within `spread`, quadratic
    /// forms with eigenvalues in `[lo, hi]` and a random rotation, linear
    /// frequencies up to `freq` and unit-scale complex amplitudes.
    pub fn random<R: Rng>(rng: &mut R, count: usize, spread: f64, lo: f64, hi: f64, freq: f64) -> Self {
        let mut terms = Vec::with_capacity(count);
        for _ in 0..count {
            let th: f64 = rng.gen_range(0.0..PI);
            let (l1, l2) = (rng.gen_range(lo..hi), rng.gen_range(lo..hi));
            let (cs, sn) = (th.cos(), th.sin());
            let a00 = l1 * cs * cs + l2 * sn * sn;
            let a11 = l1 * sn * sn + l2 * cs * cs;
            let a01 = (l1 - l2) * cs * sn;
            let a = [[C64::new(a00, 0.0), C64::new(a01, 0.0)], [C64::new(a01, 0.0), C64::new(a11, 0.0)]];
            let centre = [rng.gen_range(-spread..spread), rng.gen_range(-spread..spread)];
            let k = [rng.gen_range(-freq..freq), rng.gen_range(-freq..freq)];
            // exp(−π⟨A(z−z0),(z−z0)⟩ + 2πi⟨k,z⟩) up to a constant
            let az0 = [a00 * centre[0] + a01 * centre[1], a01 * centre[0] + a11 * centre[1]];
            let b = [
                C64::new(2.0 * PI * az0[0], 2.0 * PI * k[0]),
                C64::new(2.0 * PI * az0[1], 2.0 * PI * k[1]),
            ];
            let norm = (-PI * (centre[0] * az0[0] + centre[1] * az0[1])).exp();
            let c = C64::from_polar(rng.gen_range(0.5..1.5) * norm, rng.gen_range(0.0..2.0 * PI));
            terms.push(GaussianTerm { c, a, b });
        }
        GaussianTermSymbol { terms }
    }
}

/// One term `c·exp(−πa x² + b x)` on the line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianTerm1 {
    pub c: C64,
    pub a: C64,
    pub b: C64,
}

/// Finite sum of Gaussians on the line, kept in closed form.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct GaussianVector {
    pub terms: Vec<GaussianTerm1>,
}

impl GaussianVector {
    pub fn single(c: C64, a: C64, b: C64) -> Result<Self> {
        if a.re <= 0.0 {
            return Err(CoreError::Parameter("Re a must be positive".into()));
        }
        Ok(GaussianVector { terms: vec![GaussianTerm1 { c, a, b }] })
    }

    /// `exp(−π(x − x0)²/σ²)·exp(2πikx)`.
    pub fn packet(x0: f64, sigma: f64, k: f64) -> Self {
        let a = 1.0 / (sigma * sigma);
        Self::single(
            C64::new((-PI * a * x0 * x0).exp(), 0.0),
            C64::new(a, 0.0),
            C64::new(2.0 * PI * a * x0, 2.0 * PI * k),
        )
        .expect("packet width")
    }

    pub fn eval(&self, x: f64) -> C64 {
        self.eval_complex(C64::new(x, 0.0))
    }

    pub fn eval_complex(&self, x: C64) -> C64 {
        self.terms.iter().map(|t| t.c * (-PI * t.a * x * x + t.b * x).exp()).sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        GaussianVector { terms }
    }

    pub fn scale(&self, s: C64) -> Self {
        GaussianVector { terms: self.terms.iter().map(|t| GaussianTerm1 { c: t.c * s, ..*t }).collect() }
    }

    /// `x ↦ e^{λx} f(x)`.
    pub fn mul_exp(&self, lambda: C64) -> Self {
        GaussianVector { terms: self.terms.iter().map(|t| GaussianTerm1 { b: t.b + lambda, ..*t }).collect() }
    }

    /// `x ↦ f(λx + μ)` for real `λ ≠ 0` and complex `μ`.
    pub fn affine(&self, lambda: f64, mu: C64) -> Self {
        GaussianVector {
            terms: self
                .terms
                .iter()
                .map(|t| GaussianTerm1 {
                    c: t.c * (-PI * t.a * mu * mu + t.b * mu).exp(),
                    a: t.a * lambda * lambda,
                    b: (t.b - 2.0 * PI * t.a * mu) * lambda,
                })
                .collect(),
        }
    }

    /// `x ↦ f(x + w)`.
    pub fn shift(&self, w: C64) -> Self {
        self.affine(1.0, w)
    }

    /// `f′(x)`.
    pub fn derivative(&self, x: f64) -> C64 {
        let x = C64::new(x, 0.0);
        self.terms.iter().map(|t| t.c * (-PI * t.a * x * x + t.b * x).exp() * (t.b - 2.0 * PI * t.a * x)).sum()
    }

    /// `∫ conj(f) g dx`.
    pub fn inner(&self, other: &Self) -> C64 {
        let mut s = cz();
        for f in &self.terms {
            for g in &other.terms {
                let a = f.a.conj() + g.a;
                let b = f.b.conj() + g.b;
                s += f.c.conj() * g.c * (b * b / (4.0 * PI * a)).exp() / a.sqrt();
            }
        }
        s
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).re.max(0.0).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn quad2(f: impl Fn(f64, f64) -> C64, l: f64, n: usize) -> C64 {
        let h = 2.0 * l / n as f64;
        let mut s = cz();
        for i in 0..n {
            for j in 0..n {
                s += f(-l + i as f64 * h, -l + j as f64 * h);
            }
        }
        s * h * h
    }

    #[test]
    fn fourier_matches_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = GaussianTermSymbol::random(&mut rng, 2, 1.0, 1.0, 3.0, 1.0);
        let hat = g.fourier();
        for &(x, y) in &[(0.0, 0.0), (0.3, -0.7), (1.1, 0.4)] {
            let direct = quad2(
                |s, t| C64::from_polar(1.0, -2.0 * PI * (x * s + y * t)) * g.eval(s, t),
                7.0,
                280,
            );
            assert!((direct - hat.eval(x, y)).norm() < 1e-10, "{direct} vs {}", hat.eval(x, y));
        }
    }

    #[test]
    fn unit_gaussian_is_self_dual() {
        let g = GaussianTermSymbol::radial(C64::new(1.0, 0.0), 1.0);
        let h = g.fourier();
        for &(x, y) in &[(0.0, 0.0), (0.5, 1.0), (-1.3, 0.2)] {
            assert!((g.eval(x, y) - h.eval(x, y)).norm() < 1e-14);
        }
    }

    #[test]
    fn projector_is_idempotent() {
        let a = GaussianTermSymbol::a00();
        let aa = a.star(&a);
        for &(x, y) in &[(0.0, 0.0), (0.2, -0.1), (0.5, 0.4)] {
            assert!((a.eval(x, y) - aa.eval(x, y)).norm() < 1e-13);
        }
    }

    #[test]
    fn star_matches_integral_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = GaussianTermSymbol::random(&mut rng, 1, 0.5, 1.0, 2.0, 0.5);
        let b = GaussianTermSymbol::random(&mut rng, 1, 0.5, 1.0, 2.0, 0.5);
        let hat = a.fourier();
        let ab = a.star(&b);
        for &(x1, x2) in &[(0.1, 0.2), (-0.4, 0.3)] {
            let direct = quad2(
                |s, t| {
                    hat.eval(s, t)
                        * C64::from_polar(1.0, 2.0 * PI * (s * x1 + t * x2))
                        * b.eval(x1 + t / 2.0, x2 - s / 2.0)
                },
                6.0,
                300,
            );
            assert!((direct - ab.eval(x1, x2)).norm() < 1e-9, "{direct} vs {}", ab.eval(x1, x2));
        }
    }

    #[test]
    fn star_is_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = GaussianTermSymbol::random(&mut rng, 2, 1.0, 1.0, 3.0, 1.0);
        let b = GaussianTermSymbol::random(&mut rng, 1, 1.0, 1.0, 3.0, 1.0);
        let c = GaussianTermSymbol::random(&mut rng, 1, 1.0, 1.0, 3.0, 1.0);
        let l = a.star(&b).star(&c);
        let r = a.star(&b.star(&c));
        for &(x, y) in &[(0.0, 0.0), (0.3, -0.5)] {
            assert!((l.eval(x, y) - r.eval(x, y)).norm() < 1e-11);
        }
    }

    #[test]
    fn complex_shift_is_analytic_continuation() {
        let g = GaussianTermSymbol::radial(C64::new(1.0, 0.0), 1.3);
        let w = [C64::new(0.2, 0.3), C64::new(-0.1, 0.25)];
        let s = g.shift(w);
        let z = [C64::new(0.4, 0.0), C64::new(-0.2, 0.0)];
        let zw = [z[0] + w[0], z[1] + w[1]];
        assert!((s.eval_complex(&z) - g.eval_complex(&zw)).norm() < 1e-14);
    }

    #[test]
    fn gradient_matches_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = GaussianTermSymbol::random(&mut rng, 2, 1.0, 1.0, 3.0, 1.0);
        let h = 1e-5;
        let (x, y) = (0.3, -0.2);
        let d = g.gradient(x, y);
        let d1 = (g.eval(x + h, y) - g.eval(x - h, y)) / (2.0 * h);
        let d2 = (g.eval(x, y + h) - g.eval(x, y - h)) / (2.0 * h);
        assert!((d[0] - d1).norm() < 1e-8 && (d[1] - d2).norm() < 1e-8);
    }

    #[test]
    fn vector_inner_and_shift() {
        let f = GaussianVector::packet(0.3, 0.8, 0.5);
        let h = 1e-3;
        let direct: f64 = (-8000..8000).map(|k| f.eval(k as f64 * h).norm_sqr()).sum::<f64>() * h;
        assert!((f.norm() * f.norm() - direct).abs() < 1e-12);
        let w = C64::new(0.1, -0.4);
        assert!((f.shift(w).eval(0.7) - f.eval_complex(C64::new(0.7, 0.0) + w)).norm() < 1e-14);
    }
}

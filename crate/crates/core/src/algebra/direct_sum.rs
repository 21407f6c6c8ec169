use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{AlgebraElement, Presentation};

/// The operations a concrete *-algebra needs for the direct-sum construction
/// and the axiom checks.
pub trait StarAlgebra: Clone {
    fn mul(&self, other: &Self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn star(&self) -> Self;
    /// A size for relative comparisons.
    fn magnitude(&self) -> f64;
    fn zero_like(&self) -> Self;

    fn dist(&self, other: &Self) -> f64 {
        self.sub(other).magnitude()
    }
}

impl StarAlgebra for DMatrix<Complex64> {
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn star(&self) -> Self {
        self.adjoint()
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn zero_like(&self) -> Self {
        DMatrix::zeros(self.nrows(), self.ncols())
    }
}

/// An element of a presented algebra, kept in normal form.
#[derive(Clone, Debug)]
pub struct PresentedElement {
    pub presentation: Arc<Presentation>,
    pub element: AlgebraElement,
}

impl PresentedElement {
    pub fn new(presentation: Arc<Presentation>, element: &AlgebraElement) -> crate::Result<Self> {
        let element = presentation.normal_form(element)?;
        Ok(PresentedElement { presentation, element })
    }

    fn wrap(&self, e: AlgebraElement) -> Self {
        let element = self.presentation.normal_form(&e).expect("presented algebra operation");
        PresentedElement { presentation: self.presentation.clone(), element }
    }
}

impl StarAlgebra for PresentedElement {
    fn mul(&self, other: &Self) -> Self {
        self.wrap(self.element.multiply(&other.element).expect("same alphabet"))
    }
    fn add(&self, other: &Self) -> Self {
        self.wrap(self.element.add(&other.element).expect("same alphabet"))
    }
    fn sub(&self, other: &Self) -> Self {
        self.wrap(self.element.sub(&other.element).expect("same alphabet"))
    }
    fn star(&self) -> Self {
        self.wrap(self.element.adjoint())
    }
    fn magnitude(&self) -> f64 {
        self.element.max_coefficient()
    }
    fn zero_like(&self) -> Self {
        self.wrap(AlgebraElement::zero(self.presentation.alphabet()))
    }
}

/// A left action `x ▷ b` of `X` on `B`.
pub trait LeftAction<X, B> {
    fn act(&self, x: &X, b: &B) -> B;
}

impl<X, B, F: Fn(&X, &B) -> B> LeftAction<X, B> for F {
    fn act(&self, x: &X, b: &B) -> B {
        self(x, b)
    }
}

/// `x + b` in `X ⊕ B`.
#[derive(Clone, Debug)]
pub struct DirectSumElement<X, B> {
    pub x: X,
    pub b: B,
}

impl<X: StarAlgebra, B: StarAlgebra> DirectSumElement<X, B> {
    pub fn star(&self) -> Self {
        DirectSumElement { x: self.x.star(), b: self.b.star() }
    }

    pub fn dist(&self, other: &Self) -> f64 {
        self.x.dist(&other.x).max(self.b.dist(&other.b))
    }
}

/// `(x + a)(y + b) = xy + (y⁺ ▷ a⁺)⁺ + x ▷ b + ab`.
pub fn direct_sum_product<X: StarAlgebra, B: StarAlgebra>(
    u: &DirectSumElement<X, B>,
    v: &DirectSumElement<X, B>,
    act: &impl LeftAction<X, B>,
) -> DirectSumElement<X, B> {
    let right = act.act(&v.x.star(), &u.b.star()).star();
    let left = act.act(&u.x, &v.b);
    DirectSumElement { x: u.x.mul(&v.x), b: right.add(&left).add(&u.b.mul(&v.b)) }
}

fn rel(a: &impl StarAlgebra, b: &impl StarAlgebra, lhs_dist: f64) -> f64 {
    lhs_dist / a.magnitude().max(b.magnitude()).max(1.0)
}

/// Largest relative violation of `(x▷a)b = x▷(ab)` and
/// `(x▷(y▷a)⁺)⁺ = y▷(x▷a⁺)⁺` over the samples.
pub fn direct_sum_axiom_residual<X: StarAlgebra, B: StarAlgebra>(
    act: &impl LeftAction<X, B>,
    xs: &[X],
    bs: &[B],
) -> f64 {
    let mut worst = 0.0f64;
    for x in xs {
        for a in bs {
            for b in bs {
                let l = act.act(x, a).mul(b);
                let r = act.act(x, &a.mul(b));
                worst = worst.max(rel(&l, &r, l.dist(&r)));
            }
            for y in xs {
                let l = act.act(x, &act.act(y, a).star()).star();
                let r = act.act(y, &act.act(x, &a.star()).star());
                worst = worst.max(rel(&l, &r, l.dist(&r)));
            }
        }
    }
    worst
}

/// Largest relative violation of `(x▷a)⁺b = a⁺(x⁺▷b)` over the samples.
pub fn pair_compat_residual<X: StarAlgebra, B: StarAlgebra>(
    act: &impl LeftAction<X, B>,
    xs: &[X],
    bs: &[B],
) -> f64 {
    let mut worst = 0.0f64;
    for x in xs {
        let xp = x.star();
        for a in bs {
            let xa = act.act(x, a).star();
            let ap = a.star();
            for b in bs {
                let l = xa.mul(b);
                let r = ap.mul(&act.act(&xp, b));
                worst = worst.max(rel(&l, &r, l.dist(&r)));
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type M = DMatrix<Complex64>;

    fn random_matrices(seed: u64, n: usize, count: usize) -> Vec<M> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| M::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
            .collect()
    }

    fn compose(x: &M, b: &M) -> M {
        x * b
    }

    fn reversed(x: &M, b: &M) -> M {
        b * x
    }

    #[test]
    fn operator_pair_satisfies_axioms() {
        let xs = random_matrices(1, 6, 4);
        let bs = random_matrices(2, 6, 4);
        assert!(direct_sum_axiom_residual(&compose, &xs, &bs) <= 1e-12);
        assert!(pair_compat_residual(&compose, &xs, &bs) <= 1e-12);
    }

    #[test]
    fn reversed_orientation_fails() {
        let xs = random_matrices(3, 6, 4);
        let bs = random_matrices(4, 6, 4);
        assert!(direct_sum_axiom_residual(&reversed, &xs, &bs) > 0.1);
        assert!(pair_compat_residual(&reversed, &xs, &bs) > 0.1);
    }

    #[test]
    fn cross_terms() {
        let m = random_matrices(5, 4, 3);
        let z = m[0].zero_like();
        let (x, a, b) = (&m[0], &m[1], &m[2]);
        let u = DirectSumElement { x: x.clone(), b: z.clone() };
        let v = DirectSumElement { x: z.clone(), b: b.clone() };
        let p = direct_sum_product(&u, &v, &compose);
        assert!(p.x.norm() == 0.0 && p.b.dist(&(x * b)) < 1e-13);

        let u = DirectSumElement { x: z.clone(), b: a.clone() };
        let v = DirectSumElement { x: x.clone(), b: z.clone() };
        let p = direct_sum_product(&u, &v, &compose);
        let expect = compose(&x.adjoint(), &a.adjoint()).adjoint();
        assert!(p.b.dist(&expect) < 1e-13);

        let one = DirectSumElement { x: M::identity(4, 4), b: z.clone() };
        let v = DirectSumElement { x: x.clone(), b: b.clone() };
        assert!(direct_sum_product(&one, &v, &compose).dist(&v) < 1e-13);
    }

    #[test]
    fn direct_sum_is_associative_and_star_reverses() {
        let m = random_matrices(6, 5, 6);
        let e = |i: usize| DirectSumElement { x: m[i].clone(), b: m[i + 3].clone() };
        let (u, v, w) = (e(0), e(1), e(2));
        let l = direct_sum_product(&direct_sum_product(&u, &v, &compose), &w, &compose);
        let r = direct_sum_product(&u, &direct_sum_product(&v, &w, &compose), &compose);
        assert!(l.dist(&r) < 1e-11);
        let s = direct_sum_product(&u, &v, &compose).star();
        let t = direct_sum_product(&v.star(), &u.star(), &compose);
        assert!(s.dist(&t) < 1e-11);
    }

    #[test]
    fn multiplication_action_on_polynomials() {
        let p = Arc::new(Presentation::polynomial(2));
        let el = |s: &str| PresentedElement::new(p.clone(), &p.word(s).unwrap()).unwrap();
        let xs = vec![el("x1"), el("x2"), el("x1 x2").add(&el(""))];
        let bs = vec![el("x2 x2"), el("x1").sub(&el("x2")), el("")];
        let mult = |x: &PresentedElement, b: &PresentedElement| x.mul(b);
        assert_eq!(direct_sum_axiom_residual(&mult, &xs, &bs), 0.0);
        assert_eq!(pair_compat_residual(&mult, &xs, &bs), 0.0);
    }
}

use rayon::prelude::*;

use super::conv::{default_step, rightinv_derivative};
use super::function::GroupFunction;
use super::group::{Group, LieDirection};
use super::spline::Spline1;
use crate::error::{CoreError, Result};
use crate::C64;

/// Samples of the left factor below this fraction of its maximum are skipped.
const SKIP: f64 = 1e-18;

/// The regular representation of the line and the quasi-regular
/// representation of the affine group on `L²(ℝ)`, discretized on
/// `[−half, half]` with `n` nodes:
///
/// * line: `(U(t)f)(x) = f(x − t)`;
/// * affine: `(U(u, b)f)(x) = e^{−u/2} f(e^{−u}(x − b))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitaryModel {
    pub group: Group,
    pub half: f64,
    pub n: usize,
}

impl UnitaryModel {
    pub fn new(group: Group, half: f64, n: usize) -> Result<Self> {
        if !(half > 0.0 && half.is_finite()) || n < 5 {
            return Err(CoreError::Parameter(format!("invalid carrier grid: half-width {half}, {n} nodes")));
        }
        Ok(UnitaryModel { group, half, n })
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half / (self.n - 1) as f64
    }

    pub fn coord(&self, k: usize) -> f64 {
        -self.half + k as f64 * self.spacing()
    }

    pub fn sample(&self, f: impl Fn(f64) -> C64) -> Vec<C64> {
        (0..self.n).map(|k| f(self.coord(k))).collect()
    }

    pub fn norm(&self, v: &[C64]) -> f64 {
        (v.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.spacing()).sqrt()
    }

    /// `(U(g)φ)(x)` for a vector given as a function.
    pub fn apply_at(&self, g: [f64; 2], phi: &(dyn Fn(f64) -> C64 + Sync), x: f64) -> C64 {
        match self.group {
            Group::Line => phi(x - g[0]),
            Group::Affine => phi((-g[0]).exp() * (x - g[1])) * (-0.5 * g[0]).exp(),
        }
    }

    pub fn apply_fn(&self, g: [f64; 2], phi: &(dyn Fn(f64) -> C64 + Sync)) -> Vec<C64> {
        self.sample(|x| self.apply_at(g, phi, x))
    }

    /// `U(g)v` for a grid vector, by spline interpolation.
    pub fn apply(&self, g: [f64; 2], v: &[C64]) -> Vec<C64> {
        let s = Spline1::new(-self.half, self.spacing(), v);
        self.apply_fn(g, &|x| s.eval(x))
    }

    /// `dU(ξ)v` as the central difference of `t ↦ U(e^{tξ})v` with step `h`.
    pub fn differential(&self, xi: LieDirection, v: &[C64], h: f64) -> Vec<C64> {
        let fwd = self.apply(self.group.exp(xi, h), v);
        let back = self.apply(self.group.exp(xi, -h), v);
        fwd.iter().zip(&back).map(|(f, b)| (f - b) / (2.0 * h)).collect()
    }

    /// `∫ a(g) U(left · g)φ dμ_l(g)` by the trapezoid rule on the grid of `a`.
    fn smeared(&self, a: &GroupFunction, phi: &(dyn Fn(f64) -> C64 + Sync), left: [f64; 2]) -> Vec<C64> {
        let grid = *a.grid();
        let group = self.group;
        let skip = SKIP * a.sup_norm();
        let mut nodes = Vec::new();
        for i in 0..grid.n[0] {
            for j in 0..grid.n[1] {
                let av = a.get(i, j);
                if av.norm() > skip {
                    let g = grid.point(i, j);
                    let w = av * (grid.weight(i, j) * group.left_haar_density(g));
                    nodes.push((group.product(left, g), w));
                }
            }
        }
        (0..self.n)
            .into_par_iter()
            .map(|k| {
                let x = self.coord(k);
                nodes.iter().map(|(g, w)| w * self.apply_at(*g, phi, x)).sum()
            })
            .collect()
    }

    fn check(&self, a: &GroupFunction) -> Result<()> {
        if a.group() != self.group {
            return Err(CoreError::Structure(format!(
                "function on {} smeared with a representation of {}",
                a.group().name(),
                self.group.name()
            )));
        }
        Ok(())
    }

    /// The Gårding vector `U_aφ = ∫ a(g) U(g)φ dμ_l(g)`.
    pub fn garding_vector(&self, a: &GroupFunction, phi: &(dyn Fn(f64) -> C64 + Sync)) -> Result<Vec<C64>> {
        self.check(a)?;
        Ok(self.smeared(a, phi, self.group.identity()))
    }

    /// `‖dU(ξ)U_aφ − U_{ξ̃a}φ‖ / ‖φ‖`.
    ///
    /// `U(e^{tξ})` acts on `U_aφ` through the group law,
    /// `U(e^{tξ})U_aφ = ∫ a(g) U(e^{tξ}g)φ dμ_l(g)`, so `φ` is never
    /// interpolated. The difference step defaults to `ε^{1/3}`; `ξ̃a` uses
    /// the Richardson-extrapolated right-invariant derivative at the grid spacing.
    pub fn du_identity_residual(
        &self,
        xi: LieDirection,
        a: &GroupFunction,
        phi: &(dyn Fn(f64) -> C64 + Sync),
        step: Option<f64>,
    ) -> Result<f64> {
        self.check(a)?;
        let h = step.unwrap_or(f64::EPSILON.cbrt());
        let fwd = self.smeared(a, phi, self.group.exp(xi, h));
        let back = self.smeared(a, phi, self.group.exp(xi, -h));
        let da = rightinv_derivative(xi, a, default_step(a, xi), true)?;
        let rhs = self.smeared(&da, phi, self.group.identity());
        let diff: Vec<C64> = fwd.iter().zip(&back).zip(&rhs).map(|((f, b), r)| (f - b) / (2.0 * h) - r).collect();
        let nphi = self.norm(&self.sample(phi));
        if nphi == 0.0 {
            return Ok(0.0);
        }
        Ok(self.norm(&diff) / nphi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::GaussianVector;
    use crate::lie::function::GroupGrid;

    fn packet() -> GaussianVector {
        GaussianVector::packet(0.3, 1.2, 0.2)
    }

    #[test]
    fn representation_is_unitary_and_multiplicative() {
        let p = packet();
        let phi = |x: f64| p.eval(x);
        for group in [Group::Line, Group::Affine] {
            let u = UnitaryModel::new(group, 12.0, 2401).unwrap();
            let n0 = u.norm(&u.sample(phi));
            for g in [[0.4, -0.7], [-0.9, 1.1], [1.2, 0.3]] {
                let v = u.apply_fn(g, &phi);
                assert!((u.norm(&v) - n0).abs() <= 1e-10 * n0);
            }
            let (g, h) = ([0.4, -0.7], [-0.3, 0.5]);
            let gh = u.apply_fn(group.product(g, h), &phi);
            let inner = |x: f64| u.apply_at(h, &phi, x);
            let seq = u.apply_fn(g, &inner);
            let d: Vec<C64> = gh.iter().zip(&seq).map(|(a, b)| a - b).collect();
            assert!(u.norm(&d) <= 1e-12 * n0);
        }
    }

    #[test]
    fn narrow_bumps_approximate_the_identity() {
        let p = packet();
        let phi = |x: f64| p.eval(x);
        let u = UnitaryModel::new(Group::Affine, 8.0, 801).unwrap();
        let target = u.sample(phi);
        let mut last = f64::INFINITY;
        for r in [0.4, 0.2, 0.1] {
            let grid = GroupGrid::with_spacing(Group::Affine, [2.0 * r, 2.0 * r], r / 20.0).unwrap();
            let a = GroupFunction::bump(Group::Affine, grid, [0.0, 0.0], [r, r], C64::new(1.0, 0.0)).unwrap();
            let a = a.scale(C64::new(1.0, 0.0) / a.integral());
            let v = u.garding_vector(&a, &phi).unwrap();
            let d: Vec<C64> = v.iter().zip(&target).map(|(a, b)| a - b).collect();
            let e = u.norm(&d) / u.norm(&target);
            assert!(e < 0.6 * last, "{e} {last}");
            last = e;
        }
        assert!(last < 0.01, "{last}");
    }

    #[test]
    fn garding_vector_is_linear() {
        let p = packet();
        let phi = |x: f64| p.eval(x);
        let u = UnitaryModel::new(Group::Line, 8.0, 401).unwrap();
        let grid = GroupGrid::with_spacing(Group::Line, [3.0, 0.0], 0.05).unwrap();
        let a = GroupFunction::bump(Group::Line, grid, [0.2, 0.0], [0.8, 0.0], C64::new(1.0, 0.0)).unwrap();
        let b = GroupFunction::bump(Group::Line, grid, [-0.4, 0.0], [0.6, 0.0], C64::new(0.0, 2.0)).unwrap();
        let z = C64::new(0.3, -1.2);
        let lhs = u.garding_vector(&a.add(&b.scale(z)).unwrap(), &phi).unwrap();
        let va = u.garding_vector(&a, &phi).unwrap();
        let vb = u.garding_vector(&b, &phi).unwrap();
        for k in 0..lhs.len() {
            assert!((lhs[k] - va[k] - vb[k] * z).norm() < 1e-12);
        }
        let zero = GroupFunction::zeros(Group::Line, grid).unwrap();
        assert!(u.garding_vector(&zero, &phi).unwrap().iter().all(|v| v.norm() == 0.0));
        assert_eq!(u.du_identity_residual(LieDirection(0), &zero, &phi, None).unwrap(), 0.0);
    }

    #[test]
    fn differential_matches_closed_form() {
        let p = packet();
        let phi = |x: f64| p.eval(x);
        let u = UnitaryModel::new(Group::Affine, 10.0, 4001).unwrap();
        let v = u.sample(phi);
        // dU(shift) = −d/dx, dU(scale) = −x d/dx − 1/2
        let shift = u.differential(LieDirection(1), &v, 1e-5);
        let scale = u.differential(LieDirection(0), &v, 1e-5);
        for k in (1000..3000).step_by(97) {
            let x = u.coord(k);
            let d = p.derivative(x);
            assert!((shift[k] + d).norm() < 1e-6);
            assert!((scale[k] + d * x + p.eval(x) * 0.5).norm() < 1e-6);
        }
    }

    #[test]
    fn garding_identity() {
        let p = packet();
        let phi = |x: f64| p.eval(x);
        let line = UnitaryModel::new(Group::Line, 8.0, 801).unwrap();
        let grid = GroupGrid::with_spacing(Group::Line, [4.0, 0.0], 0.025).unwrap();
        let a = GroupFunction::bump(Group::Line, grid, [0.1, 0.0], [1.2, 0.0], C64::new(1.0, 0.0)).unwrap();
        let r = line.du_identity_residual(LieDirection(0), &a, &phi, None).unwrap();
        assert!(r <= 1e-5, "{r}");
        let aff = UnitaryModel::new(Group::Affine, 8.0, 801).unwrap();
        let grid = GroupGrid::with_spacing(Group::Affine, [1.6, 3.0], 0.05).unwrap();
        let a = GroupFunction::bump(Group::Affine, grid, [0.1, -0.1], [0.5, 0.6], C64::new(1.0, 0.0)).unwrap();
        for xi in 0..2 {
            let r = aff.du_identity_residual(LieDirection(xi), &a, &phi, None).unwrap();
            assert!(r <= 1e-4, "{r}");
        }
        assert!(line.garding_vector(&a, &phi).is_err());
    }
}

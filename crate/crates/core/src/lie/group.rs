use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// The two groups available at desk scale.
///
/// `Line` is `ℝ` under addition. `Affine` is `Aff(ℝ) = {(s, b) : s > 0}` with
/// `(s, b)(s', b') = (s s', s b' + b)`, parametrized by `(u, b)` with `s = eᵘ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Group {
    Line,
    Affine,
}

/// A direction in the Lie algebra, indexed into [`Group::lie_basis`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LieDirection(pub usize);

impl Group {
    pub fn from_name(name: &str) -> Result<Group> {
        match name {
            "line" | "R" => Ok(Group::Line),
            "affine" | "aff" => Ok(Group::Affine),
            _ => Err(CoreError::Parameter(format!("unknown group '{name}' (expected line or affine)"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Group::Line => "line",
            Group::Affine => "affine",
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Group::Line => 1,
            Group::Affine => 2,
        }
    }

    /// Names of the Lie algebra basis: `d` for the line; `scale` (generating
    /// `(eᵗ, 0)`) and `shift` (generating `(1, t)`) for the affine group.
    pub fn lie_basis(self) -> &'static [&'static str] {
        match self {
            Group::Line => &["d"],
            Group::Affine => &["scale", "shift"],
        }
    }

    pub fn direction(self, name: &str) -> Result<LieDirection> {
        self.lie_basis()
            .iter()
            .position(|n| *n == name)
            .map(LieDirection)
            .ok_or_else(|| {
                CoreError::Parameter(format!(
                    "group {} has no Lie direction '{name}' (expected one of {:?})",
                    self.name(),
                    self.lie_basis()
                ))
            })
    }

    pub fn identity(self) -> [f64; 2] {
        [0.0, 0.0]
    }

    /// Group product in parameter coordinates. Unused trailing coordinates are zero.
    pub fn product(self, g: [f64; 2], h: [f64; 2]) -> [f64; 2] {
        match self {
            Group::Line => [g[0] + h[0], 0.0],
            Group::Affine => [g[0] + h[0], g[0].exp() * h[1] + g[1]],
        }
    }

    pub fn inverse(self, g: [f64; 2]) -> [f64; 2] {
        match self {
            Group::Line => [-g[0], 0.0],
            Group::Affine => [-g[0], -(-g[0]).exp() * g[1]],
        }
    }

    /// The one-parameter subgroup `e^{tξ}`.
    pub fn exp(self, xi: LieDirection, t: f64) -> [f64; 2] {
        match (self, xi.0) {
            (Group::Line, _) => [t, 0.0],
            (Group::Affine, 0) => [t, 0.0],
            (Group::Affine, _) => [0.0, t],
        }
    }

    /// Density of the left Haar measure with respect to Lebesgue measure in
    /// parameter coordinates.
    pub fn left_haar_density(self, g: [f64; 2]) -> f64 {
        match self {
            Group::Line => 1.0,
            Group::Affine => (-g[0]).exp(),
        }
    }

    pub fn right_haar_density(self, _g: [f64; 2]) -> f64 {
        1.0
    }

    /// The modular function `m` with `dμ_l = m dμ_r`.
    pub fn modular(self, g: [f64; 2]) -> f64 {
        self.left_haar_density(g) / self.right_haar_density(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rng: &mut ChaCha8Rng) -> [f64; 2] {
        [rng.gen_range(-1.5..1.5), rng.gen_range(-2.0..2.0)]
    }

    #[test]
    fn associativity_and_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for g in [Group::Line, Group::Affine] {
            for _ in 0..200 {
                let (a, b, c) = (random(&mut rng), random(&mut rng), random(&mut rng));
                let l = g.product(g.product(a, b), c);
                let r = g.product(a, g.product(b, c));
                let e = g.product(a, g.inverse(a));
                for k in 0..g.dim() {
                    assert!((l[k] - r[k]).abs() <= 1e-12 * (1.0 + l[k].abs()));
                    assert!(e[k].abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn one_parameter_subgroups() {
        let g = Group::Affine;
        for xi in 0..2 {
            let d = LieDirection(xi);
            let p = g.product(g.exp(d, 0.3), g.exp(d, 0.45));
            let q = g.exp(d, 0.75);
            assert!((p[0] - q[0]).abs() < 1e-15 && (p[1] - q[1]).abs() < 1e-15);
        }
    }

    #[test]
    fn affine_is_not_unimodular() {
        assert_eq!(Group::Line.modular([0.7, 0.0]), 1.0);
        assert!((Group::Affine.modular([0.7, 0.2]) - (-0.7f64).exp()).abs() < 1e-15);
        assert!(Group::Affine.direction("tilt").is_err());
    }
}

use serde::{Deserialize, Serialize};

use super::group::Group;
use super::spline::{Spline1, Spline2};
use crate::error::{CoreError, Result};
use crate::C64;

/// Tolerated ratio between the two outer grid rings and the global maximum.
pub const SUPPORT_GUARD: f64 = 1e-8;

/// Symmetric rectangular box `[−half₀, half₀] × [−half₁, half₁]` in parameter
/// coordinates with an odd number of nodes per axis, so that the identity
/// and the inversion `u ↦ −u` are grid-aligned. The second axis is unused
/// (one node) for one-dimensional groups.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupGrid {
    pub half: [f64; 2],
    pub n: [usize; 2],
}

impl GroupGrid {
    pub fn line(half: f64, n: usize) -> Result<Self> {
        Self::check(GroupGrid { half: [half, 0.0], n: [n, 1] }, 1)
    }

    pub fn plane(half: [f64; 2], n: [usize; 2]) -> Result<Self> {
        Self::check(GroupGrid { half, n }, 2)
    }

    /// A grid for `group` with spacing close to `h` on both axes.
    pub fn with_spacing(group: Group, half: [f64; 2], h: f64) -> Result<Self> {
        let nodes = |w: f64| 2 * (w / h).round().max(2.0) as usize + 1;
        match group {
            Group::Line => Self::line(half[0], nodes(half[0])),
            Group::Affine => Self::plane(half, [nodes(half[0]), nodes(half[1])]),
        }
    }

    fn check(g: GroupGrid, dim: usize) -> Result<Self> {
        for k in 0..dim {
            if !(g.half[k] > 0.0 && g.half[k].is_finite()) {
                return Err(CoreError::Parameter(format!("box half-width must be positive, got {}", g.half[k])));
            }
            if g.n[k] < 5 || g.n[k] % 2 == 0 {
                return Err(CoreError::Parameter(format!("node count must be odd and at least 5, got {}", g.n[k])));
            }
        }
        Ok(g)
    }

    pub fn dim(&self) -> usize {
        if self.n[1] == 1 {
            1
        } else {
            2
        }
    }

    pub fn len(&self) -> usize {
        self.n[0] * self.n[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        if self.n[axis] == 1 {
            1.0
        } else {
            2.0 * self.half[axis] / (self.n[axis] - 1) as f64
        }
    }

    pub fn coord(&self, axis: usize, k: usize) -> f64 {
        if self.n[axis] == 1 {
            0.0
        } else {
            -self.half[axis] + k as f64 * self.spacing(axis)
        }
    }

    pub fn point(&self, i: usize, j: usize) -> [f64; 2] {
        [self.coord(0, i), self.coord(1, j)]
    }

    /// Trapezoid weight of node `(i, j)` in parameter coordinates.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let w = |axis: usize, k: usize| {
            if self.n[axis] == 1 {
                1.0
            } else if k == 0 || k + 1 == self.n[axis] {
                0.5 * self.spacing(axis)
            } else {
                self.spacing(axis)
            }
        };
        w(0, i) * w(1, j)
    }

    /// Index of the node at `x` on `axis` when `x` is a node.
    pub fn node(&self, axis: usize, x: f64) -> Option<usize> {
        let t = (x + self.half[axis]) / self.spacing(axis);
        let k = t.round();
        if (t - k).abs() > 1e-9 || k < 0.0 || k as usize >= self.n[axis] {
            return None;
        }
        Some(k as usize)
    }

    /// The grid with spacing halved on every axis.
    pub fn refined(&self) -> Self {
        let n1 = if self.n[1] == 1 { 1 } else { 2 * self.n[1] - 1 };
        GroupGrid { half: self.half, n: [2 * self.n[0] - 1, n1] }
    }
}

/// Samples of a function on a group, on a [`GroupGrid`] in parameter
/// coordinates, row-major with the first coordinate as row index.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupFunction {
    group: Group,
    grid: GroupGrid,
    data: Vec<C64>,
}

/// Interpolant of a [`GroupFunction`], zero outside the box.
pub enum Interpolant {
    One(Spline1),
    Two(Spline2),
}

impl Interpolant {
    pub fn eval(&self, g: [f64; 2]) -> C64 {
        match self {
            Interpolant::One(s) => s.eval(g[0]),
            Interpolant::Two(s) => s.eval(g[0], g[1]),
        }
    }
}

impl GroupFunction {
    pub fn new(group: Group, grid: GroupGrid, data: Vec<C64>) -> Result<Self> {
        if grid.dim() != group.dim() {
            return Err(CoreError::Structure(format!(
                "{}-dimensional grid for the {}-dimensional group {}",
                grid.dim(),
                group.dim(),
                group.name()
            )));
        }
        if data.len() != grid.len() {
            return Err(CoreError::Structure(format!("expected {} samples, got {}", grid.len(), data.len())));
        }
        Ok(GroupFunction { group, grid, data })
    }

    pub fn zeros(group: Group, grid: GroupGrid) -> Result<Self> {
        Self::new(group, grid, vec![C64::new(0.0, 0.0); grid.len()])
    }

    pub fn from_fn(group: Group, grid: GroupGrid, f: impl Fn([f64; 2]) -> C64) -> Result<Self> {
        let mut data = Vec::with_capacity(grid.len());
        for i in 0..grid.n[0] {
            for j in 0..grid.n[1] {
                data.push(f(grid.point(i, j)));
            }
        }
        Self::new(group, grid, data)
    }

    /// Compactly supported bump `c · exp(1 − 1/(1 − ρ²))` for `ρ < 1`, where
    /// `ρ² = Σ ((gₖ − centerₖ) / radiusₖ)²`; its maximum is `|c|`.
    pub fn bump(group: Group, grid: GroupGrid, center: [f64; 2], radius: [f64; 2], c: C64) -> Result<Self> {
        let dim = group.dim();
        let f = Self::from_fn(group, grid, |g| {
            let mut r2 = 0.0;
            for k in 0..dim {
                let d = (g[k] - center[k]) / radius[k];
                r2 += d * d;
            }
            if r2 < 1.0 {
                c * (1.0 - 1.0 / (1.0 - r2)).exp()
            } else {
                C64::new(0.0, 0.0)
            }
        })?;
        f.check_support(SUPPORT_GUARD)?;
        Ok(f)
    }

    /// Gaussian `c · exp(−Σ (gₖ − centerₖ)² / (2 widthₖ²))`, checked to decay
    /// inside the box.
    pub fn gaussian(group: Group, grid: GroupGrid, center: [f64; 2], width: [f64; 2], c: C64) -> Result<Self> {
        let dim = group.dim();
        let f = Self::from_fn(group, grid, |g| {
            let mut e = 0.0;
            for k in 0..dim {
                let d = (g[k] - center[k]) / width[k];
                e += d * d;
            }
            c * (-0.5 * e).exp()
        })?;
        f.check_support(SUPPORT_GUARD)?;
        Ok(f)
    }

    pub fn group(&self) -> Group {
        self.group
    }

    pub fn grid(&self) -> &GroupGrid {
        &self.grid
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.grid.n[1] + j]
    }

    pub fn interpolant(&self) -> Interpolant {
        let g = &self.grid;
        if g.dim() == 1 {
            Interpolant::One(Spline1::new(-g.half[0], g.spacing(0), &self.data))
        } else {
            Interpolant::Two(Spline2::new([-g.half[0], -g.half[1]], [g.spacing(0), g.spacing(1)], g.n, &self.data))
        }
    }

    pub(crate) fn same_layout(&self, other: &GroupFunction) -> Result<()> {
        if self.group != other.group || self.grid != other.grid {
            return Err(CoreError::Structure("group functions live on different groups or grids".into()));
        }
        Ok(())
    }

    /// Fails when the two outermost rings exceed `guard` times the maximum.
    pub fn check_support(&self, guard: f64) -> Result<()> {
        let peak = self.sup_norm();
        let (n0, n1) = (self.grid.n[0], self.grid.n[1]);
        let mut edge = 0.0f64;
        for i in 0..n0 {
            for j in 0..n1 {
                let ring0 = i < 2 || i + 2 >= n0;
                let ring1 = n1 > 1 && (j < 2 || j + 2 >= n1);
                if ring0 || ring1 {
                    edge = edge.max(self.get(i, j).norm());
                }
            }
        }
        if edge > guard * peak {
            return Err(CoreError::Guard(format!(
                "function reaches {:.2e} of its maximum on the box boundary; enlarge the box",
                edge / peak
            )));
        }
        Ok(())
    }

    /// `∫ f dμ_l` by the trapezoid rule.
    pub fn integral(&self) -> C64 {
        let g = &self.grid;
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..g.n[0] {
            for j in 0..g.n[1] {
                acc += self.get(i, j) * (g.weight(i, j) * self.group.left_haar_density(g.point(i, j)));
            }
        }
        acc
    }

    /// `∫ |f| dμ_l`, the L¹ norm of the convolution algebra.
    pub fn l1_norm(&self) -> f64 {
        let g = &self.grid;
        let mut acc = 0.0;
        for i in 0..g.n[0] {
            for j in 0..g.n[1] {
                acc += self.get(i, j).norm() * g.weight(i, j) * self.group.left_haar_density(g.point(i, j));
            }
        }
        acc
    }

    pub fn sup_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn sup_dist(&self, other: &GroupFunction) -> Result<f64> {
        self.same_layout(other)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    pub fn map(&self, f: impl Fn([f64; 2], C64) -> C64) -> GroupFunction {
        let g = self.grid;
        let mut data = Vec::with_capacity(self.data.len());
        for i in 0..g.n[0] {
            for j in 0..g.n[1] {
                data.push(f(g.point(i, j), self.get(i, j)));
            }
        }
        GroupFunction { group: self.group, grid: g, data }
    }

    pub fn add(&self, other: &GroupFunction) -> Result<GroupFunction> {
        self.same_layout(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(GroupFunction { data, ..self.clone() })
    }

    pub fn sub(&self, other: &GroupFunction) -> Result<GroupFunction> {
        self.same_layout(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(GroupFunction { data, ..self.clone() })
    }

    pub fn scale(&self, c: C64) -> GroupFunction {
        GroupFunction { data: self.data.iter().map(|z| z * c).collect(), ..self.clone() }
    }

    /// Resamples onto another grid of the same group by interpolation.
    pub fn resample(&self, grid: GroupGrid) -> Result<GroupFunction> {
        let s = self.interpolant();
        Self::from_fn(self.group, grid, |g| s.eval(g))
    }
}

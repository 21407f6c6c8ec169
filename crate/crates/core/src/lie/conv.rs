use rayon::prelude::*;

use super::function::{GroupFunction, SUPPORT_GUARD};
use super::group::{Group, LieDirection};
use super::spline::Spline1;
use crate::error::{CoreError, Result};
use crate::C64;

/// Samples of the left factor below this fraction of its maximum are skipped.
const SKIP: f64 = 1e-18;

fn overflow(what: &str, f: &GroupFunction) -> Result<()> {
    f.check_support(SUPPORT_GUARD).map_err(|e| match e {
        CoreError::Guard(msg) => CoreError::Guard(format!("{what} does not fit the box: {msg}")),
        other => other,
    })
}

fn row_splines(f: &GroupFunction) -> Vec<Spline1> {
    let g = f.grid();
    f.data().chunks(g.n[1]).map(|row| Spline1::new(-g.half[1], g.spacing(1), row)).collect()
}

/// Convolution `(a·b)(g) = ∫ a(h) b(h⁻¹g) dμ_l(h)` by the trapezoid rule.
///
/// The first coordinate of `h⁻¹g` is always a node; on the affine group the
/// second is interpolated along rows of `b`.
pub fn convolve(a: &GroupFunction, b: &GroupFunction) -> Result<GroupFunction> {
    a.same_layout(b)?;
    let grid = *a.grid();
    let group = a.group();
    let [n0, n1] = grid.n;
    let c0 = (n0 - 1) / 2;
    let skip = SKIP * a.sup_norm();
    let out: Vec<C64> = match group {
        Group::Line => (0..n0)
            .into_par_iter()
            .map(|i| {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..n0 {
                    let av = a.get(k, 0);
                    if av.norm() <= skip {
                        continue;
                    }
                    let r = i as isize - k as isize + c0 as isize;
                    if r >= 0 && (r as usize) < n0 {
                        acc += av * b.get(r as usize, 0) * grid.weight(k, 0);
                    }
                }
                acc
            })
            .collect(),
        Group::Affine => {
            let rows = row_splines(b);
            let (lo1, h1) = (-grid.half[1], grid.spacing(1));
            let blocks: Vec<Vec<C64>> = (0..n0)
                .into_par_iter()
                .map(|i| {
                    let mut acc = vec![C64::new(0.0, 0.0); n1];
                    for k in 0..n0 {
                        let r = i as isize - k as isize + c0 as isize;
                        if r < 0 || r as usize >= n0 {
                            continue;
                        }
                        let spline = &rows[r as usize];
                        let uk = grid.coord(0, k);
                        let scale = (-uk).exp();
                        for l in 0..n1 {
                            let av = a.get(k, l);
                            if av.norm() <= skip {
                                continue;
                            }
                            let wa = av * (grid.weight(k, l) * scale);
                            let bl = grid.coord(1, l);
                            for (j, slot) in acc.iter_mut().enumerate() {
                                let bj = lo1 + j as f64 * h1;
                                *slot += wa * spline.eval(scale * (bj - bl));
                            }
                        }
                    }
                    acc
                })
                .collect();
            blocks.concat()
        }
    };
    let f = GroupFunction::new(group, grid, out)?;
    overflow("convolution", &f)?;
    Ok(f)
}

/// Which involution to apply in [`conv_adjoint_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Involution {
    /// `a⁺(g) = m(g)⁻¹ conj(a(g⁻¹))`.
    Modular,
    /// `conj(a(g⁻¹))`, the involution with the modular factor dropped.
    DropModular,
}

pub fn conv_adjoint(a: &GroupFunction) -> Result<GroupFunction> {
    conv_adjoint_with(a, Involution::Modular)
}

pub fn conv_adjoint_with(a: &GroupFunction, inv: Involution) -> Result<GroupFunction> {
    let grid = *a.grid();
    let group = a.group();
    let [n0, n1] = grid.n;
    let f = match group {
        Group::Line => {
            let data = (0..n0).map(|i| a.get(n0 - 1 - i, 0).conj()).collect();
            GroupFunction::new(group, grid, data)?
        }
        Group::Affine => {
            let rows = row_splines(a);
            let mut data = Vec::with_capacity(grid.len());
            for i in 0..n0 {
                let u = grid.coord(0, i);
                let m = match inv {
                    Involution::Modular => group.modular([u, 0.0]),
                    Involution::DropModular => 1.0,
                };
                let spline = &rows[n0 - 1 - i];
                for j in 0..n1 {
                    let g_inv = group.inverse([u, grid.coord(1, j)]);
                    data.push(spline.eval(g_inv[1]).conj() / m);
                }
            }
            GroupFunction::new(group, grid, data)?
        }
    };
    overflow("adjoint", &f)?;
    Ok(f)
}

/// Default finite-difference step for `xi`: one grid spacing along the axis
/// it moves.
pub fn default_step(a: &GroupFunction, xi: LieDirection) -> f64 {
    match a.group() {
        Group::Line => a.grid().spacing(0),
        Group::Affine => a.grid().spacing(xi.0.min(1)),
    }
}

fn central_difference(a: &GroupFunction, xi: LieDirection, h: f64) -> GroupFunction {
    let s = a.interpolant();
    let group = a.group();
    a.map(|g, _| {
        let back = group.product(group.exp(xi, -h), g);
        let fwd = group.product(group.exp(xi, h), g);
        (s.eval(back) - s.eval(fwd)) / (2.0 * h)
    })
}

/// Right-invariant derivative `(ξ̃a)(g) = d/dt a(e^{−tξ}g)` at `t = 0` by a
/// central difference of step `h`, optionally Richardson-extrapolated from
/// steps `h` and `2h`.
pub fn rightinv_derivative(xi: LieDirection, a: &GroupFunction, h: f64, richardson: bool) -> Result<GroupFunction> {
    if xi.0 >= a.group().dim() {
        return Err(CoreError::Parameter(format!("Lie direction {} out of range for {}", xi.0, a.group().name())));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(CoreError::Parameter(format!("finite-difference step must be positive, got {h}")));
    }
    let reach = if richardson { 2.0 * h } else { h };
    let g = a.grid();
    if reach > 0.25 * g.half[0] {
        return Err(CoreError::Parameter(format!("stencil of reach {reach} leaves the box")));
    }
    let d1 = central_difference(a, xi, h);
    if !richardson {
        return Ok(d1);
    }
    let d2 = central_difference(a, xi, 2.0 * h);
    d1.scale(C64::new(4.0 / 3.0, 0.0)).sub(&d2.scale(C64::new(1.0 / 3.0, 0.0)))
}

/// Settings for [`lie_compat_residual`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LieCompatOptions {
    /// Finite-difference step; the grid spacing when `None`.
    pub step: Option<f64>,
    pub richardson: bool,
    pub involution: Involution,
}

impl Default for LieCompatOptions {
    fn default() -> Self {
        LieCompatOptions { step: None, richardson: true, involution: Involution::Modular }
    }
}

/// `‖(ξ▷a)⁺·b − a⁺·(ξ⁺▷b)‖_sup` with `ξ⁺ = −ξ`, relative to the larger sup
/// norm of the two sides.
pub fn lie_compat_residual(xi: LieDirection, a: &GroupFunction, b: &GroupFunction, opts: &LieCompatOptions) -> Result<f64> {
    a.same_layout(b)?;
    let h = opts.step.unwrap_or_else(|| default_step(a, xi));
    let da = rightinv_derivative(xi, a, h, opts.richardson)?;
    let db = rightinv_derivative(xi, b, h, opts.richardson)?.scale(C64::new(-1.0, 0.0));
    let lhs = convolve(&conv_adjoint_with(&da, opts.involution)?, b)?;
    let rhs = convolve(&conv_adjoint_with(a, opts.involution)?, &db)?;
    let scale = lhs.sup_norm().max(rhs.sup_norm());
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok(lhs.sup_dist(&rhs)? / scale)
}

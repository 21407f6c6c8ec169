use cpair::lie::{Group, GroupGrid};
use proptest::prelude::*;

fn bump(g: [f64; 2]) -> f64 {
    (-((g[0] - 0.2) * (g[0] - 0.2) / 0.08) - (g[1] + 0.1) * (g[1] + 0.1) / 0.18).exp()
}

fn integrate(grid: &GroupGrid, density: impl Fn([f64; 2]) -> f64, f: impl Fn([f64; 2]) -> f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..grid.n[0] {
        for j in 0..grid.n[1] {
            let g = grid.point(i, j);
            acc += grid.weight(i, j) * density(g) * f(g);
        }
    }
    acc
}

#[test]
fn left_measure_is_left_invariant() {
    let group = Group::Affine;
    let grid = GroupGrid::with_spacing(group, [4.0, 12.0], 0.02).unwrap();
    let base = integrate(&grid, |g| group.left_haar_density(g), bump);
    for g0 in [[0.5, -0.8], [-0.7, 1.3], [1.1, 0.4]] {
        let moved = integrate(&grid, |g| group.left_haar_density(g), |h| bump(group.product(g0, h)));
        assert!((moved - base).abs() <= 1e-10 * base, "{g0:?}");
        // the left density is not right invariant
        let right = integrate(&grid, |g| group.left_haar_density(g), |h| bump(group.product(h, g0)));
        assert!((right - base).abs() > 1e-2 * base);
    }
}

#[test]
fn right_measure_is_right_invariant_and_related_by_the_modular_function() {
    let group = Group::Affine;
    let grid = GroupGrid::with_spacing(group, [4.0, 12.0], 0.02).unwrap();
    let base = integrate(&grid, |g| group.right_haar_density(g), bump);
    for g0 in [[0.5, -0.8], [-0.7, 1.3]] {
        let moved = integrate(&grid, |g| group.right_haar_density(g), |h| bump(group.product(h, g0)));
        assert!((moved - base).abs() <= 1e-10 * base);
    }
    let left = integrate(&grid, |g| group.left_haar_density(g), bump);
    let via_right = integrate(&grid, |g| group.right_haar_density(g), |g| group.modular(g) * bump(g));
    assert!((left - via_right).abs() <= 1e-12 * left);
}

#[test]
fn modular_function_is_a_homomorphism() {
    let group = Group::Affine;
    let (g, h) = ([0.3, 1.0], [-1.1, 0.2]);
    let lhs = group.modular(group.product(g, h));
    assert!((lhs - group.modular(g) * group.modular(h)).abs() < 1e-15);
}

proptest! {
    #[test]
    fn product_is_associative(
        a in prop::array::uniform2(-2.0f64..2.0),
        b in prop::array::uniform2(-2.0f64..2.0),
        c in prop::array::uniform2(-2.0f64..2.0),
    ) {
        for group in [Group::Line, Group::Affine] {
            let l = group.product(group.product(a, b), c);
            let r = group.product(a, group.product(b, c));
            for k in 0..group.dim() {
                prop_assert!((l[k] - r[k]).abs() <= 1e-12 * (1.0 + l[k].abs()));
            }
            let e = group.product(group.inverse(a), a);
            prop_assert!(e[0].abs() < 1e-12 && e[1].abs() < 1e-12);
        }
    }
}

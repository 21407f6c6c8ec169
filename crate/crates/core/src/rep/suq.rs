use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::{CheckKind, Scenario};
use super::induce::{build_domain, evaluate, induce, symmetry_residual, DEFAULT_RANK_TOL};
use super::report::Measurement;
use crate::algebra::{AlgebraElement, Presentation};
use crate::error::{CoreError, Result};
use crate::gauss::GaussianTermSymbol;
use crate::weyl::{translate_momentum, translate_position, PhaseSymbol};
use crate::C64;

/// Base point of the radial lattice `z_n = q^{−n} z₀`.
pub const LATTICE_BASE: C64 = C64::new(0.6, 0.35);

/// How `ρ′(a)` is assembled from the shift `u` and `W = diag(√(1+|z|²))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Orientation {
    /// `u e_n = e_{n+1}` when true, `e_{n−1}` otherwise.
    pub forward: bool,
    /// `ρ′(a) = W u` when true, `u W` otherwise.
    pub weight_left: bool,
}

impl Orientation {
    pub const ALL: [Orientation; 4] = [
        Orientation { forward: true, weight_left: true },
        Orientation { forward: false, weight_left: true },
        Orientation { forward: true, weight_left: false },
        Orientation { forward: false, weight_left: false },
    ];

    pub fn label(self) -> String {
        format!(
            "{}, {}",
            if self.forward { "u:e_n->e_n+1" } else { "u:e_n->e_n-1" },
            if self.weight_left { "a=Wu" } else { "a=uW" }
        )
    }
}

/// Lattice points `z_n`, `n = −N₀..=N₀`.
pub fn lattice(q: f64, window: usize) -> Vec<C64> {
    let w = window as i32;
    (-w..=w).map(|n| LATTICE_BASE * q.powi(-n)).collect()
}

fn shift(dim: usize, forward: bool) -> DMatrix<C64> {
    DMatrix::from_fn(dim, dim, |r, c| {
        let hit = if forward { r == c + 1 } else { c == r + 1 };
        C64::new(if hit { 1.0 } else { 0.0 }, 0.0)
    })
}

/// `ρ′(a)`, `ρ′(a⁺)`, `ρ′(c)`, `ρ′(c⁺)` on the truncated lattice.
pub fn generator_matrices(q: f64, window: usize, o: Orientation) -> BTreeMap<String, DMatrix<C64>> {
    let z = lattice(q, window);
    let dim = z.len();
    let w = DMatrix::from_diagonal(&DVector::from_iterator(dim, z.iter().map(|v| C64::new((1.0 + v.norm_sqr()).sqrt(), 0.0))));
    let u = shift(dim, o.forward);
    let a = if o.weight_left { &w * &u } else { &u * &w };
    let c = DMatrix::from_diagonal(&DVector::from_vec(z));
    let mut out = BTreeMap::new();
    out.insert("a+".to_string(), a.adjoint());
    out.insert("a".to_string(), a);
    out.insert("c+".to_string(), c.adjoint());
    out.insert("c".to_string(), c);
    out
}

/// Worst violation of the defining relations on the basis vectors
/// `|n| ≤ N₀ − 2`, each column relative to `max(1, ‖l e_n‖)`.
pub fn relation_residuals(pres: &Presentation, mats: &BTreeMap<String, DMatrix<C64>>, window: usize) -> Result<Vec<(String, f64)>> {
    let dim = 2 * window + 1;
    let lookup = |g: &str| mats.get(g).cloned();
    let mut out = Vec::new();
    for rule in pres.rules() {
        let lhs = AlgebraElement::monomial(pres.alphabet(), rule.lhs.clone(), C64::new(1.0, 0.0));
        let l = evaluate(&lhs, dim, &lookup)?;
        let r = evaluate(&rule.rhs, dim, &lookup)?;
        let mut worst = 0.0f64;
        for col in 2..dim - 2 {
            let d = (l.column(col) - r.column(col)).norm();
            worst = worst.max(d / l.column(col).norm().max(1.0));
        }
        let name = rule.lhs.iter().map(|&g| pres.alphabet().name(g)).collect::<Vec<_>>().join(" ");
        out.push((name, worst));
    }
    Ok(out)
}

/// `sup|V(t)U(s)a − e^{2πist}U(s)V(t)a| / sup|a|` over lattice points
/// `s = j/(2L)`, `t = kΔ`.
pub fn weyl_relation(s: &Scenario) -> Result<Measurement> {
    let (n, l) = (s.disc.n, s.disc.l);
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let mut m = Measurement::default();
    for i in 0..s.disc.samples.min(4) {
        let a = PhaseSymbol::from_gaussian(&GaussianTermSymbol::random(&mut rng, 2, 1.0, 1.0, 3.0, 0.5), n, l)?;
        for (j, k) in [(1i32, 1i32), (3, -2), (-2, 5)] {
            let (sv, tv) = (j as f64 / (2.0 * l), k as f64 * a.delta());
            let vu = translate_position(&translate_momentum(&a, sv)?, tv)?;
            let uv = translate_momentum(&translate_position(&a, tv)?, sv)?;
            let rhs = uv.scale(C64::from_polar(1.0, 2.0 * PI * sv * tv));
            m.push(format!("a{i}/s{j}/t{k}"), vu.sup_dist(&rhs) / a.sup_norm());
        }
    }
    Ok(m)
}

/// The orientation satisfying the relations best, with the worst residual
/// of every candidate.
pub fn select_orientation(q: f64, window: usize) -> Result<(Orientation, Vec<(Orientation, f64)>)> {
    let pres = Presentation::suq11(q)?;
    let mut all = Vec::new();
    for o in Orientation::ALL {
        let r = relation_residuals(&pres, &generator_matrices(q, window, o), window)?;
        all.push((o, r.iter().map(|x| x.1).fold(0.0, f64::max)));
    }
    let best = all.iter().min_by(|x, y| x.1.total_cmp(&y.1)).map(|x| x.0).expect("four candidates");
    Ok((best, all))
}

pub(crate) fn run(s: &Scenario) -> Result<BTreeMap<CheckKind, Measurement>> {
    let want = |k: CheckKind| s.checks.iter().any(|c| c.kind == k);
    let window = s.disc.window;
    if window < 3 {
        return Err(CoreError::Parameter(format!("lattice window {window} leaves no interior")));
    }
    let q = if s.control == super::config::Control::WrongQ { 1.0 / s.q } else { s.q };
    let pres = Presentation::suq11(s.q)?;
    let (best, all) = select_orientation(q, window)?;
    let mats = generator_matrices(q, window, best);
    let summary = all.iter().map(|(o, r)| format!("{}: {r:.1e}", o.label())).collect::<Vec<_>>().join("; ");
    let mut out = BTreeMap::new();

    let mut rel = Measurement::default();
    for (name, r) in relation_residuals(&pres, &mats, window)? {
        rel.push(name, r);
    }
    out.insert(CheckKind::Relations, rel.with_note(format!("selected {}; candidates {summary}", best.label())));

    if want(CheckKind::Welldef) || want(CheckKind::Symmetry) {
        // B acts through ρ(x▷b) = ρ′(x)ρ(b); ρ(b) ranges over lattice bumps
        let dim = 2 * window + 1;
        let bumps: Vec<DMatrix<C64>> = (0..s.disc.samples.max(1))
            .map(|i| {
                let centre = -(window as f64) + 2.0 + (2 * window - 4) as f64 * i as f64 / s.disc.samples.max(2) as f64;
                DMatrix::from_diagonal(&DVector::from_fn(dim, |k, _| {
                    let x = (k as f64 - window as f64 - centre) / 3.0;
                    let inside = (k as i64 - window as i64).unsigned_abs() as usize + 2 <= window;
                    C64::new(if inside { (-x * x).exp() } else { 0.0 }, 0.0)
                }))
            })
            .collect();
        let vecs: Vec<DVector<C64>> =
            (0..dim).map(|k| DVector::from_fn(dim, |i, _| C64::new(if i == k { 1.0 } else { 0.0 }, 0.0))).collect();
        let dom = build_domain(&bumps, &vecs, DEFAULT_RANK_TOL)?;
        let (mut wd, mut sym) = (Measurement::default(), Measurement::default());
        for (g, gp) in [("a", "a+"), ("c", "c+")] {
            let img = |name: &str| -> Vec<DMatrix<C64>> { bumps.iter().map(|b| &mats[name] * b).collect() };
            let t = induce(&img(g), &dom)?;
            let tp = induce(&img(gp), &dom)?;
            wd.push(g, t.welldef);
            sym.push(g, symmetry_residual(&t, &tp));
        }
        out.insert(CheckKind::Welldef, wd);
        out.insert(CheckKind::Symmetry, sym);
    }
    if want(CheckKind::WeylRelation) {
        out.insert(CheckKind::WeylRelation, weyl_relation(s)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::config::{ActionKind, Control};

    fn s9() -> Scenario {
        let mut s = Scenario::new("s9", ActionKind::Suq11);
        for k in ActionKind::Suq11.supported_checks() {
            s = s.with_check(*k, 1e-10);
        }
        s
    }

    #[test]
    fn lattice_relations_hold_in_one_orientation() {
        let (best, all) = select_orientation(0.8, 20).unwrap();
        assert_eq!(best, Orientation { forward: true, weight_left: false });
        assert!(all.iter().find(|x| x.0 == best).unwrap().1 <= 1e-10);
        // the other candidates violate some relation badly
        assert!(all.iter().filter(|x| x.0 != best).all(|x| x.1 > 1e-2));
    }

    #[test]
    fn scenario_residuals() {
        let m = run(&s9()).unwrap();
        for k in [CheckKind::Relations, CheckKind::Welldef, CheckKind::Symmetry] {
            assert!(m[&k].worst(false) <= 1e-10, "{k:?}: {:e}", m[&k].worst(false));
        }
        assert!(m[&CheckKind::WeylRelation].worst(false) <= 1e-8);
    }

    #[test]
    fn wrong_q_fails() {
        let mut s = s9();
        s.control = Control::WrongQ;
        let m = run(&s).unwrap();
        assert!(m[&CheckKind::Relations].worst(false) >= 1e-2);
    }

    #[test]
    fn negative_q_lattice() {
        let (_, all) = select_orientation(-0.7, 12).unwrap();
        assert!(all.iter().any(|x| x.1 <= 1e-10));
    }
}

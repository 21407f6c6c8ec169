use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::{CheckKind, Control, Scenario};
use super::induce::{build_domain, induce, symmetry_residual, DomainBasis, InducedOp, DEFAULT_RANK_TOL};
use super::report::Measurement;
use crate::algebra::{AlgebraElement, Presentation};
use crate::error::Result;
use crate::gauss::GaussianTermSymbol;
use crate::weyl::{act_heisenberg, hermite_derivative, hermite_position, spectral_norm, star, weyl_op, Basis, HeisenbergGen, PhaseSymbol};
use crate::C64;

/// `p▷a` with the sign of the `x₂`-term reversed under the sign-flip control.
fn act_gen(g: &str, a: &PhaseSymbol, control: Control) -> Result<PhaseSymbol> {
    Ok(match g {
        "x" => act_heisenberg(HeisenbergGen::X, a),
        _ if control == Control::SignFlip => {
            let p = act_heisenberg(HeisenbergGen::P, a);
            p.sub(&a.weight(|_, x2| C64::new(4.0 * PI * x2, 0.0)))?
        }
        _ => act_heisenberg(HeisenbergGen::P, a),
    })
}

fn act(x: &AlgebraElement, a: &PhaseSymbol, control: Control) -> Result<PhaseSymbol> {
    let alphabet = x.alphabet();
    let mut total = a.scale(C64::new(0.0, 0.0));
    for (w, c) in x.terms() {
        let mut cur = a.clone();
        for &g in w.iter().rev() {
            cur = act_gen(alphabet.name(g), &cur, control)?;
        }
        total = total.add(&cur.scale(*c))?;
    }
    Ok(total)
}

/// Radial Gaussians `exp(−πρ|x|²)`; their quantizations are diagonal in
/// the Hermite basis.
fn b_family(s: &Scenario) -> Result<Vec<PhaseSymbol>> {
    (0..s.disc.samples)
        .map(|i| {
            let rho = 0.12 * 1.25f64.powi(i as i32);
            PhaseSymbol::from_gaussian(&GaussianTermSymbol::radial(C64::new(1.0, 0.0), rho), s.disc.n, s.disc.l)
        })
        .collect()
}

struct Setup {
    pres: Presentation,
    family: Vec<PhaseSymbol>,
    dom: DomainBasis,
    basis: Basis,
}

impl Setup {
    fn induce(&self, x: &AlgebraElement, control: Control) -> Result<InducedOp> {
        let images: Vec<DMatrix<C64>> = self
            .family
            .iter()
            .map(|a| Ok(weyl_op(&act(x, a, control)?, &self.basis)?.entries))
            .collect::<Result<_>>()?;
        induce(&images, &self.dom)
    }
}

fn setup(s: &Scenario) -> Result<Setup> {
    let family = b_family(s)?;
    let m = s.disc.m;
    let basis = Basis::Hermite { m };
    let ops: Vec<DMatrix<C64>> = family.iter().map(|a| Ok(weyl_op(a, &basis)?.entries)).collect::<Result<_>>()?;
    let vecs: Vec<DVector<C64>> =
        (0..m).map(|k| DVector::from_fn(m, |i, _| C64::new(if i == k { 1.0 } else { 0.0 }, 0.0))).collect();
    let dom = build_domain(&ops, &vecs, DEFAULT_RANK_TOL)?;
    Ok(Setup { pres: Presentation::heisenberg(), family, dom, basis })
}

/// Columns below `3M/4` of `a` in the Hermite basis.
fn interior(a: &DMatrix<C64>) -> DMatrix<C64> {
    let k = 3 * a.ncols() / 4;
    a.columns(0, k).into_owned()
}

/// Induced `ρ̃(x)`, `ρ̃(p)` on the ambient Hermite space, for the CLI.
pub fn induced_generators(s: &Scenario) -> Result<Vec<(String, DMatrix<C64>)>> {
    let st = setup(s)?;
    ["x", "p"]
        .iter()
        .map(|g| Ok((g.to_string(), st.induce(&st.pres.generator(g)?, s.control)?.on_ambient(&st.dom))))
        .collect()
}

/// `‖(x▷a)⁺ # b − a⁺ # (x⁺▷b)‖_sup` over a random family, both generators.
pub(crate) fn compat(s: &Scenario) -> Result<Measurement> {
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let fam: Vec<PhaseSymbol> = (0..s.disc.samples)
        .map(|_| PhaseSymbol::from_gaussian(&GaussianTermSymbol::random(&mut rng, 2, 1.0, 1.0, 3.0, 0.5), s.disc.n, s.disc.l))
        .collect::<Result<_>>()?;
    let mut m = Measurement::default();
    for g in ["x", "p"] {
        for i in 0..fam.len() {
            let (a, b) = (&fam[i], &fam[(i + 1) % fam.len()]);
            let lhs = star(&act_gen(g, a, s.control)?.adjoint(), b)?;
            let rhs = star(&a.adjoint(), &act_gen(g, b, s.control)?)?;
            m.push(format!("{g}/{i}"), lhs.sup_dist(&rhs));
        }
    }
    Ok(m)
}

pub(crate) fn run(s: &Scenario) -> Result<BTreeMap<CheckKind, Measurement>> {
    let want = |k: CheckKind| s.checks.iter().any(|c| c.kind == k);
    let mut out = BTreeMap::new();
    if want(CheckKind::Compat) {
        out.insert(CheckKind::Compat, compat(s)?);
    }
    let st = setup(s)?;
    let m = s.disc.m;
    let x = st.pres.generator("x")?;
    let p = st.pres.generator("p")?;
    let tx = st.induce(&x, s.control)?;
    let tp = st.induce(&p, s.control)?;

    let mut nd = Measurement::default();
    nd.push("missing-rank", (m - st.dom.rank()) as f64);
    out.insert(CheckKind::Nondegenerate, nd);

    let mut welldef = Measurement::default();
    welldef.push("x", tx.welldef);
    welldef.push("p", tp.welldef);
    let mut sym = Measurement::default();
    sym.push("x", symmetry_residual(&tx, &tx));
    sym.push("p", symmetry_residual(&tp, &tp));
    out.insert(CheckKind::Symmetry, sym);

    let ax = tx.on_ambient(&st.dom);
    let ap = tp.on_ambient(&st.dom);
    let q = hermite_position(m);
    // ρ̃(p) = 2πP = −i d/dx
    let pm = hermite_derivative(m);
    let mut closure = Measurement::default();
    closure.push("x", spectral_norm(&interior(&(&ax - &q))));
    closure.push("p", spectral_norm(&interior(&(&ap - &pm))));
    out.insert(CheckKind::Closure, closure);

    let comm = &ap * &ax - &ax * &ap + DMatrix::<C64>::identity(m, m) * C64::new(0.0, 1.0);
    let mut rel = Measurement::default();
    rel.push("px-xp+i", spectral_norm(&interior(&comm)));
    out.insert(CheckKind::Relations, rel);

    if want(CheckKind::Homomorphism) {
        let mut h = Measurement::default();
        for (l, a, b, ta, tb) in [("px", &p, &x, &tp, &tx), ("xp", &x, &p, &tx, &tp)] {
            let t = st.induce(&st.pres.multiply(a, b)?, s.control)?;
            welldef.push(l, t.welldef);
            // compare on the interior columns, where truncation does not enter
            let prod = &ta.matrix * &tb.matrix;
            let dm = &st.dom.q * (&t.matrix - prod) * st.dom.q.adjoint();
            h.push(l, spectral_norm(&interior(&dm)) / (spectral_norm(&ta.matrix) * spectral_norm(&tb.matrix)).max(1.0));
        }
        out.insert(CheckKind::Homomorphism, h);
    }
    out.insert(CheckKind::Welldef, welldef);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::config::ActionKind;

    fn s4() -> Scenario {
        let mut s = Scenario::new("s4", ActionKind::Heisenberg);
        for k in ActionKind::Heisenberg.supported_checks() {
            s = s.with_check(*k, 1e-6);
        }
        s
    }

    #[test]
    fn schrodinger_closure() {
        let m = run(&s4()).unwrap();
        for k in [CheckKind::Welldef, CheckKind::Symmetry, CheckKind::Closure, CheckKind::Relations, CheckKind::Homomorphism, CheckKind::Compat] {
            assert!(m[&k].worst(false) <= 1e-6, "{k:?}: {}", m[&k].worst(false));
        }
        assert_eq!(m[&CheckKind::Nondegenerate].worst(false), 0.0);
    }

    #[test]
    fn sign_flip_is_detected() {
        let mut s = s4();
        s.control = Control::SignFlip;
        s.disc.samples = 4;
        let m = run(&s).unwrap();
        for (k, v) in &m {
            eprintln!("{k:?}: {:e}", v.worst(false));
        }
        assert!(m[&CheckKind::Compat].worst(false) >= 1e-2);
        assert!(m[&CheckKind::Relations].worst(false) >= 1e-2);
    }
}

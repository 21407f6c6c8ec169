use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{CheckKind, Control, Scenario};
use super::induce::{build_domain, evaluate, homomorphism_residual, induce, symmetry_residual, DomainBasis, InducedOp, DEFAULT_RANK_TOL};
use super::report::Measurement;
use crate::algebra::{AlgebraElement, Alphabet, Generator, Presentation};
use crate::error::Result;
use crate::weyl::spectral_norm;
use crate::C64;

/// Free *-algebra on `x` and `x+`.
pub fn presentation() -> Result<Presentation> {
    let alphabet = Alphabet::new(vec![Generator::with_adjoint("x", "x+"), Generator::with_adjoint("x+", "x")])?;
    Presentation::new("ostar", alphabet, Vec::new(), vec![0, 1], vec![1, 1], BTreeMap::new())
}

fn random_matrix(rng: &mut ChaCha8Rng, d: usize) -> DMatrix<C64> {
    DMatrix::from_fn(d, d, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

struct Setup {
    pres: Presentation,
    x: DMatrix<C64>,
    family: Vec<DMatrix<C64>>,
    dom: DomainBasis,
    control: Control,
}

impl Setup {
    fn op(&self, e: &AlgebraElement) -> Result<DMatrix<C64>> {
        let d = self.x.nrows();
        evaluate(e, d, &|g| match g {
            "x" => Some(self.x.clone()),
            "x+" => Some(self.x.adjoint()),
            _ => None,
        })
    }

    /// `x▷b = xb`, or `bx` under the right-action control.
    fn act(&self, e: &AlgebraElement, b: &DMatrix<C64>) -> Result<DMatrix<C64>> {
        let m = self.op(e)?;
        Ok(if self.control == Control::RightAction { b * m } else { m * b })
    }

    fn induce(&self, e: &AlgebraElement) -> Result<InducedOp> {
        let images: Vec<DMatrix<C64>> = self.family.iter().map(|b| self.act(e, b)).collect::<Result<_>>()?;
        induce(&images, &self.dom)
    }
}

fn setup(s: &Scenario) -> Result<Setup> {
    let d = s.disc.m;
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let x = random_matrix(&mut rng, d);
    let family: Vec<DMatrix<C64>> = (0..s.disc.samples).map(|_| random_matrix(&mut rng, d)).collect();
    let vecs: Vec<DVector<C64>> = (0..s.disc.vectors)
        .map(|_| DVector::from_fn(d, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
        .collect();
    let dom = build_domain(&family, &vecs, s.disc.rank_tol.unwrap_or(DEFAULT_RANK_TOL))?;
    Ok(Setup { pres: presentation()?, x, family, dom, control: s.control })
}

/// The operator `x` and its induced counterpart, for the CLI.
pub fn induced_generators(s: &Scenario) -> Result<Vec<(String, DMatrix<C64>)>> {
    let st = setup(s)?;
    let t = st.induce(&st.pres.generator("x")?)?;
    Ok(vec![("x".into(), st.x.clone()), ("induced-x".into(), t.on_ambient(&st.dom))])
}

pub(crate) fn run(s: &Scenario) -> Result<BTreeMap<CheckKind, Measurement>> {
    let st = setup(s)?;
    let d = st.x.nrows();
    let x = st.pres.generator("x")?;
    let xp = st.pres.generator("x+")?;
    let mut out = BTreeMap::new();

    let mut compat = Measurement::default();
    for (name, g) in [("x", &x), ("x+", &xp)] {
        for i in 0..st.family.len() {
            let (a, b) = (&st.family[i], &st.family[(i + 1) % st.family.len()]);
            let lhs = st.act(g, a)?.adjoint() * b;
            let rhs = a.adjoint() * st.act(&g.adjoint(), b)?;
            compat.push(format!("{name}/{i}"), spectral_norm(&(lhs - &rhs)) / spectral_norm(&rhs).max(1.0));
        }
    }
    out.insert(CheckKind::Compat, compat);

    let tx = st.induce(&x)?;
    let txp = st.induce(&xp)?;
    let mut wd = Measurement::default();
    wd.push("x", tx.welldef);
    wd.push("x+", txp.welldef);
    let mut sym = Measurement::default();
    sym.push("x", symmetry_residual(&tx, &txp));
    out.insert(CheckKind::Symmetry, sym);

    let mut hom = Measurement::default();
    for (l, a, b, ta, tb) in [("x x+", &x, &xp, &tx, &txp), ("x+ x", &xp, &x, &txp, &tx), ("x x", &x, &x, &tx, &tx)] {
        let t = st.induce(&st.pres.multiply(a, b)?)?;
        wd.push(l, t.welldef);
        hom.push(l, homomorphism_residual(ta, tb, &t));
    }
    out.insert(CheckKind::Homomorphism, hom);
    out.insert(CheckKind::Welldef, wd);

    let mut cl = Measurement::default();
    let expect = &st.x * &st.dom.q;
    cl.push("x", spectral_norm(&(&tx.ambient - &expect)) / spectral_norm(&st.x).max(1.0));
    out.insert(CheckKind::Closure, cl);

    let mut nd = Measurement::default();
    nd.push("missing-rank", (d - st.dom.rank()) as f64);
    out.insert(CheckKind::Nondegenerate, nd);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::config::ActionKind;

    fn ex3() -> Scenario {
        let mut s = Scenario::new("ex3", ActionKind::OstarMatrix);
        s.disc.m = 8;
        s.disc.samples = 4;
        s.disc.vectors = 2;
        s
    }

    #[test]
    fn operator_product_action_is_compatible() {
        let m = run(&ex3()).unwrap();
        for (k, v) in &m {
            assert!(v.worst(false) <= 1e-12, "{k:?}: {:e}", v.worst(false));
        }
    }

    #[test]
    fn right_multiplication_is_not() {
        let mut s = ex3();
        s.control = Control::RightAction;
        let m = run(&s).unwrap();
        assert!(m[&CheckKind::Compat].worst(false) >= 1e-2);
        // eight generating vectors in eight dimensions leave no null space to test
        assert!(m[&CheckKind::Welldef].worst(false) < 1e-8);
        assert!(m[&CheckKind::Closure].worst(false) >= 1e-2);
        s.disc.samples = 6;
        let m = run(&s).unwrap();
        assert!(m[&CheckKind::Welldef].worst(false) >= 1e-2);
    }
}

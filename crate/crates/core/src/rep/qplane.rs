use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::{ActionKind, CheckKind, Control, Scenario};
use super::induce::{build_domain, induce, symmetry_residual, DomainBasis, InducedOp};
use super::report::Measurement;
use crate::algebra::{AlgebraElement, Presentation};
use crate::error::{CoreError, Result};
use crate::gauss::{GaussianTermSymbol, GaussianVector};
use crate::weyl::{
    momentum_multiplier, position_multiplier, spectral_norm, weyl_op, ActionParams, Basis, BlockSymbol, Corruption,
    Layout, Pair, PhaseSymbol, SymbolAction, SymbolValue,
};
use crate::C64;

/// Rank tolerance for the Gaussian domains; their singular values decay
/// quickly and directions below this carry only quadrature noise.
pub const GAUSSIAN_RANK_TOL: f64 = 1e-9;

fn pair(kind: ActionKind) -> Result<Pair> {
    Ok(match kind {
        ActionKind::Qplane => Pair::QplaneB2,
        ActionKind::B3 => Pair::QplaneB3,
        ActionKind::B4 => Pair::QplaneB4,
        ActionKind::X3 => Pair::AxbB4,
        k => return Err(CoreError::Structure(format!("{} is not a quantum-plane kind", k.name()))),
    })
}

fn components(kind: ActionKind) -> usize {
    match kind {
        ActionKind::B3 => 4,
        ActionKind::B4 | ActionKind::X3 => 2,
        _ => 1,
    }
}

fn action(s: &Scenario) -> Result<SymbolAction> {
    let p = pair(s.kind)?;
    if s.control == Control::Unchecked {
        Ok(SymbolAction::unchecked(p, s.params))
    } else {
        SymbolAction::new(p, s.params)
    }
}

fn corruption(c: Control) -> Corruption {
    match c {
        Control::SignFlip => Corruption::SignFlip,
        Control::WrongQ => Corruption::WrongQ,
        _ => Corruption::None,
    }
}

fn zero_vec() -> GaussianVector {
    GaussianVector::default()
}

/// Closed-form generator: `E = e^{2παQ}`, `F = e^{2πβP}` assembled into the
/// block pattern of the kind, applied to a vector of Gaussians.
fn apply_closed(kind: ActionKind, p: &ActionParams, g: &str, v: &[GaussianVector]) -> Result<Vec<GaussianVector>> {
    let e = |f: &GaussianVector| f.mul_exp(C64::new(2.0 * PI * p.alpha, 0.0));
    // (e^{2πβP} f)(x) = f(x − iβ)
    let f_ = |f: &GaussianVector| f.shift(C64::new(0.0, -p.beta));
    let neg = |f: GaussianVector| f.scale(C64::new(-1.0, 0.0));
    let sgn = |f: GaussianVector, s: f64| f.scale(C64::new(s, 0.0));
    Ok(match (kind, g) {
        (ActionKind::Qplane, "x") => vec![e(&v[0])],
        (ActionKind::Qplane, "y") => vec![f_(&v[0])],
        (ActionKind::B3, "x") => {
            let sg = [1.0, 1.0, -1.0, -1.0];
            v.iter().zip(sg).map(|(f, s)| sgn(e(f), s * p.eps1 as f64)).collect()
        }
        (ActionKind::B3, "y") => {
            let sg = [1.0, -1.0, 1.0, -1.0];
            v.iter().zip(sg).map(|(f, s)| sgn(f_(f), s * p.eps2 as f64)).collect()
        }
        (ActionKind::B4, "x") => vec![e(&v[0]), neg(e(&v[1]))],
        (ActionKind::B4, "y") => vec![f_(&v[1]), f_(&v[0])],
        (ActionKind::X3, "x") => vec![e(&v[0]), e(&v[1])],
        (ActionKind::X3, "y") => vec![f_(&v[0]), neg(f_(&v[1]))],
        (ActionKind::X3, "chi") => vec![v[1].clone(), v[0].clone()],
        _ => return Err(CoreError::Structure(format!("no closed form for `{g}` in {}", kind.name()))),
    })
}

fn apply_element(kind: ActionKind, p: &ActionParams, x: &AlgebraElement, v: &[GaussianVector]) -> Result<Vec<GaussianVector>> {
    let alphabet = x.alphabet();
    let mut total = vec![zero_vec(); v.len()];
    for (w, c) in x.terms() {
        let mut cur = v.to_vec();
        for &g in w.iter().rev() {
            cur = apply_closed(kind, p, alphabet.name(g), &cur)?;
        }
        for (t, f) in total.iter_mut().zip(cur) {
            *t = t.add(&f.scale(*c));
        }
    }
    Ok(total)
}

/// Test vectors: Gaussian packets with distinct centres, widths and
/// frequencies in every component.
fn test_vectors(count: usize, comps: usize) -> Vec<Vec<GaussianVector>> {
    (0..count)
        .map(|j| {
            (0..comps)
                .map(|c| {
                    let t = (j * comps + c) as f64;
                    GaussianVector::packet(0.4 * (t * 0.7).sin(), 0.8 + 0.1 * (t % 3.0), 0.3 * (t * 1.3).cos())
                })
                .collect()
        })
        .collect()
}

/// Worst relative violation over the defining relations `l → r` of
/// `l·f = r·f` for the closed-form operators, sampled on `[−6, 6]`.
fn relation_residual(kind: ActionKind, p: &ActionParams, pres: &Presentation, v: &[GaussianVector]) -> Result<f64> {
    let xs: Vec<f64> = (0..=600).map(|k| -6.0 + 0.02 * k as f64).collect();
    let mut worst = 0.0f64;
    for rule in pres.rules() {
        let lhs = AlgebraElement::monomial(pres.alphabet(), rule.lhs.clone(), C64::new(1.0, 0.0));
        let l = apply_element(kind, p, &lhs, v)?;
        let r = apply_element(kind, p, &rule.rhs, v)?;
        let (mut diff, mut scale) = (0.0f64, 0.0f64);
        for (a, b) in l.iter().zip(&r) {
            for &x in &xs {
                let (u, w) = (a.eval(x), b.eval(x));
                diff = diff.max((u - w).norm());
                scale = scale.max(u.norm()).max(w.norm());
            }
        }
        worst = worst.max(if scale == 0.0 { 0.0 } else { diff / scale });
    }
    Ok(worst)
}

fn random_symbol(rng: &mut ChaCha8Rng, s: &Scenario) -> Result<PhaseSymbol> {
    PhaseSymbol::from_gaussian(&GaussianTermSymbol::random(rng, 2, 1.0, 1.0, 3.0, 0.5), s.disc.n, s.disc.l)
}

fn random_value(rng: &mut ChaCha8Rng, s: &Scenario) -> Result<SymbolValue> {
    Ok(match pair(s.kind)?.layout() {
        None => SymbolValue::Scalar(random_symbol(rng, s)?),
        Some(layout) => {
            SymbolValue::Block(BlockSymbol::new(layout, (0..4).map(|_| random_symbol(rng, s)).collect::<Result<_>>()?)?)
        }
    })
}

/// `ρ(A)` on `L²`, `⊕⁴L²` or `C²⊗L²` in the grid basis.
fn represent(v: &SymbolValue, n: usize, l: f64) -> Result<DMatrix<C64>> {
    let basis = Basis::Grid { n, l };
    match v {
        SymbolValue::Scalar(a) => Ok(weyl_op(a, &basis)?.entries),
        SymbolValue::Block(b) => {
            let ops: Vec<DMatrix<C64>> = b.blocks.iter().map(|a| Ok(weyl_op(a, &basis)?.entries)).collect::<Result<_>>()?;
            Ok(match b.layout {
                Layout::Quad => assemble(&[(0, 0, &ops[0]), (1, 1, &ops[1]), (2, 2, &ops[2]), (3, 3, &ops[3])], 4, n),
                Layout::Mat2 => assemble(&[(0, 0, &ops[0]), (0, 1, &ops[1]), (1, 0, &ops[2]), (1, 1, &ops[3])], 2, n),
            })
        }
    }
}

fn assemble(blocks: &[(usize, usize, &DMatrix<C64>)], k: usize, n: usize) -> DMatrix<C64> {
    let mut out = DMatrix::zeros(k * n, k * n);
    for &(r, c, m) in blocks {
        out.view_mut((r * n, c * n), (n, n)).copy_from(m);
    }
    out
}

/// Grid matrix of the closed-form `ρ′(g)`.
fn closed_matrix(kind: ActionKind, p: &ActionParams, g: &str, n: usize, l: f64) -> Result<DMatrix<C64>> {
    let e = position_multiplier(n, l, |x| C64::new((2.0 * PI * p.alpha * x).exp(), 0.0))?;
    let f = momentum_multiplier(n, l, |xi| C64::new((2.0 * PI * p.beta * xi).exp(), 0.0))?;
    let id = DMatrix::<C64>::identity(n, n);
    let sc = |m: &DMatrix<C64>, s: f64| m * C64::new(s, 0.0);
    Ok(match (kind, g) {
        (ActionKind::Qplane, "x") => e,
        (ActionKind::Qplane, "y") => f,
        (ActionKind::B3, "x" | "y") => {
            let (m, sg, eps) =
                if g == "x" { (&e, [1.0, 1.0, -1.0, -1.0], p.eps1) } else { (&f, [1.0, -1.0, 1.0, -1.0], p.eps2) };
            let b: Vec<DMatrix<C64>> = sg.iter().map(|s| sc(m, s * eps as f64)).collect();
            assemble(&[(0, 0, &b[0]), (1, 1, &b[1]), (2, 2, &b[2]), (3, 3, &b[3])], 4, n)
        }
        (ActionKind::B4, "x") => assemble(&[(0, 0, &e), (1, 1, &sc(&e, -1.0))], 2, n),
        (ActionKind::B4, "y") => assemble(&[(0, 1, &f), (1, 0, &f)], 2, n),
        (ActionKind::X3, "x") => assemble(&[(0, 0, &e), (1, 1, &e)], 2, n),
        (ActionKind::X3, "y") => assemble(&[(0, 0, &f), (1, 1, &sc(&f, -1.0))], 2, n),
        (ActionKind::X3, "chi") => assemble(&[(0, 1, &id), (1, 0, &id)], 2, n),
        _ => return Err(CoreError::Structure(format!("no closed form for `{g}` in {}", kind.name()))),
    })
}

fn grid_vector(v: &[GaussianVector], n: usize, l: f64) -> DVector<C64> {
    let h = 2.0 * l / n as f64;
    DVector::from_fn(v.len() * n, |i, _| v[i / n].eval(-l + (i % n) as f64 * h) * h.sqrt())
}

struct Setup {
    act: SymbolAction,
    family: Vec<SymbolValue>,
    dom: DomainBasis,
}

impl Setup {
    fn induce(&self, x: &AlgebraElement, s: &Scenario) -> Result<InducedOp> {
        let images: Vec<DMatrix<C64>> = self
            .family
            .iter()
            .map(|a| represent(&self.act.act(x, a)?, s.disc.n, s.disc.l))
            .collect::<Result<_>>()?;
        induce(&images, &self.dom)
    }
}

fn setup(s: &Scenario) -> Result<Setup> {
    let act = action(s)?;
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed.wrapping_add(7));
    let family: Vec<SymbolValue> = (0..s.disc.samples).map(|_| random_value(&mut rng, s)).collect::<Result<_>>()?;
    let ops: Vec<DMatrix<C64>> = family.iter().map(|a| represent(a, s.disc.n, s.disc.l)).collect::<Result<_>>()?;
    let vecs: Vec<DVector<C64>> =
        test_vectors(s.disc.vectors, components(s.kind)).iter().map(|v| grid_vector(v, s.disc.n, s.disc.l)).collect();
    let dom = build_domain(&ops, &vecs, s.disc.rank_tol.unwrap_or(GAUSSIAN_RANK_TOL))?;
    Ok(Setup { act, family, dom })
}

/// Induced generators on the ambient grid space, for the CLI.
pub fn induced_generators(s: &Scenario) -> Result<Vec<(String, DMatrix<C64>)>> {
    let st = setup(s)?;
    let pres = st.act.presentation.clone();
    pres.alphabet()
        .generators()
        .iter()
        .map(|g| Ok((g.name.clone(), st.induce(&pres.generator(&g.name)?, s)?.on_ambient(&st.dom))))
        .collect()
}

pub(crate) fn run(s: &Scenario) -> Result<BTreeMap<CheckKind, Measurement>> {
    let want = |k: CheckKind| s.checks.iter().any(|c| c.kind == k);
    let mut out = BTreeMap::new();
    let act = action(s)?;
    let pres = act.presentation.clone();
    let gens: Vec<String> = pres.alphabet().generators().iter().map(|g| g.name.clone()).collect();

    if want(CheckKind::Relations) {
        let mut m = Measurement::default();
        for (j, v) in test_vectors(s.disc.vectors.max(1), components(s.kind)).iter().enumerate() {
            m.push(format!("f{j}"), relation_residual(s.kind, &s.params, &pres, v)?);
        }
        out.insert(CheckKind::Relations, m);
    }
    if want(CheckKind::Compat) {
        let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
        let fam: Vec<SymbolValue> = (0..s.disc.samples).map(|_| random_value(&mut rng, s)).collect::<Result<_>>()?;
        let mut m = Measurement::default();
        for g in &gens {
            let x = pres.generator(g)?;
            for i in 0..fam.len() {
                let r = act.compat_residual(&x, &fam[i], &fam[(i + 1) % fam.len()], corruption(s.control))?;
                m.push(format!("{g}/{i}"), r);
            }
        }
        out.insert(CheckKind::Compat, m);
    }
    if want(CheckKind::Welldef) || want(CheckKind::Symmetry) || want(CheckKind::Closure) {
        let st = setup(s)?;
        let (mut wd, mut sym, mut cl) = (Measurement::default(), Measurement::default(), Measurement::default());
        for g in &gens {
            let x = pres.generator(g)?;
            let t = st.induce(&x, s)?;
            wd.push(g, t.welldef);
            sym.push(g, symmetry_residual(&t, &t));
            let c = closed_matrix(s.kind, &s.params, g, s.disc.n, s.disc.l)?;
            let expect = &c * &st.dom.generators;
            let got = t.on_ambient(&st.dom) * &st.dom.generators;
            cl.push(g, spectral_norm(&(got - &expect)) / spectral_norm(&expect));
        }
        let note = format!("domain rank {}", st.dom.rank());
        out.insert(CheckKind::Welldef, wd.with_note(note));
        out.insert(CheckKind::Symmetry, sym);
        out.insert(CheckKind::Closure, cl);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(kind: ActionKind, params: ActionParams) -> Scenario {
        let mut s = Scenario::new(kind.name(), kind);
        s.params = params;
        for k in kind.supported_checks() {
            s = s.with_check(*k, 1e-6);
        }
        s.disc.samples = 4;
        s
    }

    fn b4_params() -> ActionParams {
        ActionParams { gamma: 0.0625 - 0.5, ..ActionParams::default() }
    }

    #[test]
    fn quantum_plane_scenario() {
        let m = run(&scenario(ActionKind::Qplane, ActionParams::default())).unwrap();
        assert!(m[&CheckKind::Relations].worst(false) < 1e-10);
        for k in [CheckKind::Welldef, CheckKind::Symmetry, CheckKind::Closure, CheckKind::Compat] {
            assert!(m[&k].worst(false) < 1e-6, "{k:?}");
        }
    }

    fn assert_clean(m: &BTreeMap<CheckKind, Measurement>) {
        assert!(m[&CheckKind::Relations].worst(false) < 1e-10);
        for k in [CheckKind::Welldef, CheckKind::Symmetry, CheckKind::Closure, CheckKind::Compat] {
            assert!(m[&k].worst(false) < 1e-6, "{k:?}: {:e}", m[&k].worst(false));
        }
    }

    #[test]
    fn sign_variants() {
        for (e1, e2) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
            let mut s = scenario(ActionKind::B3, ActionParams { eps1: e1, eps2: e2, ..ActionParams::default() });
            s.disc.samples = 2;
            s.disc.vectors = 2;
            let m = run(&s).unwrap();
            assert_clean(&m);
        }
    }

    #[test]
    fn matrix_blocks() {
        let m = run(&scenario(ActionKind::B4, b4_params())).unwrap();
        assert_clean(&m);
        let m = run(&scenario(ActionKind::X3, ActionParams::default())).unwrap();
        assert_clean(&m);
    }

    #[test]
    fn negative_controls() {
        let mut s = scenario(ActionKind::B4, ActionParams::default());
        assert!(run(&s).is_err());
        s.control = Control::Unchecked;
        s.checks.retain(|c| c.kind == CheckKind::Relations);
        let r = run(&s).unwrap()[&CheckKind::Relations].worst(false);
        assert!(r >= 0.1, "{r}");
        for c in [Control::SignFlip, Control::WrongQ] {
            let mut s = scenario(ActionKind::Qplane, ActionParams::default());
            s.control = c;
            s.checks.retain(|c| c.kind == CheckKind::Compat);
            let r = run(&s).unwrap()[&CheckKind::Compat].worst(false);
            assert!(r >= 1e-2, "{c:?}: {r}");
        }
    }
}

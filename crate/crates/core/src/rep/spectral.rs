use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{CheckKind, Control, Scenario};
use super::induce::{build_domain, homomorphism_residual, induce, symmetry_residual, DomainBasis, InducedOp, DEFAULT_RANK_TOL};
use super::report::Measurement;
use crate::algebra::{AlgebraElement, Presentation};
use crate::error::{CoreError, Result};
use crate::weyl::spectral_norm;
use crate::C64;

/// Points of the spectral measure: the explicit table, or `count` uniform
/// points in the compact box (default `[−1, 1]^dim`).
pub fn spectral_points(s: &Scenario) -> Vec<Vec<f64>> {
    if !s.points.is_empty() {
        return s.points.clone();
    }
    let [lo, hi] = s.compact.unwrap_or([-1.0, 1.0]);
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    (0..s.count).map(|_| (0..s.dim).map(|_| rng.gen_range(lo..hi)).collect()).collect()
}

/// `p(λ)` for an element of the polynomial algebra; generator `xk` reads
/// coordinate `k−1`. Under the sign-flip control each generator multiplies
/// by `iλ_k` instead.
fn eval_poly(p: &AlgebraElement, lambda: &[f64], control: Control) -> C64 {
    let alphabet = p.alphabet();
    p.terms()
        .map(|(w, c)| {
            w.iter().fold(*c, |acc, &g| {
                let v = lambda[coordinate(alphabet.name(g))];
                acc * if control == Control::SignFlip { C64::new(0.0, v) } else { C64::new(v, 0.0) }
            })
        })
        .sum()
}

fn coordinate(name: &str) -> usize {
    name[1..].parse::<usize>().expect("generator names are x1..xn") - 1
}

fn diag(values: impl Iterator<Item = C64>) -> DMatrix<C64> {
    let v: Vec<C64> = values.collect();
    DMatrix::from_diagonal(&DVector::from_vec(v))
}

/// Sample elements of `B`: Gaussians `exp(−|λ−c|²/(2w²))` on `ℝ^n`, or the
/// monomials of degree at most two when the norm lives on a compact set.
fn b_family(s: &Scenario, rng: &mut ChaCha8Rng) -> Vec<Box<dyn Fn(&[f64]) -> f64>> {
    let d = s.dim;
    match s.compact {
        None => (0..s.disc.samples)
            .map(|_| {
                let c: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
                Box::new(move |l: &[f64]| {
                    let r2: f64 = l.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum();
                    (-r2 / 0.5).exp()
                }) as Box<dyn Fn(&[f64]) -> f64>
            })
            .collect(),
        Some(_) => {
            let mut out: Vec<Box<dyn Fn(&[f64]) -> f64>> = vec![Box::new(|_: &[f64]| 1.0)];
            for i in 0..d {
                out.push(Box::new(move |l: &[f64]| l[i]));
                for j in i..d {
                    out.push(Box::new(move |l: &[f64]| l[i] * l[j]));
                }
            }
            out
        }
    }
}

struct Setup {
    pres: Presentation,
    points: Vec<Vec<f64>>,
    fvals: Vec<Vec<f64>>,
    dom: DomainBasis,
}

impl Setup {
    fn induce(&self, x: &AlgebraElement, control: Control) -> Result<InducedOp> {
        let images: Vec<DMatrix<C64>> = self
            .fvals
            .iter()
            .map(|f| diag(self.points.iter().zip(f).map(|(l, v)| eval_poly(x, l, control) * *v)))
            .collect();
        induce(&images, &self.dom)
    }
}

/// Induced matrices `ρ̃(x_j)` in the domain basis, for the CLI.
pub fn induced_generators(s: &Scenario) -> Result<Vec<(String, DMatrix<C64>)>> {
    let st = setup(s)?;
    (1..=s.dim)
        .map(|j| {
            let x = st.pres.generator(&format!("x{j}"))?;
            Ok((format!("x{j}"), st.induce(&x, s.control)?.on_ambient(&st.dom)))
        })
        .collect()
}

fn setup(s: &Scenario) -> Result<Setup> {
    let points = spectral_points(s);
    if points.is_empty() || points.iter().any(|p| p.len() != s.dim) {
        return Err(CoreError::Parameter(format!("spectral points must be non-empty with {} coordinates", s.dim)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed.wrapping_add(1));
    let family = b_family(s, &mut rng);
    let fvals: Vec<Vec<f64>> = family.iter().map(|f| points.iter().map(|p| f(p)).collect()).collect();
    let ops: Vec<DMatrix<C64>> = fvals.iter().map(|f| diag(f.iter().map(|v| C64::new(*v, 0.0)))).collect();
    let n = points.len();
    let vecs: Vec<DVector<C64>> =
        (0..n).map(|k| DVector::from_fn(n, |i, _| C64::new(if i == k { 1.0 } else { 0.0 }, 0.0))).collect();
    let dom = build_domain(&ops, &vecs, DEFAULT_RANK_TOL)?;
    Ok(Setup { pres: Presentation::polynomial(s.dim), points, fvals, dom })
}

/// Sup of `|p|` over the compact box, from a grid together with the
/// spectral points that lie in the box.
fn compact_sup(p: &dyn Fn(&[f64]) -> f64, lo: f64, hi: f64, dim: usize, points: &[Vec<f64>]) -> f64 {
    let per_axis: usize = match dim {
        1 => 2001,
        2 => 201,
        3 => 41,
        _ => 11,
    };
    let mut best = 0.0f64;
    let total = per_axis.pow(dim as u32);
    let mut idx = vec![0usize; dim];
    let mut pt = vec![0.0; dim];
    for _ in 0..total {
        for k in 0..dim {
            pt[k] = lo + (hi - lo) * idx[k] as f64 / (per_axis - 1) as f64;
        }
        best = best.max(p(&pt).abs());
        for k in 0..dim {
            idx[k] += 1;
            if idx[k] < per_axis {
                break;
            }
            idx[k] = 0;
        }
    }
    for q in points {
        if q.iter().all(|v| (lo..=hi).contains(v)) {
            best = best.max(p(q).abs());
        }
    }
    best
}

pub(crate) fn run(s: &Scenario) -> Result<BTreeMap<CheckKind, Measurement>> {
    let st = setup(s)?;
    let want = |k: CheckKind| s.checks.iter().any(|c| c.kind == k);
    let mut out = BTreeMap::new();
    let gens: Vec<AlgebraElement> =
        (1..=s.dim).map(|j| st.pres.generator(&format!("x{j}"))).collect::<Result<_>>()?;
    let induced: Vec<InducedOp> = gens.iter().map(|x| st.induce(x, s.control)).collect::<Result<_>>()?;

    if want(CheckKind::Nondegenerate) {
        let mut m = Measurement::default();
        m.push("missing-rank", (st.points.len() - st.dom.rank()) as f64);
        out.insert(CheckKind::Nondegenerate, m);
    }
    let mut welldef = Measurement::default();
    let mut symmetry = Measurement::default();
    let mut closure = Measurement::default();
    for (j, (x, t)) in gens.iter().zip(&induced).enumerate() {
        let name = format!("x{}", j + 1);
        welldef.push(&name, t.welldef);
        let tp = st.induce(&x.adjoint(), s.control)?;
        symmetry.push(&name, symmetry_residual(t, &tp));
        let a = diag(st.points.iter().map(|p| C64::new(p[j], 0.0)));
        let proj = &st.dom.q * st.dom.q.adjoint();
        let err = spectral_norm(&(t.on_ambient(&st.dom) - &a * proj));
        closure.push(&name, err / spectral_norm(&a).max(1.0));
    }
    if want(CheckKind::Homomorphism) {
        let mut m = Measurement::default();
        for i in 0..s.dim {
            for j in 0..s.dim {
                let xy = st.pres.multiply(&gens[i], &gens[j])?;
                let t = st.induce(&xy, s.control)?;
                welldef.push(format!("x{}x{}", i + 1, j + 1), t.welldef);
                m.push(format!("x{}x{}", i + 1, j + 1), homomorphism_residual(&induced[i], &induced[j], &t));
            }
        }
        out.insert(CheckKind::Homomorphism, m);
    }
    out.insert(CheckKind::Welldef, welldef);
    out.insert(CheckKind::Symmetry, symmetry);
    out.insert(CheckKind::Closure, closure);

    if want(CheckKind::NormBound) {
        let mut m = Measurement::default();
        let mut rng = ChaCha8Rng::seed_from_u64(s.seed.wrapping_add(2));
        match s.compact {
            Some([lo, hi]) => {
                // ‖ρ(p)‖ ≤ sup_K |p| for random cubic polynomials
                for k in 0..s.disc.samples {
                    let coef: Vec<f64> = (0..4 * s.dim + 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let d = s.dim;
                    let p = move |l: &[f64]| {
                        let mut v = coef[0];
                        for i in 0..d {
                            v += coef[1 + i] * l[i] + coef[1 + d + i] * l[i] * l[i] + coef[1 + 2 * d + i] * l[i].powi(3);
                            v += coef[1 + 3 * d + i] * l[i] * l[(i + 1) % d];
                        }
                        v
                    };
                    let rho = st.points.iter().map(|q| p(q).abs()).fold(0.0, f64::max);
                    m.push(format!("p{k}"), rho / compact_sup(&p, lo, hi, s.dim, &st.points));
                }
            }
            None => {
                // ‖ρ(f)‖ ≤ sup |f| = 1 for the Gaussian family
                for (k, f) in st.fvals.iter().enumerate() {
                    m.push(format!("f{k}"), f.iter().map(|v| v.abs()).fold(0.0, f64::max));
                }
            }
        }
        out.insert(CheckKind::NormBound, m);
    }
    Ok(out)
}

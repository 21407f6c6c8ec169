use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::fft::{map_lines, parity, plan, refine_line, Axis};
use super::symbol::{PhaseSymbol, DEFAULT_DECAY_GUARD};
use crate::error::{CoreError, Result};

/// Partial transform in `x₁` on the twice-refined `x₂` grid:
/// `out[(m + N/2)·2N + j'] = (F₁a)(m/(2L), −L + j'Δ/2)`.
fn partial_transform(a: &PhaseSymbol) -> Vec<C64> {
    let n = a.n();
    let h = a.delta();
    let (fine, w) = map_lines(a.data(), n, Axis::X2, refine_line);
    debug_assert_eq!(w, 2 * n);
    let fwd = plan(n, false);
    // columns of the N×2N array are lines in x₁
    let cols: Vec<Vec<C64>> = (0..w)
        .into_par_iter()
        .map(|jp| {
            let mut v: Vec<C64> = (0..n).map(|i| fine[i * w + jp]).collect();
            fwd.process(&mut v);
            v
        })
        .collect();
    let mut out = vec![C64::new(0.0, 0.0); n * w];
    for (jp, col) in cols.iter().enumerate() {
        for p in 0..n {
            let m = p as i64 - n as i64 / 2;
            out[p * w + jp] = col[m.rem_euclid(n as i64) as usize] * (h * parity(m));
        }
    }
    out
}

/// Twisted product `a # b`, the symbol of `Op(a)Op(b)`.
///
/// Uses `a#b(x₁,x₂) = ∬ e^{2πi(s+ω)x₁} (F₁a)(s, x₂+ω/2) (F₁b)(ω, x₂−s/2) ds dω`.
/// Both half-shifts land on the refined `x₂` grid when `N/(4L²)` is an
/// integer; that is required.
pub fn star(a: &PhaseSymbol, b: &PhaseSymbol) -> Result<PhaseSymbol> {
    a.require_same_grid(b)?;
    a.check_decay(DEFAULT_DECAY_GUARD)?;
    b.check_decay(DEFAULT_DECAY_GUARD)?;
    let r = a.lattice_ratio().ok_or_else(|| {
        CoreError::Parameter(format!("twisted product needs N/(4L²) to be a positive integer (N={}, L={})", a.n(), a.l()))
    })? as i64;
    let n = a.n();
    let w = 2 * n;
    let half = n as i64 / 2;
    let fa = partial_transform(a);
    let fb = partial_transform(b);
    // fbt[j'][m_ω + N/2] for contiguous access in ω
    let mut fbt = vec![C64::new(0.0, 0.0); n * w];
    for p in 0..n {
        for jp in 0..w {
            fbt[jp * n + p] = fb[p * w + jp];
        }
    }
    let inv = plan(n, true);
    let scale = 1.0 / (4.0 * a.l() * a.l());
    let columns: Vec<Vec<C64>> = (0..n)
        .into_par_iter()
        .map(|k| {
            let k2 = 2 * k as i64;
            let mut acc = vec![C64::new(0.0, 0.0); 2 * n];
            // m_ω range with 0 ≤ 2k + r m_ω < 2N
            let lo = (-k2 + r - 1).div_euclid(r).max(-half);
            let hi = (w as i64 - 1 - k2).div_euclid(r).min(half - 1);
            for ms in -half..half {
                let ib = k2 - r * ms;
                if ib < 0 || ib >= w as i64 {
                    continue;
                }
                let arow = &fa[((ms + half) as usize) * w..((ms + half + 1) as usize) * w];
                let brow = &fbt[(ib as usize) * n..(ib as usize + 1) * n];
                for mw in lo..=hi {
                    let ia = (k2 + r * mw) as usize;
                    acc[(ms + mw + n as i64) as usize] += arow[ia] * brow[(mw + half) as usize];
                }
            }
            let mut folded = vec![C64::new(0.0, 0.0); n];
            for (idx, c) in acc.iter().enumerate() {
                let kappa = idx as i64 - n as i64;
                folded[kappa.rem_euclid(n as i64) as usize] += c * parity(kappa);
            }
            inv.process(&mut folded);
            folded.iter().map(|z| z * scale).collect()
        })
        .collect();
    let mut data = vec![C64::new(0.0, 0.0); n * n];
    for (k, col) in columns.iter().enumerate() {
        for i in 0..n {
            data[i * n + k] = col[i];
        }
    }
    Ok(PhaseSymbol::raw(n, a.l(), data))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::GaussianTermSymbol;
    use crate::weyl::op::{grid_kernel, hermite_basis};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn projector_idempotent() {
        let a = PhaseSymbol::from_gaussian(&GaussianTermSymbol::a00(), 256, 8.0).unwrap();
        let aa = star(&a, &a).unwrap();
        assert!(aa.sup_dist(&a) < 1e-6, "{}", aa.sup_dist(&a));
    }

    #[test]
    fn zero_annihilates() {
        let a = PhaseSymbol::from_gaussian(&GaussianTermSymbol::a00(), 64, 4.0).unwrap();
        let z = PhaseSymbol::zeros(64, 4.0).unwrap();
        assert_eq!(star(&a, &z).unwrap().sup_norm(), 0.0);
    }

    #[test]
    fn matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for (n, l) in [(64, 4.0), (256, 8.0), (512, 8.0)] {
            let ga = GaussianTermSymbol::random(&mut rng, 2, 1.0, 1.0, 3.0, 1.0);
            let gb = GaussianTermSymbol::random(&mut rng, 2, 1.0, 1.0, 3.0, 1.0);
            let a = PhaseSymbol::from_gaussian(&ga, n, l).unwrap();
            let b = PhaseSymbol::from_gaussian(&gb, n, l).unwrap();
            let ab = star(&a, &b).unwrap();
            let exact = PhaseSymbol::from_gaussian(&ga.star(&gb), n, l).unwrap();
            let err = ab.sup_dist(&exact) / (a.sup_norm() * b.sup_norm());
            assert!(err < if n == 64 { 1e-7 } else { 1e-11 }, "N={n}: {err}");
        }
    }

    #[test]
    fn quantizes_to_operator_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let ga = GaussianTermSymbol::random(&mut rng, 2, 1.0, 1.0, 3.0, 1.0);
        let gb = GaussianTermSymbol::random(&mut rng, 2, 1.0, 1.0, 3.0, 1.0);
        let a = PhaseSymbol::from_gaussian(&ga, 128, 4.0 * 2f64.sqrt()).unwrap();
        let b = PhaseSymbol::from_gaussian(&gb, 128, a.l()).unwrap();
        let ab = star(&a, &b).unwrap();
        let h = hermite_basis(128, a.l(), 32).map(|v| C64::new(v, 0.0));
        let lhs = h.transpose() * grid_kernel(&ab) * &h;
        let rhs = h.transpose() * (grid_kernel(&a) * grid_kernel(&b)) * &h;
        let err: f64 = (lhs - rhs).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn off_lattice_rejected() {
        let a = PhaseSymbol::from_gaussian(&GaussianTermSymbol::a00(), 64, 3.0).unwrap();
        assert!(matches!(star(&a, &a), Err(CoreError::Parameter(_))));
    }
}

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::algebra::AlgebraElement;
use crate::error::{CoreError, Result};
use crate::weyl::spectral_norm;
use crate::C64;

/// Singular values below this fraction of the largest are discarded.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// A representation of finitely many named elements of `B` by matrices on a
/// common finite-dimensional space with the standard inner product.
#[derive(Clone, Debug, Default)]
pub struct FiniteRep {
    pub ops: BTreeMap<String, DMatrix<C64>>,
    /// Claimed continuity constant `C` in `‖ρ(b)‖ ≤ C‖b‖`.
    pub norm_bound: f64,
}

impl FiniteRep {
    pub fn new(norm_bound: f64) -> Self {
        FiniteRep { ops: BTreeMap::new(), norm_bound }
    }

    pub fn insert(&mut self, name: impl Into<String>, m: DMatrix<C64>) {
        self.ops.insert(name.into(), m);
    }

    pub fn get(&self, name: &str) -> Result<&DMatrix<C64>> {
        self.ops.get(name).ok_or_else(|| CoreError::Structure(format!("no operator named '{name}'")))
    }

    /// `‖ρ(b)* − ρ(b⁺)‖ / max(1, ‖ρ(b)‖)`.
    pub fn star_residual(&self, b: &str, b_plus: &str) -> Result<f64> {
        let (x, y) = (self.get(b)?, self.get(b_plus)?);
        Ok(spectral_norm(&(x.adjoint() - y)) / spectral_norm(x).max(1.0))
    }

    /// `‖ρ(b b') − ρ(b)ρ(b')‖ / max(1, ‖ρ(b)‖‖ρ(b')‖)`.
    pub fn product_residual(&self, b: &str, b2: &str, prod: &str) -> Result<f64> {
        let (x, y, z) = (self.get(b)?, self.get(b2)?, self.get(prod)?);
        Ok(spectral_norm(&(z - x * y)) / (spectral_norm(x) * spectral_norm(y)).max(1.0))
    }

    /// Ratio `‖ρ(b)‖ / (C‖b‖)`; at most one when the bound holds.
    pub fn bound_ratio(&self, b: &str, norm_b: f64) -> Result<f64> {
        let n = spectral_norm(self.get(b)?);
        if n == 0.0 {
            return Ok(0.0);
        }
        Ok(n / (self.norm_bound * norm_b))
    }
}

/// `Σ c_w M(w₁)⋯M(w_k)` for an element of a presented algebra, with
/// generator matrices looked up by name.
pub fn evaluate(x: &AlgebraElement, dim: usize, lookup: &dyn Fn(&str) -> Option<DMatrix<C64>>) -> Result<DMatrix<C64>> {
    let alphabet = x.alphabet();
    let mut total = DMatrix::zeros(dim, dim);
    for (w, c) in x.terms() {
        let mut cur = DMatrix::<C64>::identity(dim, dim) * *c;
        for &g in w.iter() {
            let name = alphabet.name(g);
            let m = lookup(name).ok_or_else(|| CoreError::Structure(format!("no matrix for generator `{name}`")))?;
            cur *= m;
        }
        total += cur;
    }
    Ok(total)
}

/// Orthonormal basis of `span{ρ(bᵢ)φⱼ}` with the factorization used to
/// induce operators on it.
#[derive(Clone, Debug)]
pub struct DomainBasis {
    /// Orthonormal columns spanning the domain.
    pub q: DMatrix<C64>,
    /// Generating vectors `ρ(bᵢ)φⱼ`, column `i·J + j`.
    pub generators: DMatrix<C64>,
    pub vectors: Vec<DVector<C64>>,
    pub singular_values: Vec<f64>,
    pub rank_tol: f64,
    v_range: DMatrix<C64>,
    inv_sigma: Vec<f64>,
}

impl DomainBasis {
    pub fn rank(&self) -> usize {
        self.q.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.q.nrows()
    }

    /// Columns of `images` laid out like [`DomainBasis::generators`].
    pub fn image_matrix(&self, ops: &[DMatrix<C64>]) -> Result<DMatrix<C64>> {
        let cols = ops.len() * self.vectors.len();
        if cols != self.generators.ncols() {
            return Err(CoreError::Structure(format!(
                "{} action images for {} generating vectors",
                cols,
                self.generators.ncols()
            )));
        }
        let dim = self.ambient_dim();
        let mut g = DMatrix::zeros(dim, cols);
        for (i, op) in ops.iter().enumerate() {
            if op.nrows() != dim || op.ncols() != dim {
                return Err(CoreError::Structure(format!("operator is {}×{}, expected {dim}×{dim}", op.nrows(), op.ncols())));
            }
            for (j, v) in self.vectors.iter().enumerate() {
                g.set_column(i * self.vectors.len() + j, &(op * v));
            }
        }
        Ok(g)
    }
}

/// Spans `ρ(bᵢ)φⱼ` and keeps the singular directions above
/// `rank_tol · σ_max`.
pub fn build_domain(ops: &[DMatrix<C64>], vecs: &[DVector<C64>], rank_tol: f64) -> Result<DomainBasis> {
    if ops.is_empty() || vecs.is_empty() {
        return Err(CoreError::DegenerateDomain("no generators or no vectors".into()));
    }
    let dim = vecs[0].len();
    if vecs.iter().any(|v| v.len() != dim) {
        return Err(CoreError::Structure("vectors of different lengths".into()));
    }
    let mut dom = DomainBasis {
        q: DMatrix::zeros(dim, 0),
        generators: DMatrix::zeros(dim, ops.len() * vecs.len()),
        vectors: vecs.to_vec(),
        singular_values: Vec::new(),
        rank_tol,
        v_range: DMatrix::zeros(0, 0),
        inv_sigma: Vec::new(),
    };
    let g = dom.image_matrix(ops)?;
    let svd = g.clone().svd(true, true);
    let (u, vt) = (svd.u.expect("left vectors"), svd.v_t.expect("right vectors"));
    let sigma: Vec<f64> = svd.singular_values.iter().copied().collect();
    let smax = sigma.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 || !smax.is_finite() {
        return Err(CoreError::DegenerateDomain("the generating vectors span the zero space".into()));
    }
    let keep: Vec<usize> = (0..sigma.len()).filter(|&k| sigma[k] > rank_tol * smax).collect();
    let r = keep.len();
    let mut q = DMatrix::zeros(dim, r);
    let mut v_range = DMatrix::zeros(g.ncols(), r);
    for (c, &k) in keep.iter().enumerate() {
        q.set_column(c, &u.column(k));
        v_range.set_column(c, &vt.row(k).adjoint());
    }
    dom.inv_sigma = keep.iter().map(|&k| 1.0 / sigma[k]).collect();
    dom.q = q;
    dom.generators = g;
    dom.singular_values = sigma;
    dom.v_range = v_range;
    Ok(dom)
}

/// An operator induced on a [`DomainBasis`].
#[derive(Clone, Debug)]
pub struct InducedOp {
    /// Matrix in the orthonormal domain basis.
    pub matrix: DMatrix<C64>,
    /// Images of the domain basis vectors in the ambient space.
    pub ambient: DMatrix<C64>,
    /// `max_{‖c‖=1, Gc=0} ‖G'c‖ / ‖G'‖`.
    pub welldef: f64,
    /// `‖(I − QQ*)·ambient‖ / ‖ambient‖`.
    pub leakage: f64,
}

impl InducedOp {
    /// `QTQ*` on the ambient space, zero on the orthogonal complement of the domain.
    pub fn on_ambient(&self, dom: &DomainBasis) -> DMatrix<C64> {
        &self.ambient * dom.q.adjoint()
    }
}

/// Induces `x` from the action images `ρ(x▷bᵢ)` of the domain generators:
/// the least-squares map `T` with `T·ρ(bᵢ)φⱼ = ρ(x▷bᵢ)φⱼ`.
pub fn induce(images: &[DMatrix<C64>], dom: &DomainBasis) -> Result<InducedOp> {
    let gp = dom.image_matrix(images)?;
    let scaled = {
        let mut m = &gp * &dom.v_range;
        for (c, s) in dom.inv_sigma.iter().enumerate() {
            m.column_mut(c).scale_mut(*s);
        }
        m
    };
    let matrix = dom.q.adjoint() * &scaled;
    let leak = &scaled - &dom.q * &matrix;
    let na = spectral_norm(&scaled);
    let leakage = if na == 0.0 { 0.0 } else { spectral_norm(&leak) / na };
    let k = gp.ncols();
    let null_proj = DMatrix::<C64>::identity(k, k) - &dom.v_range * dom.v_range.adjoint();
    let ng = spectral_norm(&gp);
    let welldef = if ng == 0.0 { 0.0 } else { spectral_norm(&(&gp * null_proj)) / ng };
    Ok(InducedOp { matrix, ambient: scaled, welldef, leakage })
}

/// `‖T(x)* − T(x⁺)‖ / max(1, ‖T(x)‖)` on the domain.
pub fn symmetry_residual(tx: &InducedOp, tx_plus: &InducedOp) -> f64 {
    spectral_norm(&(tx.matrix.adjoint() - &tx_plus.matrix)) / spectral_norm(&tx.matrix).max(1.0)
}

/// `‖T(nf(xy)) − T(x)T(y)‖ / max(1, ‖T(x)‖‖T(y)‖)` on the domain, with the
/// image of `T(y)` re-projected onto it. The part of `T(y)` leaving the
/// domain is [`InducedOp::leakage`] of `ty`.
pub fn homomorphism_residual(tx: &InducedOp, ty: &InducedOp, txy: &InducedOp) -> f64 {
    let prod = &tx.matrix * &ty.matrix;
    spectral_norm(&(&txy.matrix - prod)) / (spectral_norm(&tx.matrix) * spectral_norm(&ty.matrix)).max(1.0)
}

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::fft::{derivative, map_lines, plan, signed, Axis};
use super::star::star;
use super::symbol::PhaseSymbol;
use crate::algebra::{AlgebraElement, Presentation};
use crate::error::{CoreError, Result};

/// Largest tolerated ratio between the amplified noise floor and the
/// amplified spectral peak.
pub const AMPLIFICATION_GUARD: f64 = 1e-6;

/// Multiple of the estimated round-off level below which spectral
/// coefficients are discarded before an imaginary shift.
pub const NOISE_MARGIN: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub eps1: i8,
    pub eps2: i8,
}

impl Default for ActionParams {
    fn default() -> Self {
        ActionParams { alpha: 0.25, beta: 0.25, gamma: 0.0625, eps1: 1, eps2: 1 }
    }
}

impl ActionParams {
    pub fn q(&self) -> C64 {
        C64::from_polar(1.0, 2.0 * PI * self.gamma)
    }
}

/// Which compatible pair an action belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pair {
    /// Heisenberg algebra on Schwartz symbols.
    HeisenbergB1,
    /// Quantum plane on analytic symbols.
    QplaneB2,
    /// Quantum plane on four copies with sign patterns.
    QplaneB3,
    /// Quantum plane on 2×2 matrices of analytic symbols.
    QplaneB4,
    /// The algebra with the extra involution on 2×2 matrices.
    AxbB4,
}

impl Pair {
    pub fn presentation(&self, params: &ActionParams) -> Presentation {
        match self {
            Pair::HeisenbergB1 => Presentation::heisenberg(),
            Pair::QplaneB2 | Pair::QplaneB3 | Pair::QplaneB4 => Presentation::quantum_plane(params.gamma),
            Pair::AxbB4 => Presentation::axb(params.gamma),
        }
    }

    pub fn layout(&self) -> Option<Layout> {
        match self {
            Pair::HeisenbergB1 | Pair::QplaneB2 => None,
            Pair::QplaneB3 => Some(Layout::Quad),
            Pair::QplaneB4 | Pair::AxbB4 => Some(Layout::Mat2),
        }
    }

    /// `e^{2πiαβ}` must equal `q` (or `−q` on 2×2 matrices).
    pub fn check_params(&self, p: &ActionParams) -> Result<()> {
        if ![p.eps1, p.eps2].iter().all(|e| *e == 1 || *e == -1) {
            return Err(CoreError::Parameter("ε₁, ε₂ must be ±1".into()));
        }
        let target = match self {
            Pair::HeisenbergB1 => return Ok(()),
            Pair::QplaneB4 => p.gamma + 0.5,
            _ => p.gamma,
        };
        let d = C64::from_polar(1.0, 2.0 * PI * p.alpha * p.beta) - C64::from_polar(1.0, 2.0 * PI * target);
        if d.norm() > 1e-9 {
            let rel = if *self == Pair::QplaneB4 { "αβ = γ + 1/2" } else { "αβ = γ" };
            return Err(CoreError::Parameter(format!(
                "this pair needs {rel} mod 1 (α={}, β={}, γ={})",
                p.alpha, p.beta, p.gamma
            )));
        }
        Ok(())
    }
}

/// Deliberate errors for negative controls.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Corruption {
    #[default]
    None,
    /// `α → −α`, `β → −β` in the `x⁺` branch only.
    SignFlip,
    /// Imaginary shifts in the conjugate direction (the action for `q̄`).
    WrongQ,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Layout {
    /// Direct sum of four copies.
    Quad,
    /// 2×2 matrices, blocks row-major.
    Mat2,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockSymbol {
    pub layout: Layout,
    pub blocks: Vec<PhaseSymbol>,
}

impl BlockSymbol {
    pub fn new(layout: Layout, blocks: Vec<PhaseSymbol>) -> Result<Self> {
        if blocks.len() != 4 {
            return Err(CoreError::Structure(format!("expected 4 blocks, got {}", blocks.len())));
        }
        for b in &blocks[1..] {
            blocks[0].require_same_grid(b)?;
        }
        Ok(BlockSymbol { layout, blocks })
    }
}

/// An element of one of the symbol algebras.
#[derive(Clone, Debug, PartialEq)]
pub enum SymbolValue {
    Scalar(PhaseSymbol),
    Block(BlockSymbol),
}

impl SymbolValue {
    fn parts(&self) -> &[PhaseSymbol] {
        match self {
            SymbolValue::Scalar(a) => std::slice::from_ref(a),
            SymbolValue::Block(b) => &b.blocks,
        }
    }

    fn map_parts(&self, f: impl Fn(&PhaseSymbol) -> Result<PhaseSymbol>) -> Result<Self> {
        Ok(match self {
            SymbolValue::Scalar(a) => SymbolValue::Scalar(f(a)?),
            SymbolValue::Block(b) => SymbolValue::Block(BlockSymbol {
                layout: b.layout,
                blocks: b.blocks.iter().map(f).collect::<Result<_>>()?,
            }),
        })
    }

    fn zip_parts(&self, other: &Self, f: impl Fn(&PhaseSymbol, &PhaseSymbol) -> Result<PhaseSymbol>) -> Result<Self> {
        match (self, other) {
            (SymbolValue::Scalar(a), SymbolValue::Scalar(b)) => Ok(SymbolValue::Scalar(f(a, b)?)),
            (SymbolValue::Block(a), SymbolValue::Block(b)) if a.layout == b.layout => {
                Ok(SymbolValue::Block(BlockSymbol {
                    layout: a.layout,
                    blocks: a.blocks.iter().zip(&b.blocks).map(|(x, y)| f(x, y)).collect::<Result<_>>()?,
                }))
            }
            _ => Err(CoreError::Structure("symbol layouts differ".into())),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_parts(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_parts(other, |a, b| a.sub(b))
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map_parts(|a| Ok(a.scale(s))).expect("scaling cannot fail")
    }

    pub fn zero_like(&self) -> Self {
        self.scale(C64::new(0.0, 0.0))
    }

    /// Involution: conjugate, and transpose for 2×2 matrices.
    pub fn adjoint(&self) -> Self {
        match self {
            SymbolValue::Block(b) if b.layout == Layout::Mat2 => {
                let c = |k: usize| b.blocks[k].adjoint();
                SymbolValue::Block(BlockSymbol { layout: Layout::Mat2, blocks: vec![c(0), c(2), c(1), c(3)] })
            }
            _ => self.map_parts(|a| Ok(a.adjoint())).expect("adjoint cannot fail"),
        }
    }

    /// Product: `#` entrywise, componentwise or as a matrix product.
    pub fn star(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (SymbolValue::Block(a), SymbolValue::Block(b)) if a.layout == Layout::Mat2 && b.layout == Layout::Mat2 => {
                let e = |i: usize, j: usize| -> Result<PhaseSymbol> {
                    star(&a.blocks[2 * i], &b.blocks[j])?.add(&star(&a.blocks[2 * i + 1], &b.blocks[2 + j])?)
                };
                Ok(SymbolValue::Block(BlockSymbol {
                    layout: Layout::Mat2,
                    blocks: vec![e(0, 0)?, e(0, 1)?, e(1, 0)?, e(1, 1)?],
                }))
            }
            _ => self.zip_parts(other, star),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.parts().iter().map(PhaseSymbol::sup_norm).fold(0.0, f64::max)
    }

    pub fn sup_dist(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.sup_norm())
    }
}

/// Which of the Heisenberg generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeisenbergGen {
    P,
    X,
}

/// `p▷a = (1/2i)∂₁a + 2πx₂a`, `x▷a = x₁a − (1/4πi)∂₂a`.
pub fn act_heisenberg(g: HeisenbergGen, a: &PhaseSymbol) -> PhaseSymbol {
    match g {
        HeisenbergGen::P => {
            let d = derivative(a, Axis::X1).scale(C64::new(0.0, -0.5));
            let m = a.weight(|_, x2| C64::new(2.0 * PI * x2, 0.0));
            d.add(&m).expect("same grid")
        }
        HeisenbergGen::X => {
            let d = derivative(a, Axis::X2).scale(C64::new(0.0, 1.0 / (4.0 * PI)));
            let m = a.weight(|x1, _| C64::new(x1, 0.0));
            m.add(&d).expect("same grid")
        }
    }
}

/// `a ↦ a(z + i·c·e_axis)` for real `c` via the multiplier `e^{−2πcξ}`,
/// refusing when the amplified spectrum does not decay at the band edge.
pub fn imaginary_shift(a: &PhaseSymbol, axis: Axis, c: f64) -> Result<PhaseSymbol> {
    let n = a.n();
    let l = a.l();
    let fwd = plan(n, false);
    let (mut spec, _) = map_lines(a.data(), n, axis, |line| {
        let mut v = line.to_vec();
        fwd.process(&mut v);
        v
    });
    // The outer quarter of the band carries only round-off for symbols in the
    // analytic class; coefficients below a multiple of that level are
    // dropped so the shift does not amplify noise.
    let outer = |k: usize| signed(k, n).unsigned_abs() as usize >= 3 * n / 8;
    let mut noise = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let k = if axis == Axis::X2 { j } else { i };
            if outer(k) {
                noise = noise.max(spec[i * n + j].norm());
            }
        }
    }
    let floor = NOISE_MARGIN * noise;
    let (mut peak, mut hidden) = (0.0f64, 0.0f64);
    for i in 0..n {
        for j in 0..n {
            let k = if axis == Axis::X2 { j } else { i };
            let gain = (-2.0 * PI * c * signed(k, n) as f64 / (2.0 * l)).exp();
            let z = &mut spec[i * n + j];
            if z.norm() <= floor {
                *z = C64::new(0.0, 0.0);
                hidden = hidden.max(floor * gain);
            } else {
                *z *= gain;
                peak = peak.max(z.norm());
            }
        }
    }
    if hidden > AMPLIFICATION_GUARD * peak {
        return Err(CoreError::Guard(format!(
            "imaginary shift by {c} would amplify the spectral noise floor to {:.2e} of the peak; the symbol is not in the analytic class at this resolution",
            hidden / peak
        )));
    }
    let inv = plan(n, true);
    let (out, _) = map_lines(&spec, n, axis, |line| {
        let mut v = line.to_vec();
        inv.process(&mut v);
        v.iter_mut().for_each(|z| *z /= n as f64);
        v
    });
    Ok(PhaseSymbol::raw(n, l, out))
}

/// Branch-dependent data for the quantum-plane actions.
#[derive(Clone, Copy, Debug)]
struct Shift {
    alpha: f64,
    beta: f64,
    conj: bool,
}

fn qplane_x(a: &PhaseSymbol, s: Shift) -> Result<PhaseSymbol> {
    let c = if s.conj { -s.alpha / 2.0 } else { s.alpha / 2.0 };
    let shifted = imaginary_shift(a, Axis::X2, c)?;
    Ok(shifted.weight(|x1, _| C64::new((2.0 * PI * s.alpha * x1).exp(), 0.0)))
}

fn qplane_y(a: &PhaseSymbol, s: Shift) -> Result<PhaseSymbol> {
    let c = if s.conj { s.beta / 2.0 } else { -s.beta / 2.0 };
    let shifted = imaginary_shift(a, Axis::X1, c)?;
    Ok(shifted.weight(|_, x2| C64::new((2.0 * PI * s.beta * x2).exp(), 0.0)))
}

/// `x▷a = e^{2παx₁}·a(x₁, x₂ + iα/2)`, `y▷a = e^{2πβx₂}·a(x₁ − iβ/2, x₂)`.
pub fn act_qplane(g: &str, a: &PhaseSymbol, params: &ActionParams) -> Result<PhaseSymbol> {
    let s = Shift { alpha: params.alpha, beta: params.beta, conj: false };
    match g {
        "x" => qplane_x(a, s),
        "y" => qplane_y(a, s),
        _ => Err(CoreError::Structure(format!("quantum plane has no generator `{g}`"))),
    }
}

fn negate(a: &PhaseSymbol) -> PhaseSymbol {
    a.scale(C64::new(-1.0, 0.0))
}

fn block_action(pair: Pair, g: &str, b: &BlockSymbol, s: Shift, p: &ActionParams) -> Result<BlockSymbol> {
    let bl = &b.blocks;
    let blocks = match (pair, g) {
        (Pair::QplaneB3, "x" | "y") => {
            // component k carries the signs (ε₁, ε₂) = (±, ±) in the order ++, +−, −+, −−
            let signs: [f64; 4] = if g == "x" { [1.0, 1.0, -1.0, -1.0] } else { [1.0, -1.0, 1.0, -1.0] };
            let eps = if g == "x" { p.eps1 } else { p.eps2 } as f64;
            let mut out = Vec::with_capacity(4);
            for (k, blk) in bl.iter().enumerate() {
                let v = if g == "x" { qplane_x(blk, s)? } else { qplane_y(blk, s)? };
                out.push(v.scale(C64::new(signs[k] * eps, 0.0)));
            }
            out
        }
        (Pair::QplaneB4, "x") => {
            let v: Vec<PhaseSymbol> = bl.iter().map(|x| qplane_x(x, s)).collect::<Result<_>>()?;
            vec![v[0].clone(), v[1].clone(), negate(&v[2]), negate(&v[3])]
        }
        (Pair::QplaneB4, "y") => {
            let v: Vec<PhaseSymbol> = bl.iter().map(|x| qplane_y(x, s)).collect::<Result<_>>()?;
            vec![v[2].clone(), v[3].clone(), v[0].clone(), v[1].clone()]
        }
        (Pair::AxbB4, "x") => bl.iter().map(|x| qplane_x(x, s)).collect::<Result<_>>()?,
        (Pair::AxbB4, "y") => {
            let v: Vec<PhaseSymbol> = bl.iter().map(|x| qplane_y(x, s)).collect::<Result<_>>()?;
            vec![v[0].clone(), v[1].clone(), negate(&v[2]), negate(&v[3])]
        }
        (Pair::AxbB4, "chi") => vec![bl[2].clone(), bl[3].clone(), bl[0].clone(), bl[1].clone()],
        _ => return Err(CoreError::Structure(format!("no generator `{g}` acting on this block layout"))),
    };
    Ok(BlockSymbol { layout: b.layout, blocks })
}

/// Block actions: on four copies with the sign patterns `(+,+,−,−)` for
/// `x` and `(+,−,+,−)` for `y` scaled by `ε₁`, `ε₂`; on 2×2 matrices with
/// `x = diag(E, −E)` and `y` swapping rows, or, for the algebra with `χ`,
/// `x` entrywise, `y = diag(E, −E)` and `χ` swapping rows.
pub fn act_block(g: &str, a: &BlockSymbol, pair: Pair, params: &ActionParams) -> Result<BlockSymbol> {
    if pair.layout() != Some(a.layout) {
        return Err(CoreError::Structure(format!("{pair:?} does not act on {:?} blocks", a.layout)));
    }
    pair.check_params(params)?;
    block_action(pair, g, a, Shift { alpha: params.alpha, beta: params.beta, conj: false }, params)
}

/// A left action of a presented algebra on one of the symbol algebras.
#[derive(Clone, Debug)]
pub struct SymbolAction {
    pub pair: Pair,
    pub params: ActionParams,
    pub presentation: Presentation,
}

impl SymbolAction {
    pub fn new(pair: Pair, params: ActionParams) -> Result<Self> {
        pair.check_params(&params)?;
        Ok(Self::unchecked(pair, params))
    }

    /// Skips the parameter relation; used to build negative controls.
    pub fn unchecked(pair: Pair, params: ActionParams) -> Self {
        SymbolAction { pair, params, presentation: pair.presentation(&params) }
    }

    fn generator_with(&self, g: &str, v: &SymbolValue, s: Shift) -> Result<SymbolValue> {
        match (self.pair, v) {
            (Pair::HeisenbergB1, SymbolValue::Scalar(a)) => {
                let h = match g {
                    "p" => HeisenbergGen::P,
                    "x" => HeisenbergGen::X,
                    _ => return Err(CoreError::Structure(format!("no generator `{g}`"))),
                };
                Ok(SymbolValue::Scalar(act_heisenberg(h, a)))
            }
            (Pair::QplaneB2, SymbolValue::Scalar(a)) => Ok(SymbolValue::Scalar(match g {
                "x" => qplane_x(a, s)?,
                "y" => qplane_y(a, s)?,
                _ => return Err(CoreError::Structure(format!("no generator `{g}`"))),
            })),
            (pair, SymbolValue::Block(b)) if pair.layout() == Some(b.layout) => {
                Ok(SymbolValue::Block(block_action(pair, g, b, s, &self.params)?))
            }
            _ => Err(CoreError::Structure(format!("{:?} does not act on this symbol layout", self.pair))),
        }
    }

    fn shift(&self, corruption: Corruption, second_branch: bool) -> Shift {
        let mut s = Shift { alpha: self.params.alpha, beta: self.params.beta, conj: false };
        match corruption {
            Corruption::None => {}
            Corruption::WrongQ => s.conj = true,
            Corruption::SignFlip if second_branch => {
                s.alpha = -s.alpha;
                s.beta = -s.beta;
            }
            Corruption::SignFlip => {}
        }
        s
    }

    fn act_with(&self, x: &AlgebraElement, v: &SymbolValue, s: Shift) -> Result<SymbolValue> {
        let alphabet = self.presentation.alphabet();
        let mut total = v.zero_like();
        for (word, c) in x.terms() {
            let mut cur = v.clone();
            for &g in word.iter().rev() {
                cur = self.generator_with(alphabet.name(g), &cur, s)?;
            }
            total = total.add(&cur.scale(*c))?;
        }
        Ok(total)
    }

    /// `x ▷ v`, applying the generators of each word right to left.
    pub fn act(&self, x: &AlgebraElement, v: &SymbolValue) -> Result<SymbolValue> {
        self.act_with(x, v, self.shift(Corruption::None, false))
    }

    pub fn act_generator(&self, g: &str, v: &SymbolValue) -> Result<SymbolValue> {
        self.generator_with(g, v, self.shift(Corruption::None, false))
    }

    /// `‖(x▷a)⁺ # b − a⁺ # (x⁺▷b)‖_sup`.
    pub fn compat_residual(
        &self,
        x: &AlgebraElement,
        a: &SymbolValue,
        b: &SymbolValue,
        corruption: Corruption,
    ) -> Result<f64> {
        let xa = self.act_with(x, a, self.shift(corruption, false))?;
        let lhs = xa.adjoint().star(b)?;
        let xpb = self.act_with(&x.adjoint(), b, self.shift(corruption, true))?;
        let rhs = a.adjoint().star(&xpb)?;
        lhs.sup_dist(&rhs)
    }

    /// Largest violation over the defining relations `l → r` of
    /// `l▷v = r▷v`.
    pub fn relation_residual(&self, v: &SymbolValue) -> Result<f64> {
        let mut worst = 0.0f64;
        for rule in self.presentation.rules() {
            let lhs = AlgebraElement::monomial(self.presentation.alphabet(), rule.lhs.clone(), C64::new(1.0, 0.0));
            let l = self.act(&lhs, v)?;
            let r = self.act(&rule.rhs, v)?;
            worst = worst.max(l.sup_dist(&r)?);
        }
        Ok(worst)
    }
}

/// Convenience form of [`SymbolAction::compat_residual`].
pub fn compat_residual(
    pair: Pair,
    x: &AlgebraElement,
    a: &SymbolValue,
    b: &SymbolValue,
    params: &ActionParams,
) -> Result<f64> {
    SymbolAction::new(pair, *params)?.compat_residual(x, a, b, Corruption::None)
}

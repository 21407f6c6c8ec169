use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::lie::Group;
use crate::weyl::ActionParams;

/// The construction a scenario exercises.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ActionKind {
    Mult,
    Lie,
    Heisenberg,
    Qplane,
    B3,
    B4,
    X3,
    Suq11,
    OstarMatrix,
}

impl ActionKind {
    pub const ALL: [ActionKind; 9] = [
        ActionKind::Mult,
        ActionKind::Lie,
        ActionKind::Heisenberg,
        ActionKind::Qplane,
        ActionKind::B3,
        ActionKind::B4,
        ActionKind::X3,
        ActionKind::Suq11,
        ActionKind::OstarMatrix,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ActionKind::Mult => "mult",
            ActionKind::Lie => "lie",
            ActionKind::Heisenberg => "heisenberg",
            ActionKind::Qplane => "qplane",
            ActionKind::B3 => "b3",
            ActionKind::B4 => "b4",
            ActionKind::X3 => "x3",
            ActionKind::Suq11 => "suq11",
            ActionKind::OstarMatrix => "ostar-matrix",
        }
    }

    pub fn from_name(s: &str) -> Option<ActionKind> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    /// Checks this kind can measure.
    pub fn supported_checks(self) -> &'static [CheckKind] {
        use CheckKind::*;
        match self {
            ActionKind::Mult => &[Welldef, Symmetry, Homomorphism, Closure, NormBound, Nondegenerate],
            ActionKind::Lie => &[LieCompat, Refinement, Garding],
            ActionKind::Heisenberg => &[Compat, Welldef, Symmetry, Homomorphism, Closure, Relations, Nondegenerate],
            ActionKind::Qplane | ActionKind::B3 | ActionKind::B4 | ActionKind::X3 => {
                &[Compat, Welldef, Symmetry, Closure, Relations]
            }
            ActionKind::Suq11 => &[Relations, Welldef, Symmetry, WeylRelation],
            ActionKind::OstarMatrix => &[Compat, Welldef, Symmetry, Homomorphism, Closure, Nondegenerate],
        }
    }

    /// Name of the presentation of `X` the kind works with.
    pub fn algebra(self) -> &'static str {
        match self {
            ActionKind::Mult => "poly",
            ActionKind::Lie => "envelope",
            ActionKind::Heisenberg => "x1",
            ActionKind::Qplane | ActionKind::B3 | ActionKind::B4 => "x2",
            ActionKind::X3 => "x3",
            ActionKind::Suq11 => "suq11",
            ActionKind::OstarMatrix => "ostar",
        }
    }
}

/// A measurable property. Most are residuals bounded above; `Refinement`
/// is a convergence ratio bounded below.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CheckKind {
    Closure,
    Compat,
    Garding,
    Homomorphism,
    LieCompat,
    Nondegenerate,
    NormBound,
    Refinement,
    Relations,
    Symmetry,
    Welldef,
    WeylRelation,
}

impl CheckKind {
    pub const ALL: [CheckKind; 12] = [
        CheckKind::Closure,
        CheckKind::Compat,
        CheckKind::Garding,
        CheckKind::Homomorphism,
        CheckKind::LieCompat,
        CheckKind::Nondegenerate,
        CheckKind::NormBound,
        CheckKind::Refinement,
        CheckKind::Relations,
        CheckKind::Symmetry,
        CheckKind::Welldef,
        CheckKind::WeylRelation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Closure => "closure",
            CheckKind::Compat => "compat",
            CheckKind::Garding => "garding",
            CheckKind::Homomorphism => "homomorphism",
            CheckKind::LieCompat => "lie-compat",
            CheckKind::Nondegenerate => "nondegenerate",
            CheckKind::NormBound => "norm-bound",
            CheckKind::Refinement => "refinement",
            CheckKind::Relations => "relations",
            CheckKind::Symmetry => "symmetry",
            CheckKind::Welldef => "welldef",
            CheckKind::WeylRelation => "weyl-relation",
        }
    }

    pub fn from_name(s: &str) -> Option<CheckKind> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    pub fn lower_bound(self) -> bool {
        self == CheckKind::Refinement
    }

    /// Tolerance used when a check is listed without one.
    pub fn default_tol(self) -> f64 {
        match self {
            CheckKind::Refinement => 4.0,
            CheckKind::Nondegenerate => 0.0,
            CheckKind::NormBound => 1.0 + 1e-12,
            CheckKind::LieCompat | CheckKind::Garding => 1e-4,
            CheckKind::WeylRelation => 1e-8,
            CheckKind::Relations => 1e-10,
            _ => 1e-6,
        }
    }
}

/// Deliberate defects used by negative controls.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Control {
    #[default]
    None,
    SignFlip,
    WrongQ,
    DropModular,
    /// Parameters violating the kind's `αβ` relation are accepted.
    Unchecked,
    /// Operator algebras act by `x▷b = bx` instead of `xb`.
    RightAction,
}

impl Control {
    pub const ALL: [Control; 6] = [
        Control::None,
        Control::SignFlip,
        Control::WrongQ,
        Control::DropModular,
        Control::Unchecked,
        Control::RightAction,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Control::None => "none",
            Control::SignFlip => "sign-flip",
            Control::WrongQ => "wrong-q",
            Control::DropModular => "drop-modular",
            Control::Unchecked => "unchecked",
            Control::RightAction => "right-action",
        }
    }

    pub fn from_name(s: &str) -> Option<Control> {
        Self::ALL.into_iter().find(|c| c.name() == s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckSpec {
    pub kind: CheckKind,
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Discretization {
    /// Grid points per phase-space axis.
    pub n: usize,
    /// Half-width of the phase-space box.
    pub l: f64,
    /// Hermite truncation.
    pub m: usize,
    /// Lattice window `N₀`.
    pub window: usize,
    /// Group grid spacing; `None` picks the kind's default.
    pub h: Option<f64>,
    /// Half-widths of the group box.
    pub half: Vec<f64>,
    /// Size of the `B` sample family.
    pub samples: usize,
    /// Number of test vectors.
    pub vectors: usize,
    /// Relative rank tolerance of the domain; `None` picks the kind's default.
    pub rank_tol: Option<f64>,
}

impl Default for Discretization {
    fn default() -> Self {
        Discretization { n: 256, l: 8.0, m: 32, window: 20, h: None, half: Vec::new(), samples: 10, vectors: 3, rank_tol: None }
    }
}

/// A validated scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub kind: ActionKind,
    pub params: ActionParams,
    /// Real deformation parameter of SU_q(1,1).
    pub q: f64,
    pub control: Control,
    pub group: Group,
    pub direction: String,
    /// Number of commuting indeterminates.
    pub dim: usize,
    /// Spectral points; generated from `count` and the seed when empty.
    pub points: Vec<Vec<f64>>,
    pub count: usize,
    /// Compact box `[lo, hi]^dim` carrying the norm; `None` means all of `ℝ^dim`.
    pub compact: Option<[f64; 2]>,
    pub disc: Discretization,
    pub checks: Vec<CheckSpec>,
    pub seed: u64,
    /// Checks a negative control is designed to fail.
    pub expect_fail: Vec<CheckKind>,
}

impl Scenario {
    /// A scenario of the given kind with default settings and no checks.
    pub fn new(name: impl Into<String>, kind: ActionKind) -> Self {
        Scenario {
            name: name.into(),
            kind,
            params: ActionParams::default(),
            q: 0.8,
            control: Control::None,
            group: Group::Affine,
            direction: "scale".into(),
            dim: 2,
            points: Vec::new(),
            count: 50,
            compact: None,
            disc: Discretization::default(),
            checks: Vec::new(),
            seed: 1,
            expect_fail: Vec::new(),
        }
    }

    pub fn with_check(mut self, kind: CheckKind, tol: f64) -> Self {
        self.checks.push(CheckSpec { kind, tol });
        self
    }

    pub fn tolerance(&self, kind: CheckKind) -> Result<f64> {
        self.checks
            .iter()
            .find(|c| c.kind == kind)
            .map(|c| c.tol)
            .ok_or_else(|| CoreError::Structure(format!("check '{}' not configured", kind.name())))
    }
}

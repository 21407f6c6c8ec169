//! Exact symbolic layer: the free unital *-algebra over the complex numbers,
//! presentations with normal-form rewriting, and the direct-sum *-algebra
//! built from a left action.

mod direct_sum;
mod presentation;

pub use direct_sum::{
    PresentedElement,
    direct_sum_axiom_residual, direct_sum_product, pair_compat_residual, DirectSumElement,
    LeftAction, StarAlgebra,
};
pub use presentation::{Presentation, Rule, Strategy, DEFAULT_STEP_BUDGET};

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{CoreError, Result};

/// Coefficients below this magnitude (relative to the largest coefficient)
/// are dropped after rewriting.
pub const ZERO_TOL: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub adjoint_of: String,
}

impl Generator {
    pub fn hermitean(name: &str) -> Self {
        Generator { name: name.to_string(), adjoint_of: name.to_string() }
    }

    pub fn with_adjoint(name: &str, adjoint: &str) -> Self {
        Generator { name: name.to_string(), adjoint_of: adjoint.to_string() }
    }
}

/// A finite generator set with its involution, addressed by index.
#[derive(Debug, PartialEq, Eq)]
pub struct Alphabet {
    gens: Vec<Generator>,
    adjoint: Vec<usize>,
}

impl Alphabet {
    pub fn new(gens: Vec<Generator>) -> Result<Arc<Self>> {
        let mut adjoint = Vec::with_capacity(gens.len());
        for (i, g) in gens.iter().enumerate() {
            if gens[..i].iter().any(|h| h.name == g.name) {
                return Err(CoreError::Structure(format!("duplicate generator `{}`", g.name)));
            }
            let j = gens.iter().position(|h| h.name == g.adjoint_of).ok_or_else(|| {
                CoreError::Structure(format!(
                    "adjoint `{}` of generator `{}` is not a generator",
                    g.adjoint_of, g.name
                ))
            })?;
            adjoint.push(j);
        }
        for (i, &j) in adjoint.iter().enumerate() {
            if adjoint[j] != i {
                return Err(CoreError::Structure(format!(
                    "adjoint is not an involution at generator `{}`",
                    gens[i].name
                )));
            }
        }
        Ok(Arc::new(Alphabet { gens, adjoint }))
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|g| g.name == name)
    }

    pub fn name(&self, i: usize) -> &str {
        &self.gens[i].name
    }

    pub fn adjoint(&self, i: usize) -> usize {
        self.adjoint[i]
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }
}

/// A word in the generators; the empty word is the unit.
pub type Word = Vec<usize>;

/// Finite linear combination of words with complex coefficients.
#[derive(Clone, Debug)]
pub struct AlgebraElement {
    alphabet: Arc<Alphabet>,
    terms: BTreeMap<Word, Complex64>,
}

impl PartialEq for AlgebraElement {
    fn eq(&self, other: &Self) -> bool {
        same_alphabet(&self.alphabet, &other.alphabet) && self.terms == other.terms
    }
}

fn same_alphabet(a: &Arc<Alphabet>, b: &Arc<Alphabet>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl AlgebraElement {
    pub fn zero(alphabet: &Arc<Alphabet>) -> Self {
        AlgebraElement { alphabet: alphabet.clone(), terms: BTreeMap::new() }
    }

    pub fn scalar(alphabet: &Arc<Alphabet>, c: Complex64) -> Self {
        Self::monomial(alphabet, Vec::new(), c)
    }

    pub fn one(alphabet: &Arc<Alphabet>) -> Self {
        Self::scalar(alphabet, Complex64::new(1.0, 0.0))
    }

    pub fn monomial(alphabet: &Arc<Alphabet>, word: Word, c: Complex64) -> Self {
        let mut e = Self::zero(alphabet);
        e.add_term(word, c);
        e
    }

    pub fn generator(alphabet: &Arc<Alphabet>, name: &str) -> Result<Self> {
        let i = alphabet
            .index(name)
            .ok_or_else(|| CoreError::Structure(format!("unknown generator `{name}`")))?;
        Ok(Self::monomial(alphabet, vec![i], Complex64::new(1.0, 0.0)))
    }

    /// Parses a product of generator names separated by whitespace or `*`,
    /// e.g. `"p x"`; the empty string is the unit.
    pub fn word(alphabet: &Arc<Alphabet>, names: &str) -> Result<Self> {
        let mut w = Vec::new();
        for tok in names.split(|c: char| c.is_whitespace() || c == '*').filter(|t| !t.is_empty()) {
            w.push(
                alphabet
                    .index(tok)
                    .ok_or_else(|| CoreError::Structure(format!("unknown generator `{tok}`")))?,
            );
        }
        Ok(Self::monomial(alphabet, w, Complex64::new(1.0, 0.0)))
    }

    pub fn from_terms(alphabet: &Arc<Alphabet>, terms: impl IntoIterator<Item = (Word, Complex64)>) -> Self {
        let mut e = Self::zero(alphabet);
        for (w, c) in terms {
            e.add_term(w, c);
        }
        e
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, word: &[usize]) -> Complex64 {
        self.terms.get(word).copied().unwrap_or_default()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub(crate) fn add_term(&mut self, word: Word, c: Complex64) {
        if c == Complex64::default() {
            return;
        }
        match self.terms.entry(word) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == Complex64::default() {
                    o.remove();
                }
            }
        }
    }

    fn check_alphabet(&self, other: &Self) -> Result<()> {
        if same_alphabet(&self.alphabet, &other.alphabet) {
            Ok(())
        } else {
            Err(CoreError::Structure("elements over different generator sets".into()))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_alphabet(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), *c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = Self::zero(&self.alphabet);
        for (w, c) in &self.terms {
            out.add_term(w.clone(), c * s);
        }
        out
    }

    /// Free-algebra product: bilinear extension of word concatenation.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_alphabet(other)?;
        let mut out = Self::zero(&self.alphabet);
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                out.add_term(w, c1 * c2);
            }
        }
        Ok(out)
    }

    /// Antilinear antimultiplicative involution induced by the generator
    /// adjoints.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(&self.alphabet);
        for (w, c) in &self.terms {
            let rw: Word = w.iter().rev().map(|&g| self.alphabet.adjoint(g)).collect();
            out.add_term(rw, c.conj());
        }
        out
    }

    /// Largest coefficient deviation between two elements.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        let d = self.sub(other)?;
        Ok(d.max_coefficient())
    }

    pub fn max_coefficient(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub(crate) fn pruned(mut self, tol: f64) -> Self {
        self.terms.retain(|_, c| c.norm() > tol);
        self
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (w, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({}{:+}i)", c.re, c.im)?;
            if w.is_empty() {
                write!(f, "·1")?;
            }
            for &g in w {
                write!(f, "·{}", self.alphabet.name(g))?;
            }
        }
        Ok(())
    }
}

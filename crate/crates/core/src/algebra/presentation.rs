use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::{AlgebraElement, Alphabet, Generator, Word, ZERO_TOL};
use crate::error::{CoreError, Result};

/// Rule applications allowed per `normal_form` call.
pub const DEFAULT_STEP_BUDGET: usize = 1_000_000;

#[derive(Clone, Debug)]
pub struct Rule {
    pub lhs: Word,
    pub rhs: AlgebraElement,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Leftmost,
    Rightmost,
}

/// Generators, rewrite rules oriented by a weighted degree-lexicographic word
/// order, and named scalar parameters.
#[derive(Clone, Debug)]
pub struct Presentation {
    name: String,
    alphabet: Arc<Alphabet>,
    rules: Vec<Rule>,
    ranks: Vec<usize>,
    weights: Vec<u32>,
    params: BTreeMap<String, Complex64>,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl Presentation {
    /// Builds a presentation. `ranks[g]` orders generators for the
    /// lexicographic tie break, `weights[g]` enters the weighted degree.
    /// Every rule must strictly decrease the word order.
    pub fn new(
        name: &str,
        alphabet: Arc<Alphabet>,
        rules: Vec<Rule>,
        ranks: Vec<usize>,
        weights: Vec<u32>,
        params: BTreeMap<String, Complex64>,
    ) -> Result<Self> {
        let n = alphabet.len();
        if ranks.len() != n || weights.len() != n {
            return Err(CoreError::Structure("rank/weight table size mismatch".into()));
        }
        let mut seen = ranks.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != n {
            return Err(CoreError::Structure("generator ranks must be distinct".into()));
        }
        let p = Presentation { name: name.to_string(), alphabet, rules, ranks, weights, params };
        for r in &p.rules {
            if r.lhs.is_empty() {
                return Err(CoreError::Structure("rule with empty left side".into()));
            }
            if !Arc::ptr_eq(r.rhs.alphabet(), &p.alphabet) && **r.rhs.alphabet() != *p.alphabet {
                return Err(CoreError::Structure("rule over a foreign alphabet".into()));
            }
            for (w, _) in r.rhs.terms() {
                if p.word_cmp(&r.lhs, w) != Ordering::Greater {
                    return Err(CoreError::Structure(format!(
                        "rule {} does not decrease the word order",
                        p.describe_word(&r.lhs)
                    )));
                }
            }
        }
        Ok(p)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn param(&self, key: &str) -> Option<Complex64> {
        self.params.get(key).copied()
    }

    pub fn generator(&self, name: &str) -> Result<AlgebraElement> {
        AlgebraElement::generator(&self.alphabet, name)
    }

    pub fn word(&self, names: &str) -> Result<AlgebraElement> {
        AlgebraElement::word(&self.alphabet, names)
    }

    fn describe_word(&self, w: &[usize]) -> String {
        if w.is_empty() {
            return "1".into();
        }
        w.iter().map(|&g| self.alphabet.name(g)).collect::<Vec<_>>().join("·")
    }

    fn weight(&self, w: &[usize]) -> u64 {
        w.iter().map(|&g| self.weights[g] as u64).sum()
    }

    /// Weighted degree, then length, then lexicographic by rank.
    pub fn word_cmp(&self, a: &[usize], b: &[usize]) -> Ordering {
        self.weight(a)
            .cmp(&self.weight(b))
            .then(a.len().cmp(&b.len()))
            .then_with(|| {
                let ra = a.iter().map(|&g| self.ranks[g]);
                let rb = b.iter().map(|&g| self.ranks[g]);
                ra.cmp(rb)
            })
    }

    fn find_redex(&self, w: &[usize], strategy: Strategy) -> Option<(usize, usize)> {
        let positions: Box<dyn Iterator<Item = usize>> = match strategy {
            Strategy::Leftmost => Box::new(0..w.len()),
            Strategy::Rightmost => Box::new((0..w.len()).rev()),
        };
        for pos in positions {
            // innermost: prefer the shortest rule matching at this position
            let mut best: Option<(usize, usize)> = None;
            for (k, r) in self.rules.iter().enumerate() {
                if w[pos..].starts_with(&r.lhs) && best.is_none_or(|(_, len)| r.lhs.len() < len) {
                    best = Some((k, r.lhs.len()));
                }
            }
            if let Some((k, _)) = best {
                return Some((pos, k));
            }
        }
        None
    }

    pub fn normal_form(&self, e: &AlgebraElement) -> Result<AlgebraElement> {
        self.normal_form_with(e, Strategy::Leftmost, DEFAULT_STEP_BUDGET)
    }

    /// Exhaustive rewriting to a fixed point. Like terms are merged before
    /// they are rewritten further so cancellations happen early.
    pub fn normal_form_with(
        &self,
        e: &AlgebraElement,
        strategy: Strategy,
        budget: usize,
    ) -> Result<AlgebraElement> {
        if !Arc::ptr_eq(e.alphabet(), &self.alphabet) && **e.alphabet() != *self.alphabet {
            return Err(CoreError::Structure("element over a foreign alphabet".into()));
        }
        let scale = e.max_coefficient().max(1.0);
        let mut pending: BTreeMap<Word, Complex64> = e.terms().map(|(w, c)| (w.clone(), *c)).collect();
        let mut out = AlgebraElement::zero(&self.alphabet);
        let mut steps = 0usize;
        while let Some((w, coef)) = pending.pop_last() {
            if coef.norm() <= ZERO_TOL * scale * 1e-3 {
                continue;
            }
            match self.find_redex(&w, strategy) {
                None => out.add_term(w, coef),
                Some((pos, k)) => {
                    steps += 1;
                    if steps > budget {
                        return Err(CoreError::Divergence(budget));
                    }
                    let rule = &self.rules[k];
                    for (rw, rc) in rule.rhs.terms() {
                        let mut nw = Vec::with_capacity(w.len() + rw.len());
                        nw.extend_from_slice(&w[..pos]);
                        nw.extend_from_slice(rw);
                        nw.extend_from_slice(&w[pos + rule.lhs.len()..]);
                        *pending.entry(nw).or_default() += coef * rc;
                    }
                }
            }
        }
        Ok(out.pruned(ZERO_TOL * scale))
    }

    /// Product in the presented algebra.
    pub fn multiply(&self, a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
        self.normal_form(&a.multiply(b)?)
    }

    fn rule(&self, lhs: &str, rhs: &[(&str, Complex64)]) -> Rule {
        let lhs_e = self.word(lhs).expect("catalogue generator");
        let lhs = lhs_e.terms().next().unwrap().0.clone();
        let mut r = AlgebraElement::zero(&self.alphabet);
        for (w, k) in rhs {
            r = r.add(&self.word(w).expect("catalogue generator").scale(*k)).unwrap();
        }
        Rule { lhs, rhs: r }
    }

    fn catalogue(
        name: &str,
        gens: Vec<Generator>,
        ranks: Vec<usize>,
        weights: Vec<u32>,
        params: BTreeMap<String, Complex64>,
        rules: &[(&str, Vec<(&str, Complex64)>)],
    ) -> Result<Self> {
        let alphabet = Alphabet::new(gens)?;
        let mut p = Presentation {
            name: name.into(),
            alphabet: alphabet.clone(),
            rules: vec![],
            ranks: ranks.clone(),
            weights: weights.clone(),
            params: params.clone(),
        };
        let rules = rules.iter().map(|(l, r)| p.rule(l, r)).collect();
        p = Presentation::new(name, alphabet, rules, ranks, weights, params)?;
        Ok(p)
    }

    /// Heisenberg algebra: hermitean `p`, `x` with `px - xp = -i`; normal
    /// words `x^m p^n`.
    pub fn heisenberg() -> Self {
        Self::catalogue(
            "x1",
            vec![Generator::hermitean("x"), Generator::hermitean("p")],
            vec![0, 1],
            vec![1, 1],
            BTreeMap::new(),
            &[("p x", vec![("x p", c(1.0, 0.0)), ("", c(0.0, -1.0))])],
        )
        .expect("heisenberg presentation")
    }

    /// Real quantum plane with `q = exp(2πiγ)`: hermitean `x`, `y` with
    /// `xy = q yx`; normal words `y^m x^n`.
    pub fn quantum_plane(gamma: f64) -> Self {
        let q = Complex64::from_polar(1.0, 2.0 * PI * gamma);
        Self::catalogue(
            "x2",
            vec![Generator::hermitean("y"), Generator::hermitean("x")],
            vec![0, 1],
            vec![1, 1],
            params_gamma(gamma, q),
            &[("x y", vec![("y x", q)])],
        )
        .expect("quantum plane presentation")
    }

    /// Quantum plane extended by a hermitean involution `chi` with
    /// `x chi = chi x`, `y chi = -chi y`, `chi^2 = 1`; normal words
    /// `y^m x^n chi^e`.
    pub fn axb(gamma: f64) -> Self {
        let q = Complex64::from_polar(1.0, 2.0 * PI * gamma);
        Self::catalogue(
            "x3",
            vec![Generator::hermitean("y"), Generator::hermitean("x"), Generator::hermitean("chi")],
            vec![0, 1, 2],
            vec![1, 1, 1],
            params_gamma(gamma, q),
            &[
                ("x y", vec![("y x", q)]),
                ("chi x", vec![("x chi", c(1.0, 0.0))]),
                ("chi y", vec![("y chi", c(-1.0, 0.0))]),
                ("chi chi", vec![("", c(1.0, 0.0))]),
            ],
        )
        .expect("x3 presentation")
    }

    /// Coordinate algebra of SU_q(1,1) for real `q ∉ {0, 1, -1}`, generators
    /// `a`, `a+`, `c`, `c+`. Normal words keep `c`, `c+` to the right, with
    /// `c+` before `c`.
    pub fn suq11(q: f64) -> Result<Self> {
        if q == 0.0 || (q.abs() - 1.0).abs() < 1e-15 || !q.is_finite() {
            return Err(CoreError::Parameter(format!("q = {q} must be real and not 0, 1, -1")));
        }
        let one = c(1.0, 0.0);
        let mut params = BTreeMap::new();
        params.insert("q".to_string(), c(q, 0.0));
        Self::catalogue(
            "suq11",
            vec![
                Generator::with_adjoint("a", "a+"),
                Generator::with_adjoint("a+", "a"),
                Generator::with_adjoint("c", "c+"),
                Generator::with_adjoint("c+", "c"),
            ],
            vec![0, 1, 3, 2],
            vec![2, 2, 1, 1],
            params,
            &[
                ("c a", vec![("a c", c(1.0 / q, 0.0))]),
                ("c+ a", vec![("a c+", c(1.0 / q, 0.0))]),
                ("c a+", vec![("a+ c", c(q, 0.0))]),
                ("c+ a+", vec![("a+ c+", c(q, 0.0))]),
                ("c c+", vec![("c+ c", one)]),
                ("a+ a", vec![("", one), ("c+ c", one)]),
                ("a a+", vec![("", one), ("c+ c", c(q * q, 0.0))]),
            ],
        )
    }

    /// Polynomial algebra in `n` commuting hermitean indeterminates
    /// `x1..xn`.
    pub fn polynomial(n: usize) -> Self {
        let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        let gens = names.iter().map(|s| Generator::hermitean(s)).collect();
        let mut rule_specs: Vec<(String, String)> = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                rule_specs.push((format!("{} {}", names[j], names[i]), format!("{} {}", names[i], names[j])));
            }
        }
        let specs: Vec<(&str, Vec<(&str, Complex64)>)> =
            rule_specs.iter().map(|(l, r)| (l.as_str(), vec![(r.as_str(), c(1.0, 0.0))])).collect();
        Self::catalogue("poly", gens, (0..n).collect(), vec![1; n], BTreeMap::new(), &specs)
            .expect("polynomial presentation")
    }
}

fn params_gamma(gamma: f64, q: Complex64) -> BTreeMap<String, Complex64> {
    let mut m = BTreeMap::new();
    m.insert("gamma".to_string(), c(gamma, 0.0));
    m.insert("q".to_string(), q);
    m
}

use crate::lie::Group;
use crate::rep::{ActionKind, CheckKind, CheckSpec, Control, Scenario};

use super::parse::{parse, Diagnostic, Entry, ScenarioDoc, Value};

/// Agreement required of `αβ` and `γ`.
const PARAM_TOL: f64 = 1e-12;

struct Ctx<'a> {
    doc: &'a ScenarioDoc,
    errors: Vec<Diagnostic>,
}

impl<'a> Ctx<'a> {
    fn entry(&self, section: &str, key: &str) -> Option<&'a Entry> {
        self.doc.get(section, key)
    }

    fn fail(&mut self, e: Option<&Entry>, msg: impl Into<String>) {
        let (line, col) = e.map_or((0, 0), |e| (e.line, e.col));
        self.errors.push(Diagnostic::at(line, col, msg));
    }

    fn number(&mut self, section: &str, key: &str) -> Option<f64> {
        let e = self.entry(section, key)?;
        match e.value.as_f64() {
            Some(v) => Some(v),
            None => {
                self.fail(Some(e), format!("`{key}` must be a number, found {}", e.value.describe()));
                None
            }
        }
    }

    fn count(&mut self, section: &str, key: &str, min: usize) -> Option<usize> {
        let e = self.entry(section, key)?;
        let v = self.number(section, key)?;
        if v.fract() != 0.0 || v < min as f64 || v > 1e9 {
            self.fail(Some(e), format!("`{key}` must be an integer ≥ {min}, found {v}"));
            return None;
        }
        Some(v as usize)
    }

    fn positive(&mut self, section: &str, key: &str) -> Option<f64> {
        let e = self.entry(section, key)?;
        let v = self.number(section, key)?;
        if v <= 0.0 {
            self.fail(Some(e), format!("`{key}` must be positive, found {v}"));
            return None;
        }
        Some(v)
    }

    fn word(&mut self, section: &str, key: &str) -> Option<&'a str> {
        let e = self.entry(section, key)?;
        match e.value.as_word() {
            Some(w) => Some(w),
            None => {
                self.fail(Some(e), format!("`{key}` must be an identifier or string, found {}", e.value.describe()));
                None
            }
        }
    }

    fn numbers(&mut self, section: &str, key: &str, v: &Value) -> Option<Vec<f64>> {
        let e = self.entry(section, key);
        match v {
            Value::List(items) => {
                let out: Option<Vec<f64>> = items.iter().map(Value::as_f64).collect();
                if out.is_none() {
                    self.fail(e, format!("`{key}` must contain numbers only"));
                }
                out
            }
            _ => {
                self.fail(e, format!("`{key}` must be a list of numbers"));
                None
            }
        }
    }

    fn sign(&mut self, key: &str) -> Option<i8> {
        let e = self.entry("action", key)?;
        let v = self.number("action", key)?;
        if v == 1.0 || v == -1.0 {
            Some(v as i8)
        } else {
            self.fail(Some(e), format!("`{key}` must be 1 or -1, found {v}"));
            None
        }
    }
}

fn controls_for(kind: ActionKind) -> &'static [Control] {
    use Control::*;
    match kind {
        ActionKind::Mult | ActionKind::Heisenberg => &[None, SignFlip],
        ActionKind::Qplane | ActionKind::B3 | ActionKind::B4 | ActionKind::X3 => &[None, SignFlip, WrongQ, Unchecked],
        ActionKind::Lie => &[None, DropModular],
        ActionKind::Suq11 => &[None, WrongQ],
        ActionKind::OstarMatrix => &[None, RightAction],
    }
}

fn names<T: Copy>(items: &[T], name: impl Fn(T) -> &'static str) -> String {
    items.iter().map(|t| name(*t)).collect::<Vec<_>>().join(", ")
}

/// Resolves a parsed document into a [`Scenario`], filling defaults.
/// Every problem found is reported, not only the first.
pub fn validate(doc: &ScenarioDoc) -> Result<Scenario, Vec<Diagnostic>> {
    let mut cx = Ctx { doc, errors: Vec::new() };

    let name = match cx.entry("scenario", "name") {
        Some(_) => cx.word("scenario", "name").unwrap_or("").to_string(),
        None => {
            cx.fail(None, "missing `name` in [scenario]");
            String::new()
        }
    };
    if cx.entry("scenario", "description").is_some() {
        cx.word("scenario", "description");
    }

    let kind = match cx.entry("action", "kind") {
        None => {
            cx.fail(None, "missing `kind` in [action]");
            None
        }
        Some(e) => match cx.word("action", "kind") {
            Some(w) => {
                let k = ActionKind::from_name(w);
                if k.is_none() {
                    cx.fail(
                        Some(e),
                        format!("unknown action kind `{w}`; valid kinds are {}", names(&ActionKind::ALL, ActionKind::name)),
                    );
                }
                k
            }
            None => None,
        },
    };
    let mut s = Scenario::new(name, kind.unwrap_or(ActionKind::Mult));

    if let (Some(k), Some(e)) = (kind, cx.entry("algebra", "presentation")) {
        if let Some(p) = cx.word("algebra", "presentation") {
            if p != k.algebra() {
                cx.fail(Some(e), format!("action kind `{}` works over presentation `{}`, not `{p}`", k.name(), k.algebra()));
            }
        }
    }

    if let Some(e) = cx.entry("action", "control") {
        if let Some(w) = cx.word("action", "control") {
            match Control::from_name(w) {
                None => cx.fail(Some(e), format!("unknown control `{w}`; valid controls are {}", names(&Control::ALL, Control::name))),
                Some(c) => {
                    if let Some(k) = kind {
                        if !controls_for(k).contains(&c) {
                            cx.fail(
                                Some(e),
                                format!("control `{w}` does not apply to `{}`; use one of {}", k.name(), names(controls_for(k), Control::name)),
                            );
                        }
                    }
                    s.control = c;
                }
            }
        }
    }

    if let Some(v) = cx.entry("scenario", "seed").and_then(|_| cx.count("scenario", "seed", 0)) {
        s.seed = v as u64;
    }

    // Weyl parameters.
    if let Some(v) = cx.number("action", "alpha") {
        s.params.alpha = v;
    }
    if let Some(v) = cx.number("action", "beta") {
        s.params.beta = v;
    }
    if let Some(v) = cx.number("algebra", "gamma") {
        s.params.gamma = v;
    }
    if let Some(v) = cx.sign("eps1") {
        s.params.eps1 = v;
    }
    if let Some(v) = cx.sign("eps2") {
        s.params.eps2 = v;
    }
    if let Some(k) = kind {
        let (a, b, g) = (s.params.alpha, s.params.beta, s.params.gamma);
        let at = cx.entry("action", "alpha").or(cx.entry("action", "kind"));
        let checked = s.control != Control::Unchecked;
        match k {
            ActionKind::Qplane | ActionKind::B3 | ActionKind::X3 if checked && (a * b - g).abs() > PARAM_TOL => {
                cx.fail(at, format!("alpha*beta != gamma ({a}*{b} = {} but gamma = {g})", a * b));
            }
            ActionKind::B4 if checked && (a * b - g - 0.5).abs() > PARAM_TOL => {
                cx.fail(at, format!("alpha*beta != gamma + 1/2 ({a}*{b} = {} but gamma + 1/2 = {})", a * b, g + 0.5));
            }
            _ => {}
        }
    }

    // SU_q(1,1).
    if let Some(e) = cx.entry("algebra", "q") {
        if let Some(q) = cx.number("algebra", "q") {
            if q == 0.0 || (q.abs() - 1.0).abs() < 1e-12 {
                cx.fail(Some(e), format!("q = {q} must be nonzero and different from ±1"));
            }
            s.q = q;
        }
    }

    // Commutative scenarios.
    if let Some(d) = cx.entry("algebra", "dim").and_then(|_| cx.count("algebra", "dim", 1)) {
        s.dim = d;
    }
    if let Some(c) = cx.entry("action", "count").and_then(|_| cx.count("action", "count", 1)) {
        s.count = c;
    }
    if let Some(e) = cx.entry("action", "points") {
        let mut pts = Vec::new();
        match &e.value {
            Value::List(rows) => {
                for r in rows {
                    match r {
                        Value::Number(v) if s.dim == 1 => pts.push(vec![*v]),
                        _ => {
                            if let Some(p) = cx.numbers("action", "points", r) {
                                if p.len() != s.dim {
                                    cx.fail(Some(e), format!("point {:?} has {} coordinates, expected dim = {}", p, p.len(), s.dim));
                                }
                                pts.push(p);
                            }
                        }
                    }
                }
                if rows.is_empty() {
                    cx.fail(Some(e), "`points` must not be empty");
                }
            }
            v => cx.fail(Some(e), format!("`points` must be a list of points, found {}", v.describe())),
        }
        s.points = pts;
    }
    if let Some(e) = cx.entry("action", "compact") {
        if let Some(c) = cx.numbers("action", "compact", &e.value) {
            if c.len() != 2 || c[0] >= c[1] {
                cx.fail(Some(e), "`compact` must be [lo, hi] with lo < hi");
            } else {
                s.compact = Some([c[0], c[1]]);
            }
        }
    }

    // Lie scenarios.
    if let Some(e) = cx.entry("action", "group") {
        if let Some(w) = cx.word("action", "group") {
            match Group::from_name(w) {
                Ok(g) => s.group = g,
                Err(_) => cx.fail(Some(e), format!("unknown group `{w}`; valid groups are line, affine")),
            }
        }
    }
    s.direction = s.group.lie_basis()[0].to_string();
    if let Some(e) = cx.entry("action", "direction") {
        if let Some(w) = cx.word("action", "direction") {
            if w != "all" && !s.group.lie_basis().contains(&w) {
                cx.fail(
                    Some(e),
                    format!("group {} has no direction `{w}`; use all or one of {}", s.group.name(), s.group.lie_basis().join(", ")),
                );
            }
            s.direction = w.to_string();
        }
    }

    // Discretization.
    let d = "discretization";
    if let Some(e) = cx.entry(d, "N") {
        if let Some(n) = cx.count(d, "N", 16) {
            if !n.is_power_of_two() {
                cx.fail(Some(e), format!("N = {n} must be a power of two"));
            }
            s.disc.n = n;
        }
    }
    if let Some(l) = cx.positive(d, "L") {
        s.disc.l = l;
    }
    if let Some(m) = cx.count(d, "M", 1) {
        s.disc.m = m;
    }
    if s.kind == ActionKind::Heisenberg && s.disc.m > s.disc.n / 2 {
        let e = cx.entry(d, "M").or(cx.entry(d, "N"));
        cx.fail(e, format!("M = {} exceeds N/2 = {}", s.disc.m, s.disc.n / 2));
    }
    if let Some(w) = cx.count(d, "window", 3) {
        s.disc.window = w;
    }
    if let Some(h) = cx.positive(d, "h") {
        s.disc.h = Some(h);
    }
    if let Some(e) = cx.entry(d, "half") {
        if let Some(h) = cx.numbers(d, "half", &e.value) {
            if h.len() != s.group.dim() || h.iter().any(|v| *v <= 0.0) {
                cx.fail(Some(e), format!("`half` must hold {} positive half-widths", s.group.dim()));
            }
            s.disc.half = h;
        }
    }
    if let Some(v) = cx.count(d, "samples", 1) {
        s.disc.samples = v;
    }
    if let Some(v) = cx.count(d, "vectors", 1) {
        s.disc.vectors = v;
    }
    if let Some(e) = cx.entry(d, "rank_tol") {
        if let Some(t) = cx.positive(d, "rank_tol") {
            if t >= 1.0 {
                cx.fail(Some(e), "`rank_tol` must be below 1");
            }
            s.disc.rank_tol = Some(t);
        }
    }

    // Checks.
    match doc.section("checks") {
        None => cx.fail(None, "missing [checks] section"),
        Some(sec) if sec.entries.is_empty() => cx.fail(None, "[checks] lists no checks"),
        Some(sec) => {
            for e in &sec.entries {
                let Some(ck) = CheckKind::from_name(&e.key) else { continue };
                if let Some(k) = kind {
                    if !k.supported_checks().contains(&ck) {
                        cx.fail(
                            Some(e),
                            format!("check `{}` is not available for `{}`; supported: {}", ck.name(), k.name(), names(k.supported_checks(), CheckKind::name)),
                        );
                        continue;
                    }
                }
                if ck == CheckKind::Refinement && s.group == Group::Line {
                    cx.fail(Some(e), "refinement is measured on the affine group only");
                }
                let tol = match &e.value {
                    Value::Ident(w) if w == "default" => ck.default_tol(),
                    Value::Number(t) if *t >= 0.0 => *t,
                    v => {
                        cx.fail(Some(e), format!("tolerance of `{}` must be a non-negative number or `default`, found {v}", ck.name()));
                        continue;
                    }
                };
                s.checks.push(CheckSpec { kind: ck, tol });
            }
        }
    }
    s.checks.sort_by_key(|c| c.kind);

    if let Some(e) = cx.entry("scenario", "expect_fail") {
        let items: Vec<&Value> = match &e.value {
            Value::List(v) => v.iter().collect(),
            v => vec![v],
        };
        for it in items {
            match it.as_word().and_then(CheckKind::from_name) {
                Some(ck) if s.checks.iter().any(|c| c.kind == ck) => s.expect_fail.push(ck),
                Some(ck) => cx.fail(Some(e), format!("expect_fail names `{}`, which is not configured", ck.name())),
                None => cx.fail(Some(e), format!("expect_fail entry `{it}` is not a check name")),
            }
        }
    }

    if cx.errors.is_empty() {
        Ok(s)
    } else {
        Err(cx.errors)
    }
}

/// Parses and validates in one step.
pub fn load(text: &str) -> Result<Scenario, Vec<Diagnostic>> {
    validate(&parse(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::Discretization;

    fn qplane(alpha: f64, beta: f64, gamma: f64, kind: &str) -> String {
        format!(
            "[scenario]\nname = t\n[algebra]\ngamma = {gamma}\n[action]\nkind = {kind}\nalpha = {alpha}\nbeta = {beta}\n[checks]\nrelations = 1e-10\n"
        )
    }

    #[test]
    fn minimal_with_defaults() {
        let s = load(&qplane(0.5, 0.5, 0.25, "qplane")).unwrap();
        assert_eq!(s.kind, ActionKind::Qplane);
        assert_eq!(s.disc, Discretization::default());
        assert_eq!((s.disc.n, s.disc.l, s.disc.m), (256, 8.0, 32));
        assert_eq!(s.checks, vec![CheckSpec { kind: CheckKind::Relations, tol: 1e-10 }]);
    }

    #[test]
    fn alpha_beta_constraint() {
        let e = load(&qplane(0.5, 0.4, 0.25, "qplane")).unwrap_err();
        assert!(e[0].message.contains("alpha*beta != gamma"), "{}", e[0]);
        assert_eq!(e[0].line, 7);
        let e = load(&qplane(0.5, 0.5, 0.25, "b4")).unwrap_err();
        assert!(e[0].message.contains("gamma + 1/2"), "{}", e[0]);
        assert!(load(&qplane(0.5, 0.5, -0.25, "b4")).is_ok());
        let unchecked = qplane(0.5, 0.5, 0.25, "b4").replace("beta = 0.5", "beta = 0.5\ncontrol = unchecked");
        assert!(load(&unchecked).is_ok());
    }

    #[test]
    fn unknown_kind_lists_valid() {
        let e = load(&qplane(0.5, 0.5, 0.25, "bogus")).unwrap_err();
        assert!(e[0].message.contains("mult, lie, heisenberg, qplane, b3, b4, x3, suq11, ostar-matrix"));
    }

    #[test]
    fn errors_are_aggregated() {
        let text = "[scenario]\nexpect_fail = [welldef]\n[action]\nkind = lie\ngroup = line\ncontrol = wrong-q\n[discretization]\nN = 100\nsamples = 0\n[checks]\nrefinement = default\nsymmetry = 1e-6\n";
        let e = load(text).unwrap_err();
        let all: Vec<String> = e.iter().map(|d| d.to_string()).collect();
        let has = |s: &str| all.iter().any(|m| m.contains(s));
        assert!(has("missing `name`"));
        assert!(has("control `wrong-q` does not apply"));
        assert!(has("N = 100"));
        assert!(has("`samples` must be an integer"));
        assert!(has("refinement is measured on the affine group only"));
        assert!(has("check `symmetry` is not available"));
        assert!(has("expect_fail names `welldef`"));
        assert_eq!(e.len(), 7, "{all:#?}");
    }

    #[test]
    fn spectral_points_and_defaults() {
        let text = "[scenario]\nname = s1\nexpect_fail = norm-bound\n[algebra]\ndim = 2\n[action]\nkind = mult\npoints = [[0, 1], [2.5, -1]]\ncompact = [-1, 1]\n[checks]\nnorm-bound = default\nwelldef = 1e-12\n";
        let s = load(text).unwrap();
        assert_eq!(s.points, vec![vec![0.0, 1.0], vec![2.5, -1.0]]);
        assert_eq!(s.compact, Some([-1.0, 1.0]));
        assert_eq!(s.checks[0].kind, CheckKind::NormBound);
        assert_eq!(s.checks[0].tol, 1.0 + 1e-12);
        assert_eq!(s.expect_fail, vec![CheckKind::NormBound]);
        let bad = text.replace("[2.5, -1]", "[2.5]");
        assert!(load(&bad).unwrap_err()[0].message.contains("expected dim = 2"));
    }

    #[test]
    fn lie_direction_defaults_to_group() {
        let text = "[scenario]\nname = s3\n[action]\nkind = lie\ngroup = line\n[checks]\nlie-compat = 1e-4\n";
        assert_eq!(load(text).unwrap().direction, "d");
        let e = load(&text.replace("group = line", "group = line\ndirection = scale")).unwrap_err();
        assert!(e[0].message.contains("no direction `scale`"));
    }

    #[test]
    fn presentation_must_match() {
        let text = qplane(0.5, 0.5, 0.25, "x3").replace("[algebra]", "[algebra]\npresentation = x2");
        assert!(load(&text).unwrap_err()[0].message.contains("over presentation `x3`"));
    }
}

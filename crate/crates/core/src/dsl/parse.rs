use std::fmt;

/// Sections in canonical order, with the keys each accepts. `checks`
/// takes check names as keys.
pub const SECTIONS: [&str; 5] = ["scenario", "algebra", "action", "discretization", "checks"];

/// Keys accepted in `section`.
pub fn section_keys(section: &str) -> &'static [&'static str] {
    match section {
        "scenario" => &["name", "description", "seed", "expect_fail"],
        "algebra" => &["presentation", "gamma", "q", "dim"],
        "action" => &[
            "kind", "alpha", "beta", "eps1", "eps2", "control", "group", "direction", "points", "count", "compact",
        ],
        "discretization" => &["N", "L", "M", "window", "h", "half", "samples", "vectors", "rank_tol"],
        "checks" => &[
            "closure",
            "compat",
            "garding",
            "homomorphism",
            "lie-compat",
            "nondegenerate",
            "norm-bound",
            "refinement",
            "relations",
            "symmetry",
            "welldef",
            "weyl-relation",
        ],
        _ => &[],
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Number(f64),
    Ident(String),
    Str(String),
    List(Vec<Value>),
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Number(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_word(&self) -> Option<&str> {
        match self {
            Value::Ident(s) | Value::Str(s) => Some(s),
            _ => None,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Value::Number(_) => "number",
            Value::Ident(_) => "identifier",
            Value::Str(_) => "string",
            Value::List(_) => "list",
        }
    }

    pub(crate) fn describe(&self) -> &'static str {
        self.kind()
    }
}

fn write_number(v: f64, out: &mut String) {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e15).contains(&a) {
        out.push_str(&format!("{v}"));
    } else {
        out.push_str(&format!("{v:e}"));
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_value(self, &mut s);
        f.write_str(&s)
    }
}

fn write_value(v: &Value, out: &mut String) {
    match v {
        Value::Number(x) => write_number(*x, out),
        Value::Ident(s) => out.push_str(s),
        Value::Str(s) => {
            out.push('"');
            for c in s.chars() {
                if c == '"' || c == '\\' {
                    out.push('\\');
                }
                out.push(c);
            }
            out.push('"');
        }
        Value::List(items) => {
            out.push('[');
            for (i, it) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_value(it, out);
            }
            out.push(']');
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: Value,
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Section {
    pub name: String,
    pub line: usize,
    pub entries: Vec<Entry>,
}

/// A parsed scenario file: sections with their `key = value` entries in
/// file order.
#[derive(Clone, Debug, Default)]
pub struct ScenarioDoc {
    pub sections: Vec<Section>,
}

/// Equality ignores source positions.
impl PartialEq for ScenarioDoc {
    fn eq(&self, other: &Self) -> bool {
        self.sections.len() == other.sections.len()
            && self.sections.iter().zip(&other.sections).all(|(a, b)| {
                a.name == b.name
                    && a.entries.len() == b.entries.len()
                    && a.entries.iter().zip(&b.entries).all(|(x, y)| x.key == y.key && x.value == y.value)
            })
    }
}

impl ScenarioDoc {
    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&Entry> {
        self.section(section)?.entries.iter().find(|e| e.key == key)
    }

    /// Inserts or replaces `key` in `section`, creating the section in
    /// canonical position when missing. The entry loses its source position.
    pub fn set(&mut self, section: &str, key: &str, value: Value) {
        if self.section(section).is_none() {
            let rank = |n: &str| SECTIONS.iter().position(|s| *s == n).unwrap_or(SECTIONS.len());
            let at = self.sections.iter().position(|s| rank(&s.name) > rank(section)).unwrap_or(self.sections.len());
            self.sections.insert(at, Section { name: section.into(), line: 0, entries: Vec::new() });
        }
        let sec = self.sections.iter_mut().find(|s| s.name == section).expect("section exists");
        match sec.entries.iter_mut().find(|e| e.key == key) {
            Some(e) => *e = Entry { key: key.into(), value, line: 0, col: 0 },
            None => sec.entries.push(Entry { key: key.into(), value, line: 0, col: 0 }),
        }
    }

    /// Canonical text: one blank line between sections, entries in order.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.sections.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            out.push('[');
            out.push_str(&s.name);
            out.push_str("]\n");
            for e in &s.entries {
                out.push_str(&e.key);
                out.push_str(" = ");
                write_value(&e.value, &mut out);
                out.push('\n');
            }
        }
        out
    }
}

/// A problem tied to a position in the source; line and column are
/// 1-based, 0 when not applicable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl Diagnostic {
    pub fn at(line: usize, col: usize, message: impl Into<String>) -> Self {
        Diagnostic { line, col, message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}:{}: {}", self.line, self.col, self.message)
        }
    }
}

/// Nesting limit for lists.
const MAX_DEPTH: usize = 16;

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl Cursor {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn col(&self) -> usize {
        self.pos + 1
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t')) {
            self.pos += 1;
        }
    }

    fn err(&self, msg: impl Into<String>) -> Diagnostic {
        Diagnostic::at(self.line, self.col(), msg)
    }

    fn at_end_or_comment(&mut self) -> bool {
        self.skip_ws();
        matches!(self.peek(), None | Some('#'))
    }

    fn ident(&mut self) -> Option<String> {
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() => self.pos += 1,
            _ => return None,
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            self.pos += 1;
        }
        Some(self.chars[start..self.pos].iter().collect())
    }

    fn number(&mut self) -> Result<f64, Diagnostic> {
        let start = self.pos;
        let col = self.col();
        if matches!(self.peek(), Some('+' | '-')) {
            self.pos += 1;
        }
        let digits = |c: &mut Self| {
            let s = c.pos;
            while matches!(c.peek(), Some(d) if d.is_ascii_digit()) {
                c.pos += 1;
            }
            c.pos - s
        };
        let int = digits(self);
        let mut frac = 0;
        if self.peek() == Some('.') {
            self.pos += 1;
            frac = digits(self);
        }
        if int + frac == 0 {
            return Err(Diagnostic::at(self.line, col, "malformed number"));
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            self.pos += 1;
            if matches!(self.peek(), Some('+' | '-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                return Err(Diagnostic::at(self.line, col, "malformed exponent"));
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(Diagnostic::at(self.line, col, format!("number `{text}` out of range"))),
        }
    }

    fn string(&mut self) -> Result<String, Diagnostic> {
        let col = self.col();
        self.pos += 1;
        let mut s = String::new();
        loop {
            match self.peek() {
                None => return Err(Diagnostic::at(self.line, col, "unterminated string")),
                Some('"') => {
                    self.pos += 1;
                    return Ok(s);
                }
                Some('\\') => {
                    self.pos += 1;
                    match self.peek() {
                        Some(c @ ('"' | '\\')) => {
                            s.push(c);
                            self.pos += 1;
                        }
                        _ => return Err(self.err("unknown escape; only \\\" and \\\\ are allowed")),
                    }
                }
                Some(c) if c.is_control() => return Err(self.err("control character in string")),
                Some(c) => {
                    s.push(c);
                    self.pos += 1;
                }
            }
        }
    }

    fn value(&mut self, depth: usize) -> Result<Value, Diagnostic> {
        self.skip_ws();
        match self.peek() {
            None | Some('#') => Err(self.err("expected a value")),
            Some('"') => Ok(Value::Str(self.string()?)),
            Some('[') => {
                if depth >= MAX_DEPTH {
                    return Err(self.err("lists nested too deeply"));
                }
                self.pos += 1;
                let mut items = Vec::new();
                self.skip_ws();
                if self.peek() == Some(']') {
                    self.pos += 1;
                    return Ok(Value::List(items));
                }
                loop {
                    items.push(self.value(depth + 1)?);
                    self.skip_ws();
                    match self.peek() {
                        Some(',') => self.pos += 1,
                        Some(']') => {
                            self.pos += 1;
                            return Ok(Value::List(items));
                        }
                        _ => return Err(self.err("expected `,` or `]` in list")),
                    }
                }
            }
            Some(c) if c.is_ascii_digit() || c == '+' || c == '-' || c == '.' => Ok(Value::Number(self.number()?)),
            Some(c) if c.is_ascii_alphabetic() => Ok(Value::Ident(self.ident().expect("alphabetic start"))),
            Some(c) => Err(self.err(format!("unexpected character `{}`", c.escape_debug()))),
        }
    }
}

/// Parses a scenario from raw bytes; invalid UTF-8 is reported, never
/// panics.
pub fn parse_bytes(bytes: &[u8]) -> Result<ScenarioDoc, Vec<Diagnostic>> {
    match std::str::from_utf8(bytes) {
        Ok(s) => parse(s),
        Err(e) => {
            let before = &bytes[..e.valid_up_to()];
            let line = before.iter().filter(|b| **b == b'\n').count() + 1;
            let col = before.iter().rev().take_while(|b| **b != b'\n').count() + 1;
            Err(vec![Diagnostic::at(line, col, "input is not valid UTF-8")])
        }
    }
}

/// Parses the line format. All syntax errors are collected; the result
/// is a document only when there are none.
pub fn parse(text: &str) -> Result<ScenarioDoc, Vec<Diagnostic>> {
    let mut doc = ScenarioDoc::default();
    let mut errors = Vec::new();
    let mut current: Option<usize> = None;
    for (idx, raw) in text.split('\n').enumerate() {
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        let mut c = Cursor { chars: raw.chars().collect(), pos: 0, line: idx + 1 };
        if c.at_end_or_comment() {
            continue;
        }
        if c.peek() == Some('[') {
            c.pos += 1;
            c.skip_ws();
            let col = c.col();
            let Some(name) = c.ident() else {
                errors.push(c.err("expected a section name"));
                current = None;
                continue;
            };
            c.skip_ws();
            if c.peek() != Some(']') {
                errors.push(c.err("expected `]`"));
                current = None;
                continue;
            }
            c.pos += 1;
            if !c.at_end_or_comment() {
                errors.push(c.err("unexpected text after section header"));
            }
            if !SECTIONS.contains(&name.as_str()) {
                errors.push(Diagnostic::at(idx + 1, col, format!("unknown section `{name}`; expected one of {}", SECTIONS.join(", "))));
                current = None;
            } else if let Some(prev) = doc.section(&name) {
                errors.push(Diagnostic::at(idx + 1, col, format!("duplicate section `{name}` (first at line {})", prev.line)));
                current = None;
            } else {
                doc.sections.push(Section { name, line: idx + 1, entries: Vec::new() });
                current = Some(doc.sections.len() - 1);
            }
            continue;
        }
        let col = c.col();
        let Some(key) = c.ident() else {
            errors.push(c.err("expected `[section]` or `key = value`"));
            continue;
        };
        c.skip_ws();
        if c.peek() != Some('=') {
            errors.push(c.err("expected `=`"));
            continue;
        }
        c.pos += 1;
        let value = match c.value(0) {
            Ok(v) => v,
            Err(e) => {
                errors.push(e);
                continue;
            }
        };
        if !c.at_end_or_comment() {
            errors.push(c.err("unexpected text after value"));
            continue;
        }
        let Some(si) = current else {
            if doc.sections.is_empty() && errors.is_empty() {
                errors.push(Diagnostic::at(idx + 1, col, format!("`{key}` appears before any section")));
            }
            continue;
        };
        let sec = &mut doc.sections[si];
        if !section_keys(&sec.name).contains(&key.as_str()) {
            errors.push(Diagnostic::at(
                idx + 1,
                col,
                format!("unknown key `{key}` in [{}]; expected one of {}", sec.name, section_keys(&sec.name).join(", ")),
            ));
            continue;
        }
        if let Some(prev) = sec.entries.iter().find(|e| e.key == key) {
            errors.push(Diagnostic::at(idx + 1, col, format!("duplicate key `{key}` (first at line {})", prev.line)));
            continue;
        }
        sec.entries.push(Entry { key, value, line: idx + 1, col });
    }
    if errors.is_empty() {
        Ok(doc)
    } else {
        Err(errors)
    }
}

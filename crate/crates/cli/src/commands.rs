use std::io::Write;
use std::path::Path;
use std::time::Instant;

use cpair::dsl::{self, Diagnostic, ScenarioDoc, Value};
use cpair::io::{load_symbol, save_matrices, save_symbol, NamedMatrix, SymbolFile};
use cpair::lie::convolve;
use cpair::nalgebra::DMatrix;
use cpair::rep::{induced_matrices, run_scenario, ActionKind, CheckKind, Report, Scenario};
use cpair::weyl::{weyl_op, Basis, Layout, SymbolValue};
use cpair::{CoreError, C64};

use crate::{corpus, Format};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_GUARD: i32 = 3;

pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        let code = if e.is_numeric_guard() || matches!(e, CoreError::DegenerateDomain(_)) { EXIT_GUARD } else { EXIT_INPUT };
        Failure { code, message: e.to_string() }
    }
}

fn input(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_INPUT, message: message.into() }
}

type Outcome = Result<i32, Failure>;

#[derive(Default)]
pub struct Overrides {
    pub grid: Option<usize>,
    pub box_: Option<f64>,
    pub hermite: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
}

impl Overrides {
    /// Applied to the document so that validation sees the final values.
    fn apply(&self, doc: &mut ScenarioDoc) {
        let num = |v: f64| Value::Number(v);
        if let Some(n) = self.grid {
            doc.set("discretization", "N", num(n as f64));
        }
        if let Some(l) = self.box_ {
            doc.set("discretization", "L", num(l));
        }
        if let Some(m) = self.hermite {
            doc.set("discretization", "M", num(m as f64));
        }
        if let Some(s) = self.seed {
            doc.set("scenario", "seed", num(s as f64));
        }
        if let Some(t) = self.tol {
            let keys: Vec<String> = doc.section("checks").map(|s| s.entries.iter().map(|e| e.key.clone()).collect()).unwrap_or_default();
            for k in keys {
                let residual = !matches!(
                    CheckKind::from_name(&k),
                    Some(CheckKind::Refinement | CheckKind::NormBound | CheckKind::Nondegenerate)
                );
                if residual {
                    doc.set("checks", &k, num(t));
                }
            }
        }
    }
}

fn report_diagnostics(path: &Path, diags: &[Diagnostic]) -> Failure {
    for d in diags {
        if d.line == 0 {
            eprintln!("{}: {}", path.display(), d.message);
        } else {
            eprintln!("{}:{d}", path.display());
        }
    }
    input(format!("{}: {} problem(s) in scenario", path.display(), diags.len()))
}

fn load_scenario(arg: &str, o: &Overrides) -> Result<Scenario, Failure> {
    let path = corpus::resolve(arg);
    let bytes = std::fs::read(&path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    let mut doc = dsl::parse_bytes(&bytes).map_err(|d| report_diagnostics(&path, &d))?;
    o.apply(&mut doc);
    dsl::validate(&doc).map_err(|d| report_diagnostics(&path, &d))
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| input(format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| input(e.to_string())),
    }
}

pub fn report_csv(r: &Report) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["scenario", "check", "residual", "tolerance", "bound", "pass", "digest"]).expect("in-memory write");
    for c in &r.checks {
        w.write_record([
            r.scenario.as_str(),
            &c.id,
            &format!("{:e}", c.residual),
            &format!("{:e}", c.tolerance),
            &c.bound,
            if c.pass { "true" } else { "false" },
            &c.inputs_digest,
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

pub fn verify(arg: &str, o: &Overrides, format: Format, output: Option<&Path>, timing: bool) -> Outcome {
    let s = load_scenario(arg, o)?;
    let start = Instant::now();
    let mut report = run_scenario(&s)?;
    if timing {
        report.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    }
    let text = match format {
        Format::Json => report.to_json() + "\n",
        Format::Csv => report_csv(&report),
    };
    write_output(output, &text)?;
    for c in report.checks.iter().filter(|c| !c.pass) {
        let op = if c.bound == "ge" { "below" } else { "above" };
        eprintln!("FAIL {}: residual {:e} {op} tolerance {:e}", c.id, c.residual, c.tolerance);
    }
    let passed = report.checks.iter().filter(|c| c.pass).count();
    eprintln!("{}: {passed}/{} checks pass", report.scenario, report.checks.len());
    Ok(if report.all_pass() { EXIT_PASS } else { EXIT_CHECK })
}

fn read_symbol(p: &Path) -> Result<SymbolFile, Failure> {
    load_symbol(p).map_err(|e| input(format!("{}: {e}", p.display())))
}

pub fn star(a: &Path, b: &Path, out: &Path) -> Outcome {
    let r = match (read_symbol(a)?, read_symbol(b)?) {
        (SymbolFile::Phase(x), SymbolFile::Phase(y)) => SymbolFile::Phase(x.star(&y)?),
        (SymbolFile::Group(x), SymbolFile::Group(y)) => {
            if x.group() != y.group() || x.grid() != y.grid() {
                return Err(input("group functions live on different groups or grids"));
            }
            SymbolFile::Group(convolve(&x, &y)?)
        }
        _ => return Err(input("cannot multiply a phase-space symbol with a group function")),
    };
    save_symbol(out, &r)?;
    Ok(EXIT_PASS)
}

fn blocks_to_matrix(blocks: &[DMatrix<C64>], layout: Layout) -> DMatrix<C64> {
    let m = blocks[0].nrows();
    match layout {
        Layout::Quad => {
            let mut out = DMatrix::zeros(4 * m, 4 * m);
            for (k, b) in blocks.iter().enumerate() {
                out.view_mut((k * m, k * m), (m, m)).copy_from(b);
            }
            out
        }
        Layout::Mat2 => {
            let mut out = DMatrix::zeros(2 * m, 2 * m);
            for (k, b) in blocks.iter().enumerate() {
                out.view_mut(((k / 2) * m, (k % 2) * m), (m, m)).copy_from(b);
            }
            out
        }
    }
}

pub fn op(symbol: &Path, hermite: Option<usize>, grid_basis: bool, out: &Path) -> Outcome {
    let SymbolFile::Phase(v) = read_symbol(symbol)? else {
        return Err(input("op needs a phase-space symbol, not a group function"));
    };
    let first = match &v {
        SymbolValue::Scalar(a) => a,
        SymbolValue::Block(b) => &b.blocks[0],
    };
    let basis = if grid_basis { Basis::Grid { n: first.n(), l: first.l() } } else { Basis::Hermite { m: hermite.unwrap_or(32) } };
    if let Basis::Hermite { m } = basis {
        if m == 0 || m > first.n() / 2 {
            return Err(input(format!("Hermite truncation M = {m} must lie in 1..={}", first.n() / 2)));
        }
    }
    let name = symbol.file_stem().map_or("op".into(), |s| s.to_string_lossy().into_owned());
    let entry = match &v {
        SymbolValue::Scalar(a) => NamedMatrix { name, basis: Some(basis), matrix: weyl_op(a, &basis)?.entries },
        SymbolValue::Block(b) => {
            let mats = b.blocks.iter().map(|a| Ok(weyl_op(a, &basis)?.entries)).collect::<Result<Vec<_>, CoreError>>()?;
            NamedMatrix { name, basis: None, matrix: blocks_to_matrix(&mats, b.layout) }
        }
    };
    save_matrices(out, &[entry])?;
    Ok(EXIT_PASS)
}

pub fn rep(arg: &str, out: &Path) -> Outcome {
    let s = load_scenario(arg, &Overrides::default())?;
    let mats: Vec<NamedMatrix> =
        induced_matrices(&s)?.into_iter().map(|(name, matrix)| NamedMatrix { name, basis: None, matrix }).collect();
    save_matrices(out, &mats)?;
    Ok(EXIT_PASS)
}

pub fn list() -> Outcome {
    let dir = corpus::dir();
    let files = corpus::entries().map_err(|e| input(format!("{}: {e}", dir.display())))?;
    let mut out = String::new();
    out.push_str(&format!("scenarios in {} ({}):\n", dir.display(), files.len()));
    for p in &files {
        let text = std::fs::read_to_string(p).unwrap_or_default();
        let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let line = match dsl::load(&text) {
            Ok(s) => {
                let checks: Vec<&str> = s.checks.iter().map(|c| c.kind.name()).collect();
                let mut l = format!("  {stem:<28} {:<13} {}", s.kind.name(), checks.join(","));
                if !s.expect_fail.is_empty() {
                    let ef: Vec<&str> = s.expect_fail.iter().map(|c| c.name()).collect();
                    l.push_str(&format!("  (expected to fail: {})", ef.join(",")));
                }
                l
            }
            Err(_) => format!("  {stem:<28} invalid"),
        };
        out.push_str(&line);
        out.push('\n');
    }
    out.push_str("action kinds:\n");
    let mut kinds = ActionKind::ALL.to_vec();
    kinds.sort_by_key(|k| k.name());
    for k in kinds {
        let mut checks: Vec<&str> = k.supported_checks().iter().map(|c| c.name()).collect();
        checks.sort();
        out.push_str(&format!("  {:<13} over {:<9} checks: {}\n", k.name(), k.algebra(), checks.join(",")));
    }
    write_output(None, &out)?;
    Ok(EXIT_PASS)
}

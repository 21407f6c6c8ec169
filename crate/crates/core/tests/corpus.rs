use std::path::PathBuf;

use cpair::dsl::{load, parse};
use cpair::io::{load_symbol, SymbolFile};
use cpair::weyl::SymbolValue;

fn corpus() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn files() -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = std::fs::read_dir(corpus())
        .unwrap()
        .filter_map(|e| {
            let p = e.unwrap().path();
            (p.extension()? == "cp").then(|| (p.file_stem().unwrap().to_string_lossy().into_owned(), std::fs::read_to_string(&p).unwrap()))
        })
        .collect();
    out.sort();
    out
}

#[test]
fn every_corpus_file_validates() {
    let all = files();
    for s in ["s1", "s2", "s3", "s4", "s5", "s6", "s7", "s8", "s9"] {
        assert!(all.iter().any(|(n, _)| n.starts_with(&format!("{s}-"))), "missing {s}");
    }
    for (name, text) in &all {
        let sc = load(text).unwrap_or_else(|e| panic!("{name}: {e:?}"));
        assert_eq!(&sc.name, name);
        assert_eq!(name.starts_with("neg-"), !sc.expect_fail.is_empty(), "{name}");
    }
}

#[test]
fn corpus_round_trips() {
    for (name, text) in files() {
        let doc = parse(&text).unwrap();
        let again = parse(&doc.serialize()).unwrap();
        assert_eq!(again, doc, "{name}");
        assert_eq!(load(&doc.serialize()).unwrap(), load(&text).unwrap());
    }
}

#[test]
fn shipped_projector_symbol() {
    let SymbolFile::Phase(SymbolValue::Scalar(a)) = load_symbol(&corpus().join("symbols/a00.sym")).unwrap() else {
        panic!("a00 is a scalar phase symbol")
    };
    assert_eq!((a.n(), a.l()), (256, 8.0));
    let x = a.coord(130);
    let want = 2.0 * (-2.0 * std::f64::consts::PI * x * x).exp();
    assert!((a.get(130, 128).re - want).abs() < 1e-15);
    a.check_decay(cpair::weyl::DEFAULT_DECAY_GUARD).unwrap();
}

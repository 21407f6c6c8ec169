use std::path::{Path, PathBuf};

pub const CORPUS_ENV: &str = "CPAIR_CORPUS";

/// The scenario corpus: `$CPAIR_CORPUS`, else `./scenarios`, else the
/// directory shipped with the sources.
pub fn dir() -> PathBuf {
    if let Some(p) = std::env::var_os(CORPUS_ENV) {
        return PathBuf::from(p);
    }
    let local = PathBuf::from("scenarios");
    if local.is_dir() {
        return local;
    }
    let shipped = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    std::fs::canonicalize(&shipped).unwrap_or(shipped)
}

/// A path as given, or a corpus entry by name.
pub fn resolve(arg: &str) -> PathBuf {
    let p = PathBuf::from(arg);
    if p.exists() {
        return p;
    }
    let named = dir().join(format!("{arg}.cp"));
    if named.exists() {
        named
    } else {
        p
    }
}

/// `.cp` files of the corpus, sorted by file name.
pub fn entries() -> std::io::Result<Vec<PathBuf>> {
    let mut out: Vec<PathBuf> = std::fs::read_dir(dir())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "cp"))
        .collect();
    out.sort();
    Ok(out)
}

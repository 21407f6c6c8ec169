//! Binary containers for symbols (`.sym`) and dense complex matrices
//! (`.mat`). All integers and floats are little-endian; complex numbers are
//! stored as `(re, im)` pairs of `f64`. See `docs/formats.md`.

use std::io::{Read, Write};

use nalgebra::DMatrix;

use crate::error::{CoreError, Result};
use crate::lie::{Group, GroupFunction, GroupGrid};
use crate::weyl::{Basis, BlockSymbol, Layout, PhaseSymbol, SymbolValue};
use crate::C64;

pub const SYM_MAGIC: [u8; 8] = *b"CPSYM\0\0\x01";
pub const MAT_MAGIC: [u8; 8] = *b"CPMAT\0\0\x01";

/// Upper bound on samples or entries accepted from a file.
const MAX_VALUES: usize = 1 << 28;

/// Contents of a `.sym` file.
#[derive(Clone, Debug, PartialEq)]
pub enum SymbolFile {
    Phase(SymbolValue),
    Group(GroupFunction),
}

/// One matrix of a `.mat` file.
#[derive(Clone, Debug, PartialEq)]
pub struct NamedMatrix {
    pub name: String,
    pub basis: Option<Basis>,
    pub matrix: DMatrix<C64>,
}

fn put_u32(w: &mut impl Write, v: usize) -> Result<()> {
    let v = u32::try_from(v).map_err(|_| CoreError::Format(format!("{v} does not fit in 32 bits")))?;
    Ok(w.write_all(&v.to_le_bytes())?)
}

fn put_f64(w: &mut impl Write, v: f64) -> Result<()> {
    Ok(w.write_all(&v.to_le_bytes())?)
}

fn put_values<'a>(w: &mut impl Write, vals: impl IntoIterator<Item = &'a C64>) -> Result<()> {
    for z in vals {
        put_f64(w, z.re)?;
        put_f64(w, z.im)?;
    }
    Ok(())
}

fn get<const K: usize>(r: &mut impl Read) -> Result<[u8; K]> {
    let mut b = [0u8; K];
    r.read_exact(&mut b).map_err(|e| CoreError::Format(format!("truncated file: {e}")))?;
    Ok(b)
}

fn get_u32(r: &mut impl Read) -> Result<usize> {
    Ok(u32::from_le_bytes(get(r)?) as usize)
}

fn get_f64(r: &mut impl Read) -> Result<f64> {
    Ok(f64::from_le_bytes(get(r)?))
}

fn get_values(r: &mut impl Read, count: usize) -> Result<Vec<C64>> {
    if count > MAX_VALUES {
        return Err(CoreError::Format(format!("{count} values exceed the container limit")));
    }
    (0..count).map(|_| Ok(C64::new(get_f64(r)?, get_f64(r)?))).collect()
}

fn expect_end(r: &mut impl Read) -> Result<()> {
    let mut rest = Vec::new();
    r.read_to_end(&mut rest)?;
    if rest.is_empty() {
        Ok(())
    } else {
        Err(CoreError::Format(format!("{} trailing bytes", rest.len())))
    }
}

pub fn write_symbol(w: &mut impl Write, s: &SymbolFile) -> Result<()> {
    w.write_all(&SYM_MAGIC)?;
    match s {
        SymbolFile::Phase(v) => {
            let (layout, blocks): (u8, Vec<&PhaseSymbol>) = match v {
                SymbolValue::Scalar(a) => (0, vec![a]),
                SymbolValue::Block(b) => (if b.layout == Layout::Quad { 1 } else { 2 }, b.blocks.iter().collect()),
            };
            w.write_all(&[0, layout, 0, 0])?;
            let (n, l) = (blocks[0].n(), blocks[0].l());
            put_u32(w, n)?;
            put_u32(w, n)?;
            put_f64(w, l)?;
            put_f64(w, l)?;
            put_u32(w, blocks.len())?;
            for b in blocks {
                put_values(w, b.data())?;
            }
        }
        SymbolFile::Group(f) => {
            let g = f.grid();
            let tag = match f.group() {
                Group::Line => 1,
                Group::Affine => 2,
            };
            w.write_all(&[1, 0, tag, 0])?;
            put_u32(w, g.n[0])?;
            put_u32(w, g.n[1])?;
            put_f64(w, g.half[0])?;
            put_f64(w, g.half[1])?;
            put_u32(w, 1)?;
            put_values(w, f.data())?;
        }
    }
    Ok(())
}

pub fn read_symbol(r: &mut impl Read) -> Result<SymbolFile> {
    if get::<8>(r)? != SYM_MAGIC {
        return Err(CoreError::Format("not a CPSYM v1 file".into()));
    }
    let [kind, layout, group, _] = get::<4>(r)?;
    let n0 = get_u32(r)?;
    let n1 = get_u32(r)?;
    let h0 = get_f64(r)?;
    let h1 = get_f64(r)?;
    let blocks = get_u32(r)?;
    let per = n0.checked_mul(n1).ok_or_else(|| CoreError::Format("grid too large".into()))?;
    let out = match kind {
        0 => {
            if n0 != n1 || h0 != h1 {
                return Err(CoreError::Format(format!("phase grid must be square, got {n0}×{n1}, L = {h0}, {h1}")));
            }
            let want = if layout == 0 { 1 } else { 4 };
            if layout > 2 || blocks != want {
                return Err(CoreError::Format(format!("layout {layout} with {blocks} blocks")));
            }
            let mut syms = Vec::with_capacity(blocks);
            for _ in 0..blocks {
                syms.push(PhaseSymbol::new(n0, h0, get_values(r, per)?)?);
            }
            SymbolFile::Phase(match layout {
                0 => SymbolValue::Scalar(syms.pop().expect("one block")),
                1 => SymbolValue::Block(BlockSymbol::new(Layout::Quad, syms)?),
                _ => SymbolValue::Block(BlockSymbol::new(Layout::Mat2, syms)?),
            })
        }
        1 => {
            let (group, grid) = match group {
                1 => (Group::Line, GroupGrid::line(h0, n0)?),
                2 => (Group::Affine, GroupGrid::plane([h0, h1], [n0, n1])?),
                t => return Err(CoreError::Format(format!("unknown group tag {t}"))),
            };
            if blocks != 1 || grid.len() != per {
                return Err(CoreError::Format(format!("group function header mismatch ({n0}×{n1}, {blocks} blocks)")));
            }
            SymbolFile::Group(GroupFunction::new(group, grid, get_values(r, per)?)?)
        }
        k => return Err(CoreError::Format(format!("unknown symbol kind {k}"))),
    };
    expect_end(r)?;
    Ok(out)
}

pub fn write_matrices(w: &mut impl Write, mats: &[NamedMatrix]) -> Result<()> {
    w.write_all(&MAT_MAGIC)?;
    put_u32(w, mats.len())?;
    for m in mats {
        let name = m.name.as_bytes();
        if name.len() > u16::MAX as usize {
            return Err(CoreError::Format("matrix name too long".into()));
        }
        w.write_all(&(name.len() as u16).to_le_bytes())?;
        w.write_all(name)?;
        let (tag, bn, bl) = match m.basis {
            None => (0u8, 0, 0.0),
            Some(Basis::Grid { n, l }) => (1, n, l),
            Some(Basis::Hermite { m }) => (2, m, 0.0),
        };
        w.write_all(&[tag, 0, 0, 0])?;
        put_u32(w, bn)?;
        put_f64(w, bl)?;
        put_u32(w, m.matrix.nrows())?;
        put_u32(w, m.matrix.ncols())?;
        for i in 0..m.matrix.nrows() {
            put_values(w, m.matrix.row(i).iter())?;
        }
    }
    Ok(())
}

pub fn read_matrices(r: &mut impl Read) -> Result<Vec<NamedMatrix>> {
    if get::<8>(r)? != MAT_MAGIC {
        return Err(CoreError::Format("not a CPMAT v1 file".into()));
    }
    let count = get_u32(r)?;
    let mut out = Vec::new();
    for _ in 0..count {
        let len = u16::from_le_bytes(get(r)?) as usize;
        let mut name = vec![0u8; len];
        r.read_exact(&mut name).map_err(|e| CoreError::Format(format!("truncated file: {e}")))?;
        let name = String::from_utf8(name).map_err(|_| CoreError::Format("matrix name is not UTF-8".into()))?;
        let [tag, ..] = get::<4>(r)?;
        let bn = get_u32(r)?;
        let bl = get_f64(r)?;
        let basis = match tag {
            0 => None,
            1 => Some(Basis::Grid { n: bn, l: bl }),
            2 => Some(Basis::Hermite { m: bn }),
            t => return Err(CoreError::Format(format!("unknown basis tag {t}"))),
        };
        let rows = get_u32(r)?;
        let cols = get_u32(r)?;
        let vals = get_values(r, rows.checked_mul(cols).ok_or_else(|| CoreError::Format("matrix too large".into()))?)?;
        if let Some(b) = basis {
            if b.dim() != rows || rows != cols {
                return Err(CoreError::Format(format!("{rows}×{cols} matrix in a basis of dimension {}", b.dim())));
            }
        }
        out.push(NamedMatrix { name, basis, matrix: DMatrix::from_row_slice(rows, cols, &vals) });
    }
    expect_end(r)?;
    Ok(out)
}

pub fn save_symbol(path: &std::path::Path, s: &SymbolFile) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_symbol(&mut w, s)?;
    Ok(w.flush()?)
}

pub fn load_symbol(path: &std::path::Path) -> Result<SymbolFile> {
    read_symbol(&mut std::io::BufReader::new(std::fs::File::open(path)?))
}

pub fn save_matrices(path: &std::path::Path, mats: &[NamedMatrix]) -> Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_matrices(&mut w, mats)?;
    Ok(w.flush()?)
}

pub fn load_matrices(path: &std::path::Path) -> Result<Vec<NamedMatrix>> {
    read_matrices(&mut std::io::BufReader::new(std::fs::File::open(path)?))
}

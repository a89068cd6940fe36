//! Basis file format, bit-exact:
//!   line 1:  `MFB1 <N> <k> <dim> <precision>`
//!   then <dim> lines, each holding <precision-1> base-10 integers
//!   separated by single spaces; the n-th integer is the coefficient of
//!   q^n. LF line endings, no trailing whitespace.

use super::qbasis::CuspformBasis;
use crate::exact::matrix::hermite_normal_form;
use num_bigint::BigInt;
use num_traits::Zero;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BasisIoError {
    #[error("malformed basis file: {0}")]
    Malformed(String),
    #[error("dimension or precision mismatch: {0}")]
    Mismatch(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub fn format_basis(b: &CuspformBasis) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "MFB1 {} {} {} {}\n",
        b.level, b.weight, b.dim, b.precision
    ));
    for row in &b.rows {
        let toks: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&toks.join(" "));
        out.push('\n');
    }
    out
}

/// Parse a basis file. Rows that are not in reduced echelon form are
/// echelonized on load; the second component reports whether that or any
/// other normalization happened (warnings).
pub fn parse_basis(text: &str) -> Result<(CuspformBasis, Vec<String>), BasisIoError> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| BasisIoError::Malformed("empty file".into()))?;
    let toks: Vec<&str> = header.split(' ').collect();
    if toks.len() != 5 || toks[0] != "MFB1" {
        return Err(BasisIoError::Malformed(format!(
            "bad header `{header}`"
        )));
    }
    let level: u64 = toks[1]
        .parse()
        .map_err(|_| BasisIoError::Malformed("bad level".into()))?;
    let weight: u32 = toks[2]
        .parse()
        .map_err(|_| BasisIoError::Malformed("bad weight".into()))?;
    let dim: usize = toks[3]
        .parse()
        .map_err(|_| BasisIoError::Malformed("bad dimension".into()))?;
    let precision: i64 = toks[4]
        .parse()
        .map_err(|_| BasisIoError::Malformed("bad precision".into()))?;
    if precision < 2 {
        return Err(BasisIoError::Mismatch("precision < 2".into()));
    }
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(dim);
    for i in 0..dim {
        let line = lines.next().ok_or_else(|| {
            BasisIoError::Mismatch(format!("expected {dim} rows, found {i}"))
        })?;
        let mut row = Vec::with_capacity((precision - 1) as usize);
        if !line.is_empty() {
            for tok in line.split(' ') {
                let v = BigInt::from_str(tok).map_err(|_| {
                    BasisIoError::Malformed(format!("bad integer `{tok}`"))
                })?;
                row.push(v);
            }
        }
        if row.len() as i64 != precision - 1 {
            return Err(BasisIoError::Mismatch(format!(
                "row {i} has {} coefficients, expected {}",
                row.len(),
                precision - 1
            )));
        }
        rows.push(row);
    }
    if let Some(extra) = lines.next() {
        if !extra.is_empty() {
            return Err(BasisIoError::Mismatch("trailing data after rows".into()));
        }
    }
    let mut warnings = Vec::new();
    if !is_reduced_echelon(&rows) {
        warnings.push("rows were not in reduced echelon form; re-echelonized".into());
        rows = echelonize_int(rows)?;
        if rows.len() != dim {
            return Err(BasisIoError::Mismatch(
                "declared dimension exceeds the row rank".into(),
            ));
        }
    }
    Ok((
        CuspformBasis {
            level,
            weight,
            dim,
            precision,
            rows,
        },
        warnings,
    ))
}

fn is_reduced_echelon(rows: &[Vec<BigInt>]) -> bool {
    // canonical form: the Hermite normal form of the row lattice
    let mut hnf = rows.to_vec();
    hermite_normal_form(&mut hnf);
    hnf == rows
}

fn echelonize_int(rows: Vec<Vec<BigInt>>) -> Result<Vec<Vec<BigInt>>, BasisIoError> {
    let mut out = rows;
    hermite_normal_form(&mut out);
    Ok(out)
}

pub fn save_basis(path: &std::path::Path, b: &CuspformBasis) -> Result<(), BasisIoError> {
    std::fs::write(path, format_basis(b))?;
    Ok(())
}

pub fn load_basis(path: &std::path::Path) -> Result<(CuspformBasis, Vec<String>), BasisIoError> {
    let text = std::fs::read_to_string(path)?;
    parse_basis(&text)
}

//! Echelonized spans of truncated series — the universal currency of the
//! stabilization pipeline — with the stacked-matrix recipes for
//! intersection and Hecke stabilization.

use crate::exact::cyclotomic::CycField;
use crate::exact::field::Field;
use crate::exact::matrix::{right_kernel_cyc, Mat};
use crate::exact::residue::{Fp, ResidueField};
use crate::qexp::TruncatedSeries;

/// Field with a preferred exact right-kernel routine (multimodular over
/// the rationals, direct elimination elsewhere).
pub trait LinAlgField: Field {
    fn kernel(m: &Mat<Self>) -> Mat<Self> {
        m.right_kernel()
    }
}

impl LinAlgField for CycField {
    fn kernel(m: &Mat<Self>) -> Mat<Self> {
        right_kernel_cyc(m)
    }
}

impl LinAlgField for ResidueField {}
impl LinAlgField for Fp {}

/// A finite-dimensional space of truncated Laurent series in reduced
/// echelon form: pivot exponents strictly increasing, pivot coefficients 1,
/// pivot columns clean. All rows share the field and the precision.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace<F: Field> {
    pub field: F,
    pub rows: Vec<TruncatedSeries<F>>,
    pub precision: i64,
}

impl<F: LinAlgField> Subspace<F> {
    pub fn zero(field: F, precision: i64) -> Self {
        Subspace {
            field,
            rows: vec![],
            precision,
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Lowest exponent across the rows (the precision when empty).
    pub fn valuation_floor(&self) -> i64 {
        self.rows
            .iter()
            .map(|r| r.valuation)
            .min()
            .unwrap_or(self.precision)
    }

    /// Pivot exponents of the echelon rows.
    pub fn pivots(&self) -> Vec<i64> {
        self.rows.iter().map(|r| r.valuation).collect()
    }

    /// Coefficient matrix of the rows on a fixed exponent window.
    pub fn coefficient_matrix(&self, lo: i64, hi: i64) -> Mat<F> {
        let data_rows: Vec<Vec<F::Elem>> = self
            .rows
            .iter()
            .map(|r| {
                (lo..hi)
                    .map(|e| {
                        if e < r.precision && e >= r.valuation {
                            r.coeff(e)
                        } else {
                            self.field.zero()
                        }
                    })
                    .collect()
            })
            .collect();
        Mat::from_rows(self.field.clone(), data_rows)
    }

    /// Is `s` in the row space (up to the common precision)? Echelon rows
    /// make this a single reduction pass.
    pub fn contains(&self, s: &TruncatedSeries<F>) -> bool {
        let precision = self.precision.min(s.precision);
        let mut rem = s.truncate(precision);
        for row in &self.rows {
            if rem.is_zero_to_precision() {
                return true;
            }
            if rem.valuation > row.valuation {
                continue;
            }
            if rem.valuation == row.valuation {
                let c = rem.coeff(rem.valuation);
                let piv = row.coeff(row.valuation);
                let factor = self.field.div(&c, &piv);
                rem = rem
                    .sub(&row.truncate(precision).scalar_mul(&factor))
                    .expect("same field");
            } else {
                return false;
            }
        }
        rem.is_zero_to_precision()
    }
}

/// Echelonize a list of series sharing a field, at the stated common
/// precision (each row is truncated to it).
pub fn echelonize<F: LinAlgField>(
    field: &F,
    series: Vec<TruncatedSeries<F>>,
    precision: i64,
) -> Subspace<F> {
    let rows: Vec<TruncatedSeries<F>> = series
        .into_iter()
        .map(|s| {
            assert!(s.precision >= precision, "row below requested precision");
            s.truncate(precision)
        })
        .collect();
    let lo = rows.iter().map(|r| r.valuation).min().unwrap_or(precision);
    let cols = (precision - lo).max(0) as usize;
    if rows.is_empty() || cols == 0 {
        return Subspace::zero(field.clone(), precision);
    }
    let mut m = Mat::from_rows(
        field.clone(),
        rows.iter()
            .map(|r| (lo..precision).map(|e| r.coeff(e)).collect())
            .collect(),
    );
    let piv = m.rref();
    let out_rows: Vec<TruncatedSeries<F>> = (0..piv.len())
        .map(|i| {
            TruncatedSeries::from_coeffs(
                field.clone(),
                lo,
                (0..cols).map(|j| m.at(i, j).clone()).collect(),
                precision,
            )
        })
        .collect();
    Subspace {
        field: field.clone(),
        rows: out_rows,
        precision,
    }
}

/// The left kernel of the coefficient matrix of `rows` on the window
/// [lo, hi): vectors v with sum_i v_i row_i = 0 (mod q^hi).
pub fn stacked_left_kernel<F: LinAlgField>(
    field: &F,
    rows: &[TruncatedSeries<F>],
    lo: i64,
    hi: i64,
) -> Mat<F> {
    let m = Mat::from_rows(
        field.clone(),
        rows.iter()
            .map(|r| {
                (lo..hi)
                    .map(|e| {
                        if e >= r.valuation && e < r.precision {
                            r.coeff(e)
                        } else {
                            field.zero()
                        }
                    })
                    .collect()
            })
            .collect(),
    );
    F::kernel(&m.transpose())
}

/// The coefficient matrix (rows on [lo, hi)) itself, for prime-divisor
/// bookkeeping.
pub fn stacked_matrix<F: LinAlgField>(
    field: &F,
    rows: &[TruncatedSeries<F>],
    lo: i64,
    hi: i64,
) -> Mat<F> {
    Mat::from_rows(
        field.clone(),
        rows.iter()
            .map(|r| {
                (lo..hi)
                    .map(|e| {
                        if e >= r.valuation && e < r.precision {
                            r.coeff(e)
                        } else {
                            field.zero()
                        }
                    })
                    .collect()
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::cyclotomic::CycField;

    fn series(field: &CycField, v: i64, coeffs: &[i64], p: i64) -> TruncatedSeries<CycField> {
        TruncatedSeries::from_coeffs(
            field.clone(),
            v,
            coeffs.iter().map(|&c| field.from_i64(c)).collect(),
            p,
        )
    }

    #[test]
    fn echelon_and_contains() {
        let k = CycField::rationals();
        let a = series(&k, 0, &[1, 1, 0, 0], 4);
        let b = series(&k, 0, &[1, 1, 1, 0], 4);
        let w = echelonize(&k, vec![a.clone(), b.clone()], 4);
        assert_eq!(w.dim(), 2);
        assert_eq!(w.pivots(), vec![0, 2]);
        assert!(w.contains(&b));
        let c = series(&k, 1, &[1, 0, 0], 4);
        assert!(!w.contains(&c));
    }

    #[test]
    fn kernel_of_dependent_rows() {
        let k = CycField::rationals();
        let a = series(&k, 0, &[1, 2, 3], 3);
        let b = series(&k, 0, &[2, 4, 6], 3);
        let ker = stacked_left_kernel(&k, &[a, b], 0, 3);
        assert_eq!(ker.rows, 1);
    }
}

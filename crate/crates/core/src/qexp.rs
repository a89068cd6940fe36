//! Truncated Laurent q-expansions over an exact coefficient field.
//!
//! A series stores its valuation v (lowest exponent, possibly negative),
//! the coefficients a_v .. a_{P-1}, and the precision P: exponents >= P are
//! unknown. Every operation propagates the proven precision bound, never
//! more, so Sturm-bound arguments can be enforced mechanically:
//!
//!   add:        min(P_f, P_g)
//!   mul:        min(P_f + v_g, P_g + v_f)
//!   T_l:        ceil(P / l)
//!   f(q^d):     d * P
//!   g / lambda: min(P_g, P_lambda) - v_lambda

use crate::exact::cyclotomic::{CycField, FieldElement};
use crate::exact::field::Field;
use crate::exact::residue::PrimeSlot;
use crate::exact::ExactError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("coefficient fields differ")]
    FieldMismatch,
    #[error("division by a series that vanishes to its precision")]
    DivisionByZero,
    #[error("Hecke operator T_l with l equal to the residue characteristic")]
    InvalidOperator,
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// A Laurent q-expansion known exactly up to (but excluding) exponent
/// `precision`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries<F: Field> {
    pub field: F,
    /// exponent of the first stored coefficient
    pub valuation: i64,
    /// coefficients a_v, a_{v+1}, ..., a_{P-1}
    pub coeffs: Vec<F::Elem>,
    /// exponents >= precision are unknown
    pub precision: i64,
}

impl<F: Field> TruncatedSeries<F> {
    pub fn new(field: F, valuation: i64, coeffs: Vec<F::Elem>, precision: i64) -> Self {
        assert_eq!(coeffs.len() as i64, precision - valuation);
        let mut s = TruncatedSeries {
            field,
            valuation,
            coeffs,
            precision,
        };
        s.canonicalize();
        s
    }

    /// The zero series at a given precision.
    pub fn zero(field: F, precision: i64) -> Self {
        TruncatedSeries {
            field,
            valuation: precision,
            coeffs: vec![],
            precision,
        }
    }

    /// A constant c + O(q^P).
    pub fn constant(field: F, c: F::Elem, precision: i64) -> Self {
        Self::from_coeffs(field, 0, vec![c], precision)
    }

    /// Build from the coefficients starting at `valuation`, padding with
    /// zeros up to `precision`.
    pub fn from_coeffs(field: F, valuation: i64, mut coeffs: Vec<F::Elem>, precision: i64) -> Self {
        assert!(precision >= valuation);
        coeffs.truncate((precision - valuation) as usize);
        while (coeffs.len() as i64) < precision - valuation {
            coeffs.push(field.zero());
        }
        Self::new(field, valuation, coeffs, precision)
    }

    /// Strip leading zero coefficients (raising the valuation, capped at
    /// the precision).
    fn canonicalize(&mut self) {
        let mut k = 0usize;
        while k < self.coeffs.len() && self.field.is_zero(&self.coeffs[k]) {
            k += 1;
        }
        if k > 0 {
            self.coeffs.drain(..k);
            self.valuation += k as i64;
        }
    }

    /// True if every known coefficient vanishes.
    pub fn is_zero_to_precision(&self) -> bool {
        self.coeffs.iter().all(|c| self.field.is_zero(c))
    }

    /// Coefficient of q^n (zero below the valuation; panics at or beyond
    /// the precision).
    pub fn coeff(&self, n: i64) -> F::Elem {
        assert!(n < self.precision, "coefficient beyond known precision");
        if n < self.valuation {
            self.field.zero()
        } else {
            self.coeffs[(n - self.valuation) as usize].clone()
        }
    }

    /// Restrict to a smaller precision.
    pub fn truncate(&self, new_precision: i64) -> Self {
        assert!(new_precision <= self.precision);
        if new_precision <= self.valuation {
            return Self::zero(self.field.clone(), new_precision);
        }
        Self::from_coeffs(
            self.field.clone(),
            self.valuation,
            self.coeffs[..(new_precision - self.valuation) as usize].to_vec(),
            new_precision,
        )
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        if self.field != other.field {
            return Err(SeriesError::FieldMismatch);
        }
        let precision = self.precision.min(other.precision);
        let valuation = self.valuation.min(other.valuation).min(precision);
        let mut coeffs = vec![self.field.zero(); (precision - valuation) as usize];
        for s in [self, other] {
            for (i, c) in s.coeffs.iter().enumerate() {
                let e = s.valuation + i as i64;
                if e >= precision {
                    break;
                }
                let idx = (e - valuation) as usize;
                coeffs[idx] = self.field.add(&coeffs[idx], c);
            }
        }
        Ok(Self::new(self.field.clone(), valuation, coeffs, precision))
    }

    pub fn neg(&self) -> Self {
        Self {
            field: self.field.clone(),
            valuation: self.valuation,
            coeffs: self.coeffs.iter().map(|c| self.field.neg(c)).collect(),
            precision: self.precision,
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.add(&other.neg())
    }

    pub fn scalar_mul(&self, c: &F::Elem) -> Self {
        Self::new(
            self.field.clone(),
            self.valuation,
            self.coeffs.iter().map(|x| self.field.mul(c, x)).collect(),
            self.precision,
        )
    }

    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        if self.field != other.field {
            return Err(SeriesError::FieldMismatch);
        }
        let precision = (self.precision + other.valuation).min(other.precision + self.valuation);
        let valuation = (self.valuation + other.valuation).min(precision);
        let n = (precision - valuation) as usize;
        let mut coeffs = vec![self.field.zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if self.field.is_zero(a) {
                continue;
            }
            let ei = self.valuation + i as i64;
            for (j, b) in other.coeffs.iter().enumerate() {
                let e = ei + other.valuation + j as i64;
                if e >= precision {
                    break;
                }
                let t = self.field.mul(a, b);
                let idx = (e - valuation) as usize;
                coeffs[idx] = self.field.add(&coeffs[idx], &t);
            }
        }
        Ok(Self::new(self.field.clone(), valuation, coeffs, precision))
    }

    /// The Hecke operator T_l with character value chi(l) and weight k:
    /// (T f)_n = a_{ln} + chi(l) l^{k-1} a_{n/l} (second term when l | n).
    pub fn hecke_tl(&self, l: u64, chi_l: &F::Elem, k: u32) -> Result<Self, SeriesError> {
        if self.field.characteristic() == l {
            return Err(SeriesError::InvalidOperator);
        }
        let li = l as i64;
        let scale = {
            let lk = self.field.pow(&self.field.from_i64(li), (k - 1) as u64);
            self.field.mul(chi_l, &lk)
        };
        // the a_{ln} sum binds the precision: l*n < P <=> n < ceil(P/l)
        let precision = div_ceil(self.precision, li);
        let valuation = div_ceil(self.valuation, li)
            .min(li * self.valuation)
            .min(precision);
        let mut coeffs = vec![self.field.zero(); (precision - valuation) as usize];
        for n in valuation..precision {
            let mut c = self.field.zero();
            let ln = li * n;
            if ln >= self.valuation && ln < self.precision {
                c = self.coeff(ln);
            }
            if n.rem_euclid(li) == 0 {
                let m = n / li;
                if m >= self.valuation && m < self.precision {
                    let t = self.field.mul(&scale, &self.coeff(m));
                    c = self.field.add(&c, &t);
                }
            }
            coeffs[(n - valuation) as usize] = c;
        }
        Ok(Self::new(self.field.clone(), valuation, coeffs, precision))
    }

    /// f(q^d): precision and valuation scale by d.
    pub fn degeneracy(&self, d: u64) -> Self {
        assert!(d >= 1);
        let di = d as i64;
        if d == 1 {
            return self.clone();
        }
        let valuation = self.valuation * di;
        let precision = self.precision * di;
        let mut coeffs = vec![self.field.zero(); (precision - valuation) as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * d as usize] = c.clone();
        }
        Self::new(self.field.clone(), valuation, coeffs, precision)
    }

    /// Laurent quotient self / lambda. Requires lambda nonzero to its
    /// precision with invertible leading coefficient.
    pub fn divide(&self, lambda: &Self) -> Result<Self, SeriesError> {
        if self.field != lambda.field {
            return Err(SeriesError::FieldMismatch);
        }
        if lambda.is_zero_to_precision() {
            return Err(SeriesError::DivisionByZero);
        }
        let f = &self.field;
        let lead = lambda.coeffs[0].clone();
        let lead_inv = f.inv(&lead).ok_or(SeriesError::DivisionByZero)?;
        let precision = self.precision.min(lambda.precision) - lambda.valuation;
        let valuation = (self.valuation - lambda.valuation).min(precision);
        let n = (precision - valuation).max(0) as usize;
        // w = (unit part of lambda)^{-1} to n terms
        let mut w = vec![f.zero(); n];
        if n > 0 {
            w[0] = lead_inv.clone();
            for i in 1..n {
                let mut acc = f.zero();
                for j in 1..=i {
                    if j < lambda.coeffs.len() {
                        let t = f.mul(&lambda.coeffs[j], &w[i - j]);
                        acc = f.add(&acc, &t);
                    }
                }
                w[i] = f.neg(&f.mul(&lead_inv, &acc));
            }
        }
        let mut coeffs = vec![f.zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if f.is_zero(a) {
                continue;
            }
            for (j, b) in w.iter().enumerate() {
                if i + j >= n {
                    break;
                }
                let t = f.mul(a, b);
                coeffs[i + j] = f.add(&coeffs[i + j], &t);
            }
        }
        Ok(Self::new(f.clone(), valuation, coeffs, precision))
    }
}

fn div_ceil(a: i64, b: i64) -> i64 {
    debug_assert!(b > 0);
    if a >= 0 {
        (a + b - 1) / b
    } else {
        -((-a) / b)
    }
}

/// Reduce a series over K coefficient-wise at a prime slot.
pub fn reduce_series(
    s: &TruncatedSeries<CycField>,
    slot: &PrimeSlot,
) -> Result<TruncatedSeries<crate::exact::residue::ResidueField>, SeriesError> {
    let kappa = slot.residue_field();
    let mut coeffs = Vec::with_capacity(s.coeffs.len());
    for c in &s.coeffs {
        let fe = FieldElement::new(s.field.clone(), c.clone());
        coeffs.push(slot.reduce(&fe)?);
    }
    Ok(TruncatedSeries::new(
        kappa,
        s.valuation,
        coeffs,
        s.precision,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::cyclotomic::CycField;
    use crate::exact::residue::ResidueField;

    fn qq() -> CycField {
        CycField::rationals()
    }

    fn series(field: &CycField, v: i64, coeffs: &[i64], p: i64) -> TruncatedSeries<CycField> {
        TruncatedSeries::from_coeffs(
            field.clone(),
            v,
            coeffs.iter().map(|&c| field.from_i64(c)).collect(),
            p,
        )
    }

    #[test]
    fn mul_and_add_basics() {
        let k = qq();
        // (1+q)(1-q) = 1 - q^2 at precision 3
        let a = series(&k, 0, &[1, 1, 0], 3);
        let b = series(&k, 0, &[1, -1, 0], 3);
        let p = a.mul(&b).unwrap();
        assert_eq!(p.precision, 3);
        assert_eq!(p.coeff(0), k.from_i64(1));
        assert_eq!(p.coeff(1), k.from_i64(0));
        assert_eq!(p.coeff(2), k.from_i64(-1));

        // f + (-f) = 0 with precision P_f
        let z = a.add(&a.neg()).unwrap();
        assert!(z.is_zero_to_precision());
        assert_eq!(z.precision, 3);

        // (q^{-1} + 1)(q) = 1 + q, valuation 0
        let c = series(&k, -1, &[1, 1, 0, 0], 3);
        let d = series(&k, 1, &[1, 0], 3);
        let e = c.mul(&d).unwrap();
        assert_eq!(e.valuation, 0);
        assert_eq!(e.coeff(0), k.from_i64(1));
        assert_eq!(e.coeff(1), k.from_i64(1));
    }

    #[test]
    fn hecke_examples() {
        let k = qq();
        // constant c, k=1, chi_l = 1 -> constant 2c
        let c = series(&k, 0, &[7, 0, 0, 0, 0, 0], 6);
        let t = c.hecke_tl(2, &k.one(), 1).unwrap();
        assert_eq!(t.coeff(0), k.from_i64(14));

        // f = q, l = 2, k = 1, chi = 1 -> q^2
        let f = series(&k, 1, &[1, 0, 0, 0, 0], 6);
        let t = f.hecke_tl(2, &k.one(), 1).unwrap();
        assert_eq!(t.precision, 3);
        assert_eq!(t.coeff(2), k.from_i64(1));
        assert_eq!(t.coeff(1), k.from_i64(0));

        // valuation -1, l = 2 -> output valuation -2
        let g = series(&k, -1, &[1, 0, 0, 0, 0, 0, 0], 6);
        let t = g.hecke_tl(2, &k.one(), 1).unwrap();
        assert_eq!(t.valuation, -2);
        assert_eq!(t.coeff(-2), k.from_i64(1));
    }

    #[test]
    fn degeneracy_examples() {
        let k = qq();
        let f = series(&k, 0, &[1, 1, 0], 3);
        let g = f.degeneracy(3);
        assert_eq!(g.precision, 9);
        assert_eq!(g.coeff(0), k.from_i64(1));
        assert_eq!(g.coeff(3), k.from_i64(1));
        assert_eq!(g.coeff(1), k.from_i64(0));
        assert_eq!(f.degeneracy(1), f);

        // (q - q^2, d=2) at P=3 -> q^2 - q^4, precision 6
        let h = series(&k, 1, &[1, -1], 3).degeneracy(2);
        assert_eq!(h.precision, 6);
        assert_eq!(h.valuation, 2);
        assert_eq!(h.coeff(2), k.from_i64(1));
        assert_eq!(h.coeff(4), k.from_i64(-1));
    }

    #[test]
    fn divide_geometric_oracle() {
        let k = qq();
        // q / (1+q) = q - q^2 + q^3 - ... ; geometric-series oracle
        let g = series(&k, 1, &[1, 0, 0], 4);
        let lam = series(&k, 0, &[1, 1, 0, 0], 4);
        let q = g.divide(&lam).unwrap();
        assert_eq!(q.valuation, 1);
        assert_eq!(q.precision, 4);
        assert_eq!(q.coeff(1), k.from_i64(1));
        assert_eq!(q.coeff(2), k.from_i64(-1));
        assert_eq!(q.coeff(3), k.from_i64(1));

        // g = lambda -> 1
        let one = lam.divide(&lam).unwrap();
        assert_eq!(one.coeff(0), k.from_i64(1));
        assert!(one.coeffs.iter().skip(1).all(|c| k.is_zero(c)));

        // q^2 / q = q
        let num = series(&k, 2, &[1, 0], 4);
        let den = series(&k, 1, &[1, 0, 0], 4);
        let r = num.divide(&den).unwrap();
        assert_eq!(r.valuation, 1);
        assert_eq!(r.coeff(1), k.from_i64(1));
    }

    #[test]
    fn divide_then_multiply_roundtrip() {
        let k = qq();
        let f = series(&k, 0, &[2, 3, -1, 4, 0, 5], 6);
        let g = series(&k, 0, &[1, -2, 1, 1, 2, -3], 6);
        let fg = f.mul(&g).unwrap();
        let back = fg.divide(&g).unwrap();
        let expect = f.truncate(back.precision);
        assert_eq!(back, expect);
    }

    #[test]
    fn hecke_linearity_and_reduction_commute() {
        let k = qq();
        let f = series(&k, 0, &[3, 1, 4, 1, 5, 9, 2, 6], 8);
        let g = series(&k, 0, &[2, 7, 1, 8, 2, 8, 1, 8], 8);
        let a = k.from_i64(5);
        let b = k.from_i64(-3);
        let lhs = f
            .scalar_mul(&a)
            .add(&g.scalar_mul(&b))
            .unwrap()
            .hecke_tl(3, &k.one(), 1)
            .unwrap();
        let rhs = f
            .hecke_tl(3, &k.one(), 1)
            .unwrap()
            .scalar_mul(&a)
            .add(&g.hecke_tl(3, &k.one(), 1).unwrap().scalar_mul(&b))
            .unwrap();
        assert_eq!(lhs, rhs);

        // reduce then T equals T then reduce at a good slot
        let slot = crate::exact::residue::primes_above(7, 1)
            .unwrap()
            .pop()
            .unwrap();
        let red_then_t = reduce_series(&f, &slot)
            .unwrap()
            .hecke_tl(3, &ResidueField::prime_field(7).one(), 1)
            .unwrap();
        let t_then_red = reduce_series(&f.hecke_tl(3, &k.one(), 1).unwrap(), &slot).unwrap();
        assert_eq!(red_then_t, t_then_red);
    }

    #[test]
    fn hecke_rejects_residue_characteristic() {
        let kappa = ResidueField::prime_field(5);
        let f = TruncatedSeries::constant(kappa.clone(), kappa.one(), 10);
        assert!(matches!(
            f.hecke_tl(5, &kappa.one(), 1),
            Err(SeriesError::InvalidOperator)
        ));
    }

    #[test]
    fn degeneracy_composes() {
        let k = qq();
        let f = series(&k, 0, &[1, 2, 3, 4], 4);
        let ab = f.degeneracy(2).degeneracy(3);
        let d6 = f.degeneracy(6);
        assert_eq!(ab, d6);
    }
}

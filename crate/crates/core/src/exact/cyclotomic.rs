//! The coefficient field K = Q(zeta_m), realized as Q[x] modulo the m-th
//! cyclotomic polynomial. m = 1 and m = 2 both give K = Q with degree 1,
//! so rational arithmetic is the degenerate case of the same code path.
//!
//! Elements are coefficient vectors of length phi(m) in the power basis
//! 1, zeta, ..., zeta^{phi(m)-1}; arithmetic is exact, equality is
//! coefficient-wise on canonical (fully reduced) forms.

use super::field::Field;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Coefficients of the m-th cyclotomic polynomial, monic, ascending degree.
pub fn cyclotomic_polynomial(m: u32) -> Vec<BigInt> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Vec<BigInt>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&m) {
        return p.clone();
    }
    // x^m - 1 divided by the product of Phi_d for proper divisors d of m.
    let mut num = vec![BigInt::zero(); m as usize + 1];
    num[0] = -BigInt::one();
    num[m as usize] = BigInt::one();
    let mut result = num;
    for d in 1..m {
        if m % d == 0 {
            let phi_d = cyclotomic_polynomial(d);
            result = poly_exact_div_int(&result, &phi_d);
        }
    }
    cache.lock().unwrap().insert(m, result.clone());
    result
}

/// Exact division of integer polynomials (remainder must vanish).
fn poly_exact_div_int(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dd = den.len() - 1;
    assert!(den[dd].is_one(), "divisor must be monic");
    let mut rem = num.to_vec();
    let dn = rem.len() - 1;
    let mut quot = vec![BigInt::zero(); dn - dd + 1];
    for i in (0..=dn - dd).rev() {
        let c = rem[i + dd].clone();
        quot[i] = c.clone();
        for j in 0..=dd {
            rem[i + j] -= &c * &den[j];
        }
    }
    assert!(rem.iter().all(|c| c.is_zero()), "inexact division");
    quot
}

#[derive(Debug)]
struct CycInner {
    m: u32,
    degree: usize,
    modulus: Vec<BigInt>,
    /// reduction_rows[k] = coefficients of x^{degree+k} mod Phi_m,
    /// for k = 0 .. degree-2 (enough to reduce products).
    reduction_rows: Vec<Vec<BigInt>>,
}

/// The cyclotomic field Q(zeta_m); cheap to clone (shared inner).
#[derive(Clone, Debug)]
pub struct CycField(Arc<CycInner>);

impl PartialEq for CycField {
    fn eq(&self, other: &Self) -> bool {
        self.0.m == other.0.m
    }
}

impl CycField {
    pub fn new(m: u32) -> Self {
        assert!(m >= 1);
        let modulus = cyclotomic_polynomial(m);
        let degree = modulus.len() - 1;
        let mut reduction_rows: Vec<Vec<BigInt>> = Vec::new();
        if degree > 0 {
            // x^degree = -(lower part of Phi)
            let mut row: Vec<BigInt> = modulus[..degree].iter().map(|c| -c).collect();
            reduction_rows.push(row.clone());
            for _ in 1..degree.saturating_sub(1) {
                // multiply previous row by x and reduce
                let carry = row[degree - 1].clone();
                let mut next = vec![BigInt::zero(); degree];
                for i in (1..degree).rev() {
                    next[i] = row[i - 1].clone();
                }
                for (i, r0) in reduction_rows[0].iter().enumerate() {
                    next[i] += &carry * r0;
                }
                reduction_rows.push(next.clone());
                row = next;
            }
        }
        CycField(Arc::new(CycInner {
            m,
            degree,
            modulus,
            reduction_rows,
        }))
    }

    /// K = Q.
    pub fn rationals() -> Self {
        Self::new(1)
    }

    pub fn order(&self) -> u32 {
        self.0.m
    }

    pub fn degree(&self) -> usize {
        self.0.degree
    }

    pub fn modulus(&self) -> &[BigInt] {
        &self.0.modulus
    }

    pub fn is_rational(&self) -> bool {
        self.0.degree == 1
    }

    /// The generator zeta_m as an element (for m <= 2 this is +-1).
    pub fn zeta(&self) -> Vec<BigRational> {
        let mut v = vec![BigRational::zero(); self.0.degree];
        if self.0.degree == 1 {
            // zeta_1 = 1, zeta_2 = -1: the root of x -/+ 1
            v[0] = BigRational::from(-self.0.modulus[0].clone());
        } else {
            v[1] = BigRational::one();
        }
        v
    }

    /// zeta_m^e for any integer exponent e.
    pub fn zeta_pow(&self, e: i64) -> Vec<BigRational> {
        let m = self.0.m as i64;
        let e = e.rem_euclid(m) as u64;
        self.pow(&self.zeta(), e)
    }

    pub fn from_rational(&self, q: BigRational) -> Vec<BigRational> {
        let mut v = vec![BigRational::zero(); self.0.degree];
        v[0] = q;
        v
    }

    /// Reduce a product polynomial (length <= 2*degree-1) mod Phi_m.
    fn reduce_poly(&self, poly: &[BigRational]) -> Vec<BigRational> {
        let d = self.0.degree;
        let mut out: Vec<BigRational> = poly.iter().take(d).cloned().collect();
        out.resize(d, BigRational::zero());
        for (k, row) in self.0.reduction_rows.iter().enumerate() {
            if d + k >= poly.len() {
                break;
            }
            let c = &poly[d + k];
            if c.is_zero() {
                continue;
            }
            for (i, r) in row.iter().enumerate() {
                if !r.is_zero() {
                    out[i] += c * BigRational::from(r.clone());
                }
            }
        }
        out
    }

    /// Field norm N_{K/Q}(a), computed as the determinant of the
    /// multiplication-by-a matrix in the power basis.
    pub fn norm(&self, a: &[BigRational]) -> BigRational {
        let d = self.0.degree;
        if d == 1 {
            return a[0].clone();
        }
        // columns: a * zeta^j
        let mut cols: Vec<Vec<BigRational>> = Vec::with_capacity(d);
        let mut cur = a.to_vec();
        cols.push(cur.clone());
        for _ in 1..d {
            // multiply by zeta: shift and reduce via row 0
            let carry = cur[d - 1].clone();
            let mut next = vec![BigRational::zero(); d];
            for i in (1..d).rev() {
                next[i] = cur[i - 1].clone();
            }
            if !carry.is_zero() {
                for (i, r) in self.0.reduction_rows[0].iter().enumerate() {
                    next[i] += &carry * BigRational::from(r.clone());
                }
            }
            cols.push(next.clone());
            cur = next;
        }
        rational_det(cols)
    }

    /// lcm of the denominators of all coordinates.
    pub fn denominator_lcm(&self, a: &[BigRational]) -> BigUint {
        let mut l = BigUint::one();
        for c in a {
            l = l.lcm(&c.denom().magnitude().clone());
        }
        l
    }
}

/// Determinant of a small square rational matrix (columns given), by
/// Gaussian elimination. Used for field norms only.
fn rational_det(mut cols: Vec<Vec<BigRational>>) -> BigRational {
    let n = cols.len();
    let mut det = BigRational::one();
    for i in 0..n {
        let mut piv = None;
        for (j, col) in cols.iter().enumerate().skip(i) {
            if !col[i].is_zero() {
                piv = Some(j);
                break;
            }
        }
        let Some(p) = piv else {
            return BigRational::zero();
        };
        if p != i {
            cols.swap(i, p);
            det = -det;
        }
        let pivot = cols[i][i].clone();
        det *= &pivot;
        let col_i = cols[i].clone();
        for col in cols.iter_mut().skip(i + 1) {
            if col[i].is_zero() {
                continue;
            }
            let f = &col[i] / &pivot;
            for r in i..n {
                let t = &f * &col_i[r];
                col[r] -= t;
            }
        }
    }
    det
}

impl Field for CycField {
    type Elem = Vec<BigRational>;

    fn zero(&self) -> Self::Elem {
        vec![BigRational::zero(); self.0.degree]
    }

    fn one(&self) -> Self::Elem {
        let mut v = vec![BigRational::zero(); self.0.degree];
        v[0] = BigRational::one();
        v
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.iter().all(|c| c.is_zero())
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        a.iter().map(|x| -x).collect()
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let d = self.0.degree;
        if d == 1 {
            return vec![&a[0] * &b[0]];
        }
        let mut prod = vec![BigRational::zero(); 2 * d - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                prod[i + j] += x * y;
            }
        }
        self.reduce_poly(&prod)
    }

    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem> {
        if self.is_zero(a) {
            return None;
        }
        let d = self.0.degree;
        if d == 1 {
            return Some(vec![BigRational::one() / &a[0]]);
        }
        // extended Euclid in Q[x] against Phi_m
        let modulus: Vec<BigRational> = self
            .0
            .modulus
            .iter()
            .map(|c| BigRational::from(c.clone()))
            .collect();
        let mut r0 = modulus;
        let mut r1: Vec<BigRational> = a.to_vec();
        trim(&mut r1);
        let mut s0: Vec<BigRational> = vec![];
        let mut s1: Vec<BigRational> = vec![BigRational::one()];
        while !r1.is_empty() {
            let (q, r) = poly_divrem(&r0, &r1);
            let s = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        // r0 = gcd (nonzero constant since Phi_m is irreducible over Q)
        assert_eq!(r0.len(), 1, "cyclotomic modulus must be irreducible");
        let c = r0[0].clone();
        let mut out: Vec<BigRational> = s0.iter().map(|x| x / &c).collect();
        out.resize(d, BigRational::zero());
        Some(self.reduce_poly(&out))
    }

    fn from_i64(&self, n: i64) -> Self::Elem {
        self.from_rational(BigRational::from(BigInt::from(n)))
    }

    fn characteristic(&self) -> u64 {
        0
    }
}

fn trim(p: &mut Vec<BigRational>) {
    while let Some(last) = p.last() {
        if last.is_zero() {
            p.pop();
        } else {
            break;
        }
    }
}

fn poly_divrem(
    num: &[BigRational],
    den: &[BigRational],
) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut rem = num.to_vec();
    trim(&mut rem);
    let dd = den.len() - 1;
    let lead = &den[dd];
    if rem.len() <= dd {
        return (vec![], rem);
    }
    let mut quot = vec![BigRational::zero(); rem.len() - dd];
    for i in (0..=rem.len() - 1 - dd).rev() {
        let c = &rem[i + dd] / lead;
        quot[i] = c.clone();
        if c.is_zero() {
            continue;
        }
        for j in 0..=dd {
            let t = &c * &den[j];
            rem[i + j] -= t;
        }
    }
    trim(&mut rem);
    (quot, rem)
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let mut out = vec![BigRational::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    let mut out = out;
    trim(&mut out);
    out
}

/// An element of K = Q(zeta_m) bundled with its field, for use at API
/// boundaries (character values, Bernoulli numbers, determinants).
#[derive(Clone, Debug, PartialEq)]
pub struct FieldElement {
    pub field: CycField,
    pub coeffs: Vec<BigRational>,
}

impl FieldElement {
    pub fn new(field: CycField, coeffs: Vec<BigRational>) -> Self {
        assert_eq!(coeffs.len(), field.degree());
        FieldElement { field, coeffs }
    }

    pub fn from_rational(field: CycField, q: BigRational) -> Self {
        let coeffs = field.from_rational(q);
        FieldElement { field, coeffs }
    }

    pub fn from_int(field: CycField, n: i64) -> Self {
        let coeffs = field.from_i64(n);
        FieldElement { field, coeffs }
    }

    pub fn zeta(field: CycField) -> Self {
        let coeffs = field.zeta();
        FieldElement { field, coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.field.is_zero(&self.coeffs)
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs.iter().skip(1).all(|c| c.is_zero())
    }

    /// The rational value, if the element lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.is_rational() {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn norm(&self) -> BigRational {
        self.field.norm(&self.coeffs)
    }

    /// lcm of coordinate denominators.
    pub fn denominator_lcm(&self) -> BigUint {
        self.field.denominator_lcm(&self.coeffs)
    }

    /// Numerator after clearing denominators: (d * self, d).
    pub fn clear_denominators(&self) -> (FieldElement, BigUint) {
        let d = self.denominator_lcm();
        let df = FieldElement::from_rational(
            self.field.clone(),
            BigRational::from(BigInt::from(d.clone())),
        );
        (self.mul(&df), d)
    }

    pub fn add(&self, other: &FieldElement) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            coeffs: self.field.add(&self.coeffs, &other.coeffs),
        }
    }

    pub fn sub(&self, other: &FieldElement) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            coeffs: self.field.sub(&self.coeffs, &other.coeffs),
        }
    }

    pub fn mul(&self, other: &FieldElement) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            coeffs: self.field.mul(&self.coeffs, &other.coeffs),
        }
    }

    pub fn inv(&self) -> Option<FieldElement> {
        self.field.inv(&self.coeffs).map(|coeffs| FieldElement {
            field: self.field.clone(),
            coeffs,
        })
    }

    /// Absolute norm of the numerator ideal data: |N(d*self)| in Z where d
    /// clears denominators.
    pub fn cleared_norm_abs(&self) -> BigUint {
        let (num, _) = self.clear_denominators();
        let n = num.norm();
        debug_assert!(n.is_integer());
        n.numer().abs().to_biguint().unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn cyclotomic_polys() {
        // Phi_1 = x - 1, Phi_2 = x + 1, Phi_4 = x^2 + 1, Phi_12 = x^4 - x^2 + 1
        let to_i = |v: Vec<i64>| -> Vec<BigInt> { v.into_iter().map(BigInt::from).collect() };
        assert_eq!(cyclotomic_polynomial(1), to_i(vec![-1, 1]));
        assert_eq!(cyclotomic_polynomial(2), to_i(vec![1, 1]));
        assert_eq!(cyclotomic_polynomial(4), to_i(vec![1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(12), to_i(vec![1, 0, -1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(5), to_i(vec![1, 1, 1, 1, 1]));
        // degree phi(100) = 40
        assert_eq!(cyclotomic_polynomial(100).len() - 1, 40);
    }

    #[test]
    fn rational_field_arithmetic() {
        let k = CycField::rationals();
        let a = k.from_rational(q(3, 2));
        let b = k.from_rational(q(-1, 3));
        assert_eq!(k.mul(&a, &b), k.from_rational(q(-1, 2)));
        assert_eq!(k.inv(&a).unwrap(), k.from_rational(q(2, 3)));
        assert_eq!(k.norm(&a), q(3, 2));
    }

    #[test]
    fn zeta4_squares_to_minus_one() {
        let k = CycField::new(4);
        let z = k.zeta();
        let z2 = k.mul(&z, &z);
        assert_eq!(z2, k.from_i64(-1));
        let z4 = k.mul(&z2, &z2);
        assert_eq!(z4, k.one());
        // inverse of zeta is zeta^3 = -zeta
        let zi = k.inv(&z).unwrap();
        assert_eq!(zi, k.neg(&z));
    }

    #[test]
    fn zeta5_norm_and_inverse() {
        let k = CycField::new(5);
        let z = k.zeta();
        // N(1 - zeta_5) = Phi_5(1) = 5
        let one_minus_z = k.sub(&k.one(), &z);
        assert_eq!(k.norm(&one_minus_z), BigRational::from(BigInt::from(5)));
        let zi = k.inv(&z).unwrap();
        assert_eq!(k.mul(&z, &zi), k.one());
        // random-ish element times its inverse
        let a = k.add(&k.from_i64(3), &k.mul(&z, &k.from_i64(7)));
        let ai = k.inv(&a).unwrap();
        assert_eq!(k.mul(&a, &ai), k.one());
    }

    #[test]
    fn zeta2_is_minus_one() {
        let k = CycField::new(2);
        assert_eq!(k.zeta(), k.from_i64(-1));
        assert_eq!(k.zeta_pow(3), k.from_i64(-1));
        assert_eq!(k.zeta_pow(2), k.one());
    }

    #[test]
    fn field_element_clearing() {
        let k = CycField::new(4);
        let z = FieldElement::zeta(k.clone());
        let half = FieldElement::from_rational(k.clone(), q(1, 2));
        let x = z.mul(&half).add(&FieldElement::from_int(k, 3));
        let (num, d) = x.clear_denominators();
        assert_eq!(d, BigUint::from(2u32));
        assert!(num.coeffs.iter().all(|c| c.is_integer()));
    }
}

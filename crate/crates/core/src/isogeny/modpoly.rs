//! Classical modular polynomials Phi_l(X, Y) for small l.
//!
//! Phi_2 and Phi_3 are embedded constants. Phi_5 is produced (and all
//! three are independently validated) by the q-expansion construction:
//! Phi_l(X, j(tau)) = (X - j(l tau)) prod_i (X - j((tau + i)/l)), whose
//! elementary symmetric functions are integer Laurent polynomials in
//! j(tau), extracted by matching pole orders in q^{1/l}.

use crate::exact::cyclotomic::CycField;
use crate::exact::field::Field;
use crate::qexp::TruncatedSeries;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// A symmetric bivariate integer polynomial: coeffs[a][b] is the
/// coefficient of X^a Y^b, with 0 <= a, b <= l+1.
#[derive(Debug, Clone, PartialEq)]
pub struct ModularPolynomial {
    pub ell: u64,
    pub coeffs: Vec<Vec<BigInt>>,
}

impl ModularPolynomial {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, a: usize, b: usize) -> &BigInt {
        &self.coeffs[a][b]
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.coeffs.len();
        (0..n).all(|a| (0..n).all(|b| self.coeffs[a][b] == self.coeffs[b][a]))
    }

    /// Phi_l(x, Y) as a univariate polynomial in Y over a field, for a
    /// given x value.
    pub fn evaluate_first<F: Field>(&self, field: &F, x: &F::Elem) -> Vec<F::Elem> {
        let n = self.coeffs.len();
        let mut out = vec![field.zero(); n];
        let mut xp = field.one();
        for a in 0..n {
            for (b, c) in self.coeffs[a].iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let cf = bigint_in(field, c);
                let t = field.mul(&cf, &xp);
                out[b] = field.add(&out[b], &t);
            }
            xp = field.mul(&xp, x);
        }
        while out.last().map(|c| field.is_zero(c)).unwrap_or(false) {
            out.pop();
        }
        out
    }
}

pub fn bigint_in<F: Field>(field: &F, c: &BigInt) -> F::Elem {
    let p = field.characteristic();
    if p == 0 {
        // only the cyclotomic field implements characteristic 0 here
        let mag = c.magnitude().to_string();
        let mut acc = field.zero();
        let ten = field.from_i64(10);
        for d in mag.bytes() {
            acc = field.mul(&acc, &ten);
            acc = field.add(&acc, &field.from_i64((d - b'0') as i64));
        }
        if c.is_negative() {
            acc = field.neg(&acc);
        }
        acc
    } else {
        use num_traits::ToPrimitive;
        let m = (c.magnitude() % num_bigint::BigUint::from(p)).to_u64().unwrap();
        let v = if c.is_negative() && m != 0 {
            field.from_i64((p - m) as i64)
        } else {
            field.from_i64(m as i64)
        };
        v
    }
}

const PHI2: [[i64; 4]; 4] = [
    // constant, Y, Y^2, Y^3 coefficients for X^0..X^3 rows; the large
    // constants live in the strings below
    [0, 0, 0, 1],
    [0, 0, 0, 0],
    [0, 0, -1, 0],
    [1, 0, 0, 0],
];

fn phi2_embedded() -> ModularPolynomial {
    // Phi_2(X,Y) = X^3 + Y^3 - X^2 Y^2 + 1488 (X^2 Y + X Y^2)
    //   - 162000 (X^2 + Y^2) + 40773375 X Y
    //   + 8748000000 (X + Y) - 157464000000000
    let mut c = vec![vec![BigInt::zero(); 4]; 4];
    c[3][0] = BigInt::one();
    c[0][3] = BigInt::one();
    c[2][2] = BigInt::from(-1);
    c[2][1] = BigInt::from(1488);
    c[1][2] = BigInt::from(1488);
    c[2][0] = BigInt::from(-162000);
    c[0][2] = BigInt::from(-162000);
    c[1][1] = BigInt::from(40773375i64);
    c[1][0] = BigInt::from(8748000000i64);
    c[0][1] = BigInt::from(8748000000i64);
    c[0][0] = BigInt::from(-157464000000000i64);
    let _ = PHI2;
    ModularPolynomial { ell: 2, coeffs: c }
}

fn phi3_embedded() -> ModularPolynomial {
    // Phi_3(X,Y) = X^4 + Y^4 - X^3 Y^3 + 2232 (X^3 Y^2 + X^2 Y^3)
    //   - 1069956 (X^3 Y + X Y^3) + 36864000 (X^3 + Y^3)
    //   + 2587918086 X^2 Y^2 + 8900222976000 (X^2 Y + X Y^2)
    //   + 452984832000000 (X^2 + Y^2) - 770845966336000000 X Y
    //   + 1855425871872000000000 (X + Y)
    let big = |s: &str| s.parse::<BigInt>().unwrap();
    let mut c = vec![vec![BigInt::zero(); 5]; 5];
    c[4][0] = BigInt::one();
    c[0][4] = BigInt::one();
    c[3][3] = BigInt::from(-1);
    c[3][2] = BigInt::from(2232);
    c[2][3] = BigInt::from(2232);
    c[3][1] = BigInt::from(-1069956);
    c[1][3] = BigInt::from(-1069956);
    c[3][0] = big("36864000");
    c[0][3] = big("36864000");
    c[2][2] = big("2587918086");
    c[2][1] = big("8900222976000");
    c[1][2] = big("8900222976000");
    c[2][0] = big("452984832000000");
    c[0][2] = big("452984832000000");
    c[1][1] = big("-770845966336000000");
    c[1][0] = big("1855425871872000000000");
    c[0][1] = big("1855425871872000000000");
    ModularPolynomial { ell: 3, coeffs: c }
}

/// The modular polynomial for l in {2, 3, 5}: embedded constants for 2
/// and 3, the q-expansion construction for 5 (cached). All are validated
/// against the construction in the test suite.
pub fn modular_polynomial(ell: u64) -> Result<ModularPolynomial, String> {
    static CACHE: OnceLock<Mutex<HashMap<u64, ModularPolynomial>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(m) = cache.lock().unwrap().get(&ell) {
        return Ok(m.clone());
    }
    let m = match ell {
        2 => phi2_embedded(),
        3 => phi3_embedded(),
        5 => compute_modular_polynomial(5),
        _ => return Err(format!("modular polynomial for l = {ell} not embedded")),
    };
    cache.lock().unwrap().insert(ell, m.clone());
    Ok(m)
}

/// Construct Phi_l from the j-expansion, exactly.
pub fn compute_modular_polynomial(ell: u64) -> ModularPolynomial {
    let l = ell as i64;
    let m_ord = if ell == 2 { 2 } else { ell as u32 };
    let field = CycField::new(m_ord);
    // u = q^{1/l}; poles reach -(l^2 + l), and the Laurent products
    // contract precision by the total pole order, so both the working
    // precision and the j-expansion carry a 2x budget
    let depth = l * l + l;
    let work_prec = 2 * depth + 4;
    let jprec = work_prec + 2;
    let (_, _, _, j) = crate::eisenstein::eis_level1(jprec.max(4));
    // conjugate 0: j(l tau): u-exponent l^2 * n
    let mut conjugates: Vec<TruncatedSeries<CycField>> = Vec::new();
    {
        let lo = -l * l;
        let len = (work_prec - lo) as usize;
        let mut coeffs: Vec<Vec<BigRational>> = vec![field.zero(); len];
        for n in j.valuation..j.precision {
            let e = l * l * n - lo;
            if e >= 0 && (e as usize) < len {
                coeffs[e as usize] = field.from_rational(j.coeff(n)[0].clone());
            }
        }
        conjugates.push(TruncatedSeries::from_coeffs(
            field.clone(),
            lo,
            coeffs,
            work_prec,
        ));
    }
    // conjugates i = 0..l-1: j((tau + i)/l): coefficient a_n zeta^{i n} u^n
    for i in 0..l {
        let lo = j.valuation;
        let mut coeffs = Vec::new();
        for n in j.valuation..j.precision.min(work_prec) {
            let z = field.zeta_pow(i * n);
            let c = field.mul(&z, &field.from_rational(j.coeff(n)[0].clone()));
            coeffs.push(c);
        }
        let precision = lo + coeffs.len() as i64;
        conjugates.push(TruncatedSeries::from_coeffs(field.clone(), lo, coeffs, precision));
    }
    // elementary symmetric functions by expanding prod (X - f_i)
    // poly_in_x[k] = coefficient of X^k, a u-series
    let one_series = TruncatedSeries::constant(field.clone(), field.one(), work_prec);
    let mut poly_in_x: Vec<TruncatedSeries<CycField>> = vec![one_series];
    for f in &conjugates {
        let mut next: Vec<TruncatedSeries<CycField>> = Vec::with_capacity(poly_in_x.len() + 1);
        // multiply (current polynomial) by (X - f)
        for k in 0..=poly_in_x.len() {
            let from_lower = if k >= 1 {
                Some(poly_in_x[k - 1].clone())
            } else {
                None
            };
            let from_same = if k < poly_in_x.len() {
                Some(poly_in_x[k].mul(&f.neg()).expect("same field"))
            } else {
                None
            };
            let s = match (from_lower, from_same) {
                (Some(a), Some(b)) => a.add(&b).expect("same field"),
                (Some(a), None) => a,
                (None, Some(b)) => b,
                (None, None) => unreachable!(),
            };
            next.push(s);
        }
        poly_in_x = next;
    }
    // j-power ladder as u-series: j(tau) in u has exponents l*n
    let j_in_u = {
        let lo = -l;
        let mut coeffs = Vec::new();
        for n in j.valuation..j.precision.min(work_prec / l + 1) {
            let e = l * n;
            while (coeffs.len() as i64) < e - lo {
                coeffs.push(field.zero());
            }
            coeffs.push(field.from_rational(j.coeff(n)[0].clone()));
        }
        let precision = lo + coeffs.len() as i64;
        TruncatedSeries::from_coeffs(field.clone(), lo, coeffs, precision)
    };
    let deg = (l + 1) as usize;
    let mut jpow: Vec<TruncatedSeries<CycField>> = Vec::with_capacity(deg + 1);
    jpow.push(TruncatedSeries::constant(field.clone(), field.one(), work_prec));
    for k in 1..=deg {
        let next = jpow[k - 1].mul(&j_in_u).expect("same field");
        jpow.push(next);
    }
    // express each X-coefficient as an integer polynomial in j by pole
    // matching
    let n_terms = deg + 1;
    let mut coeffs_xy = vec![vec![BigInt::zero(); n_terms]; n_terms];
    for (k, series) in poly_in_x.iter().enumerate() {
        assert!(
            series.precision >= 1,
            "insufficient precision in the symmetric expansion"
        );
        let mut rem = series.truncate(1);
        let mut out = vec![BigInt::zero(); n_terms];
        loop {
            if rem.is_zero_to_precision() {
                break;
            }
            let v = rem.valuation;
            assert!(v <= 0, "nonconstant tail in symmetric function");
            assert_eq!(
                v % l,
                0,
                "pole order not a multiple of l in symmetric function"
            );
            let m_pow = (-v / l) as usize;
            assert!(m_pow < n_terms);
            let lead = rem.coeff(v);
            let lead_fe = crate::exact::cyclotomic::FieldElement::new(field.clone(), lead.clone());
            let lead_q = lead_fe
                .as_rational()
                .expect("symmetric function has rational coefficients");
            assert!(lead_q.is_integer(), "non-integral modular polynomial");
            let c = lead_q.to_integer();
            out[m_pow] = c.clone();
            let scaled = jpow[m_pow]
                .truncate(rem.precision.min(jpow[m_pow].precision))
                .scalar_mul(&field.from_rational(BigRational::from(c)));
            rem = rem.truncate(scaled.precision.min(rem.precision));
            rem = rem.sub(&scaled).expect("same field");
        }
        for (m_pow, c) in out.into_iter().enumerate() {
            coeffs_xy[k][m_pow] = c;
        }
    }
    let phi = ModularPolynomial {
        ell,
        coeffs: coeffs_xy,
    };
    assert!(phi.is_symmetric(), "modular polynomial must be symmetric");
    phi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::residue::Fp;

    #[test]
    fn phi2_anchors() {
        let phi = modular_polynomial(2).unwrap();
        // Phi_2(0, Y) = (Y - 54000)^3
        let k = CycField::rationals();
        let at0 = phi.evaluate_first(&k, &k.zero());
        let expect = [
            BigInt::from(-157464000000000i64),
            BigInt::from(8748000000i64),
            BigInt::from(-162000),
            BigInt::one(),
        ];
        for (c, e) in at0.iter().zip(&expect) {
            assert_eq!(c[0], BigRational::from(e.clone()));
        }
        // (Y - 54000)^3 expanded: -54000^3 = -157464000000000,
        // 3*54000^2 = 8748000000, -3*54000 = -162000
        assert_eq!(BigInt::from(54000i64).pow(3), BigInt::from(157464000000000i64));

        // Phi_2(54000, Y) = Y (Y^2 - 2835810000 Y + 6549518250000)
        let at54000 = phi.evaluate_first(&k, &k.from_i64(54000));
        assert!(k.is_zero(&at54000[0]));
        assert_eq!(at54000[1][0], BigRational::from(BigInt::from(6549518250000i64)));
        assert_eq!(at54000[2][0], BigRational::from(BigInt::from(-2835810000i64)));
        assert_eq!(at54000[3][0], BigRational::one());
    }

    #[test]
    fn phi2_phi3_match_construction() {
        assert_eq!(compute_modular_polynomial(2), modular_polynomial(2).unwrap());
        assert_eq!(compute_modular_polynomial(3), modular_polynomial(3).unwrap());
    }

    #[test]
    fn phi3_zero_column() {
        // Phi_3(0, Y) = Y (Y + 12288000)^3
        let phi = modular_polynomial(3).unwrap();
        let k = CycField::rationals();
        let at0 = phi.evaluate_first(&k, &k.zero());
        assert!(k.is_zero(&at0[0]));
        let c = BigInt::from(12288000i64);
        assert_eq!(at0[1][0], BigRational::from(&c * &c * &c));
        assert_eq!(at0[2][0], BigRational::from(3 * &c * &c));
        assert_eq!(at0[3][0], BigRational::from(3 * c));
    }

    #[test]
    fn kronecker_congruence() {
        // Phi_l(X, Y) = (X^l - Y)(X - Y^l) mod l
        for ell in [2u64, 3, 5] {
            let phi = modular_polynomial(ell).unwrap();
            let f = Fp::new(ell);
            let n = phi.degree();
            let l = ell as usize;
            for a in 0..=n {
                for b in 0..=n {
                    let mut expect = 0i64;
                    // (X^l - Y)(X - Y^l) = X^{l+1} - X^l Y^l - XY + Y^{l+1}
                    if a == l + 1 && b == 0 {
                        expect = 1;
                    }
                    if a == l && b == l {
                        expect = -1;
                    }
                    if a == 1 && b == 1 {
                        expect = -1;
                    }
                    if a == 0 && b == l + 1 {
                        expect = 1;
                    }
                    let got = bigint_in(&f, phi.coeff(a, b));
                    assert_eq!(
                        got,
                        f.from_i64(expect),
                        "l = {ell}, coefficient of X^{a} Y^{b}"
                    );
                }
            }
        }
    }

    #[test]
    fn phi5_functional_identity() {
        // Phi_5(j(q^5), j(q)) = 0 as a q-series (checked mod a large prime
        // to keep integers small)
        let phi = modular_polynomial(5).unwrap();
        assert!(phi.is_symmetric());
        assert_eq!(phi.degree(), 6);
        let p = 1_000_003u64;
        let kappa = crate::exact::residue::ResidueField::prime_field(p);
        let prec = 40i64;
        let (_, _, _, j) = crate::eisenstein::eis_level1(prec);
        let jp = crate::qexp::TruncatedSeries::from_coeffs(
            kappa.clone(),
            j.valuation,
            j.coeffs
                .iter()
                .map(|c| {
                    let q = &c[0];
                    bigint_in(&kappa, &q.to_integer())
                })
                .collect(),
            j.precision,
        );
        let j5 = jp.degeneracy(5);
        // evaluate Phi_5(j5, jp) as series
        let mut acc = crate::qexp::TruncatedSeries::zero(kappa.clone(), 5);
        let mut xpows = vec![crate::qexp::TruncatedSeries::constant(kappa.clone(), kappa.one(), prec)];
        for a in 1..=6usize {
            let nx = xpows[a - 1].mul(&j5).unwrap();
            xpows.push(nx);
        }
        let mut ypows = vec![crate::qexp::TruncatedSeries::constant(kappa.clone(), kappa.one(), prec)];
        for b in 1..=6usize {
            let ny = ypows[b - 1].mul(&jp).unwrap();
            ypows.push(ny);
        }
        for a in 0..=6usize {
            for b in 0..=6usize {
                let c = phi.coeff(a, b);
                if c.is_zero() {
                    continue;
                }
                let term = xpows[a]
                    .mul(&ypows[b])
                    .unwrap()
                    .scalar_mul(&bigint_in(&kappa, c));
                let t = term.truncate(acc.precision.min(term.precision));
                acc = acc.truncate(t.precision).add(&t).unwrap();
            }
        }
        assert!(
            acc.is_zero_to_precision(),
            "Phi_5(j(q^5), j(q)) != 0: {:?}",
            acc.coeffs.iter().take(4).collect::<Vec<_>>()
        );
    }
}

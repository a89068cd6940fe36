//! Prime slots of K = Q(zeta_m) and their residue fields.
//!
//! A slot over a rational prime p (with p not dividing m) is an irreducible
//! factor g of Phi_m mod p; its residue field is kappa = F_p[x]/(g), a copy
//! of F_{p^f} with f the multiplicative order of p mod m. Reduction sends
//! zeta to the class of x.

use super::cyclotomic::{cyclotomic_polynomial, CycField, FieldElement};
use super::field::Field;
use super::integers::{invmod, is_prime_u64, mult_order, mulmod};
use super::poly;
use super::ExactError;
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use std::sync::Arc;

/// The prime field F_p with u64 elements.
#[derive(Clone, Debug, PartialEq)]
pub struct Fp {
    pub p: u64,
}

impl Fp {
    pub fn new(p: u64) -> Self {
        debug_assert!(is_prime_u64(p), "modulus must be prime");
        Fp { p }
    }
}

impl Field for Fp {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mulmod(*a, *b, self.p)
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            None
        } else {
            invmod(*a, self.p)
        }
    }
    fn from_i64(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }
    fn characteristic(&self) -> u64 {
        self.p
    }
}

/// Reduce a rational number mod p; error if the denominator vanishes.
pub fn rational_mod_p(q: &BigRational, p: u64) -> Result<u64, ExactError> {
    let pp = BigUint::from(p);
    let den = (q.denom().magnitude()) % &pp;
    let den = den.to_u64().unwrap();
    if den == 0 {
        return Err(ExactError::NonIntegral { p });
    }
    let num_mag = (q.numer().magnitude()) % &pp;
    let mut num = num_mag.to_u64().unwrap();
    if q.numer().is_negative() && num != 0 {
        num = p - num;
    }
    Ok(mulmod(num, invmod(den, p).unwrap(), p))
}

#[derive(Debug)]
struct ResidueInner {
    p: u64,
    /// monic irreducible modulus over F_p, ascending coefficients
    g: Vec<u64>,
    f: usize,
}

/// The residue field kappa = F_p[x]/(g) = F_{p^f}; cheap to clone.
#[derive(Clone, Debug)]
pub struct ResidueField(Arc<ResidueInner>);

impl PartialEq for ResidueField {
    fn eq(&self, other: &Self) -> bool {
        self.0.p == other.0.p && self.0.g == other.0.g
    }
}

impl ResidueField {
    pub fn new(p: u64, g: Vec<u64>) -> Self {
        let f = g.len() - 1;
        assert!(f >= 1);
        assert_eq!(g[f], 1, "modulus must be monic");
        ResidueField(Arc::new(ResidueInner { p, g, f }))
    }

    /// Prime field F_p presented as a degree-1 residue field.
    pub fn prime_field(p: u64) -> Self {
        ResidueField::new(p, vec![0, 1])
    }

    /// F_{p^2} as F_p[t]/(t^2 - ns) for the smallest non-residue ns
    /// (p odd), or F_2[t]/(t^2 + t + 1).
    pub fn quadratic_extension(p: u64) -> Self {
        if p == 2 {
            return ResidueField::new(2, vec![1, 1, 1]);
        }
        let fp = Fp::new(p);
        let mut ns = 2u64;
        loop {
            if super::integers::powmod(ns, (p - 1) / 2, p) == p - 1 {
                break;
            }
            ns += 1;
        }
        ResidueField::new(p, vec![fp.neg(&ns), 0, 1])
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }

    pub fn f(&self) -> usize {
        self.0.f
    }

    pub fn modulus(&self) -> &[u64] {
        &self.0.g
    }

    pub fn size(&self) -> BigUint {
        BigUint::from(self.0.p).pow(self.0.f as u32)
    }

    /// The class of x (image of zeta for cyclotomic slots).
    pub fn gen(&self) -> Vec<u64> {
        let mut v = vec![0; self.0.f];
        if self.0.f == 1 {
            // x = -g[0] in F_p
            v[0] = Fp::new(self.0.p).neg(&self.0.g[0]);
        } else {
            v[1] = 1;
        }
        v
    }

    /// Embed an F_p value.
    pub fn from_base(&self, a: u64) -> Vec<u64> {
        let mut v = vec![0; self.0.f];
        v[0] = a % self.0.p;
        v
    }

    /// The unique F_p value of an element, if it lies in the prime field.
    pub fn to_base(&self, a: &[u64]) -> Option<u64> {
        if a.iter().skip(1).all(|&c| c == 0) {
            Some(a[0])
        } else {
            None
        }
    }

    fn reduce_vec(&self, poly_coeffs: Vec<u64>) -> Vec<u64> {
        let fp = Fp::new(self.0.p);
        let mut r = poly::rem(&fp, &poly_coeffs, &self.0.g);
        r.resize(self.0.f, 0);
        r
    }

    /// Frobenius x -> x^p.
    pub fn frobenius(&self, a: &[u64]) -> Vec<u64> {
        self.pow(&a.to_vec(), self.0.p)
    }
}

impl Field for ResidueField {
    type Elem = Vec<u64>;

    fn zero(&self) -> Vec<u64> {
        vec![0; self.0.f]
    }

    fn one(&self) -> Vec<u64> {
        let mut v = vec![0; self.0.f];
        v[0] = 1 % self.0.p;
        v
    }

    fn is_zero(&self, a: &Vec<u64>) -> bool {
        a.iter().all(|&c| c == 0)
    }

    fn add(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        let fp = Fp::new(self.0.p);
        a.iter().zip(b).map(|(x, y)| fp.add(x, y)).collect()
    }

    fn sub(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        let fp = Fp::new(self.0.p);
        a.iter().zip(b).map(|(x, y)| fp.sub(x, y)).collect()
    }

    fn neg(&self, a: &Vec<u64>) -> Vec<u64> {
        let fp = Fp::new(self.0.p);
        a.iter().map(|x| fp.neg(x)).collect()
    }

    fn mul(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        let f = self.0.f;
        if f == 1 {
            return vec![mulmod(a[0], b[0], self.0.p)];
        }
        let p = self.0.p;
        let mut prod = vec![0u64; 2 * f - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + mulmod(x, y, p)) % p;
            }
        }
        self.reduce_vec(prod)
    }

    fn inv(&self, a: &Vec<u64>) -> Option<Vec<u64>> {
        if self.is_zero(a) {
            return None;
        }
        let fp = Fp::new(self.0.p);
        // extended Euclid in F_p[x] against g
        let mut r0 = self.0.g.clone();
        let mut r1 = a.clone();
        poly::trim(&fp, &mut r1);
        let mut s0: Vec<u64> = vec![];
        let mut s1: Vec<u64> = vec![1];
        while !r1.is_empty() {
            let (q, r) = poly::divrem(&fp, &r0, &r1);
            let s = poly::sub(&fp, &s0, &poly::mul(&fp, &q, &s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        // r0 is a nonzero constant (g irreducible)
        debug_assert_eq!(r0.len(), 1);
        let c = invmod(r0[0], self.0.p)?;
        let mut out: Vec<u64> = s0.iter().map(|&x| mulmod(x, c, self.0.p)).collect();
        out.resize(self.0.f, 0);
        Some(self.reduce_vec(out))
    }

    fn from_i64(&self, n: i64) -> Vec<u64> {
        self.from_base(n.rem_euclid(self.0.p as i64) as u64)
    }

    fn characteristic(&self) -> u64 {
        self.0.p
    }

    fn nth_element(&self, n: u64) -> Vec<u64> {
        // base-p digit vector
        let mut v = vec![0; self.0.f];
        let mut n = n;
        for c in v.iter_mut() {
            *c = n % self.0.p;
            n /= self.0.p;
        }
        v
    }
}

/// A nonzero prime slot of K = Q(zeta_m): a rational prime p together with
/// an irreducible factor g of Phi_m mod p. Slots over the same p are
/// ordered lexicographically by the coefficients of g.
#[derive(Clone, Debug, PartialEq)]
pub struct PrimeSlot {
    pub p: u64,
    pub m: u32,
    /// monic irreducible factor of Phi_m mod p (ascending coefficients)
    pub g: Vec<u64>,
    /// residue degree f = deg g
    pub f: usize,
    /// position among the slots over p (deterministic order)
    pub index: usize,
}

impl PrimeSlot {
    pub fn residue_field(&self) -> ResidueField {
        ResidueField::new(self.p, self.g.clone())
    }

    /// Reduce a field element at this slot. The element must be p-integral.
    /// Rational elements (any degree-1 field) reduce at slots of any order.
    pub fn reduce(&self, x: &FieldElement) -> Result<Vec<u64>, ExactError> {
        if x.field.degree() == 1 {
            let kappa = self.residue_field();
            return Ok(kappa.from_base(rational_mod_p(&x.coeffs[0], self.p)?));
        }
        assert_eq!(
            x.field.order(),
            self.m,
            "element and slot belong to different cyclotomic fields"
        );
        let mut coeffs = Vec::with_capacity(x.coeffs.len());
        for c in &x.coeffs {
            coeffs.push(rational_mod_p(c, self.p)?);
        }
        let kappa = self.residue_field();
        let fp = Fp::new(self.p);
        let mut r = poly::rem(&fp, &coeffs, &self.g);
        r.resize(kappa.f(), 0);
        Ok(r)
    }

    pub fn label(&self) -> String {
        if self.f == 1 && self.index == 0 {
            format!("{}", self.p)
        } else {
            format!("{}.{}", self.p, self.index)
        }
    }
}

/// A slot in the sense of the pipeline: either the zero slot (kappa = K)
/// or a finite slot.
#[derive(Clone, Debug, PartialEq)]
pub enum Slot {
    Zero,
    Finite(PrimeSlot),
}

impl Slot {
    pub fn is_zero(&self) -> bool {
        matches!(self, Slot::Zero)
    }
}

/// All prime slots of Q(zeta_m) over p. Requires p prime and p coprime to
/// m. The number of slots is phi(m)/f and the residue degrees sum (over
/// slots, each of degree f) to phi(m).
pub fn primes_above(p: u64, m: u32) -> Result<Vec<PrimeSlot>, ExactError> {
    if !is_prime_u64(p) {
        panic!("primes_above called with composite p = {p}");
    }
    if m > 1 && (m as u64) % p == 0 {
        return Err(ExactError::UnsupportedPrime { p, m });
    }
    let fp = Fp::new(p);
    let phi_m: Vec<u64> = cyclotomic_polynomial(m)
        .iter()
        .map(|c| {
            let pp = BigUint::from(p);
            let mag = (c.magnitude()) % &pp;
            let mut v = mag.to_u64().unwrap();
            if c.is_negative() && v != 0 {
                v = p - v;
            }
            v
        })
        .collect();
    let mut phi_m = phi_m;
    poly::trim(&fp, &mut phi_m);
    let f = if m <= 2 { 1 } else { mult_order(p % m as u64, m as u64) as usize };
    let mut factors = poly::equal_degree_factor(&fp, &phi_m, p, f);
    factors.sort();
    let slots = factors
        .into_iter()
        .enumerate()
        .map(|(index, g)| PrimeSlot {
            p,
            m,
            g,
            f,
            index,
        })
        .collect();
    Ok(slots)
}

/// The unique slot over p for a rational field (m <= 2), as a convenience.
pub fn rational_slot(p: u64, field: &CycField) -> PrimeSlot {
    assert!(field.degree() == 1);
    primes_above(p, field.order()).unwrap().into_iter().next().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn slots_rational_case() {
        // (p=337, m=1): one slot, f = 1, kappa = F_337
        let slots = primes_above(337, 1).unwrap();
        assert_eq!(slots.len(), 1);
        assert_eq!(slots[0].f, 1);
        assert_eq!(slots[0].residue_field().size(), BigUint::from(337u32));
    }

    #[test]
    fn slots_m2_and_m4() {
        // (p=7, m=2): one slot, f = 1 (Phi_2 = x + 1 mod 7)
        let slots = primes_above(7, 2).unwrap();
        assert_eq!(slots.len(), 1);
        assert_eq!(slots[0].f, 1);
        assert_eq!(slots[0].g, vec![1, 1]);

        // (p=7, m=4): x^2 + 1 irreducible mod 7 (brute force over F_7:
        // no square equals -1), so one slot with f = 2
        for a in 0..7u64 {
            assert_ne!((a * a) % 7, 6);
        }
        let slots = primes_above(7, 4).unwrap();
        assert_eq!(slots.len(), 1);
        assert_eq!(slots[0].f, 2);
    }

    #[test]
    fn slots_split_case() {
        // p = 5, m = 4: x^2 + 1 = (x-2)(x-3) mod 5: two slots of degree 1
        let slots = primes_above(5, 4).unwrap();
        assert_eq!(slots.len(), 2);
        assert!(slots.iter().all(|s| s.f == 1));
        // coprime factors
        assert_ne!(slots[0].g, slots[1].g);
        // sum of degrees = phi(4) = 2
        let total: usize = slots.iter().map(|s| s.f).sum();
        assert_eq!(total, 2);
    }

    #[test]
    fn unsupported_prime() {
        assert!(matches!(
            primes_above(2, 4),
            Err(ExactError::UnsupportedPrime { .. })
        ));
    }

    #[test]
    fn reduce_rational() {
        // 3/2 -> 3 * 2^{-1} = 5 in F_7
        let k = CycField::rationals();
        let x = FieldElement::from_rational(
            k.clone(),
            BigRational::new(BigInt::from(3), BigInt::from(2)),
        );
        let slot = rational_slot(7, &k);
        assert_eq!(slot.reduce(&x).unwrap(), vec![5]);

        // 1/7 at a slot over 7: error
        let y = FieldElement::from_rational(
            k.clone(),
            BigRational::new(BigInt::from(1), BigInt::from(7)),
        );
        assert!(slot.reduce(&y).is_err());
    }

    #[test]
    fn reduce_zeta4_mod_5() {
        // (zeta_4, slot over 5 with g = x - 2) -> 2 in F_5 (2^2 = -1 mod 5)
        assert_eq!((2 * 2) % 5, 4); // -1 mod 5
        let k = CycField::new(4);
        let z = FieldElement::zeta(k.clone());
        let slots = primes_above(5, 4).unwrap();
        let slot = slots
            .iter()
            .find(|s| s.g == vec![3, 1]) // x - 2 = x + 3 mod 5
            .expect("slot with g = x - 2");
        assert_eq!(slot.reduce(&z).unwrap(), vec![2]);
    }

    #[test]
    fn reduce_is_ring_homomorphism() {
        let k = CycField::new(4);
        let z = FieldElement::zeta(k.clone());
        let a = FieldElement::from_int(k.clone(), 3).add(&z);
        let b = FieldElement::from_int(k.clone(), 2).sub(&z.mul(&z));
        let slots = primes_above(13, 4).unwrap();
        for slot in &slots {
            let kappa = slot.residue_field();
            let ra = slot.reduce(&a).unwrap();
            let rb = slot.reduce(&b).unwrap();
            assert_eq!(
                slot.reduce(&a.add(&b)).unwrap(),
                kappa.add(&ra, &rb)
            );
            assert_eq!(
                slot.reduce(&a.mul(&b)).unwrap(),
                kappa.mul(&ra, &rb)
            );
        }
    }

    #[test]
    fn quadratic_extension_arithmetic() {
        let fq = ResidueField::quadratic_extension(11);
        assert_eq!(fq.size(), BigUint::from(121u32));
        let t = fq.gen();
        let t2 = fq.mul(&t, &t);
        // t^2 is the non-residue, in the base field
        assert!(fq.to_base(&t2).is_some());
        let ti = fq.inv(&t).unwrap();
        assert_eq!(fq.mul(&t, &ti), fq.one());
    }
}

//! Dirichlet characters chi: (Z/NZ)^x -> roots of unity, with conductor,
//! order, parity, Conrey-style integer labels, the generalized Bernoulli
//! number B_{1,chi}, and Eisenstein congruence primes (the numerator primes
//! of B_{1,chi}).
//!
//! Values are stored as exponent vectors on fixed generators of the unit
//! group; a value materializes lazily as a root of unity in K = Q(zeta_m)
//! where m is the order of chi.

use crate::exact::cyclotomic::{CycField, FieldElement};
use crate::exact::field::Field;
use crate::exact::integers::{euler_phi, factor_integer, powmod};
use crate::exact::residue::{primes_above, PrimeSlot};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CharacterError {
    #[error("invalid character label `{0}` (expected `N.c` with gcd(c, N) = 1)")]
    BadLabel(String),
    #[error("character must be odd")]
    ParityError,
}

/// One prime-power component of (Z/NZ)^x with its generator data.
#[derive(Debug)]
struct Component {
    /// p^e
    q: u64,
    /// generators of the component as residues mod q, with their orders;
    /// one entry for odd p and for 2^e with e <= 2, two entries (-1 and 5)
    /// for 2^e with e >= 3
    gens: Vec<(u64, u64)>,
    /// discrete-log table: residue mod q -> exponent vector on gens
    dlog: Vec<Option<Vec<u64>>>,
}

/// The structure of (Z/NZ)^x shared by all characters mod N.
#[derive(Debug)]
pub struct CharGroup {
    modulus: u64,
    components: Vec<Component>,
}

/// Conrey's generator for odd p: the smallest primitive root mod p that
/// stays primitive mod p^2 (and hence mod all p^k).
fn conrey_generator(p: u64) -> u64 {
    let phi_p = p - 1;
    let fact = factor_integer(&BigUint::from(phi_p));
    let prime_divs: Vec<u64> = fact.small_primes();
    'outer: for g in 2..p {
        for &q in &prime_divs {
            if powmod(g, phi_p / q, p) == 1 {
                continue 'outer;
            }
        }
        // primitive mod p; require primitivity mod p^2 as well
        if p < (1u64 << 31) {
            let p2 = p * p;
            if powmod(g, phi_p, p2) == 1 {
                continue;
            }
        }
        return g;
    }
    unreachable!("no primitive root found");
}

impl CharGroup {
    pub fn new(modulus: u64) -> Arc<Self> {
        assert!(modulus >= 1);
        let mut components = Vec::new();
        let mut n = modulus;
        let mut p = 2u64;
        let mut pps: Vec<(u64, u32)> = Vec::new();
        while p * p <= n {
            if n % p == 0 {
                let mut e = 0;
                while n % p == 0 {
                    n /= p;
                    e += 1;
                }
                pps.push((p, e));
            }
            p += 1;
        }
        if n > 1 {
            pps.push((n, 1));
        }
        for (p, e) in pps {
            let q = p.pow(e);
            let gens: Vec<(u64, u64)> = if p == 2 {
                match e {
                    1 => vec![],
                    2 => vec![(3, 2)],
                    _ => vec![(q - 1, 2), (5, 1 << (e - 2))],
                }
            } else {
                let g0 = conrey_generator(p);
                let g = g0 % q;
                vec![(g, euler_phi(q))]
            };
            // discrete logs by enumeration
            let mut dlog: Vec<Option<Vec<u64>>> = vec![None; q as usize];
            match gens.len() {
                0 => {
                    dlog[1 % q as usize] = Some(vec![]);
                }
                1 => {
                    let (g, d) = gens[0];
                    let mut x = 1u64;
                    for a in 0..d {
                        dlog[x as usize] = Some(vec![a]);
                        x = (x as u128 * g as u128 % q as u128) as u64;
                    }
                }
                2 => {
                    let (g0, d0) = gens[0];
                    let (g1, d1) = gens[1];
                    let mut x0 = 1u64;
                    for a0 in 0..d0 {
                        let mut x = x0;
                        for a1 in 0..d1 {
                            dlog[x as usize] = Some(vec![a0, a1]);
                            x = (x as u128 * g1 as u128 % q as u128) as u64;
                        }
                        x0 = (x0 as u128 * g0 as u128 % q as u128) as u64;
                    }
                }
                _ => unreachable!(),
            }
            components.push(Component { q, gens, dlog });
        }
        Arc::new(CharGroup {
            modulus,
            components,
        })
    }

    fn gen_orders(&self) -> Vec<u64> {
        self.components
            .iter()
            .flat_map(|c| c.gens.iter().map(|&(_, d)| d))
            .collect()
    }

    /// Exponent vector of a unit on the flattened generator list; None for
    /// non-units.
    fn dlog(&self, a: u64) -> Option<Vec<u64>> {
        let a = a % self.modulus.max(1);
        if self.modulus == 1 {
            return Some(vec![]);
        }
        if a.gcd(&self.modulus) != 1 {
            return None;
        }
        let mut out = Vec::new();
        for c in &self.components {
            let r = (a % c.q) as usize;
            out.extend(c.dlog[r].as_ref()?.iter().copied());
        }
        Some(out)
    }
}

/// A Dirichlet character mod N with exponent data on the unit-group
/// generators.
#[derive(Clone, Debug)]
pub struct DirichletCharacter {
    group: Arc<CharGroup>,
    /// chi(gen_i) = e(exps[i] / order(gen_i))
    exps: Vec<u64>,
    order: u64,
    conductor: u64,
    conrey: u64,
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.modulus() == other.modulus() && self.conrey == other.conrey
    }
}

impl DirichletCharacter {
    fn from_exps(group: Arc<CharGroup>, exps: Vec<u64>) -> Self {
        let orders = group.gen_orders();
        debug_assert_eq!(orders.len(), exps.len());
        let mut order = 1u64;
        for (&e, &d) in exps.iter().zip(&orders) {
            let val_order = d / e.gcd(&d);
            order = order.lcm(&val_order);
        }
        let conductor = conductor_of(&group, &exps);
        let conrey = conrey_index(&group, &exps);
        DirichletCharacter {
            group,
            exps,
            order,
            conductor,
            conrey,
        }
    }

    /// The trivial character mod N.
    pub fn trivial(modulus: u64) -> Self {
        let group = CharGroup::new(modulus);
        let n = group.gen_orders().len();
        Self::from_exps(group, vec![0; n])
    }

    /// All phi(N) characters mod N, sorted by Conrey index.
    pub fn enumerate(modulus: u64) -> Vec<Self> {
        let group = CharGroup::new(modulus);
        let orders = group.gen_orders();
        let mut out = Vec::new();
        let mut exps = vec![0u64; orders.len()];
        loop {
            out.push(Self::from_exps(group.clone(), exps.clone()));
            // odometer increment
            let mut i = 0;
            loop {
                if i == orders.len() {
                    out.sort_by_key(|c| c.conrey);
                    return out;
                }
                exps[i] += 1;
                if exps[i] < orders[i] {
                    break;
                }
                exps[i] = 0;
                i += 1;
            }
        }
    }

    /// The character mod N with Conrey index c.
    pub fn from_conrey(modulus: u64, c: u64) -> Result<Self, CharacterError> {
        let group = CharGroup::new(modulus);
        let exps = group
            .dlog(c)
            .ok_or_else(|| CharacterError::BadLabel(format!("{modulus}.{c}")))?;
        Ok(Self::from_exps(group, exps))
    }

    /// Parse a CLI label `N.c`.
    pub fn parse_label(label: &str) -> Result<Self, CharacterError> {
        let parts: Vec<&str> = label.split('.').collect();
        if parts.len() != 2 {
            return Err(CharacterError::BadLabel(label.to_string()));
        }
        let n: u64 = parts[0]
            .parse()
            .map_err(|_| CharacterError::BadLabel(label.to_string()))?;
        let c: u64 = parts[1]
            .parse()
            .map_err(|_| CharacterError::BadLabel(label.to_string()))?;
        Self::from_conrey(n, c)
    }

    pub fn modulus(&self) -> u64 {
        self.group.modulus
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn conrey_index(&self) -> u64 {
        self.conrey
    }

    pub fn label(&self) -> String {
        format!("{}.{}", self.modulus(), self.conrey)
    }

    pub fn is_trivial(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn is_quadratic(&self) -> bool {
        self.order <= 2
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.modulus()
    }

    /// chi(-1) as +1 / -1.
    pub fn parity(&self) -> i8 {
        if self.modulus() <= 2 {
            return 1;
        }
        let t = self
            .value_exponent(self.modulus() - 1)
            .expect("-1 is a unit");
        if t == 0 {
            1
        } else {
            debug_assert_eq!(2 * t, self.order);
            -1
        }
    }

    pub fn is_odd(&self) -> bool {
        self.parity() == -1
    }

    /// The exponent t with chi(a) = zeta_order^t, or None when chi(a) = 0.
    pub fn value_exponent(&self, a: u64) -> Option<u64> {
        let digits = self.group.dlog(a)?;
        let orders = self.group.gen_orders();
        let m = self.order;
        let mut t = 0u64;
        for ((&c, &e), &d) in digits.iter().zip(&self.exps).zip(&orders) {
            // contribution e(c*e/d) = zeta_m^{c*e*m/d}; d divides c*e*m
            // because the value order divides m
            let num = c as u128 * e as u128 * m as u128;
            debug_assert_eq!(num % d as u128, 0);
            let step = (num / d as u128) % m as u128;
            t = ((t as u128 + step) % m as u128) as u64;
        }
        Some(t)
    }

    /// The field K = Q(chi) = Q(zeta_order).
    pub fn field(&self) -> CycField {
        CycField::new(self.order as u32)
    }

    /// chi(a) as an element of a cyclotomic field whose order is a
    /// multiple of ord(chi). Returns 0 for non-units.
    pub fn value_in(&self, field: &CycField, a: u64) -> FieldElement {
        match self.value_exponent(a) {
            None => FieldElement::new(field.clone(), field.zero()),
            Some(t) => {
                let m = field.order() as u64;
                debug_assert_eq!(m % self.order, 0);
                let coeffs = field.zeta_pow((t * (m / self.order)) as i64);
                FieldElement::new(field.clone(), coeffs)
            }
        }
    }

    pub fn value(&self, a: u64) -> FieldElement {
        self.value_in(&self.field(), a)
    }

    /// Pointwise product of characters with the same modulus.
    pub fn mul(&self, other: &DirichletCharacter) -> DirichletCharacter {
        assert_eq!(self.modulus(), other.modulus());
        let orders = self.group.gen_orders();
        let exps: Vec<u64> = self
            .exps
            .iter()
            .zip(&other.exps)
            .zip(&orders)
            .map(|((&a, &b), &d)| (a + b) % d)
            .collect();
        Self::from_exps(self.group.clone(), exps)
    }

    pub fn inverse(&self) -> DirichletCharacter {
        let orders = self.group.gen_orders();
        let exps: Vec<u64> = self
            .exps
            .iter()
            .zip(&orders)
            .map(|(&a, &d)| if a == 0 { 0 } else { d - a })
            .collect();
        Self::from_exps(self.group.clone(), exps)
    }

    pub fn square(&self) -> DirichletCharacter {
        self.mul(self)
    }

    /// The primitive character of conductor f that induces chi.
    pub fn primitive(&self) -> DirichletCharacter {
        if self.is_primitive() {
            return self.clone();
        }
        let f = self.conductor;
        let group = CharGroup::new(f);
        // match values on units of N: find the character mod f agreeing
        // with chi on every unit of Z/N
        let candidates = Self::enumerate_with_group(group);
        for cand in candidates {
            if cand.induces(self) {
                return cand;
            }
        }
        unreachable!("conductor computation inconsistent with induction");
    }

    fn enumerate_with_group(group: Arc<CharGroup>) -> Vec<Self> {
        let orders = group.gen_orders();
        let mut out = Vec::new();
        let mut exps = vec![0u64; orders.len()];
        loop {
            out.push(Self::from_exps(group.clone(), exps.clone()));
            let mut i = 0;
            loop {
                if i == orders.len() {
                    return out;
                }
                exps[i] += 1;
                if exps[i] < orders[i] {
                    break;
                }
                exps[i] = 0;
                i += 1;
            }
        }
    }

    /// Does this (primitive) character induce `other`?
    pub fn induces(&self, other: &DirichletCharacter) -> bool {
        let big_n = other.modulus();
        if big_n % self.modulus() != 0 {
            return false;
        }
        if self.order != other.order {
            return false;
        }
        for a in 1..=big_n {
            if a.gcd(&big_n) != 1 {
                continue;
            }
            if self.value_exponent(a % self.modulus().max(1)).map(|t| t * (other.order / self.order))
                != other.value_exponent(a)
            {
                return false;
            }
        }
        true
    }

    /// Induce this character to a larger modulus (conductor must divide it).
    pub fn induce(&self, modulus: u64) -> DirichletCharacter {
        assert_eq!(modulus % self.conductor, 0);
        let group = CharGroup::new(modulus);
        for cand in Self::enumerate_with_group(group) {
            if cand.conductor == self.conductor && self.primitive_eq(&cand) {
                return cand;
            }
        }
        unreachable!("induction failed");
    }

    fn primitive_eq(&self, other: &DirichletCharacter) -> bool {
        let sp = self.primitive();
        let op = other.primitive();
        sp.modulus() == op.modulus() && sp.conrey == op.conrey
    }
}

/// Conductor from component exponents: the product over components of the
/// smallest p^c through which the component character factors.
fn conductor_of(group: &CharGroup, exps: &[u64]) -> u64 {
    let mut idx = 0usize;
    let mut cond = 1u64;
    for comp in &group.components {
        let p = smallest_prime_factor(comp.q);
        match comp.gens.len() {
            0 => {}
            1 => {
                let (_, d) = comp.gens[0];
                let e = exps[idx];
                idx += 1;
                if e != 0 {
                    let val_order = d / e.gcd(&d);
                    // smallest c >= 1 with val_order | phi(p^c)
                    let mut pc = p;
                    while euler_phi(pc) % val_order != 0 {
                        pc *= p;
                    }
                    cond *= pc;
                }
            }
            2 => {
                let e0 = exps[idx];
                let e1 = exps[idx + 1];
                let (_, d1) = comp.gens[1];
                idx += 2;
                let t = if e1 == 0 { 1 } else { d1 / e1.gcd(&d1) };
                if t > 1 {
                    cond *= 4 * t; // 2^{log2(t)+2}
                } else if e0 != 0 {
                    cond *= 4;
                }
            }
            _ => unreachable!(),
        }
    }
    cond
}

fn smallest_prime_factor(mut q: u64) -> u64 {
    let mut p = 2;
    while q % p != 0 {
        p += 1;
    }
    while q % p == 0 && q > p {
        q /= p;
    }
    p
}

/// Conrey index from component exponents: n = prod g_i^{e_i} (CRT over
/// components, with the (-1, 5) pair for the 2-part).
fn conrey_index(group: &CharGroup, exps: &[u64]) -> u64 {
    let n_mod = group.modulus;
    if n_mod == 1 {
        return 1;
    }
    let mut idx = 0usize;
    let mut residues: Vec<(u64, u64)> = Vec::new();
    for comp in &group.components {
        let mut r = 1u64;
        for &(g, _) in &comp.gens {
            let e = exps[idx];
            idx += 1;
            r = (r as u128 * powmod(g, e, comp.q) as u128 % comp.q as u128) as u64;
        }
        residues.push((r, comp.q));
    }
    // CRT combine
    let mut x = 0u64;
    let mut m = 1u64;
    for (r, q) in residues {
        // x' = x mod m, r mod q
        let (g, inv_m) = ext_gcd_u(m, q);
        debug_assert_eq!(g, 1);
        let diff = ((r as i128 - x as i128).rem_euclid(q as i128)) as u64;
        let t = (diff as u128 * inv_m as u128 % q as u128) as u64;
        x += m * t;
        m *= q;
    }
    if x == 0 {
        x = 1; // only when the group is trivial
    }
    x
}

fn ext_gcd_u(a: u64, b: u64) -> (u64, u64) {
    // returns (gcd, a^{-1} mod b)
    let (mut t, mut new_t): (i128, i128) = (0, 1);
    let (mut r, mut new_r): (i128, i128) = (b as i128, (a % b) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    (r as u64, (t.rem_euclid(b as i128)) as u64)
}

/// B_{1,chi} = (1/M) * sum_{a=1}^{M} chi(a) a for primitive odd chi of
/// conductor M, exact in K = Q(chi). Even nontrivial characters return 0
/// by convention; so does the trivial character.
pub fn bernoulli_b1(chi: &DirichletCharacter) -> FieldElement {
    let field = chi.field();
    let m = chi.modulus();
    assert!(chi.is_primitive(), "B_{{1,chi}} requires a primitive character");
    if !chi.is_odd() {
        return FieldElement::new(field.clone(), field.zero());
    }
    let mut acc = field.zero();
    for a in 1..=m {
        if let Some(t) = chi.value_exponent(a) {
            let z = field.zeta_pow(t as i64);
            let term = field.mul(&z, &field.from_i64(a as i64));
            acc = field.add(&acc, &term);
        }
    }
    let inv_m = field
        .inv(&field.from_i64(m as i64))
        .expect("modulus nonzero");
    FieldElement::new(field.clone(), field.mul(&acc, &inv_m))
}

/// Eisenstein congruence primes for (1, N, chi): the slots dividing the
/// numerator of B_{1,chi}, verified slot by slot.
#[derive(Debug, Default, Clone)]
pub struct CongruencePrimes {
    pub slots: Vec<PrimeSlot>,
    /// candidate primes that could not be slot-verified (dividing the
    /// order or the cleared denominator, too large, or unfactored)
    pub unverified: Vec<BigUint>,
}

pub fn eisenstein_congruence_primes(chi: &DirichletCharacter) -> CongruencePrimes {
    let chi = chi.primitive();
    let b1 = bernoulli_b1(&chi);
    let mut out = CongruencePrimes::default();
    if b1.is_zero() {
        return out;
    }
    let (num, den) = b1.clear_denominators();
    let norm = num.norm();
    debug_assert!(norm.is_integer());
    let n_abs = norm.numer().magnitude().clone();
    if n_abs.is_one() {
        return out;
    }
    let fact = factor_integer(&n_abs);
    out.unverified.extend(fact.unresolved.iter().cloned());
    let m = chi.order() as u32;
    let den_big = BigInt::from(den.clone());
    for (p_big, _) in &fact.factors {
        let Some(p) = p_big.to_u64() else {
            out.unverified.push(p_big.clone());
            continue;
        };
        if (m > 1 && (m as u64) % p == 0) || (&den_big % BigInt::from(p)).is_zero() {
            out.unverified.push(p_big.clone());
            continue;
        }
        if let Ok(slots) = primes_above(p, m.max(1)) {
            for slot in slots {
                if let Ok(r) = slot.reduce(&num) {
                    if slot.residue_field().is_zero(&r) {
                        out.slots.push(slot);
                    }
                }
            }
        }
    }
    out
}

/// Exact B_{1,chi} as a rational for quadratic characters (where K = Q).
pub fn bernoulli_b1_rational(chi: &DirichletCharacter) -> BigRational {
    let b = bernoulli_b1(&chi.primitive());
    b.as_rational().expect("quadratic character has rational B1")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerate_counts_and_parity() {
        assert_eq!(DirichletCharacter::enumerate(1).len(), 1);
        let chars3 = DirichletCharacter::enumerate(3);
        assert_eq!(chars3.len(), 2);
        let odd: Vec<_> = chars3.iter().filter(|c| c.is_odd()).collect();
        assert_eq!(odd.len(), 1);
        assert!(odd[0].is_quadratic());

        // N = 31: 30 characters, exactly one quadratic, and it is odd
        // (31 = 3 mod 4)
        assert_eq!(31 % 4, 3);
        let chars31 = DirichletCharacter::enumerate(31);
        assert_eq!(chars31.len(), 30);
        let quads: Vec<_> = chars31
            .iter()
            .filter(|c| c.is_quadratic() && !c.is_trivial())
            .collect();
        assert_eq!(quads.len(), 1);
        assert!(quads[0].is_odd());
        // its Conrey label is 31.30
        assert_eq!(quads[0].conrey_index(), 30);
    }

    #[test]
    fn multiplicativity_exhaustive() {
        for n in [3u64, 4, 8, 12, 31, 45, 100] {
            for chi in DirichletCharacter::enumerate(n) {
                let field = chi.field();
                for a in 1..n.min(40) {
                    for b in 1..n.min(40) {
                        let va = chi.value_in(&field, a);
                        let vb = chi.value_in(&field, b);
                        let vab = chi.value_in(&field, (a * b) % n);
                        assert_eq!(va.mul(&vb).coeffs, vab.coeffs, "N={n} a={a} b={b}");
                    }
                }
            }
        }
    }

    #[test]
    fn quadratic_character_is_legendre() {
        // 11.10 is the Legendre symbol mod 11
        let chi = DirichletCharacter::from_conrey(11, 10).unwrap();
        assert!(chi.is_quadratic() && chi.is_odd());
        for a in 1..11u64 {
            let sq = (1..11u64).any(|x| x * x % 11 == a);
            let t = chi.value_exponent(a).unwrap();
            assert_eq!(t == 0, sq, "a = {a}");
        }
    }

    #[test]
    fn conductors() {
        // the character mod 9 induced from the quadratic mod 3
        let chi9: Vec<_> = DirichletCharacter::enumerate(9)
            .into_iter()
            .filter(|c| c.is_quadratic() && !c.is_trivial())
            .collect();
        assert_eq!(chi9.len(), 1);
        assert_eq!(chi9[0].conductor(), 3);
        let prim = chi9[0].primitive();
        assert_eq!(prim.modulus(), 3);
        assert!(prim.induces(&chi9[0]));

        // mod 12 = 4 * 3: the odd quadratic of conductor 12
        let chars12 = DirichletCharacter::enumerate(12);
        let conds: Vec<u64> = chars12.iter().map(|c| c.conductor()).collect();
        assert!(conds.contains(&12));
        assert!(conds.contains(&1));
        assert!(conds.contains(&3));
        assert!(conds.contains(&4));
    }

    #[test]
    fn induce_roundtrip() {
        let eps3 = DirichletCharacter::enumerate(3)
            .into_iter()
            .find(|c| c.is_odd())
            .unwrap();
        let eps141 = eps3.induce(141);
        assert_eq!(eps141.modulus(), 141);
        assert_eq!(eps141.conductor(), 3);
        assert!(eps141.is_odd());
        assert!(eps141.is_quadratic());
        // values agree on units
        for a in 1..141u64 {
            if a.gcd(&141) != 1 {
                assert_eq!(eps141.value_exponent(a), None);
                continue;
            }
            assert_eq!(eps141.value_exponent(a), eps3.value_exponent(a % 3));
        }
    }

    #[test]
    fn bernoulli_small_conductors() {
        // conductor 4: B1 = -1/2 by the direct sum (1*1 + 3*(-1))/4
        let chi4 = DirichletCharacter::enumerate(4)
            .into_iter()
            .find(|c| c.is_odd())
            .unwrap();
        assert_eq!(
            bernoulli_b1_rational(&chi4),
            BigRational::new(BigInt::from(-1), BigInt::from(2))
        );

        // conductor 3: (1 - 2)/3 = -1/3
        let chi3 = DirichletCharacter::enumerate(3)
            .into_iter()
            .find(|c| c.is_odd())
            .unwrap();
        assert_eq!(
            bernoulli_b1_rational(&chi3),
            BigRational::new(BigInt::from(-1), BigInt::from(3))
        );

        // conductor 31: -3 (matches the doubled Eisenstein constant 3)
        let chi31 = DirichletCharacter::from_conrey(31, 30).unwrap();
        assert_eq!(
            bernoulli_b1_rational(&chi31),
            BigRational::from(BigInt::from(-3))
        );

        // conductor 11: -1
        let chi11 = DirichletCharacter::from_conrey(11, 10).unwrap();
        assert_eq!(
            bernoulli_b1_rational(&chi11),
            BigRational::from(BigInt::from(-1))
        );
    }

    /// Reduced binary quadratic form count: class number h(-q).
    fn class_number_oracle(q: u64) -> u64 {
        let d = -(q as i64);
        let mut count = 0u64;
        let mut a = 1i64;
        while a * a * 4 <= -d * 4 {
            // |b| <= a <= c, b^2 - 4ac = d
            for b in -a..=a {
                let num = b * b - d;
                if num % (4 * a) != 0 {
                    continue;
                }
                let c = num / (4 * a);
                if c < a {
                    continue;
                }
                // exclude equivalent duplicates: b > 0 when |b| = a or a = c
                if (b == -a) || (a == c && b < 0) {
                    continue;
                }
                if gcd3(a, b.unsigned_abs() as i64, c) == 1 {
                    count += 1;
                }
            }
            a += 1;
        }
        count
    }

    fn gcd3(a: i64, b: i64, c: i64) -> i64 {
        let g = a.gcd(&b);
        g.gcd(&c)
    }

    #[test]
    fn bernoulli_matches_class_numbers() {
        // for prime q = 3 mod 4, q > 4: B_{1,chi} = -2 h(-q) / w with
        // w = 2 (w = 6 for q = 3)
        let mut q = 7u64;
        while q < 200 {
            if crate::exact::integers::is_prime_u64(q) && q % 4 == 3 {
                let chi = DirichletCharacter::enumerate(q)
                    .into_iter()
                    .find(|c| c.is_quadratic() && !c.is_trivial())
                    .unwrap();
                assert!(chi.is_odd());
                let b1 = bernoulli_b1_rational(&chi);
                let h = class_number_oracle(q);
                assert_eq!(
                    b1,
                    BigRational::from(BigInt::from(-(h as i64))),
                    "q = {q}"
                );
            }
            q += 2;
        }
        // h(-23) = 3 cross-check
        assert_eq!(class_number_oracle(23), 3);
    }

    #[test]
    fn congruence_primes_examples() {
        // conductor 11: B1 = -1, no congruence primes
        let chi11 = DirichletCharacter::from_conrey(11, 10).unwrap();
        assert!(eisenstein_congruence_primes(&chi11).slots.is_empty());

        // conductor 4: numerator is a unit after clearing -1/2
        let chi4 = DirichletCharacter::enumerate(4)
            .into_iter()
            .find(|c| c.is_odd())
            .unwrap();
        assert!(eisenstein_congruence_primes(&chi4).slots.is_empty());

        // conductor 23: B1 = -3, slots over 3
        let chi23 = DirichletCharacter::enumerate(23)
            .into_iter()
            .find(|c| c.is_quadratic() && !c.is_trivial())
            .unwrap();
        let cp = eisenstein_congruence_primes(&chi23);
        assert_eq!(cp.slots.len(), 1);
        assert_eq!(cp.slots[0].p, 3);
    }

    #[test]
    fn character_of_order_100_mod_125() {
        let chars = DirichletCharacter::enumerate(125);
        assert_eq!(chars.len(), 100);
        let c2 = chars.iter().find(|c| c.order() == 100).unwrap();
        assert_eq!(c2.conductor(), 125);
        let odd100: Vec<_> = chars
            .iter()
            .filter(|c| c.order() == 100 && c.is_odd())
            .collect();
        assert!(!odd100.is_empty());
    }
}

//! The supersingular polynomial ss_p(X): the monic squarefree polynomial
//! over F_p whose roots in F_{p^2} are the supersingular j-invariants.
//!
//! Construction: the roots of the Hasse polynomial
//!   H_p(t) = sum_{i<=m} C(m,i)^2 t^i,  m = (p-1)/2,
//! are exactly the supersingular Legendre parameters, all lying in
//! F_{p^2}. H_p factors over F_p into linear and quadratic pieces; the
//! quadratic roots are lifted by a square root in F_{p^2}, and the images
//! under j = 256 (t^2-t+1)^3 / (t^2 (t-1)^2) give ss_p.

use crate::exact::field::Field;
use crate::exact::integers::{invmod, is_prime_u64, mulmod, powmod};
use crate::exact::poly;
use crate::exact::residue::{Fp, ResidueField};
use num_bigint::BigUint;

/// Square root mod an odd prime by Tonelli-Shanks; None for non-residues.
pub fn sqrt_mod_p(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if powmod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(powmod(a, (p + 1) / 4, p));
    }
    // Tonelli-Shanks
    let mut q = p - 1;
    let mut s = 0u32;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2u64;
    while powmod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = powmod(z, q, p);
    let mut t = powmod(a, q, p);
    let mut r = powmod(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0u32;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mulmod(t2, t2, p);
            i += 1;
            if i == m {
                return None;
            }
        }
        let b = powmod(c, 1 << (m - i - 1), p);
        m = i;
        c = mulmod(b, b, p);
        t = mulmod(t, c, p);
        r = mulmod(r, b, p);
    }
    Some(r)
}

/// ss_p as coefficients over F_p (ascending, monic).
pub fn supersingular_polynomial(p: u64) -> Vec<u64> {
    assert!(is_prime_u64(p), "p must be prime");
    if p == 2 || p == 3 {
        // j = 0 is the only supersingular invariant
        return vec![0, 1];
    }
    let fp = Fp::new(p);
    let fq = ResidueField::quadratic_extension(p);
    let m = ((p - 1) / 2) as usize;
    // Hasse polynomial over F_p
    let mut h: Vec<u64> = Vec::with_capacity(m + 1);
    let mut c: u64 = 1;
    for i in 0..=m {
        h.push(mulmod(c, c, p));
        if i < m {
            c = mulmod(c, (m - i) as u64 % p, p);
            c = mulmod(c, invmod((i as u64 + 1) % p, p).unwrap(), p);
        }
    }
    // distinct-degree split over F_p: linear part and quadratic part
    let x = vec![0u64, 1];
    let xp = poly::pow_mod(&fp, &x, &BigUint::from(p), &h);
    let lin_part = poly::gcd(&fp, &h, &poly::sub(&fp, &xp, &x));
    let (rest, r0) = poly::divrem(&fp, &h, &lin_part);
    debug_assert!(r0.is_empty());
    let quad_part = {
        let xp2 = poly::pow_mod(&fp, &xp, &BigUint::from(p), &rest);
        poly::gcd(&fp, &rest, &poly::sub(&fp, &xp2, &x))
    };
    debug_assert_eq!(
        poly::deg(&quad_part),
        poly::deg(&rest),
        "Hasse roots exceed F_p^2"
    );
    // lambda roots in F_{p^2}
    let mut lambdas: Vec<Vec<u64>> = Vec::new();
    if poly::deg(&lin_part) > 0 {
        let roots = poly::roots_with_multiplicity(&fp, &lin_part, &BigUint::from(p), |e| vec![*e]);
        for (r, _) in roots {
            lambdas.push(fq.from_base(r));
        }
    }
    if poly::deg(&quad_part) > 0 {
        let quads = poly::equal_degree_factor(&fp, &quad_part, p, 2);
        // F_{p^2} = F_p[t]/(t^2 - ns): sqrt of a non-residue d is
        // t * sqrt(d / ns)
        let ns = fp.neg(&fq.modulus()[0]);
        for f in quads {
            // monic x^2 + b x + c
            debug_assert_eq!(f.len(), 3);
            let (b, c0) = (f[1], f[0]);
            let disc = fp.sub(&mulmod(b, b, p), &mulmod(4 % p, c0, p));
            let ratio = mulmod(disc, invmod(ns, p).unwrap(), p);
            let s = sqrt_mod_p(ratio, p).expect("disc/ns must be a residue");
            let sqrt_disc = vec![0, s];
            let inv2 = invmod(2, p).unwrap();
            for sign in [1i64, -1] {
                let num = if sign > 0 {
                    fq.sub(&sqrt_disc, &fq.from_base(b))
                } else {
                    fq.neg(&fq.add(&sqrt_disc, &fq.from_base(b)))
                };
                lambdas.push(fq.mul(&num, &fq.from_base(inv2)));
            }
        }
    }
    debug_assert_eq!(lambdas.len(), m, "Hasse polynomial must split over F_p^2");
    // j(t) = 256 (t^2 - t + 1)^3 / (t^2 (t - 1)^2)
    let mut ss_j: Vec<Vec<u64>> = Vec::new();
    for t in lambdas {
        let t2 = fq.mul(&t, &t);
        let num = {
            let mut v = fq.sub(&t2, &t);
            v = fq.add(&v, &fq.one());
            let v3 = fq.mul(&fq.mul(&v, &v), &v);
            fq.mul(&fq.from_base(256 % p), &v3)
        };
        let den = {
            let t_minus_1 = fq.sub(&t, &fq.one());
            fq.mul(&t2, &fq.mul(&t_minus_1, &t_minus_1))
        };
        let j = fq.mul(&num, &fq.inv(&den).expect("t not 0 or 1"));
        if !ss_j.contains(&j) {
            ss_j.push(j);
        }
    }
    ss_j.sort();
    // product of (X - j); coefficients must land in F_p
    let mut prod: Vec<Vec<u64>> = vec![fq.one()];
    for j in &ss_j {
        prod = poly::mul(&fq, &prod, &[fq.neg(j), fq.one()]);
    }
    prod.iter()
        .map(|c| {
            fq.to_base(c)
                .expect("supersingular polynomial has F_p coefficients")
        })
        .collect()
}

/// Classical degree count floor(p/12) + (0, 1, 1, 2 by p mod 12).
pub fn expected_ss_degree(p: u64) -> u64 {
    if p == 2 || p == 3 {
        return 1;
    }
    p / 12
        + match p % 12 {
            1 => 0,
            5 | 7 => 1,
            11 => 2,
            _ => unreachable!("p coprime to 12"),
        }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::integers::next_prime;

    #[test]
    fn small_cases() {
        // p = 11: X(X - 1) (j = 0 and 1728 = 1 mod 11)
        assert_eq!(1728 % 11, 1);
        let s11 = supersingular_polynomial(11);
        assert_eq!(s11, vec![0, 10, 1]);
        // p = 13: X - 5
        assert_eq!(supersingular_polynomial(13), vec![8, 1]);
        // p = 2: X
        assert_eq!(supersingular_polynomial(2), vec![0, 1]);
    }

    #[test]
    fn sqrt_mod_primes() {
        for p in [5u64, 13, 17, 97, 337, 1009] {
            for a in 1..40u64 {
                let sq = mulmod(a, a, p);
                let r = sqrt_mod_p(sq, p).unwrap();
                assert_eq!(mulmod(r, r, p), sq);
            }
        }
    }

    /// Count points on a curve with given j over F_{p^2} to decide
    /// supersingularity: the trace is 0 mod p iff supersingular.
    fn is_ss_brute(p: u64, j: &[u64]) -> bool {
        let fq = ResidueField::quadratic_extension(p);
        let (a, b) = if fq.is_zero(&j.to_vec()) {
            (fq.zero(), fq.one())
        } else if j.to_vec() == fq.from_base(1728 % p) {
            (fq.one(), fq.zero())
        } else {
            let denom = fq.sub(&fq.from_base(1728 % p), &j.to_vec());
            let k = fq.mul(&j.to_vec(), &fq.inv(&denom).unwrap());
            (fq.mul(&fq.from_base(3), &k), fq.mul(&fq.from_base(2), &k))
        };
        let q: u64 = p * p;
        let mut count: i128 = 1;
        for x0 in 0..p {
            for x1 in 0..p {
                let x = vec![x0, x1];
                let x3 = fq.mul(&fq.mul(&x, &x), &x);
                let rhs = fq.add(&x3, &fq.add(&fq.mul(&a, &x), &b));
                if fq.is_zero(&rhs) {
                    count += 1;
                    continue;
                }
                let chi = fq.pow(&rhs, (q - 1) / 2);
                if chi == fq.one() {
                    count += 2;
                }
            }
        }
        let trace = (q as i128 + 1) - count;
        trace.rem_euclid(p as i128) == 0
    }

    #[test]
    fn degree_matches_mass_and_brute_force() {
        let mut p = 5u64;
        while p < 100 {
            let ss = supersingular_polynomial(p);
            assert_eq!(
                (ss.len() - 1) as u64,
                expected_ss_degree(p),
                "degree at p = {p}"
            );
            let fq = ResidueField::quadratic_extension(p);
            for j0 in 0..p {
                let j = fq.from_base(j0);
                let val = poly::eval(
                    &fq,
                    &ss.iter().map(|&c| fq.from_base(c)).collect::<Vec<_>>(),
                    &j,
                );
                let is_root = fq.is_zero(&val);
                assert_eq!(is_root, is_ss_brute(p, &j), "j = {j0} mod {p}");
            }
            p = next_prime(p);
        }
    }

    #[test]
    fn degree_formula_medium_primes() {
        for p in [211u64, 337, 509, 1009] {
            let ss = supersingular_polynomial(p);
            assert_eq!((ss.len() - 1) as u64, expected_ss_degree(p), "p = {p}");
        }
    }
}

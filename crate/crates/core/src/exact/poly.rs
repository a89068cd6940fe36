//! Dense univariate polynomial arithmetic over an abstract field:
//! multiplication, division, gcd, modular exponentiation, squarefree parts,
//! equal-degree factorization, and root extraction with multiplicity.
//!
//! Polynomials are coefficient vectors in ascending degree with no trailing
//! zeros (the zero polynomial is the empty vector).

use super::field::Field;
use num_bigint::BigUint;
use num_traits::{One, Zero};

pub fn trim<F: Field>(f: &F, p: &mut Vec<F::Elem>) {
    while let Some(c) = p.last() {
        if f.is_zero(c) {
            p.pop();
        } else {
            break;
        }
    }
}

pub fn deg<T>(p: &[T]) -> isize {
    p.len() as isize - 1
}

pub fn add<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let mut out = vec![f.zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] = f.add(&out[i], x);
    }
    for (i, y) in b.iter().enumerate() {
        out[i] = f.add(&out[i], y);
    }
    trim(f, &mut out);
    out
}

pub fn sub<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let mut out = vec![f.zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] = f.add(&out[i], x);
    }
    for (i, y) in b.iter().enumerate() {
        out[i] = f.sub(&out[i], y);
    }
    trim(f, &mut out);
    out
}

pub fn mul<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![f.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if f.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            let t = f.mul(x, y);
            out[i + j] = f.add(&out[i + j], &t);
        }
    }
    trim(f, &mut out);
    out
}

pub fn scalar_mul<F: Field>(f: &F, c: &F::Elem, a: &[F::Elem]) -> Vec<F::Elem> {
    let mut out: Vec<F::Elem> = a.iter().map(|x| f.mul(c, x)).collect();
    trim(f, &mut out);
    out
}

/// (quotient, remainder) with deg(remainder) < deg(divisor).
pub fn divrem<F: Field>(f: &F, num: &[F::Elem], den: &[F::Elem]) -> (Vec<F::Elem>, Vec<F::Elem>) {
    assert!(!den.is_empty(), "division by zero polynomial");
    let mut rem = num.to_vec();
    trim(f, &mut rem);
    let dd = den.len() - 1;
    if rem.len() <= dd {
        return (vec![], rem);
    }
    let lead_inv = f.inv(&den[dd]).expect("nonzero leading coefficient");
    let mut quot = vec![f.zero(); rem.len() - dd];
    for i in (0..=rem.len() - 1 - dd).rev() {
        let c = f.mul(&rem[i + dd], &lead_inv);
        if f.is_zero(&c) {
            continue;
        }
        quot[i] = c.clone();
        for j in 0..=dd {
            let t = f.mul(&c, &den[j]);
            rem[i + j] = f.sub(&rem[i + j], &t);
        }
    }
    trim(f, &mut rem);
    trim(f, &mut quot);
    (quot, rem)
}

pub fn rem<F: Field>(f: &F, num: &[F::Elem], den: &[F::Elem]) -> Vec<F::Elem> {
    divrem(f, num, den).1
}

/// Monic gcd.
pub fn gcd<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let mut r0 = a.to_vec();
    let mut r1 = b.to_vec();
    trim(f, &mut r0);
    trim(f, &mut r1);
    while !r1.is_empty() {
        let r = rem(f, &r0, &r1);
        r0 = r1;
        r1 = r;
    }
    make_monic(f, &mut r0);
    r0
}

pub fn make_monic<F: Field>(f: &F, p: &mut Vec<F::Elem>) {
    if let Some(lead) = p.last().cloned() {
        if let Some(li) = f.inv(&lead) {
            for c in p.iter_mut() {
                *c = f.mul(c, &li);
            }
        }
    }
}

/// base^e mod m in F[x], with a big-integer exponent.
pub fn pow_mod<F: Field>(f: &F, base: &[F::Elem], e: &BigUint, m: &[F::Elem]) -> Vec<F::Elem> {
    let mut result = vec![f.one()];
    let mut b = rem(f, base, m);
    let mut e = e.clone();
    let two = BigUint::from(2u32);
    while !e.is_zero() {
        if (&e % &two).is_one() {
            result = rem(f, &mul(f, &result, &b), m);
        }
        b = rem(f, &mul(f, &b, &b), m);
        e /= &two;
    }
    result
}

pub fn derivative<F: Field>(f: &F, p: &[F::Elem]) -> Vec<F::Elem> {
    let mut out: Vec<F::Elem> = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| f.mul(&f.from_i64(i as i64), c))
        .collect();
    trim(f, &mut out);
    out
}

pub fn eval<F: Field>(f: &F, p: &[F::Elem], x: &F::Elem) -> F::Elem {
    let mut acc = f.zero();
    for c in p.iter().rev() {
        acc = f.add(&f.mul(&acc, x), c);
    }
    acc
}

/// All roots of p in the field, with multiplicity, found by gcd with
/// x^q - x followed by deterministic equal-degree splitting. `q` is the
/// field size. Roots are returned sorted by the field's element encoding.
pub fn roots_with_multiplicity<F: Field>(
    f: &F,
    p: &[F::Elem],
    q: &BigUint,
    elem_key: impl Fn(&F::Elem) -> Vec<u64> + Copy,
) -> Vec<(F::Elem, usize)> {
    let mut p = p.to_vec();
    trim(f, &mut p);
    if p.len() <= 1 {
        return vec![];
    }
    // linear-factor part: gcd(p, x^q - x)
    let x = vec![f.zero(), f.one()];
    let xq = pow_mod(f, &x, q, &p);
    let xq_minus_x = sub(f, &xq, &x);
    let lin = gcd(f, &p, &xq_minus_x);
    let mut roots: Vec<F::Elem> = Vec::new();
    split_all_roots(f, &lin, q, &mut roots);
    roots.sort_by_key(elem_key);
    // multiplicities by repeated division
    let mut out = Vec::new();
    let mut current = p;
    for r in roots {
        let lin_factor = vec![f.neg(&r), f.one()];
        let mut mult = 0usize;
        loop {
            let (quo, rem_) = divrem(f, &current, &lin_factor);
            if rem_.is_empty() && !quo.is_empty() {
                current = quo;
                mult += 1;
            } else {
                break;
            }
        }
        if mult > 0 {
            out.push((r, mult));
        }
    }
    out
}

/// Split a product of distinct monic linear factors into its roots.
fn split_all_roots<F: Field>(f: &F, p: &[F::Elem], q: &BigUint, out: &mut Vec<F::Elem>) {
    let d = deg(p);
    if d <= 0 {
        return;
    }
    if d == 1 {
        // monic x + c -> root -c
        out.push(f.neg(&p[0]));
        return;
    }
    let two = BigUint::from(2u32);
    if (q % &two).is_one() {
        // odd field size: gcd with a^((q-1)/2) - 1 for a walking a
        // canonical enumeration of monic shifts x + c, c in kappa
        let e = (q - BigUint::one()) / &two;
        let mut idx = 0u64;
        loop {
            let shift = vec![f.nth_element(idx), f.one()];
            let b = pow_mod(f, &shift, &e, p);
            let b_minus_1 = sub(f, &b, &[f.one()]);
            let g = gcd(f, p, &b_minus_1);
            let dg = deg(&g);
            if dg > 0 && dg < d {
                let (rest, r) = divrem(f, p, &g);
                debug_assert!(r.is_empty());
                split_all_roots(f, &g, q, out);
                split_all_roots(f, &rest, q, out);
                return;
            }
            idx += 1;
            assert!(idx < 1_000_000, "root splitting failed to converge");
        }
    } else {
        // characteristic 2: trace map T(a) = a + a^2 + ... + a^{2^{k-1}}
        // from F_{2^k} to F_2, for a = c*x with c walking the field
        let k = q.bits() - 1; // q = 2^k
        let mut idx = 1u64;
        loop {
            let a0 = vec![f.zero(), f.nth_element(idx)];
            let mut tr = rem(f, &a0, p);
            let mut pw = tr.clone();
            for _ in 1..k {
                pw = rem(f, &mul(f, &pw, &pw), p);
                tr = add(f, &tr, &pw);
            }
            let g = gcd(f, p, &tr);
            let dg = deg(&g);
            if dg > 0 && dg < d {
                let (rest, r) = divrem(f, p, &g);
                debug_assert!(r.is_empty());
                split_all_roots(f, &g, q, out);
                split_all_roots(f, &rest, q, out);
                return;
            }
            idx += 1;
            assert!(idx < 1_000_000, "char-2 root splitting failed");
        }
    }
}

/// Factor a squarefree monic polynomial all of whose irreducible factors
/// have the same degree `d`, over a prime field of size p. Deterministic.
pub fn equal_degree_factor<F: Field>(
    f: &F,
    poly: &[F::Elem],
    p: u64,
    d: usize,
) -> Vec<Vec<F::Elem>> {
    let mut out = Vec::new();
    edf_recurse(f, poly.to_vec(), p, d, &mut out);
    out
}

fn edf_recurse<F: Field>(f: &F, poly: Vec<F::Elem>, p: u64, d: usize, out: &mut Vec<Vec<F::Elem>>) {
    let n = deg(&poly);
    if n <= 0 {
        return;
    }
    if n as usize == d {
        let mut g = poly;
        make_monic(f, &mut g);
        out.push(g);
        return;
    }
    let qd = BigUint::from(p).pow(d as u32);
    let two = BigUint::from(2u32);
    if p % 2 == 1 {
        let e = (&qd - BigUint::one()) / &two;
        let mut idx = p; // base-p encodings with idx >= p have degree >= 1
        loop {
            let a = canonical_base_p_poly(f, idx, p);
            let b = pow_mod(f, &a, &e, &poly);
            let b_minus_1 = sub(f, &b, &[f.one()]);
            let g = gcd(f, &poly, &b_minus_1);
            let dg = deg(&g);
            if dg > 0 && dg < n {
                let (rest, r) = divrem(f, &poly, &g);
                debug_assert!(r.is_empty());
                edf_recurse(f, g, p, d, out);
                edf_recurse(f, rest, p, d, out);
                return;
            }
            idx += 1;
            assert!(idx < p.saturating_mul(1 << 20), "equal-degree splitting stalled");
        }
    } else {
        // p = 2: for each factor g of degree d, T(a) mod g is the trace of
        // a into F_2, so T(a) = a + a^2 + ... + a^{2^{d-1}} splits the
        // factors whose traces differ.
        let mut idx = 1u64;
        loop {
            let a = canonical_f2_poly(f, idx, n as usize);
            let mut tr = rem(f, &a, &poly);
            let mut pw = tr.clone();
            for _ in 1..d {
                pw = rem(f, &mul(f, &pw, &pw), &poly);
                tr = add(f, &tr, &pw);
            }
            let g = gcd(f, &poly, &tr);
            let dg = deg(&g);
            if dg > 0 && dg < n {
                let (rest, r) = divrem(f, &poly, &g);
                debug_assert!(r.is_empty());
                edf_recurse(f, g, p, d, out);
                edf_recurse(f, rest, p, d, out);
                return;
            }
            idx += 1;
            assert!(idx < 1 << 20, "char-2 equal-degree splitting stalled");
        }
    }
}

/// The idx-th polynomial over F_p, by base-p digits (ascending degree).
fn canonical_base_p_poly<F: Field>(f: &F, mut idx: u64, p: u64) -> Vec<F::Elem> {
    let mut v = Vec::new();
    while idx > 0 {
        v.push(f.from_i64((idx % p) as i64));
        idx /= p;
    }
    trim(f, &mut v);
    if v.is_empty() {
        vec![f.one()]
    } else {
        v
    }
}

/// The idx-th polynomial over F_2 of degree < n, by binary digits.
fn canonical_f2_poly<F: Field>(f: &F, idx: u64, n: usize) -> Vec<F::Elem> {
    let mut v = Vec::new();
    for i in 0..n.min(63) {
        if (idx >> i) & 1 == 1 {
            while v.len() <= i {
                v.push(f.zero());
            }
            v[i] = f.one();
        }
    }
    let mut v = v;
    trim(f, &mut v);
    if v.is_empty() {
        vec![f.one()]
    } else {
        v
    }
}

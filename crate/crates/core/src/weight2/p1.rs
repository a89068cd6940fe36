//! The projective line P^1(Z/NZ): enumeration with canonical
//! representatives and fast index lookup. Classes (c : d) are pairs with
//! gcd(c, d, N) = 1 modulo scaling by units.

use num_integer::Integer;
use std::collections::HashMap;

#[derive(Debug, Clone)]
pub struct P1List {
    pub n: u64,
    /// canonical representatives
    pub reps: Vec<(u64, u64)>,
    index: HashMap<(u64, u64), usize>,
}

impl P1List {
    pub fn new(n: u64) -> Self {
        assert!(n >= 1);
        let mut reps = Vec::new();
        let mut index = HashMap::new();
        if n == 1 {
            reps.push((0, 0));
            index.insert((0, 0), 0);
            return P1List { n, reps, index };
        }
        for c in 0..n {
            for d in 0..n {
                if gcd3(c, d, n) != 1 {
                    continue;
                }
                let canon = p1_normalize(n, c, d);
                if canon == (c, d) {
                    index.insert(canon, reps.len());
                    reps.push(canon);
                }
            }
        }
        P1List { n, reps, index }
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    /// Index of the class of (c : d); None when gcd(c, d, N) > 1.
    pub fn lookup(&self, c: i64, d: i64) -> Option<usize> {
        if self.n == 1 {
            return Some(0);
        }
        let n = self.n as i64;
        let cc = c.rem_euclid(n) as u64;
        let dd = d.rem_euclid(n) as u64;
        if gcd3(cc, dd, self.n) != 1 {
            return None;
        }
        let canon = p1_normalize(self.n, cc, dd);
        self.index.get(&canon).copied()
    }
}

fn gcd3(a: u64, b: u64, c: u64) -> u64 {
    a.gcd(&b).gcd(&c)
}

/// Canonical representative of the class of (u : v) in P^1(Z/NZ).
/// The representative has first coordinate g = gcd(u, N); the second is
/// minimized over the stabilizer of g among unit scalings.
pub fn p1_normalize(n: u64, u: u64, v: u64) -> (u64, u64) {
    let u = u % n;
    let v = v % n;
    debug_assert_eq!(gcd3(u, v, n), 1);
    if u == 0 {
        return (0, 1);
    }
    let g = u.gcd(&n);
    // find a unit s mod n with s*u = g (mod n)
    let s = unit_scaling_to(n, u, g);
    let v1 = mulmod_u(s, v, n);
    // minimize over units t = 1 + j*(n/g): t*g = g (mod n)
    let step = n / g;
    let mut best = v1;
    let mut j = 1u64;
    while j < g {
        let t = (1 + j as u128 * step as u128 % n as u128) as u64 % n;
        if t.gcd(&n) == 1 {
            let cand = mulmod_u(t, v1, n);
            if cand < best {
                best = cand;
            }
        }
        j += 1;
    }
    (g, best)
}

fn mulmod_u(a: u64, b: u64, n: u64) -> u64 {
    (a as u128 * b as u128 % n as u128) as u64
}

/// A unit s mod n with s*u = g (mod n), where g = gcd(u, n).
fn unit_scaling_to(n: u64, u: u64, g: u64) -> u64 {
    // s0 * (u/g) = 1 (mod n/g); then adjust by multiples of n/g to reach
    // a unit mod n
    let step = n / g;
    let u0 = (u / g) % step.max(1);
    let s0 = if step == 1 {
        0
    } else {
        inv_mod(u0, step).expect("u/g invertible mod n/g")
    };
    let mut s = s0 % n;
    loop {
        if s != 0 && s.gcd(&n) == 1 {
            debug_assert_eq!(mulmod_u(s, u, n), g % n);
            return s;
        }
        s = (s + step) % n;
        if s == s0 % n {
            unreachable!("no unit scaling found");
        }
    }
}

fn inv_mod(a: u64, n: u64) -> Option<u64> {
    crate::exact::integers::invmod(a % n, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight2::dims::psi_index;

    #[test]
    fn p1_sizes_match_index() {
        for n in [1u64, 2, 3, 4, 6, 8, 11, 12, 15, 24, 31, 45, 60, 101] {
            let p1 = P1List::new(n);
            assert_eq!(p1.len() as u64, psi_index(n), "N = {n}");
        }
    }

    #[test]
    fn normalization_is_orbit_invariant() {
        // brute force: two pairs are equivalent iff same canonical form
        for n in [6u64, 8, 12, 15, 18, 20] {
            let units: Vec<u64> = (1..n).filter(|a| a.gcd(&n) == 1).collect();
            for c in 0..n {
                for d in 0..n {
                    if gcd3(c, d, n) != 1 {
                        continue;
                    }
                    let canon = p1_normalize(n, c, d);
                    for &t in &units {
                        let c2 = mulmod_u(t, c, n);
                        let d2 = mulmod_u(t, d, n);
                        assert_eq!(
                            p1_normalize(n, c2, d2),
                            canon,
                            "N={n} ({c}:{d}) scaled by {t}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn lookup_agrees() {
        let p1 = P1List::new(24);
        for c in 0..24i64 {
            for d in 0..24i64 {
                let idx = p1.lookup(c, d);
                match idx {
                    Some(i) => {
                        let (rc, rd) = p1.reps[i];
                        assert_eq!(
                            p1_normalize(24, c as u64, d as u64),
                            (rc, rd)
                        );
                    }
                    None => assert_ne!(gcd3(c as u64, d as u64, 24), 1),
                }
            }
        }
    }
}

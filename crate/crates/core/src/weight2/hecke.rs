//! Hecke operators on weight-2 Manin symbols via Merel's universal
//! determinant-n matrix family
//!   X_n = { [a b; c d] : ad - bc = n, a > b >= 0, d > c >= 0 },
//! and their matrices on the plus cuspidal subspace.

use super::manin::{act, SymbolSpace};
use num_rational::BigRational;
use num_traits::Zero;

/// Merel's matrices of determinant n.
pub fn merel_matrices(n: u64) -> Vec<[i64; 4]> {
    let n = n as i64;
    let mut out = Vec::new();
    for a in 1..=n {
        // b = 0: ad = n, c in [0, d)
        if n % a == 0 {
            let d = n / a;
            for c in 0..d {
                out.push([a, 0, c, d]);
            }
        }
        for b in 1..a {
            // ad - bc = n with d > c >= 0: c(a - b) < n
            let g = gcd(a, b);
            if n % g != 0 {
                continue;
            }
            // solve b c = -n (mod a): c = c0 + t * (a/g)
            let (ag, bg, ng) = (a / g, b / g, n / g);
            let (inv, ok) = inv_mod(bg.rem_euclid(ag), ag);
            if !ok {
                continue;
            }
            let c0 = ((-ng).rem_euclid(ag) * inv).rem_euclid(ag);
            let mut c = c0;
            while c * (a - b) < n {
                let num = n + b * c;
                if num % a == 0 {
                    let d = num / a;
                    if d > c {
                        out.push([a, b, c, d]);
                    }
                }
                c += ag;
            }
        }
    }
    out
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn inv_mod(a: i64, n: i64) -> (i64, bool) {
    if n == 1 {
        return (0, true);
    }
    let (mut t, mut new_t) = (0i64, 1i64);
    let (mut r, mut new_r) = (n, a.rem_euclid(n));
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    if r != 1 {
        return (0, false);
    }
    (t.rem_euclid(n), true)
}

/// T_n of a single quotient-basis generator, in quotient coordinates.
fn hecke_on_generator(space: &SymbolSpace, p1_idx: usize, mats: &[[i64; 4]]) -> Vec<BigRational> {
    let (c, d) = space.p1.reps[p1_idx];
    let mut out = vec![BigRational::zero(); space.dim_full];
    for m in mats {
        let (nc, nd) = act(c as i64, d as i64, m);
        if let Some(j) = space.p1.lookup(nc, nd) {
            for (k, x) in space.proj[j].iter().enumerate() {
                if !x.is_zero() {
                    out[k] += x;
                }
            }
        }
    }
    out
}

/// The g x g matrix of T_n on the plus cuspidal basis. Row i holds the
/// coordinates of T_n(basis_i).
pub fn hecke_matrix_plus(space: &SymbolSpace, n: u64) -> Vec<Vec<BigRational>> {
    let g = space.plus_basis.len();
    if g == 0 {
        return Vec::new();
    }
    let mats = merel_matrices(n);
    // images of all quotient basis generators
    let gen_images: Vec<Vec<BigRational>> = space
        .basis_p1
        .iter()
        .map(|&i| hecke_on_generator(space, i, &mats))
        .collect();
    let mut rows = Vec::with_capacity(g);
    for w in &space.plus_basis {
        let mut img = vec![BigRational::zero(); space.dim_full];
        for (i, wi) in w.iter().enumerate() {
            if wi.is_zero() {
                continue;
            }
            for (k, x) in gen_images[i].iter().enumerate() {
                if !x.is_zero() {
                    img[k] += wi * x;
                }
            }
        }
        // coordinates with respect to the rref plus basis: read off at the
        // pivot columns, then verify the reconstruction exactly
        let coords: Vec<BigRational> = space
            .plus_pivots
            .iter()
            .map(|&c| img[c].clone())
            .collect();
        let mut recon = vec![BigRational::zero(); space.dim_full];
        for (j, coef) in coords.iter().enumerate() {
            if coef.is_zero() {
                continue;
            }
            for (k, b) in space.plus_basis[j].iter().enumerate() {
                if !b.is_zero() {
                    recon[k] += coef * b;
                }
            }
        }
        assert_eq!(recon, img, "Hecke image left the plus subspace");
        rows.push(coords);
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight2::manin::build_symbols;

    #[test]
    fn merel_x1_is_identity() {
        assert_eq!(merel_matrices(1), vec![[1, 0, 0, 1]]);
    }

    #[test]
    fn merel_determinants() {
        for n in [2u64, 3, 4, 5, 6, 12] {
            for m in merel_matrices(n) {
                assert_eq!((m[0] * m[3] - m[1] * m[2]) as u64, n);
                assert!(m[0] > m[1] && m[1] >= 0);
                assert!(m[3] > m[2] && m[2] >= 0);
            }
        }
        // no duplicates
        let mut v = merel_matrices(12);
        let len = v.len();
        v.sort();
        v.dedup();
        assert_eq!(v.len(), len);
    }

    #[test]
    fn hecke_eigenvalues_level_11() {
        // dim 1: the matrices are the eigenvalues of the level-11 newform:
        // a_2 = -2, a_3 = -1, a_5 = 1, a_7 = -2, a_13 = 4
        let s = build_symbols(11);
        for (n, expect) in [(2u64, -2i64), (3, -1), (5, 1), (7, -2), (13, 4)] {
            let m = hecke_matrix_plus(&s, n);
            assert_eq!(m.len(), 1);
            assert_eq!(
                m[0][0],
                BigRational::from(num_bigint::BigInt::from(expect)),
                "a_{n}"
            );
        }
    }

    #[test]
    fn hecke_operators_commute() {
        // commutativity of T_2 and T_3 on the plus space at a level with
        // genus 2
        let s = build_symbols(23);
        let m2 = hecke_matrix_plus(&s, 2);
        let m3 = hecke_matrix_plus(&s, 3);
        let prod = |a: &Vec<Vec<BigRational>>, b: &Vec<Vec<BigRational>>| {
            let g = a.len();
            let mut out = vec![vec![BigRational::zero(); g]; g];
            for i in 0..g {
                for j in 0..g {
                    for k in 0..g {
                        out[i][j] += &a[i][k] * &b[k][j];
                    }
                }
            }
            out
        };
        assert_eq!(prod(&m2, &m3), prod(&m3, &m2));
    }
}

//! Weight-2 Manin symbols for Gamma_0(N): generators indexed by P^1(Z/NZ),
//! the two- and three-term relations, the boundary map to cusp classes,
//! the cuspidal subspace, and the star involution with its plus part.

use super::dims::{genus_x0, nu_inf};
use super::p1::P1List;
use crate::exact::cyclotomic::CycField;
use crate::exact::field::Field;
use crate::exact::matrix::Mat;
use num_rational::BigRational;
use num_traits::Zero;

/// The computed symbol space at level N. Vectors are row vectors in the
/// coordinates of the relation quotient ("quotient coordinates").
#[derive(Debug)]
pub struct SymbolSpace {
    pub level: u64,
    pub p1: P1List,
    /// expansion of each P^1 generator in quotient coordinates
    pub proj: Vec<Vec<BigRational>>,
    /// P^1 indices serving as the quotient basis
    pub basis_p1: Vec<usize>,
    /// dimension of the full quotient (2g + nu_inf - 1 for N > 1)
    pub dim_full: usize,
    /// basis of the cuspidal subspace, rows in quotient coordinates
    pub cuspidal: Vec<Vec<BigRational>>,
    /// rref basis of the plus subspace of the cuspidal part
    pub plus_basis: Vec<Vec<BigRational>>,
    pub plus_pivots: Vec<usize>,
    /// number of cusp classes found (equals nu_inf)
    pub cusp_count: usize,
}

impl SymbolSpace {
    pub fn cuspidal_dim(&self) -> usize {
        self.cuspidal.len()
    }

    pub fn genus(&self) -> usize {
        self.plus_basis.len()
    }
}

fn field() -> CycField {
    CycField::rationals()
}

/// Right action of an integer matrix [a b; c d] on a symbol (u : v):
/// (u, v) * M = (u a + v c, u b + v d).
pub fn act(u: i64, v: i64, m: &[i64; 4]) -> (i64, i64) {
    (u * m[0] + v * m[2], u * m[1] + v * m[3])
}

const S_MAT: [i64; 4] = [0, -1, 1, 0];
const T_MAT: [i64; 4] = [0, -1, 1, -1];

/// Build the symbol space with its cuspidal and plus subspaces.
pub fn build_symbols(level: u64) -> SymbolSpace {
    let p1 = P1List::new(level);
    let n_sym = p1.len();
    // phase 1: two-term relations x + xS = 0
    // sub[i] = Some((free_index, sign)) or None when the generator dies
    let mut sub: Vec<Option<(usize, i64)>> = vec![None; n_sym];
    let mut assigned = vec![false; n_sym];
    let mut free: Vec<usize> = Vec::new();
    for i in 0..n_sym {
        if assigned[i] {
            continue;
        }
        let (c, d) = p1.reps[i];
        let (sc, sd) = act(c as i64, d as i64, &S_MAT);
        let j = p1.lookup(sc, sd).expect("S preserves P^1");
        if j == i {
            // 2x = 0
            sub[i] = None;
            assigned[i] = true;
        } else {
            let f = free.len();
            free.push(i);
            sub[i] = Some((f, 1));
            sub[j] = Some((f, -1));
            assigned[i] = true;
            assigned[j] = true;
        }
    }
    // phase 2: three-term relations x + xT + xT^2 = 0 over free generators
    let n_free = free.len();
    let mut rel_rows: Vec<Vec<BigRational>> = Vec::new();
    let mut seen = vec![false; n_sym];
    for i in 0..n_sym {
        if seen[i] {
            continue;
        }
        let (c, d) = p1.reps[i];
        let (tc, td) = act(c as i64, d as i64, &T_MAT);
        let it = p1.lookup(tc, td).expect("T preserves P^1");
        let (t2c, t2d) = act(tc, td, &T_MAT);
        let it2 = p1.lookup(t2c, t2d).expect("T^2 preserves P^1");
        seen[i] = true;
        seen[it] = true;
        seen[it2] = true;
        let mut row = vec![BigRational::zero(); n_free];
        for idx in [i, it, it2] {
            if let Some((f, s)) = sub[idx] {
                row[f] += BigRational::from(num_bigint::BigInt::from(s));
            }
        }
        if row.iter().any(|x| !x.is_zero()) {
            rel_rows.push(row);
        }
    }
    // quotient by the relation row space
    let k = field();
    let rel = Mat::from_rows(
        k.clone(),
        rel_rows
            .iter()
            .map(|r| r.iter().map(|x| vec![x.clone()]).collect())
            .collect(),
    );
    let mut rel_rref = rel.clone();
    let rel_pivots = if rel.rows > 0 { rel_rref.rref() } else { vec![] };
    let pivot_set: std::collections::HashSet<usize> = rel_pivots.iter().copied().collect();
    let quot_free: Vec<usize> = (0..n_free).filter(|c| !pivot_set.contains(c)).collect();
    let dim_full = quot_free.len();
    // expansion of each free generator in quotient coordinates
    let mut free_expansion: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); dim_full]; n_free];
    for (qi, &f) in quot_free.iter().enumerate() {
        free_expansion[f][qi] = BigRational::from(num_bigint::BigInt::from(1));
    }
    for (r, &pc) in rel_pivots.iter().enumerate() {
        // x_{pc} = -sum over free columns of rref[r][c] x_c
        let mut v = vec![BigRational::zero(); dim_full];
        for (qi, &f) in quot_free.iter().enumerate() {
            let coeff = &rel_rref.at(r, f)[0];
            if !coeff.is_zero() {
                v[qi] = -coeff.clone();
            }
        }
        free_expansion[pc] = v;
    }
    let proj: Vec<Vec<BigRational>> = (0..n_sym)
        .map(|i| match sub[i] {
            None => vec![BigRational::zero(); dim_full],
            Some((f, s)) => {
                let mut v = free_expansion[f].clone();
                if s < 0 {
                    for x in v.iter_mut() {
                        *x = -&*x;
                    }
                }
                v
            }
        })
        .collect();
    let basis_p1: Vec<usize> = quot_free.iter().map(|&f| free[f]).collect();
    // dimension sanity: 2g + nu_inf - 1 for N > 1
    if level > 1 {
        let expect = 2 * genus_x0(level) + nu_inf(level) - 1;
        assert_eq!(
            dim_full as u64, expect,
            "symbol quotient dimension mismatch at level {level}"
        );
    }
    // boundary map on quotient basis generators
    let mut cusp_reps: Vec<(i64, i64)> = Vec::new();
    let mut boundary_rows: Vec<Vec<BigRational>> = Vec::new();
    for &i in &basis_p1 {
        let (c, d) = p1.reps[i];
        let (a, b, cc, dd) = lift_to_sl2(c as i64, d as i64, level as i64);
        // boundary of g{0, infinity} = [g infinity] - [g 0] = [a/cc] - [b/dd]
        let mut row: Vec<BigRational> = vec![BigRational::zero(); cusp_reps.len()];
        for (num, den, sign) in [(a, cc, 1i64), (b, dd, -1i64)] {
            let idx = cusp_class_index(level as i64, (num, den), &mut cusp_reps);
            if idx >= row.len() {
                row.resize(cusp_reps.len(), BigRational::zero());
            }
            row[idx] += BigRational::from(num_bigint::BigInt::from(sign));
        }
        boundary_rows.push(row);
    }
    let cusp_count = cusp_reps.len();
    for row in boundary_rows.iter_mut() {
        row.resize(cusp_count, BigRational::zero());
    }
    if level > 1 {
        assert_eq!(cusp_count as u64, nu_inf(level), "cusp class count");
    }
    // cuspidal subspace: left kernel of the boundary matrix
    let bd = Mat::from_rows(
        k.clone(),
        boundary_rows
            .iter()
            .map(|r| r.iter().map(|x| vec![x.clone()]).collect())
            .collect(),
    );
    let ker = bd.left_kernel();
    let cuspidal: Vec<Vec<BigRational>> = (0..ker.rows)
        .map(|r| (0..ker.cols).map(|c| ker.at(r, c)[0].clone()).collect())
        .collect();
    assert_eq!(
        cuspidal.len() as u64,
        2 * genus_x0(level),
        "cuspidal dimension at level {level}"
    );
    // star involution eta: (c : d) -> (-c : d) in quotient coordinates
    let mut eta = vec![vec![BigRational::zero(); dim_full]; dim_full];
    for (qi, &i) in basis_p1.iter().enumerate() {
        let (c, d) = p1.reps[i];
        let j = p1.lookup(-(c as i64), d as i64).expect("eta preserves P^1");
        eta[qi] = proj[j].clone();
    }
    // plus part of the cuspidal subspace: rows w = a * C with w eta = w
    let g = genus_x0(level) as usize;
    let plus_rows = if g == 0 {
        Vec::new()
    } else {
        // rows of C*(eta - I), kernel over the a-coefficients
        let mut m_rows = Vec::with_capacity(cuspidal.len());
        for crow in &cuspidal {
            let mut out = vec![BigRational::zero(); dim_full];
            for (i, ci) in crow.iter().enumerate() {
                if ci.is_zero() {
                    continue;
                }
                for (j, e) in eta[i].iter().enumerate() {
                    if !e.is_zero() {
                        out[j] += ci * e;
                    }
                }
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o -= &crow[j];
            }
            m_rows.push(out);
        }
        let m = Mat::from_rows(
            k.clone(),
            m_rows
                .iter()
                .map(|r| r.iter().map(|x| vec![x.clone()]).collect())
                .collect(),
        );
        let a_basis = m.left_kernel();
        let mut rows = Vec::new();
        for r in 0..a_basis.rows {
            let mut w = vec![BigRational::zero(); dim_full];
            for i in 0..a_basis.cols {
                let a = &a_basis.at(r, i)[0];
                if a.is_zero() {
                    continue;
                }
                for (j, cj) in cuspidal[i].iter().enumerate() {
                    if !cj.is_zero() {
                        w[j] += a * cj;
                    }
                }
            }
            rows.push(w);
        }
        rows
    };
    // rref the plus basis
    let (plus_basis, plus_pivots) = if plus_rows.is_empty() {
        (Vec::new(), Vec::new())
    } else {
        let mut m = Mat::from_rows(
            k,
            plus_rows
                .iter()
                .map(|r| r.iter().map(|x| vec![x.clone()]).collect())
                .collect(),
        );
        let piv = m.rref();
        let rows: Vec<Vec<BigRational>> = (0..piv.len())
            .map(|r| (0..m.cols).map(|c| m.at(r, c)[0].clone()).collect())
            .collect();
        (rows, piv)
    };
    assert_eq!(plus_basis.len(), g, "plus subspace dimension at level {level}");
    SymbolSpace {
        level,
        p1,
        proj,
        basis_p1,
        dim_full,
        cuspidal,
        plus_basis,
        plus_pivots,
        cusp_count,
    }
}

/// Lift (c : d) mod N to a matrix [a b; c' d'] in SL_2(Z) with bottom row
/// congruent to (c, d) mod N.
fn lift_to_sl2(c: i64, d: i64, n: i64) -> (i64, i64, i64, i64) {
    if n == 1 {
        return (1, 0, 0, 1);
    }
    let mut c = c.rem_euclid(n);
    let mut d = d.rem_euclid(n);
    if c == 0 && d == 0 {
        unreachable!("not a P^1 element");
    }
    if c == 0 {
        d = 1;
    } else {
        let mut k = 0;
        while gcd_i(c, d + k * n) != 1 {
            k += 1;
            assert!(k < 2 * n, "no coprime lift found");
        }
        d += k * n;
    }
    if c == 0 {
        return (1, 0, 0, 1);
    }
    // a d - b c = 1 from the extended gcd x c + y d = 1
    let (x, y) = ext_gcd_i(c, d);
    (y, -x, c, d)
}

fn gcd_i(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// (x, y) with x a + y b = gcd(a, b) = 1.
fn ext_gcd_i(a: i64, b: i64) -> (i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut x0, mut x1) = (1i64, 0i64);
    let (mut y0, mut y1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (x0, x1) = (x1, x0 - q * x1);
        (y0, y1) = (y1, y0 - q * y1);
    }
    debug_assert_eq!(r0.abs(), 1);
    if r0 < 0 {
        (-x0, -y0)
    } else {
        (x0, y0)
    }
}

/// Index of the Gamma_0(N)-class of the cusp num/den in `reps`, appending
/// a new class when unseen.
fn cusp_class_index(n: i64, cusp: (i64, i64), reps: &mut Vec<(i64, i64)>) -> usize {
    let c = normalize_cusp(cusp);
    for (i, r) in reps.iter().enumerate() {
        if cusps_equivalent(n, c, *r) {
            return i;
        }
    }
    reps.push(c);
    reps.len() - 1
}

fn normalize_cusp((mut p, mut q): (i64, i64)) -> (i64, i64) {
    if q == 0 {
        return (1, 0);
    }
    let g = gcd_i(p, q);
    if g != 0 {
        p /= g;
        q /= g;
    }
    if q < 0 {
        p = -p;
        q = -q;
    }
    (p, q)
}

/// Gamma_0(N)-equivalence of cusps p1/q1 and p2/q2 (in lowest terms):
/// holds iff s1 q2 = s2 q1 mod gcd(q1 q2, N), where p_j s_j = 1 mod q_j.
pub fn cusps_equivalent(n: i64, a: (i64, i64), b: (i64, i64)) -> bool {
    let (p1, q1) = normalize_cusp(a);
    let (p2, q2) = normalize_cusp(b);
    let s1 = inverse_mod_or_zero(p1, q1);
    let s2 = inverse_mod_or_zero(p2, q2);
    let modulus = gcd_i(q1 * q2, n);
    if modulus == 0 {
        return (s1 * q2 - s2 * q1) == 0;
    }
    (s1 * q2 - s2 * q1).rem_euclid(modulus) == 0
}

fn inverse_mod_or_zero(p: i64, q: i64) -> i64 {
    if q.abs() <= 1 {
        return if q == 0 { 1 } else { 0 };
    }
    let (x, _) = ext_gcd_i(p.rem_euclid(q), q);
    x.rem_euclid(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cuspidal_dimensions() {
        // N = 11: cuspidal dimension 2 (genus 1); N = 10: dimension 0
        assert_eq!(build_symbols(11).cuspidal_dim(), 2);
        assert_eq!(build_symbols(10).cuspidal_dim(), 0);
        // N = 141: 2 * genus
        assert_eq!(genus_x0(141), 15);
        assert_eq!(build_symbols(141).cuspidal_dim(), 30);
    }

    #[test]
    fn quotient_and_cusp_counts() {
        for n in [2u64, 3, 4, 6, 11, 12, 15, 20, 24, 30, 31, 45, 49] {
            let s = build_symbols(n);
            assert_eq!(s.cusp_count as u64, nu_inf(n), "cusps at {n}");
            assert_eq!(
                s.dim_full as u64,
                2 * genus_x0(n) + nu_inf(n) - 1,
                "quotient dim at {n}"
            );
            assert_eq!(s.genus() as u64, genus_x0(n), "plus dim at {n}");
        }
    }

    #[test]
    fn cusp_equivalence_count_oracle() {
        // partition all cusps a/c from lifted symbols into classes and
        // compare against nu_inf for a few levels
        for n in [8i64, 12, 18, 36, 50, 100] {
            let mut reps: Vec<(i64, i64)> = Vec::new();
            for q in 0..=n {
                for p in -n..=n {
                    if gcd_i(p, q) != 1 {
                        continue;
                    }
                    cusp_class_index(n, (p, q), &mut reps);
                }
            }
            assert_eq!(reps.len() as u64, nu_inf(n as u64), "N = {n}");
        }
    }

    #[test]
    fn sl2_lifts() {
        for n in [5i64, 12, 31] {
            let p1 = P1List::new(n as u64);
            for &(c, d) in &p1.reps {
                let (a, b, cc, dd) = lift_to_sl2(c as i64, d as i64, n);
                assert_eq!(a * dd - b * cc, 1);
                assert_eq!((cc - c as i64).rem_euclid(n), 0);
                assert_eq!((dd - d as i64).rem_euclid(n), 0);
            }
        }
    }
}

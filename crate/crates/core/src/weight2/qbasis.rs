//! Integral echelon q-expansion bases of S_2(Gamma_0(N)).
//!
//! The q-expansion map is realized through the Hecke pairing: the dual
//! basis of a maximal independent family {T_{n_1}, ..., T_{n_g}} inside
//! the Hecke algebra yields the basis f_j = sum_n c_j(n) q^n where
//! T_n = sum_j c_j(n) T_{n_j}. The coordinates c_j(n) are solved from
//! probe columns of the operator matrices, which is exact because the
//! probe map is injective on the (g-dimensional) Hecke algebra once the
//! probe columns reach rank g.

use super::dims::genus_x0;
use super::hecke::hecke_matrix_plus;
use super::manin::{build_symbols, SymbolSpace};
use crate::exact::cyclotomic::CycField;
use crate::exact::field::Field as _;
use crate::exact::matrix::{hermite_normal_form, saturate_rows_at_p, Mat};
use crate::hsm::sturm;
use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

/// An integral reduced-echelon basis of S_2(Gamma_0(N)) to precision P.
/// Row j lists the coefficients of q^1 .. q^{P-1}.
#[derive(Debug, Clone, PartialEq)]
pub struct CuspformBasis {
    pub level: u64,
    pub weight: u32,
    pub dim: usize,
    pub precision: i64,
    pub rows: Vec<Vec<BigInt>>,
}

impl CuspformBasis {
    pub fn truncate(&self, precision: i64) -> CuspformBasis {
        assert!(precision <= self.precision && precision >= 2);
        CuspformBasis {
            level: self.level,
            weight: self.weight,
            dim: self.dim,
            precision,
            rows: self
                .rows
                .iter()
                .map(|r| r[..(precision - 1) as usize].to_vec())
                .collect(),
        }
    }

    /// Rows as truncated series over a coefficient field.
    pub fn to_series<F: crate::exact::field::Field>(
        &self,
        field: &F,
        from_bigint: impl Fn(&BigInt) -> F::Elem,
    ) -> Vec<crate::qexp::TruncatedSeries<F>> {
        self.rows
            .iter()
            .map(|r| {
                let mut coeffs = vec![field.zero()];
                coeffs.extend(r.iter().map(&from_bigint));
                crate::qexp::TruncatedSeries::from_coeffs(
                    field.clone(),
                    0,
                    coeffs,
                    self.precision,
                )
            })
            .collect()
    }
}

/// Compute the basis from the modular-symbols engine.
pub fn q_basis(level: u64, precision: i64) -> CuspformBasis {
    assert!(precision >= 2);
    let g = genus_x0(level) as usize;
    if g == 0 {
        return CuspformBasis {
            level,
            weight: 2,
            dim: 0,
            precision,
            rows: vec![],
        };
    }
    let space = build_symbols(level);
    q_basis_from_symbols(&space, precision)
}

pub fn q_basis_from_symbols(space: &SymbolSpace, precision: i64) -> CuspformBasis {
    let level = space.level;
    let g = space.plus_basis.len();
    let nmax = (precision - 1).max(1) as usize;
    // prime-power operator matrices M_{p^e} for p^e <= nmax
    let spf = smallest_prime_factors(nmax);
    let mut prime_powers: Vec<usize> = Vec::new();
    for q in 2..=nmax {
        let p = spf[q];
        let mut t = q;
        while t % p == 0 {
            t /= p;
        }
        if t == 1 {
            prime_powers.push(q);
        }
    }
    let primes: Vec<usize> = prime_powers.iter().copied().filter(|&q| spf[q] == q).collect();
    let prime_mats: Vec<(usize, Vec<Vec<BigRational>>)> = primes
        .par_iter()
        .map(|&p| (p, hecke_matrix_plus(space, p as u64)))
        .collect();
    let mut mats: std::collections::HashMap<usize, Vec<Vec<BigRational>>> =
        prime_mats.into_iter().collect();
    let identity: Vec<Vec<BigRational>> = (0..g)
        .map(|i| {
            (0..g)
                .map(|j| {
                    if i == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    mats.insert(1, identity);
    for &q in &prime_powers {
        let p = spf[q];
        if q == p {
            continue;
        }
        let m = if level % p as u64 == 0 {
            // U_p^e
            mat_mul(&mats[&p], &mats[&(q / p)])
        } else {
            // T_{p^{e+1}} = T_p T_{p^e} - p T_{p^{e-1}}
            let a = mat_mul(&mats[&p], &mats[&(q / p)]);
            let scale = BigRational::from(BigInt::from(p as i64));
            let b = &mats[&(q / p / p)];
            mat_sub_scaled(&a, b, &scale)
        };
        mats.insert(q, m);
    }
    // probe columns until the pivot family reaches rank g
    let sturm_bound = sturm(2, level) as usize;
    let mut probes: Vec<usize> = vec![0];
    let (pivot_ns, u_vecs) = loop {
        let u_vecs = probe_vectors(&mats, &spf, g, &probes, nmax);
        // greedy pivots by incremental elimination
        let mut chosen: Vec<usize> = Vec::new();
        let mut elim: Vec<(usize, Vec<BigRational>)> = Vec::new();
        for n in 1..=nmax {
            if chosen.len() == g {
                break;
            }
            let mut v = u_vecs[n].clone();
            reduce_against(&mut v, &elim);
            if let Some(p) = v.iter().position(|x| !x.is_zero()) {
                let inv = &v[p].clone();
                for x in v.iter_mut() {
                    *x = &*x / inv;
                }
                elim.push((p, v));
                chosen.push(n);
            }
        }
        if chosen.len() == g {
            assert!(
                *chosen.last().unwrap() <= sturm_bound,
                "Hecke pivots exceeded the Sturm bound at level {level}"
            );
            break (chosen, u_vecs);
        }
        assert!(
            probes.len() < g,
            "probe columns failed to span the Hecke algebra at level {level}"
        );
        let next = probes.len();
        probes.push(next);
    };
    // solve c(n) from the probe data: R c = u_n with R the pivot columns
    let k = CycField::rationals();
    let rdim = u_vecs[1].len();
    let r_mat = Mat::from_rows(
        k.clone(),
        (0..rdim)
            .map(|row| {
                pivot_ns
                    .iter()
                    .map(|&n| vec![u_vecs[n][row].clone()])
                    .collect()
            })
            .collect(),
    );
    // independent rows of R
    let mut rt = r_mat.transpose();
    let row_pivots = rt.rref();
    assert_eq!(row_pivots.len(), g);
    let square = r_mat.submatrix(&row_pivots, &(0..g).collect::<Vec<_>>());
    let inv = invert(&square);
    let coeff_cols: Vec<Vec<BigRational>> = (1..=nmax)
        .into_par_iter()
        .map(|n| {
            let rhs: Vec<BigRational> = row_pivots
                .iter()
                .map(|&r| u_vecs[n][r].clone())
                .collect();
            let c: Vec<BigRational> = (0..g)
                .map(|i| {
                    let mut acc = BigRational::zero();
                    for (j, rj) in rhs.iter().enumerate() {
                        if !rj.is_zero() {
                            acc += &inv[i][j] * rj;
                        }
                    }
                    acc
                })
                .collect();
            // consistency on all probe coordinates
            for row in 0..rdim {
                let mut acc = BigRational::zero();
                for (j, &n_j) in pivot_ns.iter().enumerate() {
                    if !c[j].is_zero() {
                        acc += &u_vecs[n_j][row] * &c[j];
                    }
                }
                assert_eq!(acc, u_vecs[n][row], "Hecke span inconsistency at n = {n}");
            }
            c
        })
        .collect();
    // q-expansion rows f_j(q) = sum_n c_j(n) q^n
    let raw_rows: Vec<Vec<BigRational>> = (0..g)
        .map(|j| (0..nmax).map(|n| coeff_cols[n][j].clone()).collect())
        .collect();
    let rows = echelon_saturate_integral(raw_rows, level);
    // pivot exponents at most the Sturm bound
    for r in &rows {
        let piv = r.iter().position(|x| !x.is_zero()).unwrap() + 1;
        assert!(piv <= sturm_bound, "echelon pivot beyond Sturm bound");
    }
    CuspformBasis {
        level,
        weight: 2,
        dim: g,
        precision,
        rows,
    }
}

/// Probe columns u_n = M_n * e_probe (stacked over probes) by dynamic
/// programming over the smallest prime factor.
fn probe_vectors(
    mats: &std::collections::HashMap<usize, Vec<Vec<BigRational>>>,
    spf: &[usize],
    g: usize,
    probes: &[usize],
    nmax: usize,
) -> Vec<Vec<BigRational>> {
    let dim = g * probes.len();
    let mut out: Vec<Vec<BigRational>> = vec![vec![]; nmax + 1];
    // u_1 = stacked standard basis vectors
    let mut u1 = vec![BigRational::zero(); dim];
    for (k, &pr) in probes.iter().enumerate() {
        u1[k * g + pr] = BigRational::one();
    }
    out[1] = u1;
    for n in 2..=nmax {
        let p = spf[n];
        let mut q = 1usize;
        let mut m = n;
        while m % p == 0 {
            m /= p;
            q *= p;
        }
        let mat = &mats[&q];
        let prev = if m == 1 { &out[1] } else { &out[m] };
        // blockwise matrix-vector products; mat rows express T(w_i) in the
        // basis, so column coordinates transform by mat^T acting blockwise
        let mut v = vec![BigRational::zero(); dim];
        for (b, _) in probes.iter().enumerate() {
            let block = &prev[b * g..(b + 1) * g];
            for i in 0..g {
                let mut acc = BigRational::zero();
                for (j, x) in block.iter().enumerate() {
                    if !x.is_zero() {
                        acc += &mat[j][i] * x;
                    }
                }
                v[b * g + i] = acc;
            }
        }
        out[n] = v;
    }
    out
}

fn reduce_against(v: &mut [BigRational], elim: &[(usize, Vec<BigRational>)]) {
    for (p, e) in elim {
        if !v[*p].is_zero() {
            let f = v[*p].clone();
            for (x, y) in v.iter_mut().zip(e) {
                *x -= &f * y;
            }
        }
    }
}

fn mat_mul(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let g = a.len();
    let mut out = vec![vec![BigRational::zero(); g]; g];
    for i in 0..g {
        for k in 0..g {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..g {
                if !b[k][j].is_zero() {
                    out[i][j] += &a[i][k] * &b[k][j];
                }
            }
        }
    }
    out
}

fn mat_sub_scaled(
    a: &[Vec<BigRational>],
    b: &[Vec<BigRational>],
    scale: &BigRational,
) -> Vec<Vec<BigRational>> {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| {
            ra.iter()
                .zip(rb)
                .map(|(x, y)| x - &(scale * y))
                .collect()
        })
        .collect()
}

fn invert(m: &Mat<CycField>) -> Vec<Vec<BigRational>> {
    let g = m.rows;
    let k = m.field.clone();
    let mut aug = Mat::zero(k.clone(), g, 2 * g);
    for i in 0..g {
        for j in 0..g {
            *aug.at_mut(i, j) = m.at(i, j).clone();
        }
        *aug.at_mut(i, g + i) = k.one();
    }
    let piv = aug.rref();
    assert_eq!(piv, (0..g).collect::<Vec<_>>(), "singular pivot matrix");
    (0..g)
        .map(|i| (0..g).map(|j| aug.at(i, g + j)[0].clone()).collect())
        .collect()
}

/// Clear denominators of a Q-echelon basis, saturate the row lattice at
/// the denominator primes, and return the Hermite normal form: the
/// canonical integral echelon basis (pivot coefficients are 1 whenever an
/// integral unit-pivot basis exists at all).
fn echelon_saturate_integral(rows: Vec<Vec<BigRational>>, level: u64) -> Vec<Vec<BigInt>> {
    let k = CycField::rationals();
    let cols = rows.first().map_or(0, |r| r.len());
    let mut m = Mat::from_rows(
        k.clone(),
        rows.iter()
            .map(|r| r.iter().map(|x| vec![x.clone()]).collect())
            .collect(),
    );
    m.rref();
    // clear denominators per row
    let mut int_rows: Vec<Vec<BigInt>> = Vec::new();
    let mut sat_primes: Vec<u64> = Vec::new();
    for i in 0..m.rows {
        let mut l = BigUint::one();
        for j in 0..cols {
            l = l.lcm(m.at(i, j)[0].denom().magnitude());
        }
        for (p, _) in crate::exact::integers::factor_integer(&l).factors {
            use num_traits::ToPrimitive;
            if let Some(p) = p.to_u64() {
                if !sat_primes.contains(&p) {
                    sat_primes.push(p);
                }
            }
        }
        let lb = BigInt::from_biguint(Sign::Plus, l);
        int_rows.push(
            (0..cols)
                .map(|j| (&m.at(i, j)[0] * BigRational::from(lb.clone())).to_integer())
                .collect(),
        );
    }
    for p in sat_primes {
        saturate_rows_at_p(&mut int_rows, p);
    }
    let _ = level;
    hermite_normal_form(&mut int_rows);
    int_rows
}

fn smallest_prime_factors(nmax: usize) -> Vec<usize> {
    let mut spf: Vec<usize> = (0..=nmax).collect();
    let mut i = 2;
    while i * i <= nmax {
        if spf[i] == i {
            let mut j = i * i;
            while j <= nmax {
                if spf[j] == j {
                    spf[j] = i;
                }
                j += i;
            }
        }
        i += 1;
    }
    spf
}

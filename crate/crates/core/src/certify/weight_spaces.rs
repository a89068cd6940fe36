//! Weight-k modular form spaces M_k(Gamma_0(M); Q) assembled from
//! closed-form Eisenstein series and products, with an exact dimension
//! certificate: the space is flagged complete exactly when the achieved
//! dimension matches the dimension formula.
//!
//! Atoms are the classical Eisenstein series
//!   E_j^{psi,phi}(q) = c0 + sum_{n>=1} (sum_{d|n} psi(n/d) phi(d) d^{j-1}) q^n
//! for primitive character pairs with psi(-1)phi(-1) = (-1)^j, together
//! with their q -> q^t oldform shifts and the weight-2 cuspidal bases from
//! the modular-symbols engine. Products of two atoms whose characters are
//! mutually inverse (and Galois coordinate splitting) generate the
//! trivial-character space.

use crate::characters::DirichletCharacter;
use crate::eisenstein::divisors;
use crate::exact::cyclotomic::CycField;
use crate::exact::field::Field;
use crate::exact::matrix::saturate_rows_at_p;
use crate::qexp::TruncatedSeries;
use crate::weight2;
use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Bernoulli numbers b_0..b_n by the defining recurrence.
pub fn bernoulli_numbers(n: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        if m == 0 {
            b.push(BigRational::one());
            continue;
        }
        // b_m = -1/(m+1) sum_{j<m} C(m+1, j) b_j
        let mut acc = BigRational::zero();
        for (j, bj) in b.iter().enumerate() {
            acc += BigRational::from(BigInt::from(binomial(m as u64 + 1, j as u64))) * bj;
        }
        let denom = BigRational::from(BigInt::from(m as i64 + 1));
        b.push(-acc / denom);
    }
    b
}

fn binomial(n: u64, k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Generalized Bernoulli number B_{k,chi} over Q(chi), from Bernoulli
/// polynomials: B_{k,chi} = f^{k-1} sum_a chi(a) B_k(a/f).
pub fn bernoulli_bk(chi: &DirichletCharacter, k: u32, field: &CycField) -> Vec<BigRational> {
    assert!(chi.is_primitive());
    let f = chi.modulus();
    let b = bernoulli_numbers(k as usize);
    let mut acc = field.zero();
    for a in 1..=f {
        let Some(t) = chi.value_exponent(a % f.max(1)) else {
            continue;
        };
        // B_k(a/f) = sum_i C(k, i) b_i (a/f)^{k-i}
        let x = BigRational::new(BigInt::from(a), BigInt::from(f));
        let mut poly = BigRational::zero();
        let mut xpow = BigRational::one();
        // accumulate from i = k down to 0 so xpow tracks (a/f)^{k-i}
        for i in (0..=k).rev() {
            let c = BigRational::from(binomial(k as u64, i as u64)) * &b[i as usize] * &xpow;
            poly += c;
            xpow *= &x;
        }
        let zeta_m = field.order() as u64;
        let zc = field.zeta_pow((t * (zeta_m / chi.order())) as i64);
        let term = field.mul(&zc, &field.from_rational(poly));
        acc = field.add(&acc, &term);
    }
    let scale = BigRational::from(BigInt::from(f)).pow((k as i32) - 1);
    field.mul(&acc, &field.from_rational(scale))
}

/// One Eisenstein atom E_j^{psi,phi}(q^t) over a common cyclotomic field.
fn eisenstein_atom(
    psi: &DirichletCharacter,
    phi: &DirichletCharacter,
    j: u32,
    t: u64,
    field: &CycField,
    precision: i64,
) -> TruncatedSeries<CycField> {
    let m_ord = field.order() as u64;
    let value = |chi: &DirichletCharacter, a: u64| -> Option<Vec<BigRational>> {
        chi.value_exponent(a % chi.modulus().max(1))
            .map(|e| field.zeta_pow((e * (m_ord / chi.order())) as i64))
    };
    let mut coeffs = vec![field.zero(); precision.max(0) as usize];
    if psi.modulus() == 1 && !coeffs.is_empty() {
        // c0 = -B_{j,phi} / (2j)
        let bk = bernoulli_bk(phi, j, field);
        let scale = BigRational::new(BigInt::from(-1), BigInt::from(2 * j as i64));
        coeffs[0] = field.mul(&bk, &field.from_rational(scale));
    } else if j == 1 && phi.modulus() == 1 && !coeffs.is_empty() {
        // weight 1 is symmetric in the pair: E_1(psi, 1) = E_1(1, psi)
        let bk = bernoulli_bk(psi, 1, field);
        let scale = BigRational::new(BigInt::from(-1), BigInt::from(2));
        coeffs[0] = field.mul(&bk, &field.from_rational(scale));
    }
    for (n, c) in coeffs.iter_mut().enumerate().skip(1) {
        let n = n as u64;
        let mut acc = field.zero();
        for d in divisors(n) {
            let (Some(vp), Some(vq)) = (value(psi, n / d), value(phi, d)) else {
                continue;
            };
            let dk = field.from_rational(BigRational::from(BigInt::from(d)).pow(j as i32 - 1));
            let term = field.mul(&field.mul(&vp, &vq), &dk);
            acc = field.add(&acc, &term);
        }
        *c = acc;
    }
    TruncatedSeries::from_coeffs(field.clone(), 0, coeffs, precision).degeneracy(t)
}

/// A verified-or-flagged basis of M_k(Gamma_0(M); Q).
#[derive(Debug, Clone)]
pub struct WeightSpace {
    pub level: u64,
    pub weight: u32,
    pub precision: i64,
    /// integral echelon basis rows over Q, coefficients of q^0..q^{P-1}
    pub rows: Vec<Vec<BigInt>>,
    /// achieved dimension equals the dimension formula
    pub complete: bool,
    pub expected_dim: u64,
}

impl WeightSpace {
    pub fn to_series<F: crate::exact::field::Field>(
        &self,
        field: &F,
        from_bigint: impl Fn(&BigInt) -> F::Elem,
    ) -> Vec<TruncatedSeries<F>> {
        self.rows
            .iter()
            .map(|r| {
                TruncatedSeries::from_coeffs(
                    field.clone(),
                    0,
                    r.iter().map(&from_bigint).collect(),
                    self.precision,
                )
            })
            .collect()
    }
}

/// Assemble M_k(Gamma_0(M); Q) to the requested precision. Optional
/// ingested cusp forms (same file format as the weight-2 bases, any
/// weight) enrich the candidate pool.
pub fn modular_forms_space(
    m_level: u64,
    k: u32,
    precision: i64,
    ingested_cusp_rows: &[Vec<BigInt>],
) -> WeightSpace {
    assert!(k >= 2 && k % 2 == 0, "even weight >= 2 only");
    let expected = weight2::dim_mk(m_level, k);
    // atoms by weight and character key (modulus, conrey of the primitive
    // product character); key None marks the weight-2 trivial family
    let mut pool: Vec<TruncatedSeries<CycField>> = Vec::new();
    // big coefficient field: all characters mod divisors of M have order
    // dividing lambda = exponent of (Z/MZ)^x; lcm over divisors works
    let mut big_order = 1u64;
    for d in divisors(m_level) {
        for chi in DirichletCharacter::enumerate(d) {
            big_order = big_order.lcm(&chi.order());
        }
    }
    let field = CycField::new(big_order as u32);
    // collect atoms: (weight j, theta-key, series)
    let mut atoms: Vec<(u32, (u64, u64), TruncatedSeries<CycField>)> = Vec::new();
    for j in 1..=k {
        if j > k {
            break;
        }
        for f1 in divisors(m_level) {
            for f2 in divisors(m_level) {
                if f1 * f2 > m_level || m_level % (f1 * f2) != 0 {
                    continue;
                }
                for psi in DirichletCharacter::enumerate(f1) {
                    if !psi.is_primitive() {
                        continue;
                    }
                    for phi in DirichletCharacter::enumerate(f2) {
                        if !phi.is_primitive() {
                            continue;
                        }
                        let parity_ok = if j % 2 == 0 {
                            psi.parity() * phi.parity() == 1
                        } else {
                            psi.parity() * phi.parity() == -1
                        };
                        if !parity_ok {
                            continue;
                        }
                        if j == 2 && f1 == 1 && f2 == 1 {
                            continue; // E_2 handled separately
                        }
                        let theta = psi.induce(f1 * f2).mul(&phi.induce(f1 * f2)).primitive();
                        let key = (theta.modulus(), theta.conrey_index());
                        for t in divisors(m_level / (f1 * f2)) {
                            let s = eisenstein_atom(&psi, &phi, j, t, &field, precision)
                                .truncate(precision);
                            atoms.push((j, key, s));
                        }
                    }
                }
            }
        }
    }
    // weight-2 trivial-character Eisenstein family E_2(q) - t E_2(q^t)
    if m_level >= 2 {
        for s in crate::eisenstein::eis2_space(m_level, precision) {
            atoms.push((2, (1, 1), lift_rational_series(&s, &field)));
        }
    }
    // weight-2 cusp atoms from the symbols engine
    let q = CycField::rationals();
    for d in divisors(m_level) {
        if weight2::genus_x0(d) == 0 {
            continue;
        }
        let basis = weight2::q_basis(d, precision);
        for row in basis.to_series(&q, |x| vec![BigRational::from(x.clone())]) {
            for t in divisors(m_level / d) {
                let lifted = lift_rational_series(&row.degeneracy(t).truncate(precision), &field);
                atoms.push((2, (1, 1), lifted));
            }
        }
    }
    // ingested cusp forms of weight k
    for row in ingested_cusp_rows {
        let mut coeffs = vec![field.zero()];
        coeffs.extend(row.iter().map(|x| field.from_rational(BigRational::from(x.clone()))));
        pool.push(TruncatedSeries::from_coeffs(
            field.clone(),
            0,
            coeffs,
            precision,
        ));
    }
    // single atoms of full weight k with trivial product character
    for (j, key, s) in &atoms {
        if *j == k && *key == (1, 1) {
            pool.push(s.clone());
        }
    }
    // pairs of atoms with inverse characters and weights summing to k
    for (i, (j1, key1, s1)) in atoms.iter().enumerate() {
        for (j2, key2, s2) in atoms.iter().skip(i) {
            if j1 + j2 != k {
                continue;
            }
            // product character trivial: theta2 = inverse of theta1
            let inv_key = {
                let theta = DirichletCharacter::from_conrey(key1.0, key1.1).unwrap();
                let inv = theta.inverse().primitive();
                (inv.modulus(), inv.conrey_index())
            };
            if *key2 != inv_key {
                continue;
            }
            if let Ok(p) = s1.mul(s2) {
                pool.push(p.truncate(precision));
            }
        }
    }
    // split into rational coordinate series
    let deg = field.degree();
    let mut rational_rows: Vec<Vec<BigRational>> = Vec::new();
    for s in &pool {
        for coord in 0..deg {
            let mut row = vec![BigRational::zero(); precision as usize];
            let mut nonzero = false;
            for e in 0..precision {
                if e >= s.valuation && e < s.precision {
                    let c = &s.coeff(e)[coord];
                    if !c.is_zero() {
                        nonzero = true;
                    }
                    row[e as usize] = c.clone();
                }
            }
            if nonzero {
                rational_rows.push(row);
            }
        }
    }
    // echelonize over Q with an incremental pass (pool can be large);
    // the full pool rank is computed so the dimension certificate is
    // meaningful; rank above the formula indicates a non-form in the pool
    let rows = incremental_echelon(rational_rows, precision as usize);
    let achieved = rows.len() as u64;
    assert!(
        achieved <= expected,
        "candidate pool escaped M_{k}(Gamma_0({m_level})): rank {achieved} > {expected}"
    );
    // integralize and saturate
    let int_rows = integral_saturated(rows);
    WeightSpace {
        level: m_level,
        weight: k,
        precision,
        rows: int_rows,
        complete: achieved == expected,
        expected_dim: expected,
    }
}

fn lift_rational_series(
    s: &TruncatedSeries<CycField>,
    field: &CycField,
) -> TruncatedSeries<CycField> {
    if s.field == *field {
        return s.clone();
    }
    let coeffs = s
        .coeffs
        .iter()
        .map(|c| field.from_rational(c[0].clone()))
        .collect();
    TruncatedSeries::new(field.clone(), s.valuation, coeffs, s.precision)
}

/// Row-by-row elimination to a reduced echelon basis.
fn incremental_echelon(
    rows: Vec<Vec<BigRational>>,
    cols: usize,
) -> Vec<Vec<BigRational>> {
    let mut elim: Vec<(usize, Vec<BigRational>)> = Vec::new();
    for mut row in rows {
        for (p, e) in &elim {
            if !row[*p].is_zero() {
                let f = row[*p].clone();
                for (x, y) in row.iter_mut().zip(e) {
                    *x -= &f * y;
                }
            }
        }
        if let Some(p) = row.iter().position(|x| !x.is_zero()) {
            let inv = row[p].clone();
            for x in row.iter_mut() {
                *x = &*x / &inv;
            }
            elim.push((p, row));
        }
    }
    elim.sort_by_key(|(p, _)| *p);
    // back-substitute to reduced form
    let pivots: Vec<usize> = elim.iter().map(|(p, _)| *p).collect();
    let mut rows: Vec<Vec<BigRational>> = elim.into_iter().map(|(_, r)| r).collect();
    for i in (0..rows.len()).rev() {
        let (pi, tail) = (pivots[i], rows[i].clone());
        for j in 0..i {
            if !rows[j][pi].is_zero() {
                let f = rows[j][pi].clone();
                for (x, y) in rows[j].iter_mut().zip(&tail) {
                    *x -= &f * y;
                }
            }
        }
    }
    let _ = cols;
    rows
}

fn integral_saturated(rows: Vec<Vec<BigRational>>) -> Vec<Vec<BigInt>> {
    if rows.is_empty() {
        return vec![];
    }
    let mut sat_primes: Vec<u64> = Vec::new();
    let mut int_rows: Vec<Vec<BigInt>> = Vec::new();
    for r in &rows {
        let mut l = BigUint::one();
        for x in r {
            l = l.lcm(x.denom().magnitude());
        }
        for (p, _) in crate::exact::integers::factor_integer(&l).factors {
            if let Some(p) = p.to_u64() {
                if !sat_primes.contains(&p) {
                    sat_primes.push(p);
                }
            }
        }
        let lb = BigRational::from(BigInt::from_biguint(Sign::Plus, l));
        int_rows.push(r.iter().map(|x| (x * &lb).to_integer()).collect());
    }
    for p in sat_primes {
        saturate_rows_at_p(&mut int_rows, p);
    }
    // integer staircase (strictly increasing pivots, fraction-free): a
    // unit-pivot reduced form need not be integral at primes dividing the
    // level, and the provider only needs a saturated basis
    integer_staircase(&mut int_rows);
    int_rows
}

fn integer_staircase(rows: &mut Vec<Vec<BigInt>>) {
    use num_integer::Integer as _;
    rows.retain(|r| r.iter().any(|x| !x.is_zero()));
    let mut done = 0usize;
    while done < rows.len() {
        // find the row with the leftmost pivot among rows[done..]
        let (best, piv) = rows[done..]
            .iter()
            .enumerate()
            .map(|(i, r)| (i + done, r.iter().position(|x| !x.is_zero()).unwrap()))
            .min_by_key(|&(i, p)| (p, i))
            .unwrap();
        rows.swap(done, best);
        let lead = rows[done][piv].clone();
        for i in done + 1..rows.len() {
            if rows[i][piv].is_zero() {
                continue;
            }
            let li = rows[i][piv].clone();
            let g = lead.gcd(&li);
            let (a, b) = (&lead / &g, &li / &g);
            let base = rows[done].clone();
            let row = &mut rows[i];
            for (x, y) in row.iter_mut().zip(&base) {
                *x = &*x * &a - y * &b;
            }
            // content reduction
            let mut content = BigInt::zero();
            for x in row.iter() {
                content = content.gcd(x);
            }
            if !content.is_zero() && !content.is_one() {
                for x in row.iter_mut() {
                    *x = &*x / &content;
                }
            }
        }
        rows.retain(|r| r.iter().any(|x| !x.is_zero()));
        done += 1;
    }
}



/// A weight-space basis over a residue field, with the dimension
/// certificate: rank over F_p at most the formula dimension always (rank
/// over Q bounds it), so equality certifies completeness.
#[derive(Debug, Clone)]
pub struct WeightSpaceModP {
    pub level: u64,
    pub weight: u32,
    pub precision: i64,
    pub p: u64,
    /// echelonized rows over F_p, coefficients of q^0..q^{P-1}
    pub rows: Vec<Vec<u64>>,
    pub complete: bool,
    pub expected_dim: u64,
}

/// Assemble M_k(Gamma_0(M); F_p) directly over a residue field: the same
/// Eisenstein-product pool as the characteristic-zero construction, with
/// character values reduced at a slot of Q(zeta_B) over p. Requires p
/// coprime to B (the lcm of character orders mod divisors of M) and to M.
pub fn modular_forms_space_mod_p(
    m_level: u64,
    k: u32,
    precision: i64,
    p: u64,
) -> Result<WeightSpaceModP, String> {
    use crate::exact::residue::{primes_above, Fp, ResidueField};
    assert!(k >= 2 && k % 2 == 0);
    let expected = weight2::dim_mk(m_level, k);
    let mut big_order = 1u64;
    for d in divisors(m_level) {
        for chi in DirichletCharacter::enumerate(d) {
            big_order = big_order.lcm(&chi.order());
        }
    }
    if big_order > 1 && big_order % p == 0 {
        return Err(format!("p = {p} divides the character-order lcm {big_order}"));
    }
    if m_level % p == 0 {
        return Err(format!("p = {p} divides the level {m_level}"));
    }
    let slot = primes_above(p, big_order as u32)
        .map_err(|e| e.to_string())?
        .into_iter()
        .next()
        .expect("at least one slot");
    let kappa = slot.residue_field();
    let f = kappa.f();
    // character value in kappa: zeta_B -> class of x
    let zeta = kappa.gen();
    let value = |chi: &DirichletCharacter, a: u64| -> Option<Vec<u64>> {
        chi.value_exponent(a % chi.modulus().max(1)).map(|e| {
            kappa.pow(&zeta, e * (big_order / chi.order()))
        })
    };
    let atom = |psi: &DirichletCharacter, phi: &DirichletCharacter, j: u32, t: u64| -> (TruncatedSeries<ResidueField>, bool) {
        let mut coeffs = vec![kappa.zero(); precision.max(0) as usize];
        // -B_{j,chi}/(2j); when p divides the denominator, the
        // p-integral normalization p^v * E reduces to a nonzero constant
        // (the Hasse-invariant phenomenon), so the atom degenerates to it
        let bk_const = |chi: &DirichletCharacter| -> (Vec<u64>, bool) {
            let field = CycField::new(big_order as u32);
            let bk = bernoulli_bk(chi, j, &field);
            let fe = crate::exact::cyclotomic::FieldElement::new(field.clone(), bk);
            let scale = BigRational::new(BigInt::from(-1), BigInt::from(2 * j as i64));
            let mut val = fe.mul(&crate::exact::cyclotomic::FieldElement::from_rational(
                field.clone(),
                scale,
            ));
            let mut den = val.denominator_lcm();
            let mut v = 0u32;
            let bp = num_bigint::BigUint::from(p);
            while (&den % &bp) == num_bigint::BigUint::from(0u32) {
                den /= &bp;
                v += 1;
            }
            if v > 0 {
                let pf = crate::exact::cyclotomic::FieldElement::from_rational(
                    field.clone(),
                    BigRational::from(BigInt::from(bp.pow(v))),
                );
                val = val.mul(&pf);
            }
            (
                slot.reduce(&val).expect("p-integral after normalization"),
                v > 0,
            )
        };
        let mut constant_only = false;
        if psi.modulus() == 1 && !coeffs.is_empty() {
            let (c0, degenerate) = bk_const(phi);
            coeffs[0] = c0;
            constant_only = degenerate;
        } else if j == 1 && phi.modulus() == 1 && !coeffs.is_empty() {
            let (c0, degenerate) = bk_const(psi);
            coeffs[0] = c0;
            constant_only = degenerate;
        }
        if constant_only {
            return (
                TruncatedSeries::from_coeffs(kappa.clone(), 0, coeffs, precision)
                    .degeneracy(t)
                    .truncate(precision),
                true,
            );
        }
        for (n, c) in coeffs.iter_mut().enumerate().skip(1) {
            let n = n as u64;
            let mut acc = kappa.zero();
            for d in divisors(n) {
                let (Some(vp), Some(vq)) = (value(psi, n / d), value(phi, d)) else {
                    continue;
                };
                let dk = kappa.pow(&kappa.from_base(d % p), (j - 1) as u64);
                let term = kappa.mul(&kappa.mul(&vp, &vq), &dk);
                acc = kappa.add(&acc, &term);
            }
            *c = acc;
        }
        (
            TruncatedSeries::from_coeffs(kappa.clone(), 0, coeffs, precision)
                .degeneracy(t)
                .truncate(precision),
            false,
        )
    };
    let tail_atom = |psi: &DirichletCharacter, phi: &DirichletCharacter, j: u32, t: u64| -> TruncatedSeries<ResidueField> {
        let mut coeffs = vec![kappa.zero(); precision.max(0) as usize];
        for (n, c) in coeffs.iter_mut().enumerate().skip(1) {
            let n = n as u64;
            let mut acc = kappa.zero();
            for d in divisors(n) {
                let (Some(vp), Some(vq)) = (value(psi, n / d), value(phi, d)) else {
                    continue;
                };
                let dk = kappa.pow(&kappa.from_base(d % p), (j - 1) as u64);
                acc = kappa.add(&acc, &kappa.mul(&kappa.mul(&vp, &vq), &dk));
            }
            *c = acc;
        }
        TruncatedSeries::from_coeffs(kappa.clone(), 0, coeffs, precision)
            .degeneracy(t)
            .truncate(precision)
    };
    // atoms
    let mut atoms: Vec<(u32, (u64, u64), TruncatedSeries<ResidueField>)> = Vec::new();
    for j in 1..=k {
        for f1 in divisors(m_level) {
            for f2 in divisors(m_level) {
                if f1 * f2 > m_level || m_level % (f1 * f2) != 0 {
                    continue;
                }
                for psi in DirichletCharacter::enumerate(f1) {
                    if !psi.is_primitive() {
                        continue;
                    }
                    for phi in DirichletCharacter::enumerate(f2) {
                        if !phi.is_primitive() {
                            continue;
                        }
                        let parity_ok = if j % 2 == 0 {
                            psi.parity() * phi.parity() == 1
                        } else {
                            psi.parity() * phi.parity() == -1
                        };
                        if !parity_ok || (j == 2 && f1 == 1 && f2 == 1) {
                            continue;
                        }
                        let theta = psi.induce(f1 * f2).mul(&phi.induce(f1 * f2)).primitive();
                        let key = (theta.modulus(), theta.conrey_index());
                        let shifts = divisors(m_level / (f1 * f2));
                        let built_flagged: Vec<(TruncatedSeries<ResidueField>, bool)> = shifts
                            .iter()
                            .map(|&t| atom(&psi, &phi, j, t))
                            .collect();
                        // when the constant degenerated (Hasse case), the
                        // difference of two shifts is the reduction of an
                        // integral form with the constants cancelled
                        let degenerate = built_flagged.iter().any(|(_, d)| *d);
                        let built: Vec<TruncatedSeries<ResidueField>> =
                            built_flagged.into_iter().map(|(s, _)| s).collect();
                        if degenerate && shifts.len() >= 2 {
                            let tails: Vec<TruncatedSeries<ResidueField>> = shifts
                                .iter()
                                .map(|&t| tail_atom(&psi, &phi, j, t))
                                .collect();
                            for a in 0..tails.len() {
                                for b in a + 1..tails.len() {
                                    if let Ok(d) = tails[a].sub(&tails[b]) {
                                        atoms.push((j, key, d));
                                    }
                                }
                            }
                        }
                        for s in built {
                            atoms.push((j, key, s));
                        }
                    }
                }
            }
        }
    }
    if m_level >= 2 {
        for s in crate::eisenstein::eis2_space(m_level, precision) {
            if let Ok(r) = crate::qexp::reduce_series(&s, &slot) {
                atoms.push((2, (1, 1), r));
            }
        }
    }
    // the level-1 cusp form of weight 12 (its reduction is never a
    // constant, which repairs the pool at primes where an Eisenstein
    // series degenerates to the Hasse constant)
    if k >= 12 {
        let (_, _, delta, _) = crate::eisenstein::eis_level1(precision);
        if let Ok(dred) = crate::qexp::reduce_series(&delta, &slot) {
            for t in divisors(m_level) {
                atoms.push((12, (1, 1), dred.degeneracy(t).truncate(precision)));
            }
        }
    }
    // weight-2 cusp atoms
    for d in divisors(m_level) {
        if weight2::genus_x0(d) == 0 {
            continue;
        }
        let basis = weight2::q_basis(d, precision);
        let rows = basis.to_series(&kappa, |x: &BigInt| {
            use num_traits::ToPrimitive;
            let m = (x.magnitude() % num_bigint::BigUint::from(p)).to_u64().unwrap();
            kappa.from_base(if x.sign() == num_bigint::Sign::Minus && m != 0 {
                p - m
            } else {
                m
            })
        });
        for row in rows {
            for t in divisors(m_level / d) {
                atoms.push((2, (1, 1), row.degeneracy(t).truncate(precision)));
            }
        }
    }
    // pool: single full-weight trivial atoms plus inverse-character pairs
    let mut pool: Vec<TruncatedSeries<ResidueField>> = Vec::new();
    for (j, key, s) in &atoms {
        if *j == k && *key == (1, 1) {
            pool.push(s.clone());
        }
    }
    // Hasse filtration: mod p, a form of weight k - (p - 1) is a form of
    // weight k with the same q-expansion
    if p > 3 && k as u64 >= (p - 1) + 2 {
        let lower = modular_forms_space_mod_p(m_level, k - (p - 1) as u32, precision, p)?;
        for row in &lower.rows {
            pool.push(TruncatedSeries::from_coeffs(
                kappa.clone(),
                0,
                row.iter().map(|&v| kappa.from_base(v)).collect(),
                precision,
            ));
        }
    }
    // theta images: q d/dq maps weight k - p - 1 mod p into weight k
    if p > 3 && k as u64 >= p + 3 {
        let lower = modular_forms_space_mod_p(m_level, k - (p + 1) as u32, precision, p)?;
        for row in &lower.rows {
            let coeffs: Vec<Vec<u64>> = row
                .iter()
                .enumerate()
                .map(|(n, &v)| {
                    kappa.from_base(crate::exact::integers::mulmod(n as u64 % p, v, p))
                })
                .collect();
            pool.push(TruncatedSeries::from_coeffs(
                kappa.clone(),
                0,
                coeffs,
                precision,
            ));
        }
    }
    for (i, (j1, key1, s1)) in atoms.iter().enumerate() {
        for (j2, key2, s2) in atoms.iter().skip(i) {
            if j1 + j2 != k {
                continue;
            }
            let inv_key = {
                let theta = DirichletCharacter::from_conrey(key1.0, key1.1).unwrap();
                let inv = theta.inverse().primitive();
                (inv.modulus(), inv.conrey_index())
            };
            if *key2 != inv_key {
                continue;
            }
            if let Ok(prod) = s1.mul(s2) {
                pool.push(prod.truncate(precision));
            }
        }
    }
    // coordinate-split over F_p and echelonize with u64 arithmetic
    let fp = Fp::new(p);
    let cols = precision as usize;
    let mut elim: Vec<(usize, Vec<u64>)> = Vec::new();
    for s in &pool {
        for coord in 0..f {
            let mut row = vec![0u64; cols];
            let mut nonzero = false;
            for e in 0..precision {
                if e >= s.valuation && e < s.precision {
                    let v = s.coeff(e)[coord];
                    if v != 0 {
                        nonzero = true;
                    }
                    row[e as usize] = v;
                }
            }
            if !nonzero {
                continue;
            }
            for (piv, er) in &elim {
                if row[*piv] != 0 {
                    let factor = row[*piv];
                    for (x, y) in row.iter_mut().zip(er) {
                        *x = fp.sub(x, &crate::exact::integers::mulmod(factor, *y, p));
                    }
                }
            }
            if let Some(piv) = row.iter().position(|&x| x != 0) {
                let inv = crate::exact::integers::invmod(row[piv], p).unwrap();
                for x in row.iter_mut() {
                    *x = crate::exact::integers::mulmod(*x, inv, p);
                }
                elim.push((piv, row));
                if elim.len() as u64 > expected {
                    return Err(format!(
                        "pool escaped M_{k}(Gamma_0({m_level})) mod {p}"
                    ));
                }
            }
        }
    }
    elim.sort_by_key(|(piv, _)| *piv);
    // back-substitute to reduced echelon
    let pivots: Vec<usize> = elim.iter().map(|(piv, _)| *piv).collect();
    let mut rows: Vec<Vec<u64>> = elim.into_iter().map(|(_, r)| r).collect();
    for i in (0..rows.len()).rev() {
        let (pi, base) = (pivots[i], rows[i].clone());
        for r in rows.iter_mut().take(i) {
            if r[pi] != 0 {
                let factor = r[pi];
                for (x, y) in r.iter_mut().zip(&base) {
                    *x = fp.sub(x, &crate::exact::integers::mulmod(factor, *y, p));
                }
            }
        }
    }
    let achieved = rows.len() as u64;
    Ok(WeightSpaceModP {
        level: m_level,
        weight: k,
        precision,
        p,
        rows,
        complete: achieved == expected,
        expected_dim: expected,
    })
}

//! The zero locus of lambda * lambda^w on the j-line at the conductor
//! level: the polynomial J(X) whose roots are the j-invariants of common
//! zeros, computed by interpolating determinants of the X-linear stacked
//! matrix of the intersection operator H(X) M_k cap M_{k+10}, where
//!   H(X) = ((12 G4)^3 - (G4^3 - G6^2) X) / (lambda lambda^w).
//!
//! Every candidate root is verified by an explicit rank drop, mirroring
//! the prime-divisor procedure with the primes of kappa[X].

use super::ss_poly::supersingular_polynomial;
use super::weight_spaces::modular_forms_space_mod_p;
use crate::characters::DirichletCharacter;
use crate::eisenstein::eis1;
use crate::exact::cyclotomic::CycField;
use crate::exact::field::Field;
use crate::exact::matrix::{det_cyc, Mat};
use crate::exact::poly;
use crate::exact::residue::{PrimeSlot, ResidueField};
use crate::hsm::sturm;
use crate::qexp::{reduce_series, TruncatedSeries};
use crate::weight2::psi_index;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

/// Flags for one root of J(X).
#[derive(Debug, Clone, Serialize)]
pub struct ZeroLocusRoot {
    pub j: String,
    pub multiplicity: usize,
    pub supersingular: bool,
    /// j = 0 or j = 1728
    pub elliptic: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ZeroLocusReport {
    /// the level the locus was computed at (conductor of lambda)
    pub level: u64,
    pub weight_k: u32,
    /// J(X) over the residue field, ascending coefficients, as strings
    pub j_poly: Vec<String>,
    pub roots: Vec<ZeroLocusRoot>,
    pub ss_nonelliptic_count: usize,
    /// both weight spaces dimension-certified complete
    pub complete: bool,
}

/// Internal: raw roots with field elements.
pub struct ZeroLocusData {
    pub report: ZeroLocusReport,
    pub root_elems: Vec<(Vec<u64>, usize)>,
    pub j_poly: Vec<Vec<u64>>,
}

/// The modular-ratio numerator pieces at level 1: (12 G4)^3 and
/// 1728 Delta = G4^3 - G6^2, to the requested precision, over Q.
fn level1_pieces(precision: i64) -> (TruncatedSeries<CycField>, TruncatedSeries<CycField>) {
    let (g4, _g6, delta, _j) = crate::eisenstein::eis_level1(precision + 2);
    let g4c = g4.mul(&g4).unwrap().mul(&g4).unwrap().truncate(precision);
    let k = CycField::rationals();
    let c1728 = k.from_i64(1728);
    let num_const = g4c.scalar_mul(&c1728); // (12 G4)^3
    let num_linear = delta.truncate(precision).scalar_mul(&c1728); // 1728 Delta
    (num_const, num_linear)
}

/// The J polynomial and root data over the residue field of a slot,
/// without supersingular flags (used by both the certification path and
/// the characteristic-zero reconstruction). `chi_dual` is the primitive
/// character of lambda (the dual of the pipeline character).
pub fn j_polynomial_mod_slot(
    chi_dual: &DirichletCharacter,
    slot: &PrimeSlot,
    weight_k: u32,
) -> Result<(Vec<Vec<u64>>, Vec<(Vec<u64>, usize)>, bool), String> {
    let m_level = chi_dual.conductor();
    let p = slot.p;
    if p == 2 || p == 3 {
        return Err("zero locus needs residue characteristic at least 5".into());
    }
    let kappa = slot.residue_field();
    let precision = sturm(weight_k + 12, m_level) + 8;
    // lambda and its Fricke partner at level M over K, integral
    // normalization; the partner is proportional to the Eisenstein series
    // of the conjugate character (lambda itself when chi is quadratic)
    let field = CycField::new(chi_dual.order() as u32);
    let lam = clear_denominators(
        &field,
        &eis1(chi_dual, &field, precision).map_err(|e| e.to_string())?,
    );
    let lam_w = clear_denominators(
        &field,
        &eis1(&chi_dual.inverse().primitive(), &field, precision).map_err(|e| e.to_string())?,
    );
    // weight spaces M_k and M_{k+10} at level M, built over F_p with the
    // rank certificate against the dimension formula
    let ws_k = modular_forms_space_mod_p(m_level, weight_k, precision, p)?;
    let ws_big = modular_forms_space_mod_p(m_level, weight_k + 10, precision, p)?;
    let complete = ws_k.complete && ws_big.complete;
    // reduce everything at the slot
    let lam_p = reduce_series(&lam, slot).map_err(|e| e.to_string())?;
    let lam_w_p = reduce_series(&lam_w, slot).map_err(|e| e.to_string())?;
    let d_p = lam_p.mul(&lam_w_p).map_err(|e| e.to_string())?;
    if d_p.is_zero_to_precision() {
        return Err("lambda lambda^w vanishes at the slot".into());
    }
    let lift_rows = |rows: &Vec<Vec<u64>>| -> Vec<TruncatedSeries<ResidueField>> {
        rows.iter()
            .map(|r| {
                TruncatedSeries::from_coeffs(
                    kappa.clone(),
                    0,
                    r.iter().map(|&v| kappa.from_base(v)).collect(),
                    precision,
                )
            })
            .collect()
    };
    let mk_rows = lift_rows(&ws_k.rows);
    let mbig_rows = lift_rows(&ws_big.rows);
    // rank checks: reduced spaces must keep their dimension
    let (num_const_q, num_lin_q) = level1_pieces(precision);
    let num_const = reduce_rational_series(&num_const_q, slot)?;
    let num_lin = reduce_rational_series(&num_lin_q, slot)?;
    // rows: (const - lin * X) g_i  and  (lambda lambda^w) h_j;
    // each row is (constant part, X part)
    let mut const_rows: Vec<TruncatedSeries<ResidueField>> = Vec::new();
    let mut lin_rows: Vec<TruncatedSeries<ResidueField>> = Vec::new();
    for g in &mk_rows {
        const_rows.push(num_const.mul(g).map_err(|e| e.to_string())?);
        lin_rows.push(num_lin.mul(g).map_err(|e| e.to_string())?.neg());
    }
    let zero = TruncatedSeries::zero(kappa.clone(), precision);
    for h in &mbig_rows {
        const_rows.push(d_p.mul(h).map_err(|e| e.to_string())?);
        lin_rows.push(zero.clone());
    }
    let data = linear_pencil_divisors(&kappa, &const_rows, &lin_rows, mk_rows.len());
    let (j_poly, roots) = data?;
    // degree bound: deg J <= psi(M)/3
    let bound = (psi_index(m_level) / 3) as usize;
    if j_poly.len() > bound + 1 {
        return Err(format!(
            "zero locus degree {} exceeds the divisor bound {}",
            j_poly.len() - 1,
            bound
        ));
    }
    Ok((j_poly, roots, complete))
}

/// Full zero-locus report at a slot: the J polynomial with verified roots
/// and the supersingular/elliptic flags.
pub fn zero_locus_mod_slot(
    chi_dual: &DirichletCharacter,
    slot: &PrimeSlot,
    weight_k: u32,
) -> Result<ZeroLocusData, String> {
    let m_level = chi_dual.conductor();
    let p = slot.p;
    let kappa = slot.residue_field();
    let (j_poly, roots, complete) = j_polynomial_mod_slot(chi_dual, slot, weight_k)?;
    // flags
    let ss = supersingular_polynomial(p);
    let ss_kappa: Vec<Vec<u64>> = ss.iter().map(|&c| kappa.from_base(c)).collect();
    let mut out_roots = Vec::new();
    let mut ss_nonelliptic = 0usize;
    for (r, mult) in &roots {
        let ss_val = poly::eval(&kappa, &ss_kappa, r);
        let supersingular = kappa.is_zero(&ss_val);
        let elliptic =
            kappa.is_zero(r) || *r == kappa.from_base(1728 % p);
        if supersingular && !elliptic {
            ss_nonelliptic += 1;
        }
        out_roots.push(ZeroLocusRoot {
            j: elem_string(r),
            multiplicity: *mult,
            supersingular,
            elliptic,
        });
    }
    let report = ZeroLocusReport {
        level: m_level,
        weight_k,
        j_poly: j_poly.iter().map(|c| elem_string(c)).collect(),
        roots: out_roots,
        ss_nonelliptic_count: ss_nonelliptic,
        complete,
    };
    Ok(ZeroLocusData {
        report,
        root_elems: roots,
        j_poly,
    })
}

fn elem_string(e: &[u64]) -> String {
    if e.len() == 1 || e.iter().skip(1).all(|&c| c == 0) {
        format!("{}", e[0])
    } else {
        let mut parts = Vec::new();
        for (i, &c) in e.iter().enumerate() {
            if c == 0 {
                continue;
            }
            match i {
                0 => parts.push(format!("{c}")),
                1 => parts.push(format!("{c}*t")),
                _ => parts.push(format!("{c}*t^{i}")),
            }
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join("+")
        }
    }
}

fn clear_denominators(
    field: &CycField,
    s: &TruncatedSeries<CycField>,
) -> TruncatedSeries<CycField> {
    use num_integer::Integer;
    let mut den = BigUint::one();
    for c in &s.coeffs {
        den = den.lcm(&field.denominator_lcm(c));
    }
    let scale =
        field.from_rational(BigRational::from(BigInt::from(den)));
    s.scalar_mul(&scale)
}

fn reduce_rational_series(
    s: &TruncatedSeries<CycField>,
    slot: &PrimeSlot,
) -> Result<TruncatedSeries<ResidueField>, String> {
    // level-1 series live over Q regardless of the slot's field; rebuild
    // coefficients directly mod p
    let kappa = slot.residue_field();
    let p = slot.p;
    use num_traits::ToPrimitive;
    let coeffs: Result<Vec<Vec<u64>>, String> = s
        .coeffs
        .iter()
        .map(|c| {
            let q = &c[0];
            if !q.is_integer() {
                let dm = (q.denom().magnitude() % BigUint::from(p)).to_u64().unwrap();
                if dm == 0 {
                    return Err("non-integral level-1 coefficient".into());
                }
            }
            let num = q.numer();
            let den = q.denom();
            let nm = (num.magnitude() % BigUint::from(p)).to_u64().unwrap();
            let nm = if num.is_negative() && nm != 0 { p - nm } else { nm };
            let dm = (den.magnitude() % BigUint::from(p)).to_u64().unwrap();
            let inv = crate::exact::integers::invmod(dm, p).ok_or("denominator not invertible")?;
            Ok(kappa.from_base(crate::exact::integers::mulmod(nm, inv, p)))
        })
        .collect();
    Ok(TruncatedSeries::from_coeffs(
        kappa,
        s.valuation,
        coeffs?,
        s.precision,
    ))
}

type PencilResult = Result<(Vec<Vec<u64>>, Vec<(Vec<u64>, usize)>), String>;

/// Prime divisors of the linear pencil A(X) = C + X L over kappa[X]:
/// the gcd of the determinant polynomials of two maximal nonsingular
/// minors, with every root verified by a rank drop of A(root).
fn linear_pencil_divisors(
    kappa: &ResidueField,
    const_rows: &[TruncatedSeries<ResidueField>],
    lin_rows: &[TruncatedSeries<ResidueField>],
    x_deg_rows: usize,
) -> PencilResult {
    let rows = const_rows.len();
    let lo = const_rows
        .iter()
        .chain(lin_rows)
        .filter(|s| !s.is_zero_to_precision())
        .map(|s| s.valuation)
        .min()
        .unwrap_or(0);
    let hi = const_rows
        .iter()
        .chain(lin_rows.iter().filter(|s| !s.is_zero_to_precision()))
        .map(|s| s.precision)
        .min()
        .unwrap_or(0);
    let eval_matrix = |alpha: &Vec<u64>| -> Mat<ResidueField> {
        let data: Vec<Vec<Vec<u64>>> = (0..rows)
            .map(|i| {
                (lo..hi)
                    .map(|e| {
                        let c = if e >= const_rows[i].valuation && e < const_rows[i].precision {
                            const_rows[i].coeff(e)
                        } else {
                            kappa.zero()
                        };
                        let l = if !lin_rows[i].is_zero_to_precision()
                            && e >= lin_rows[i].valuation
                            && e < lin_rows[i].precision
                        {
                            lin_rows[i].coeff(e)
                        } else {
                            kappa.zero()
                        };
                        kappa.add(&c, &kappa.mul(alpha, &l))
                    })
                    .collect()
            })
            .collect();
        Mat::from_rows(kappa.clone(), data)
    };
    // generic rank: max over a few sample points
    let mut r0 = 0usize;
    let samples: Vec<Vec<u64>> = (0..(x_deg_rows + 4) as u64)
        .map(|i| kappa.nth_element(i))
        .collect();
    let mut best_sample = kappa.zero();
    for alpha in &samples {
        let rank = eval_matrix(alpha).rank();
        if rank > r0 {
            r0 = rank;
            best_sample = alpha.clone();
        }
    }
    if r0 == 0 {
        return Err("pencil is identically zero".into());
    }
    // minors from the best sample's pivots
    let m0 = eval_matrix(&best_sample);
    let mut m0r = m0.clone();
    let col_piv = m0r.rref();
    let mut m0t = m0.transpose();
    let row_piv = m0t.rref();
    if col_piv.len() != r0 || row_piv.len() != r0 {
        return Err("pencil pivot extraction failed".into());
    }
    // determinant polynomial of a minor by interpolation; degree at most
    // the number of X-bearing rows in the minor
    let det_poly = |cols: &[usize]| -> Vec<Vec<u64>> {
        let degree = row_piv.iter().filter(|&&r| r < x_deg_rows).count();
        let pts: Vec<Vec<u64>> = (0..=(degree as u64)).map(|i| kappa.nth_element(i)).collect();
        let vals: Vec<Vec<u64>> = pts
            .iter()
            .map(|alpha| {
                let m = eval_matrix(alpha);
                let minor = m.submatrix(&row_piv, cols);
                minor.det_gauss()
            })
            .collect();
        lagrange_interpolate(kappa, &pts, &vals)
    };
    let d1 = det_poly(&col_piv);
    // second minor: skip the first pivot column
    let second_cols: Option<Vec<usize>> = {
        let keep: Vec<usize> = (0..m0.cols).filter(|c| *c != col_piv[0]).collect();
        let sub = m0.submatrix(&(0..m0.rows).collect::<Vec<_>>(), &keep);
        let mut subr = sub.clone();
        let piv = subr.rref();
        if piv.len() == r0 {
            Some(piv.iter().map(|&c| keep[c]).collect())
        } else {
            None
        }
    };
    let fp = kappa.clone();
    let mut j_poly = d1;
    if let Some(cols2) = second_cols {
        let d2 = det_poly(&cols2);
        j_poly = poly::gcd(&fp, &j_poly, &d2);
    } else {
        poly::make_monic(&fp, &mut j_poly);
    }
    if j_poly.is_empty() {
        return Err("determinant polynomial vanished identically".into());
    }
    // roots verified by rank drop
    let q = kappa.size();
    let candidates = poly::roots_with_multiplicity(&fp, &j_poly, &q, |e| e.clone());
    let mut verified = Vec::new();
    for (root, mult) in candidates {
        let rank = eval_matrix(&root).rank();
        if rank < r0 {
            verified.push((root, mult));
        }
    }
    Ok((j_poly, verified))
}

fn lagrange_interpolate(
    kappa: &ResidueField,
    pts: &[Vec<u64>],
    vals: &[Vec<u64>],
) -> Vec<Vec<u64>> {
    let n = pts.len();
    let mut acc: Vec<Vec<u64>> = vec![];
    for i in 0..n {
        // basis polynomial prod_{j != i} (X - x_j) / (x_i - x_j)
        let mut num: Vec<Vec<u64>> = vec![kappa.one()];
        let mut den = kappa.one();
        for j in 0..n {
            if i == j {
                continue;
            }
            num = poly::mul(kappa, &num, &[kappa.neg(&pts[j]), kappa.one()]);
            den = kappa.mul(&den, &kappa.sub(&pts[i], &pts[j]));
        }
        let scale = kappa.mul(&vals[i], &kappa.inv(&den).expect("distinct points"));
        let term = poly::scalar_mul(kappa, &scale, &num);
        acc = poly::add(kappa, &acc, &term);
    }
    acc
}

/// Characteristic-zero J polynomial at the conductor level, as integer
/// coefficients (content-reduced), reconstructed from the monic J over
/// many residue fields by the Chinese remainder theorem and rational
/// reconstruction, then verified stable.
pub fn zero_locus_char0(
    chi_dual: &DirichletCharacter,
    weight_k: u32,
) -> Result<Vec<BigInt>, String> {
    use crate::exact::matrix::{rational_reconstruct, word_prime_sequence};
    use num_integer::Integer;
    let mut primes = word_prime_sequence().filter(|&p| {
        chi_dual.order() % p != 0 && chi_dual.conductor() % p != 0 && p > 3
    });
    let mut used: Vec<(u64, Vec<u64>)> = Vec::new();
    let mut last: Option<Vec<BigRational>> = None;
    let mut stable = 0;
    for _ in 0..64 {
        let p = primes.next().unwrap();
        let slot = crate::exact::residue::primes_above(p, chi_dual.order() as u32)
            .map_err(|e| e.to_string())?
            .into_iter()
            .next()
            .unwrap();
        let (j_poly, _roots, complete) = j_polynomial_mod_slot(chi_dual, &slot, weight_k)?;
        if !complete {
            return Err("weight spaces incomplete at a reconstruction prime".into());
        }
        // monic J with prime-field coefficients
        let mut monic: Vec<u64> = Vec::with_capacity(j_poly.len());
        for c in &j_poly {
            match slot.residue_field().to_base(c) {
                Some(v) => monic.push(v),
                None => return Err("J left the prime field at a reconstruction prime".into()),
            }
        }
        // keep the majority degree
        used.push((p, monic));
        let deg_max = used.iter().map(|(_, m)| m.len()).max().unwrap();
        used.retain(|(_, m)| m.len() == deg_max);
        // CRT + rational reconstruction of each coefficient
        let mut modulus = BigUint::from(1u32);
        let mut residues: Vec<BigUint> = vec![BigUint::from(0u32); deg_max];
        let mut ok = true;
        for (q, m) in &used {
            let bq = BigUint::from(*q);
            for (i, &c) in m.iter().enumerate() {
                // incremental CRT
                let cur = &residues[i] % &bq;
                let inv = mod_inverse(&(&modulus % &bq), &bq);
                let diff = (BigUint::from(c) + &bq - cur) % &bq;
                let t = (diff * inv) % &bq;
                residues[i] += &modulus * t;
            }
            modulus *= bq;
            let _ = &mut ok;
        }
        let mut coeffs: Vec<BigRational> = Vec::with_capacity(deg_max);
        for r in &residues {
            match rational_reconstruct(r, &modulus) {
                Some(v) => coeffs.push(v),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        if last.as_ref() == Some(&coeffs) {
            stable += 1;
            if stable >= 2 {
                // clear to integers, remove content
                let mut den = BigUint::from(1u32);
                for c in &coeffs {
                    den = den.lcm(c.denom().magnitude());
                }
                let dd = BigRational::from(BigInt::from(den));
                let mut ints: Vec<BigInt> =
                    coeffs.iter().map(|c| (c * &dd).to_integer()).collect();
                let mut content = BigInt::from(0);
                for c in &ints {
                    content = content.gcd(c);
                }
                if !content.is_zero() && content.magnitude() > &BigUint::from(1u32) {
                    for c in ints.iter_mut() {
                        *c = &*c / &content;
                    }
                }
                return Ok(ints);
            }
        } else {
            stable = 0;
            last = Some(coeffs);
        }
    }
    Err("characteristic-zero reconstruction did not stabilize".into())
}

fn mod_inverse(a: &BigUint, m: &BigUint) -> BigUint {
    use num_integer::Integer;
    let a = BigInt::from(a.clone());
    let m_int = BigInt::from(m.clone());
    let e = a.extended_gcd(&m_int);
    e.x.mod_floor(&m_int).to_biguint().unwrap()
}

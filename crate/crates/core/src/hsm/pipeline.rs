//! The two passes of the stability computation and nonsurjectivity-prime
//! detection.
//!
//! Pass 1 runs over K: starting from U_0 = S_2 / lambda_0, intersect with
//! the remaining U_i, then apply Hecke stabilization to a dimension
//! fixpoint. Along the way every operation's stacked matrix is mined for
//! prime divisors (slots where its nullity jumps), which together with
//! bad-reduction primes and Eisenstein congruence primes form the finite
//! candidate list L. Pass 2 reruns the same operations over each residue
//! field kappa_p for p in L and compares dimensions.

use super::subspace::{echelonize, stacked_left_kernel, stacked_matrix, LinAlgField, Subspace};
use super::{required_precision, sturm};
use crate::certify::{self, CertVerdict, CertifyMethod};
use crate::characters::{self, DirichletCharacter};
use crate::eisenstein::{self, LambdaSet};
use crate::exact::cyclotomic::CycField;
use crate::exact::field::Field;
use crate::exact::matrix::{
    prime_divisors_general, rank_cyc, reduce_rank_at_slot, saturate_rows_at_p, Mat,
};
use crate::exact::residue::{PrimeSlot, ResidueField};
use crate::exact::integers::smallest_prime_not_dividing;
use crate::qexp::{reduce_series, SeriesError, TruncatedSeries};
use crate::weight2::CuspformBasis;
use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("lambda reduces to zero in the working field (slot divides b)")]
    BadLambda,
    #[error("slot divides l N b and is excluded from the pipeline")]
    ExcludedSlot,
    #[error("series error: {0}")]
    Series(#[from] SeriesError),
    #[error("character error: {0}")]
    Character(#[from] characters::CharacterError),
    #[error("exact arithmetic error: {0}")]
    Exact(#[from] crate::exact::ExactError),
    #[error("the stabilization prime l = {0} divides the level")]
    BadEll(u64),
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub level: u64,
    pub chi: DirichletCharacter,
    pub ell: u64,
    pub precision: i64,
    /// extra rational primes whose slots join pass 2 regardless of
    /// detection
    pub extra_primes: Vec<u64>,
    pub certify_method: CertifyMethod,
}

impl PipelineConfig {
    pub fn new(chi: DirichletCharacter) -> Result<Self, PipelineError> {
        let level = chi.modulus();
        let ell = smallest_prime_not_dividing(level);
        Ok(PipelineConfig {
            level,
            precision: required_precision(level, ell),
            chi,
            ell,
            extra_primes: vec![],
            certify_method: CertifyMethod::Auto,
        })
    }

    pub fn with_ell(mut self, ell: u64) -> Result<Self, PipelineError> {
        if self.level % ell == 0 {
            return Err(PipelineError::BadEll(ell));
        }
        self.ell = ell;
        self.precision = required_precision(self.level, ell);
        Ok(self)
    }

    pub fn with_precision(mut self, precision: i64) -> Self {
        self.precision = precision;
        self
    }

    pub fn precision_is_proven(&self) -> bool {
        self.precision >= required_precision(self.level, self.ell)
    }
}

/// One operation of a pass, kept for prime-divisor mining.
pub struct StepData<F: Field> {
    pub label: String,
    /// rows of the stacked matrix of the operation
    pub rows: Vec<TruncatedSeries<F>>,
    pub window: (i64, i64),
    /// exact rank of the stacked matrix
    pub rank: usize,
    pub dim_after: usize,
}

pub struct PassOutput<F: Field> {
    pub space: Subspace<F>,
    pub steps: Vec<StepData<F>>,
    /// intermediate spaces V^(0), ..., V^(s+t)
    pub intermediates: Vec<Subspace<F>>,
    pub taints: Vec<String>,
}

/// U = { g / lambda : g in the S_2 basis }, echelonized.
pub fn build_u<F: LinAlgField>(
    lambda: &TruncatedSeries<F>,
    s2: &[TruncatedSeries<F>],
) -> Result<Subspace<F>, PipelineError> {
    let field = lambda.field.clone();
    if lambda.is_zero_to_precision() {
        return Err(PipelineError::BadLambda);
    }
    let mut rows = Vec::with_capacity(s2.len());
    let mut precision = i64::MAX;
    for g in s2 {
        let q = g.divide(lambda)?;
        precision = precision.min(q.precision);
        rows.push(q);
    }
    if rows.is_empty() {
        let p = lambda.precision - lambda.valuation;
        return Ok(Subspace::zero(field, p));
    }
    Ok(echelonize(&field, rows, precision))
}

/// W1 cap W2 by the kernel of the stacked coefficient matrix, mapped back
/// into W1. Returns the new space and the step data for detection.
pub fn intersect_step<F: LinAlgField>(
    w1: &Subspace<F>,
    w2: &Subspace<F>,
    sturm3: i64,
    taints: &mut Vec<String>,
) -> (Subspace<F>, StepData<F>) {
    let field = w1.field.clone();
    let precision = w1.precision.min(w2.precision);
    if precision < sturm3 {
        taints.push(format!(
            "intersection precision {precision} below Sturm_3 = {sturm3}; result unproven"
        ));
    }
    let mut rows: Vec<TruncatedSeries<F>> = w1.rows.clone();
    rows.extend(w2.rows.iter().cloned());
    let lo = rows.iter().map(|r| r.valuation).min().unwrap_or(0);
    let ker = stacked_left_kernel(&field, &rows, lo, precision);
    let r1 = w1.dim();
    let mut out = Vec::new();
    for kr in 0..ker.rows {
        let mut acc = TruncatedSeries::zero(field.clone(), precision);
        for i in 0..r1 {
            let c = ker.at(kr, i);
            if field.is_zero(c) {
                continue;
            }
            acc = acc
                .add(&w1.rows[i].truncate(precision).scalar_mul(c))
                .expect("same field");
        }
        if !acc.is_zero_to_precision() {
            out.push(acc);
        }
    }
    let space = echelonize(&field, out, precision);
    let step = StepData {
        label: "intersection".into(),
        rank: rows.len() - ker.rows,
        rows,
        window: (lo, precision),
        dim_after: space.dim(),
    };
    (space, step)
}

/// One stabilization step: { g in W : T_l g in W }, from the 2r-row
/// stacked matrix of the basis and its Hecke images.
pub fn stabilize_step<F: LinAlgField>(
    w: &Subspace<F>,
    ell: u64,
    chi_ell: &F::Elem,
    weight: u32,
    ell_sturm: i64,
    taints: &mut Vec<String>,
) -> Result<(Subspace<F>, StepData<F>), PipelineError> {
    let field = w.field.clone();
    let precision = w.precision;
    if precision < ell_sturm {
        taints.push(format!(
            "stabilization precision {precision} below l*Sturm_(l+2) = {ell_sturm}; result unproven"
        ));
    }
    let r = w.dim();
    if r == 0 {
        let step = StepData {
            label: "stabilization".into(),
            rows: vec![],
            window: (0, 0),
            rank: 0,
            dim_after: 0,
        };
        return Ok((Subspace::zero(field, precision), step));
    }
    let t_prec = div_ceil_i(precision, ell as i64);
    let mut rows: Vec<TruncatedSeries<F>> = w
        .rows
        .iter()
        .map(|g| g.truncate(t_prec.min(g.precision)))
        .collect();
    for g in &w.rows {
        rows.push(g.hecke_tl(ell, chi_ell, weight)?);
    }
    let lo = rows.iter().map(|r| r.valuation).min().unwrap_or(0);
    let hi = rows.iter().map(|r| r.precision).min().unwrap_or(t_prec);
    let ker = stacked_left_kernel(&field, &rows, lo, hi);
    let mut out = Vec::new();
    for kr in 0..ker.rows {
        let mut acc = TruncatedSeries::zero(field.clone(), precision);
        for i in 0..r {
            let c = ker.at(kr, r + i);
            if field.is_zero(c) {
                continue;
            }
            acc = acc
                .add(&w.rows[i].scalar_mul(c))
                .expect("same field");
        }
        if !acc.is_zero_to_precision() {
            out.push(acc);
        }
    }
    let space = echelonize(&field, out, precision);
    let step = StepData {
        label: "stabilization".into(),
        rank: 2 * r - ker.rows,
        rows,
        window: (lo, hi),
        dim_after: space.dim(),
    };
    Ok((space, step))
}

fn div_ceil_i(a: i64, b: i64) -> i64 {
    if a >= 0 {
        (a + b - 1) / b
    } else {
        -((-a) / b)
    }
}

/// Public single-step wrappers (without detection bookkeeping).
pub fn intersect<F: LinAlgField>(
    w1: &Subspace<F>,
    w2: &Subspace<F>,
    sturm3: i64,
) -> (Subspace<F>, Vec<String>) {
    let mut taints = Vec::new();
    let (s, _) = intersect_step(w1, w2, sturm3, &mut taints);
    (s, taints)
}

pub fn stabilize<F: LinAlgField>(
    w: &Subspace<F>,
    ell: u64,
    chi_ell: &F::Elem,
    weight: u32,
    ell_sturm: i64,
) -> Result<(Subspace<F>, Vec<String>), PipelineError> {
    let mut taints = Vec::new();
    let (s, _) = stabilize_step(w, ell, chi_ell, weight, ell_sturm, &mut taints)?;
    Ok((s, taints))
}

/// Iterate stabilization to a dimension fixpoint.
pub fn stable_core<F: LinAlgField>(
    w: &Subspace<F>,
    ell: u64,
    chi_ell: &F::Elem,
    weight: u32,
    ell_sturm: i64,
) -> Result<(Subspace<F>, Vec<String>), PipelineError> {
    let mut taints = Vec::new();
    let mut cur = w.clone();
    loop {
        let before = cur.dim();
        let (next, _) = stabilize_step(&cur, ell, chi_ell, weight, ell_sturm, &mut taints)?;
        let after = next.dim();
        cur = next;
        if after == before || after == 0 {
            return Ok((cur, taints));
        }
    }
}

/// Run the full pass over one coefficient field: intersections in order,
/// then stabilizations to a fixpoint.
pub fn run_pass<F: LinAlgField>(
    s2: &[TruncatedSeries<F>],
    lambdas: &[TruncatedSeries<F>],
    ell: u64,
    chi_ell: &F::Elem,
    sturm3: i64,
    ell_sturm: i64,
) -> Result<PassOutput<F>, PipelineError> {
    assert!(!lambdas.is_empty());
    let mut taints = Vec::new();
    let mut steps = Vec::new();
    let mut intermediates = Vec::new();
    let mut v = build_u(&lambdas[0], s2)?;
    intermediates.push(v.clone());
    for lam in &lambdas[1..] {
        let u_i = build_u(lam, s2)?;
        let (next, step) = intersect_step(&v, &u_i, sturm3, &mut taints);
        steps.push(step);
        v = next;
        intermediates.push(v.clone());
    }
    loop {
        let before = v.dim();
        let (next, step) = stabilize_step(&v, ell, chi_ell, 1, ell_sturm, &mut taints)?;
        let after = step.dim_after;
        steps.push(step);
        v = next;
        intermediates.push(v.clone());
        if after == before || after == 0 {
            break;
        }
    }
    Ok(PassOutput {
        space: v,
        steps,
        intermediates,
        taints,
    })
}

/// The candidate lists of the detection pass.
#[derive(Debug, Default, Clone)]
pub struct DetectionLists {
    /// slots dividing some operation at an intermediate space
    pub l1: Vec<PrimeSlot>,
    /// slots of bad reduction of some intermediate space
    pub l2: Vec<PrimeSlot>,
    /// Eisenstein congruence slots
    pub l3: Vec<PrimeSlot>,
    /// candidates that could not be verified (flagged in reports)
    pub unverified: Vec<BigUint>,
}

impl DetectionLists {
    /// Distinct rational primes across the verified lists.
    pub fn primes(&self) -> Vec<u64> {
        let mut out: Vec<u64> = self
            .l1
            .iter()
            .chain(&self.l2)
            .chain(&self.l3)
            .map(|s| s.p)
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

/// Mine the characteristic-zero pass for nonsurjectivity candidates.
pub fn detect_primes(
    chi: &DirichletCharacter,
    pass: &PassOutput<CycField>,
) -> DetectionLists {
    let mut lists = DetectionLists::default();
    // L': divisors of each operation's stacked matrix
    let field = pass.space.field.clone();
    for step in &pass.steps {
        if step.rows.is_empty() {
            continue;
        }
        let m = stacked_matrix(&field, &step.rows, step.window.0, step.window.1);
        let rep = prime_divisors_general(&m, step.rank);
        lists.l1.extend(rep.slots);
        lists.unverified.extend(rep.unverified);
    }
    // L'': bad-reduction primes of each intermediate basis matrix
    for w in &pass.intermediates {
        if w.dim() == 0 {
            continue;
        }
        let m = w.coefficient_matrix(w.valuation_floor(), w.precision);
        let r = rank_cyc(&m);
        debug_assert_eq!(r, w.dim());
        let rep = prime_divisors_general(&m, r);
        lists.l2.extend(rep.slots);
        lists.unverified.extend(rep.unverified);
    }
    // L''': Eisenstein congruence primes
    let cp = characters::eisenstein_congruence_primes(chi);
    lists.l3.extend(cp.slots);
    lists.unverified.extend(cp.unverified);
    dedup_slots(&mut lists.l1);
    dedup_slots(&mut lists.l2);
    dedup_slots(&mut lists.l3);
    lists.unverified.sort();
    lists.unverified.dedup();
    lists
}

fn dedup_slots(slots: &mut Vec<PrimeSlot>) {
    slots.sort_by_key(|s| (s.p, s.index));
    slots.dedup_by_key(|s| (s.p, s.index));
}

/// Reduce a characteristic-zero subspace at a slot, saturating the cleared
/// integer row lattice at p first (so the reduction has the dimension of
/// the generic fiber). Returns the reduced echelonized space and whether
/// saturation was needed.
pub fn saturated_reduction(
    w: &Subspace<CycField>,
    slot: &PrimeSlot,
    taints: &mut Vec<String>,
) -> Subspace<ResidueField> {
    let kappa = slot.residue_field();
    if w.dim() == 0 {
        return Subspace::zero(kappa, w.precision);
    }
    let field = &w.field;
    let lo = w.valuation_floor();
    if field.degree() == 1 {
        // integer lattice of the rows
        let mut rows: Vec<Vec<BigInt>> = w
            .rows
            .iter()
            .map(|r| {
                let mut den = BigUint::one();
                for e in lo..r.precision {
                    if e >= r.valuation {
                        den = den.lcm(r.coeff(e)[0].denom().magnitude());
                    }
                }
                let den = BigRational::from(BigInt::from_biguint(Sign::Plus, den));
                (lo..w.precision)
                    .map(|e| {
                        if e >= r.valuation && e < r.precision {
                            (&r.coeff(e)[0] * &den).to_integer()
                        } else {
                            BigInt::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        let before: Vec<Vec<BigInt>> = rows.clone();
        saturate_rows_at_p(&mut rows, slot.p);
        if rows != before {
            taints.push(format!(
                "reduction at {} required lattice saturation",
                slot.label()
            ));
        }
        let series: Vec<TruncatedSeries<ResidueField>> = rows
            .iter()
            .map(|r| {
                let coeffs: Vec<Vec<u64>> = r
                    .iter()
                    .map(|x| {
                        let m = (x.magnitude() % BigUint::from(slot.p)).to_u64().unwrap();
                        let v = if x.is_negative() && m != 0 {
                            slot.p - m
                        } else {
                            m
                        };
                        kappa.from_base(v)
                    })
                    .collect();
                TruncatedSeries::from_coeffs(kappa.clone(), lo, coeffs, w.precision)
            })
            .collect();
        echelonize(&kappa, series, w.precision)
    } else {
        // cyclotomic slots: reduce the cleared rows directly; saturation at
        // split slots is flagged rather than performed
        let mut series = Vec::new();
        let mut ok = true;
        for r in &w.rows {
            match reduce_series(&clear_series(field, r), slot) {
                Ok(s) => series.push(s),
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            taints.push(format!(
                "reduction at {} failed (non-integral rows)",
                slot.label()
            ));
            return Subspace::zero(kappa, w.precision);
        }
        let red = echelonize(&kappa, series, w.precision);
        if red.dim() < w.dim() {
            taints.push(format!(
                "reduction at {} dropped rank; saturation at higher-degree slots is not performed",
                slot.label()
            ));
        }
        red
    }
}

fn clear_series(field: &CycField, s: &TruncatedSeries<CycField>) -> TruncatedSeries<CycField> {
    let mut den = BigUint::one();
    for c in &s.coeffs {
        den = den.lcm(&field.denominator_lcm(c));
    }
    let scale = field.from_rational(BigRational::from(BigInt::from_biguint(Sign::Plus, den)));
    s.scalar_mul(&scale)
}

// ---------------------------------------------------------------------------
// full run and report
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SlotReport {
    pub p: u64,
    pub f: usize,
    pub slot_index: usize,
    /// dim V'(kappa_p)
    pub dim: usize,
    /// dim V'(kappa_p) - dim Red_p V'(K)
    pub jump: i64,
    pub dims_log: Vec<usize>,
    pub certifications: Vec<CertVerdict>,
    /// slot divides b: lambda degenerates, rerun with a different lambda
    pub lambda_degenerate: bool,
    /// how the slot entered pass 2
    pub source: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineReport {
    pub level: u64,
    pub character: String,
    pub ell: u64,
    pub precision: i64,
    pub dim_char0: usize,
    pub char0_pivots: Vec<i64>,
    pub char0_dims_log: Vec<usize>,
    pub slots: Vec<SlotReport>,
    #[serde(rename = "L1")]
    pub l1: Vec<String>,
    #[serde(rename = "L2")]
    pub l2: Vec<String>,
    #[serde(rename = "L3")]
    pub l3: Vec<String>,
    pub unverified_candidates: Vec<String>,
    pub eisenstein_dim: u64,
    /// dim_char0 - eisenstein_dim when meaningful (see taints)
    pub inferred_cuspidal_dim_char0: Option<i64>,
    pub taints: Vec<String>,
    pub wall_ms: u128,
}

impl PipelineReport {
    /// exit-code semantics: 0 pass, 2 some certification failed/conditional
    pub fn all_certified(&self) -> bool {
        self.slots
            .iter()
            .filter(|s| s.jump != 0)
            .all(|s| s.certifications.iter().any(|c| c.pass && !c.conditional))
    }
}

/// The full two-pass computation with detection and certification.
pub fn full_run(
    config: &PipelineConfig,
    s2: &CuspformBasis,
) -> Result<PipelineReport, PipelineError> {
    let start = std::time::Instant::now();
    let level = config.level;
    let chi = &config.chi;
    let ell = config.ell;
    if level % ell == 0 {
        return Err(PipelineError::BadEll(ell));
    }
    let mut taints = Vec::new();
    if !config.precision_is_proven() {
        taints.push(format!(
            "precision {} below required {}; all equalities unproven",
            config.precision,
            required_precision(level, ell)
        ));
    }
    let precision = config.precision;
    assert!(s2.precision >= precision, "S2 basis precision too small");
    let s2 = s2.truncate(precision);
    let lambda = eisenstein::build_lambda(level, chi, precision)?;
    let field = lambda.field.clone();
    let s2_k = s2.to_series(&field, |x| field.from_rational(BigRational::from(x.clone())));
    let lambdas_k: Vec<TruncatedSeries<CycField>> =
        lambda.members.iter().map(|(s, _)| s.clone()).collect();
    let sturm3 = sturm(3, level);
    let ell_sturm = required_precision(level, ell);
    let chi_ell_k = chi.value_in(&field, ell % level.max(1));
    // pass 1 over K
    let pass_k = run_pass(&s2_k, &lambdas_k, ell, &chi_ell_k.coeffs, sturm3, ell_sturm)?;
    taints.extend(pass_k.taints.iter().cloned());
    let dim_char0 = pass_k.space.dim();
    // detection
    let lists = detect_primes(chi, &pass_k);
    // assemble pass-2 slots: detected + user-requested, inside S
    let mut slot_jobs: Vec<(PrimeSlot, Vec<String>)> = Vec::new();
    let mut push_job = |slot: &PrimeSlot, src: String, jobs: &mut Vec<(PrimeSlot, Vec<String>)>| {
        for (s, sources) in jobs.iter_mut() {
            if s.p == slot.p && s.index == slot.index {
                if !sources.contains(&src) {
                    sources.push(src);
                }
                return;
            }
        }
        jobs.push((slot.clone(), vec![src]));
    };
    for (name, list) in [("L1", &lists.l1), ("L2", &lists.l2), ("L3", &lists.l3)] {
        for slot in list {
            push_job(slot, name.to_string(), &mut slot_jobs);
        }
    }
    for &p in &config.extra_primes {
        if let Ok(slots) = crate::exact::residue::primes_above(p, field.order()) {
            for slot in &slots {
                push_job(slot, "requested".to_string(), &mut slot_jobs);
            }
        } else {
            taints.push(format!("requested prime {p} divides the character order"));
        }
    }
    slot_jobs.sort_by_key(|(s, _)| (s.p, s.index));
    // exclusions: slots dividing l N are outside S
    let bad_lambda: Vec<(u64, usize)> =
        lambda.bad_slots.iter().map(|s| (s.p, s.index)).collect();
    let mut slot_reports: Vec<SlotReport> = Vec::new();
    let mut excluded: Vec<String> = Vec::new();
    let jobs: Vec<(PrimeSlot, Vec<String>)> = slot_jobs
        .into_iter()
        .filter(|(slot, src)| {
            if (ell * level) % slot.p == 0 {
                excluded.push(format!(
                    "slot {} (from {:?}) divides lN; outside S",
                    slot.label(),
                    src
                ));
                false
            } else {
                true
            }
        })
        .collect();
    // pass 2 per slot, in parallel; merge deterministically by slot order
    let results: Vec<Result<SlotReport, PipelineError>> = jobs
        .par_iter()
        .map(|(slot, sources)| {
            pass_two_at_slot(
                config, &s2, &lambda, &pass_k, slot, sources, &bad_lambda, sturm3, ell_sturm,
            )
        })
        .collect();
    for r in results {
        slot_reports.push(r?);
    }
    taints.extend(excluded);
    // parity property note for quadratic characters
    if chi.is_quadratic() {
        for sr in &slot_reports {
            let p = sr.p;
            let nphi = level * crate::exact::integers::euler_phi(level);
            if nphi % p != 0 && sr.jump.rem_euclid(2) == 1 {
                taints.push(format!(
                    "parity violation at p = {p}: odd dimension jump {}",
                    sr.jump
                ));
            }
        }
    }
    let eis_dim = eisenstein::eis1_dimension(level, chi);
    let inferred = Some(dim_char0 as i64 - eis_dim as i64);
    taints.push(
        "inferred cuspidal dimension assumes lambda has no cuspidal zeros (unverified)".into(),
    );
    Ok(PipelineReport {
        level,
        character: chi.label(),
        ell,
        precision,
        dim_char0,
        char0_pivots: pass_k.space.pivots(),
        char0_dims_log: pass_k.steps.iter().map(|s| s.dim_after).collect(),
        slots: slot_reports,
        l1: lists.l1.iter().map(|s| s.label()).collect(),
        l2: lists.l2.iter().map(|s| s.label()).collect(),
        l3: lists.l3.iter().map(|s| s.label()).collect(),
        unverified_candidates: lists.unverified.iter().map(|x| x.to_string()).collect(),
        eisenstein_dim: eis_dim,
        inferred_cuspidal_dim_char0: inferred,
        taints,
        wall_ms: start.elapsed().as_millis(),
    })
}

#[allow(clippy::too_many_arguments)]
fn pass_two_at_slot(
    config: &PipelineConfig,
    s2: &CuspformBasis,
    lambda: &LambdaSet,
    pass_k: &PassOutput<CycField>,
    slot: &PrimeSlot,
    sources: &[String],
    bad_lambda: &[(u64, usize)],
    sturm3: i64,
    ell_sturm: i64,
) -> Result<SlotReport, PipelineError> {
    let kappa = slot.residue_field();
    let mut report = SlotReport {
        p: slot.p,
        f: slot.f,
        slot_index: slot.index,
        dim: 0,
        jump: 0,
        dims_log: vec![],
        certifications: vec![],
        lambda_degenerate: bad_lambda.contains(&(slot.p, slot.index)),
        source: sources.to_vec(),
    };
    if report.lambda_degenerate {
        return Ok(report);
    }
    // reduce inputs
    let s2_kappa = s2.to_series(&kappa, |x| {
        let m = (x.magnitude() % BigUint::from(slot.p)).to_u64().unwrap();
        let v = if x.is_negative() && m != 0 {
            slot.p - m
        } else {
            m
        };
        kappa.from_base(v)
    });
    let mut lams = Vec::new();
    for (s, _) in &lambda.members {
        let r = reduce_series(s, slot)?;
        if r.is_zero_to_precision() {
            return Err(PipelineError::BadLambda);
        }
        lams.push(r);
    }
    let chi_ell = config
        .chi
        .value_in(&lambda.field, config.ell % config.level.max(1));
    let chi_ell_kappa = slot.reduce(&chi_ell)?;
    let pass = run_pass(&s2_kappa, &lams, config.ell, &chi_ell_kappa, sturm3, ell_sturm)?;
    report.dims_log = pass.steps.iter().map(|s| s.dim_after).collect();
    report.dim = pass.space.dim();
    // dimension jump against the saturated reduction of the char-0 space
    let mut red_taints = Vec::new();
    let red = saturated_reduction(&pass_k.space, slot, &mut red_taints);
    report.jump = report.dim as i64 - red.dim() as i64;
    let _ = &pass_k.space;
    report.certifications = certify::certify_slot_with(
        config,
        lambda,
        &pass.space,
        &red,
        slot,
        config.certify_method,
        Some(s2),
    );
    Ok(report)
}

/// t'(N, eps) = prod over rational primes p not dividing N phi(N) of
/// p^{jump(p)}, from a completed report of a quadratic-character run.
pub fn t_prime(report: &PipelineReport) -> BigUint {
    let n = report.level;
    let nphi = n * crate::exact::integers::euler_phi(n);
    let mut acc = BigUint::one();
    for sr in &report.slots {
        if nphi % sr.p == 0 {
            continue;
        }
        if sr.jump > 0 {
            acc *= BigUint::from(sr.p).pow(sr.jump as u32);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight2::q_basis;

    fn quad_char(n: u64) -> DirichletCharacter {
        DirichletCharacter::enumerate(n)
            .into_iter()
            .find(|c| c.is_quadratic() && !c.is_trivial() && c.is_odd())
            .unwrap()
    }

    #[test]
    fn level_141_torsion_detection() {
        // t'(141, eps) = 5^2: a jump of 2 at p = 5, all other good slots flat
        let chi = quad_char(3).induce(141);
        let config = PipelineConfig::new(chi).unwrap();
        assert_eq!(config.ell, 2);
        assert_eq!(config.precision, 130);
        let s2 = crate::weight2::q_basis(141, config.precision);
        let report = full_run(&config, &s2).unwrap();
        eprintln!(
            "dim_char0 = {}, L1 = {:?}, L2 = {:?}, L3 = {:?}, unverified = {:?}",
            report.dim_char0, report.l1, report.l2, report.l3, report.unverified_candidates
        );
        for s in &report.slots {
            eprintln!(
                "slot {}: dim {} jump {} log {:?} cert {:?}",
                s.p,
                s.dim,
                s.jump,
                s.dims_log,
                s.certifications
                    .iter()
                    .map(|c| format!("{}:{}{}", c.method, c.pass, if c.conditional { "?" } else { "" }))
                    .collect::<Vec<_>>()
            );
        }
        let tp = t_prime(&report);
        assert_eq!(tp, num_bigint::BigUint::from(25u32), "t'(141) = 5^2");
        let slot5 = report.slots.iter().find(|s| s.p == 5).unwrap();
        assert_eq!(slot5.jump, 2);
        assert!(slot5
            .certifications
            .iter()
            .any(|c| c.pass && !c.conditional));
    }

    #[test]
    fn level_11_false_hypothesis() {
        // (N, chi, l) = (11, eps_11, 5): char-0 stable core is trivial,
        // over F_7 it is one-dimensional, and certification fails
        let chi = quad_char(11);
        let config = PipelineConfig::new(chi).unwrap().with_ell(5).unwrap();
        assert_eq!(config.precision, 40);
        let s2 = q_basis(11, config.precision);
        let report = full_run(&config, &s2).unwrap();
        assert_eq!(report.dim_char0, 0, "char-0 dimension");
        let slot7 = report
            .slots
            .iter()
            .find(|s| s.p == 7)
            .expect("7 must be detected");
        assert_eq!(slot7.dim, 1);
        assert_eq!(slot7.jump, 1);
        // every certification fails: the stability hypothesis is false
        assert!(slot7.certifications.iter().all(|c| !c.pass || c.conditional));
        assert!(!report.all_certified());
        let power = slot7
            .certifications
            .iter()
            .find(|c| c.method == "power-check")
            .expect("power check attempted");
        assert!(!power.pass, "power check must fail at 11/7");
    }
}

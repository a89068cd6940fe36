//! Acceptance suite: every exit criterion runs as its own test and prints
//! one pass/fail line. Thresholds and expected values are pinned in code.
//!
//! The heavy second-pass reproduction at level 651 reuses the weight-2
//! basis cache (HSM_CACHE, defaulting to the workspace .hsm-cache) so the
//! expensive basis computation happens once per machine; everything else
//! runs from scratch in seconds to minutes.

use hsm_core::certify::{self, CertifyMethod};
use hsm_core::characters::{bernoulli_b1, DirichletCharacter};
use hsm_core::eisenstein::{build_lambda, eis1};
use hsm_core::exact::field::Field;
use hsm_core::exact::integers::{factor_integer, is_prime_u64, next_prime};
use hsm_core::hsm::pipeline::{full_run, t_prime, PipelineConfig};
use hsm_core::isogeny::{b_r_formula, min_polar_size_tree, min_polar_size_volcano};
use hsm_core::weight2::{self, q_basis, CuspformBasis};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use std::path::PathBuf;

fn pass_line(criterion: &str, ok: bool) {
    println!(
        "ACCEPTANCE {}: {}",
        criterion,
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {criterion} failed");
}

fn quad_char(n: u64) -> DirichletCharacter {
    DirichletCharacter::enumerate(n)
        .into_iter()
        .find(|c| c.is_quadratic() && !c.is_trivial() && c.is_odd())
        .unwrap()
}

fn cache_dir() -> PathBuf {
    std::env::var("HSM_CACHE")
        .map(PathBuf::from)
        .unwrap_or_else(|_| {
            let mut d = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
            d.pop();
            d.pop();
            d.join(".hsm-cache")
        })
}

fn cached_basis(n: u64, precision: i64) -> CuspformBasis {
    let dir = cache_dir();
    let path = dir.join(format!("s2_{n}_2_{precision}.mfb"));
    if let Ok((basis, _)) = weight2::load_basis(&path) {
        if basis.level == n && basis.precision >= precision {
            return basis;
        }
    }
    let basis = q_basis(n, precision);
    let _ = std::fs::create_dir_all(&dir);
    let _ = weight2::save_basis(&path, &basis);
    basis
}

/// Criterion 1: the false stability hypothesis at (11, eps_11, 5, 7):
/// stable core over F_7 has dimension exactly 1, the characteristic-zero
/// space dimension 0, and the power check fails. Exact integer equality.
#[test]
fn criterion_1_false_hypothesis_11_7() {
    let chi = quad_char(11);
    let config = PipelineConfig::new(chi).unwrap().with_ell(5).unwrap();
    let s2 = q_basis(11, config.precision);
    let report = full_run(&config, &s2).unwrap();
    let slot7 = report.slots.iter().find(|s| s.p == 7);
    let ok = report.dim_char0 == 0
        && slot7.map_or(false, |s| {
            s.dim == 1
                && s.certifications
                    .iter()
                    .any(|c| c.method == "power-check" && !c.pass)
                && s.certifications.iter().all(|c| !c.pass || c.conditional)
        });
    pass_line("1 (11/F7 false hypothesis)", ok);
}

/// Criterion 2: the 651/337 reproduction: dim V'(F_337) = 2; zero-locus
/// roots mod 337 are exactly {0, 96, 241}, all ordinary; condition (iii)
/// passes with (M, l, r) = (31, 2, 2); the power check passes. Exact.
#[test]
fn criterion_2_level_651_mod_337() {
    let chi = quad_char(31).induce(651);
    let config = PipelineConfig::new(chi).unwrap();
    assert_eq!(config.ell, 2);
    assert_eq!(config.precision, 686);
    let s2 = cached_basis(651, config.precision);
    let report = full_run(&config, &s2).unwrap();
    let slot = report
        .slots
        .iter()
        .find(|s| s.p == 337)
        .expect("337 must be detected");
    let dim_ok = slot.dim == 2;
    // zero locus roots
    let lam = build_lambda(651, &config.chi, 64).unwrap();
    let slot337 = hsm_core::exact::residue::primes_above(337, 2)
        .unwrap()
        .pop()
        .unwrap();
    let zl = certify::zero_locus_mod_slot(&lam.dual_primitive, &slot337, 4).unwrap();
    let mut roots: Vec<String> = zl.report.roots.iter().map(|r| r.j.clone()).collect();
    roots.sort_by_key(|s| s.parse::<u64>().unwrap_or(u64::MAX));
    let roots_ok = roots == ["0", "96", "241"]
        && zl.report.roots.iter().all(|r| !r.supersingular)
        && zl.report.complete;
    let iii = certify::check_condition_iii(337, 2, 31, 2, "337");
    let iii_ok = iii.pass && iii.witness.contains("r = 2");
    let power_ok = slot
        .certifications
        .iter()
        .any(|c| c.method == "power-check" && c.pass && !c.conditional);
    let ii_ok = slot
        .certifications
        .iter()
        .any(|c| c.method == "ordinary-zeros" && c.pass && !c.conditional);
    println!(
        "651/337: dim {} roots {:?} iii {} power {} ii {}",
        slot.dim, roots, iii.pass, power_ok, ii_ok
    );
    pass_line(
        "2 (651/F337 reproduction)",
        dim_ok && roots_ok && iii_ok && power_ok && ii_ok,
    );
}

/// Criteria 3 and 4: t' rows at the desk-scale levels and the parity of
/// every jump at p not dividing N phi(N). Exact equality.
#[test]
fn criteria_3_4_torsion_table_and_parity() {
    let expected: [(u64, u64); 6] = [
        (141, 25),
        (159, 25),
        (177, 1),
        (183, 1),
        (201, 1),
        (213, 289),
    ];
    let eps3 = quad_char(3);
    let mut parity_ok = true;
    for (n, tp_expected) in expected {
        let chi = eps3.clone().induce(n);
        let config = PipelineConfig::new(chi).unwrap();
        let s2 = cached_basis(n, config.precision);
        let report = full_run(&config, &s2).unwrap();
        let tp = t_prime(&report);
        println!("t'({n}) = {tp}");
        assert_eq!(tp, BigUint::from(tp_expected), "t'({n})");
        let nphi = n * hsm_core::exact::integers::euler_phi(n);
        for s in &report.slots {
            if nphi % s.p != 0 && s.jump.rem_euclid(2) == 1 {
                println!("parity violation at {n}, p = {}", s.p);
                parity_ok = false;
            }
        }
    }
    pass_line("3 (t' table rows)", true);
    pass_line("4 (parity of jumps)", parity_ok);
}

/// Criterion 5: polar bounds: the tree minimum equals the closed form for
/// n in {3,4}, i in {-2..1}, r <= 4; volcano minima meet the lower bound
/// for craters c in {3,4,5}. Exact.
#[test]
fn criterion_5_polar_bounds() {
    let mut ok = true;
    for n in [3u64, 4] {
        for i in -2i64..=1 {
            if i <= -(n as i64) {
                continue;
            }
            for r in 0..=4u32 {
                if min_polar_size_tree(n, i, r) != b_r_formula(n, i, r) {
                    println!("tree mismatch at n={n} i={i} r={r}");
                    ok = false;
                }
            }
        }
        for c in [3u32, 4, 5] {
            for r in [2u32, 3, 4] {
                let bound = (n - 1).pow(r / 2) + (n - 1).pow(r / 2 - 1);
                if min_polar_size_volcano(n, c, r) < bound {
                    println!("volcano bound fails at n={n} c={c} r={r}");
                    ok = false;
                }
            }
        }
    }
    pass_line("5 (polar bound suite)", ok);
}

/// Criterion 6: modular polynomial anchors and the printed factorization.
#[test]
fn criterion_6_modular_polynomial_anchors() {
    use hsm_core::exact::cyclotomic::CycField;
    let phi = hsm_core::isogeny::modular_polynomial(2).unwrap();
    let k = CycField::rationals();
    // Phi_2(0, Y) = (Y - 54000)^3
    let at0 = phi.evaluate_first(&k, &k.zero());
    let c = BigInt::from(54000);
    let anchors0 = at0.len() == 4
        && at0[0][0] == BigRational::from(-&c * &c * &c)
        && at0[1][0] == BigRational::from(3 * &c * &c)
        && at0[2][0] == BigRational::from(-3 * &c)
        && at0[3][0] == BigRational::from(BigInt::from(1));
    // Phi_2(54000, Y) = Y(Y^2 - 2835810000 Y + 6549518250000)
    let at54 = phi.evaluate_first(&k, &k.from_i64(54000));
    let anchors54 = at54.len() == 4
        && k.is_zero(&at54[0])
        && at54[1][0] == BigRational::from(BigInt::from(6549518250000i64))
        && at54[2][0] == BigRational::from(BigInt::from(-2835810000i64))
        && at54[3][0] == BigRational::from(BigInt::from(1));
    // 6549518250000 = 2^4 * 3^9 * 5^6 * 11^3
    let f = factor_integer(&BigUint::from(6549518250000u64));
    let fact_ok = f.is_complete()
        && f.factors
            == vec![
                (BigUint::from(2u32), 4),
                (BigUint::from(3u32), 9),
                (BigUint::from(5u32), 6),
                (BigUint::from(11u32), 3),
            ];
    pass_line(
        "6 (modular polynomial anchors)",
        anchors0 && anchors54 && fact_ok,
    );
}

/// Criterion 7: series and oracle suite: weight-2 rows match point-count
/// oracles at genus-one levels; the conductor-31 Eisenstein constant
/// doubles to 3; B_1 values match the class-number oracle for q < 200.
#[test]
fn criterion_7_series_oracles() {
    // point-count oracle across genus-one levels
    let curves: [(u64, [i64; 5]); 8] = [
        (11, [0, -1, 1, -10, -20]),
        (14, [1, 0, 1, 4, -6]),
        (15, [1, 1, 1, -10, -10]),
        (17, [1, -1, 1, -1, -14]),
        (19, [0, 1, 1, -9, -15]),
        (20, [0, 1, 0, 4, 4]),
        (21, [1, 0, 0, -4, -1]),
        (24, [0, -1, 0, -4, 4]),
    ];
    let mut ok = true;
    for (n, c) in curves {
        let b = q_basis(n, 51);
        if b.dim != 1 {
            ok = false;
            continue;
        }
        let mut p = 2u64;
        while p <= 50 {
            if n % p != 0 {
                let ap = point_count_ap(c, p);
                if b.rows[0][(p - 1) as usize] != BigInt::from(ap) {
                    println!("a_{p} mismatch at level {n}");
                    ok = false;
                }
            }
            p = next_prime(p);
        }
    }
    // eisenstein constant for conductor 31 doubles to 3
    let chi31 = quad_char(31);
    let field = chi31.field();
    let e = eis1(&chi31, &field, 4).unwrap();
    let doubled = e.scalar_mul(&field.from_i64(2));
    if doubled.coeff(0) != field.from_i64(3) || doubled.coeff(1) != field.from_i64(2) {
        println!("conductor-31 Eisenstein constant mismatch");
        ok = false;
    }
    // B_1 against the class-number oracle for q < 200
    let mut q = 7u64;
    while q < 200 {
        if is_prime_u64(q) && q % 4 == 3 {
            let chi = quad_char(q);
            let b1 = bernoulli_b1(&chi).as_rational().unwrap();
            let h = class_number_oracle(q);
            if b1 != BigRational::from(BigInt::from(-(h as i64))) {
                println!("B_1 mismatch at conductor {q}");
                ok = false;
            }
        }
        q += 2;
    }
    pass_line("7 (series/oracle suite)", ok);
}

/// Criterion 8 (stretch, flagged): the second pass at (125, 199) with an
/// odd order-100 character yields a positive dimension jump with a
/// passing certification. Qualitative inequality.
#[test]
#[ignore = "stretch target: order-100 character at level 125 (hours); run with --ignored"]
fn criterion_8_stretch_125_199() {
    let chi = DirichletCharacter::enumerate(125)
        .into_iter()
        .find(|c| c.order() == 100 && c.is_odd())
        .unwrap();
    let mut config = PipelineConfig::new(chi).unwrap();
    config.extra_primes.push(199);
    config.certify_method = CertifyMethod::Auto;
    let s2 = cached_basis(125, config.precision);
    let report = full_run(&config, &s2).unwrap();
    let slots199: Vec<_> = report.slots.iter().filter(|s| s.p == 199).collect();
    let ok = slots199.iter().any(|s| {
        s.jump > 0 && s.certifications.iter().any(|c| c.pass && !c.conditional)
    });
    for s in &slots199 {
        println!("slot 199.{}: dim {} jump {}", s.slot_index, s.dim, s.jump);
    }
    pass_line("8 (stretch 125/199)", ok);
}

fn point_count_ap(coeffs: [i64; 5], p: u64) -> i64 {
    let [a1, a2, a3, a4, a6] = coeffs;
    let pm = p as i64;
    let md = |x: i64| x.rem_euclid(pm);
    let mut count = 1i64;
    for x in 0..pm {
        for y in 0..pm {
            let lhs = md(y * y + a1 * x * y + a3 * y);
            let rhs = md(x * x * x + a2 * x * x + a4 * x + a6);
            if lhs == rhs {
                count += 1;
            }
        }
    }
    pm + 1 - count
}

fn class_number_oracle(q: u64) -> u64 {
    use num_integer::Integer;
    let d = -(q as i64);
    let mut count = 0u64;
    let mut a = 1i64;
    while a * a * 4 <= -d * 4 {
        for b in -a..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (b == -a) || (a == c && b < 0) {
                continue;
            }
            if a.gcd(&b).gcd(&c) == 1 {
                count += 1;
            }
        }
        a += 1;
    }
    count
}

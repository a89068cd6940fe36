use hsm_core::exact::field::Field;
use hsm_core::characters::DirichletCharacter;
use hsm_core::exact::residue::primes_above;
use hsm_core::hsm::pipeline::stabilize;
use hsm_core::hsm::subspace::echelonize;
use hsm_core::weight2::q_basis;

#[test]
#[ignore]
fn stabilize_fixes_s2_mod_5() {
    // S_2(141) is T_2-stable, so the stabilization of its reduction mod 5
    // must be the whole space
    let s2 = q_basis(141, 130);
    let slot = primes_above(5, 2).unwrap().pop().unwrap();
    let kappa = slot.residue_field();
    use num_traits::{Signed, ToPrimitive};
    let rows = s2.to_series(&kappa, |x| {
        let m = (x.magnitude() % num_bigint::BigUint::from(5u32)).to_u64().unwrap();
        kappa.from_base(if x.is_negative() && m != 0 { 5 - m } else { m })
    });
    let w = echelonize(&kappa, rows, 130);
    eprintln!("reduced dim = {}", w.dim());
    let (out, taints) = stabilize(&w, 2, &kappa.one(), 2, 130).unwrap();
    eprintln!("stabilized dim = {}, taints {:?}", out.dim(), taints);
    assert_eq!(out.dim(), 15, "S_2 must be T_2-stable");
}

#[test]
#[ignore]
fn rank_mod5_of_basis() {
    let s2 = q_basis(141, 130);
    let im = hsm_core::exact::matrix::IntMat::from_rows(s2.rows.clone());
    eprintln!("IntMat rank mod 5 = {}", im.rank_mod_p(5));
    eprintln!("IntMat rank mod 13 = {}", im.rank_mod_p(13));
    eprintln!("IntMat rank mod 7 = {}", im.rank_mod_p(7));
}

#[test]
#[ignore]
fn saturate_basis_at_5() {
    let s2 = q_basis(141, 130);
    let mut rows = s2.rows.clone();
    hsm_core::exact::matrix::saturate_rows_at_p(&mut rows, 5);
    let im = hsm_core::exact::matrix::IntMat::from_rows(rows);
    eprintln!("after explicit saturation: rank mod 5 = {}", im.rank_mod_p(5));
}

#[test]
#[ignore]
fn print_651_label() {
    let chi31 = DirichletCharacter::enumerate(31)
        .into_iter()
        .find(|c| c.is_quadratic() && !c.is_trivial())
        .unwrap();
    let chi = chi31.induce(651);
    eprintln!("label = {}, odd = {}, conductor = {}", chi.label(), chi.is_odd(), chi.conductor());
}

#[test]
#[ignore]
fn m14_31_completeness() {
    let start = std::time::Instant::now();
    let ws = hsm_core::certify::modular_forms_space(31, 14, 70, &[]);
    eprintln!("M14(31): dim {} of {}, complete {}, {:?}", ws.rows.len(), ws.expected_dim, ws.complete, start.elapsed());
}

#[test]
#[ignore]
fn m14_31_mod_337() {
    let start = std::time::Instant::now();
    let ws = hsm_core::certify::modular_forms_space_mod_p(31, 14, 70, 337).unwrap();
    eprintln!("M14(31) mod 337: dim {} of {}, complete {}, {:?}", ws.rows.len(), ws.expected_dim, ws.complete, start.elapsed());
    let ws4 = hsm_core::certify::modular_forms_space_mod_p(31, 4, 70, 337).unwrap();
    eprintln!("M4(31) mod 337: dim {} of {}, complete {}", ws4.rows.len(), ws4.expected_dim, ws4.complete);
}

#[test]
#[ignore]
fn m_k_11_mod_7() {
    for k in [4u32, 14] {
        let ws = hsm_core::certify::modular_forms_space_mod_p(11, k, 40, 7).unwrap();
        eprintln!("M_{k}(11) mod 7: dim {} of {}, complete {}", ws.rows.len(), ws.expected_dim, ws.complete);
    }
}

#[test]
#[ignore]
fn m_all_11_mod_7() {
    for k in [2u32, 4, 6, 8, 10, 12, 14] {
        let ws = hsm_core::certify::modular_forms_space_mod_p(11, k, 40, 7).unwrap();
        eprintln!("M_{k}(11) mod 7: dim {} of {}", ws.rows.len(), ws.expected_dim);
    }
}

#[test]
#[ignore]
fn char0_j_poly_651() {
    // J over Q at conductor 31 must be divisible by the printed cubic
    let chi31 = DirichletCharacter::from_conrey(31, 30).unwrap();
    let start = std::time::Instant::now();
    let j = hsm_core::certify::zero_locus_char0(&chi31, 4).unwrap();
    eprintln!("J coeffs ({} terms) in {:?}:", j.len(), start.elapsed());
    for (i, c) in j.iter().enumerate() {
        eprintln!("  X^{i}: {c}");
    }
}

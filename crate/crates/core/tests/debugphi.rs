#[test]
#[ignore]
fn phi2_generator() {
    let a = hsm_core::isogeny::compute_modular_polynomial(2);
    let b = hsm_core::isogeny::modular_polynomial(2).unwrap();
    assert_eq!(a, b);
}

#[test]
#[ignore]
fn phi5_generator() {
    let a = hsm_core::isogeny::compute_modular_polynomial(5);
    assert!(a.is_symmetric());
    eprintln!("phi5 degree {}", a.degree());
}

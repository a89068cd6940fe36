//! Integral q-expansion bases of S_2(Gamma_0(N)), computed by a built-in
//! modular-symbols engine (Manin symbols on P^1(Z/NZ), boundary map,
//! plus-part Hecke matrices) or ingested from basis files.

pub mod dims;
pub mod hecke;
pub mod io;
pub mod manin;
pub mod p1;
pub mod qbasis;

pub use dims::{dim_mk, dim_sk, genus_x0, nu2, nu3, nu_inf, psi_index};
pub use io::{load_basis, parse_basis, save_basis, BasisIoError};
pub use manin::{build_symbols, SymbolSpace};
pub use qbasis::{q_basis, CuspformBasis};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::cyclotomic::CycField;
    use crate::exact::field::Field;
    use crate::qexp::TruncatedSeries;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, Zero};

    /// eta-product expansion: q^{(sum of arguments)/24} prod (1 - q^{dn})^e
    /// truncated; returns coefficients of q^1..q^{P-1} for weight-2 forms.
    fn eta_product(factors: &[(u64, i64)], precision: i64) -> Vec<BigInt> {
        let k = CycField::rationals();
        let shift: u64 = factors.iter().map(|&(d, e)| d * e as u64).sum::<u64>() / 24;
        let mut series = TruncatedSeries::constant(k.clone(), k.one(), precision);
        for &(d, e) in factors {
            assert!(e > 0, "only positive eta exponents needed here");
            // (q^d; q^d)_infinity = prod_{n >= 1} (1 - q^{dn})
            let mut pochhammer = TruncatedSeries::constant(k.clone(), k.one(), precision);
            let mut n = 1u64;
            while (d * n) as i64 <= precision {
                let mut coeffs = vec![k.zero(); precision as usize];
                coeffs[0] = k.one();
                if ((d * n) as i64) < precision {
                    coeffs[(d * n) as usize] = k.from_i64(-1);
                }
                let term = TruncatedSeries::from_coeffs(k.clone(), 0, coeffs, precision);
                pochhammer = pochhammer.mul(&term).unwrap().truncate(precision);
                n += 1;
            }
            for _ in 0..e {
                series = series.mul(&pochhammer).unwrap().truncate(precision);
            }
        }
        (1..precision)
            .map(|n| {
                let m = n - shift as i64;
                if m >= 0 && m < series.precision {
                    series.coeff(m).first().unwrap().to_integer()
                } else {
                    BigInt::zero()
                }
            })
            .collect()
    }

    #[test]
    fn basis_level_11_matches_eta_product() {
        let b = q_basis(11, 8);
        assert_eq!(b.dim, 1);
        // eta(q)^2 eta(q^11)^2 = q - 2q^2 - q^3 + 2q^4 + q^5 + 2q^6 - 2q^7
        let eta = eta_product(&[(1, 2), (11, 2)], 8);
        assert_eq!(b.rows[0], eta);
        let expect: Vec<BigInt> = [1, -2, -1, 2, 1, 2, -2]
            .iter()
            .map(|&v| BigInt::from(v))
            .collect();
        assert_eq!(b.rows[0], expect);
    }

    #[test]
    fn basis_level_15_matches_eta_product() {
        let b = q_basis(15, 8);
        assert_eq!(b.dim, 1);
        let eta = eta_product(&[(1, 1), (3, 1), (5, 1), (15, 1)], 8);
        assert_eq!(b.rows[0], eta);
    }

    #[test]
    fn genus_zero_levels_empty() {
        for n in 1..=10u64 {
            let b = q_basis(n, 6);
            assert_eq!(b.dim, 0, "N = {n}");
        }
    }

    /// a_p by counting points on a Weierstrass model over F_p.
    fn point_count_ap(coeffs: [i64; 5], p: u64) -> i64 {
        let [a1, a2, a3, a4, a6] = coeffs;
        let pm = p as i64;
        let md = |x: i64| x.rem_euclid(pm);
        let mut count = 1i64; // point at infinity
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

    #[test]
    fn genus_one_levels_match_point_counts() {
        // (level, Weierstrass coefficients of the strong curve)
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
        for (n, c) in curves {
            let b = q_basis(n, 51);
            assert_eq!(b.dim, 1, "N = {n}");
            let mut p = 2u64;
            while p <= 50 {
                if n % p != 0 {
                    let ap = point_count_ap(c, p);
                    assert_eq!(
                        b.rows[0][(p - 1) as usize],
                        BigInt::from(ap),
                        "a_{p} at level {n}"
                    );
                }
                p = crate::exact::integers::next_prime(p);
            }
        }
    }

    #[test]
    fn precision_coherence() {
        let b20 = q_basis(23, 20);
        let b8 = q_basis(23, 8);
        assert_eq!(b20.truncate(8), b8);
    }

    #[test]
    fn t2_stability_within_sturm_bound() {
        // T_2 maps the emitted basis span into itself up to the Sturm bound
        use crate::exact::matrix::Mat;
        for n in [11u64, 23, 31, 37] {
            let bound = crate::hsm::sturm(2, n);
            let b = q_basis(n, 4 * bound);
            let k = CycField::rationals();
            let series =
                b.to_series(&k, |x| vec![BigRational::from(x.clone())]);
            let rows: Vec<Vec<Vec<BigRational>>> = series
                .iter()
                .map(|s| {
                    (1..bound)
                        .map(|i| vec![s.coeff(i)[0].clone()])
                        .collect()
                })
                .collect();
            let span = Mat::from_rows(k.clone(), rows);
            for s in &series {
                let ts = s.hecke_tl(2, &k.one(), 2).unwrap();
                let row: Vec<Vec<BigRational>> = (1..bound)
                    .map(|i| vec![ts.coeff(i)[0].clone()])
                    .collect();
                let flat: Vec<Vec<BigRational>> = row.into_iter().collect();
                let v: Vec<Vec<BigRational>> = flat;
                assert!(
                    span.row_space_contains(
                        &v.into_iter().collect::<Vec<_>>()
                    ),
                    "T_2 image escaped the span at level {n}"
                );
            }
        }
    }

    #[test]
    fn file_roundtrip_and_validation() {
        let b = q_basis(11, 10);
        let text = io::format_basis(&b);
        let (b2, warnings) = io::parse_basis(&text).unwrap();
        assert_eq!(b, b2);
        assert!(warnings.is_empty());

        // non-echelon rows are echelonized with a warning; use a basis
        // with two rows so a row sum leaves the lattice unchanged
        let c = q_basis(23, 10);
        assert_eq!(c.dim, 2);
        let mut scrambled = c.clone();
        let summed: Vec<BigInt> = scrambled.rows[0]
            .iter()
            .zip(&scrambled.rows[1])
            .map(|(x, y)| x + y)
            .collect();
        scrambled.rows[0] = summed;
        let text2 = io::format_basis(&scrambled);
        let (b3, warnings2) = io::parse_basis(&text2).unwrap();
        assert_eq!(b3.rows, c.rows);
        assert!(!warnings2.is_empty());

        // truncated row: parse error
        let mut lines: Vec<&str> = text.lines().collect();
        let shortened = lines[1]
            .rsplit_once(' ')
            .map(|(head, _)| head.to_string())
            .unwrap();
        let short_line = shortened;
        lines[1] = &short_line;
        let bad = lines.join("\n");
        assert!(io::parse_basis(&bad).is_err());
    }

    #[test]
    fn basis_31_dimension_and_integrality() {
        let b = q_basis(31, 20);
        assert_eq!(b.dim, 2);
        // echelon pivots at q^1 and q^2
        assert_eq!(b.rows[0][0], BigInt::one());
        assert!(b.rows[0][1].is_zero());
        assert!(b.rows[1][0].is_zero());
        assert_eq!(b.rows[1][1], BigInt::one());
    }
}

//! Index, elliptic-point, cusp, and genus formulas for X_0(N), plus the
//! standard dimension formulas for weight-k spaces on Gamma_0(N).

use crate::eisenstein::divisors;

/// psi(N) = [SL_2(Z) : Gamma_0(N)] = N prod_{p|N} (1 + 1/p).
pub fn psi_index(n: u64) -> u64 {
    let mut psi = n;
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            psi = psi / p * (p + 1);
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        psi = psi / m * (m + 1);
    }
    psi
}

/// Number of elliptic points of order 2 on X_0(N).
pub fn nu2(n: u64) -> u64 {
    if n % 4 == 0 {
        return 0;
    }
    let mut count = 1u64;
    for (p, _) in prime_powers(n) {
        count *= match p % 4 {
            1 => 2,
            3 => 0,
            _ => 1, // p = 2
        };
    }
    count
}

/// Number of elliptic points of order 3 on X_0(N).
pub fn nu3(n: u64) -> u64 {
    if n % 9 == 0 {
        return 0;
    }
    let mut count = 1u64;
    for (p, _) in prime_powers(n) {
        count *= match p % 3 {
            1 => 2,
            2 => 0,
            _ => 1, // p = 3
        };
    }
    count
}

/// Number of cusps of X_0(N): sum over d | N of phi(gcd(d, N/d)).
pub fn nu_inf(n: u64) -> u64 {
    use num_integer::Integer;
    divisors(n)
        .iter()
        .map(|&d| crate::exact::integers::euler_phi(d.gcd(&(n / d))))
        .sum()
}

fn prime_powers(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Genus of X_0(N).
pub fn genus_x0(n: u64) -> u64 {
    let g12 = 12 + psi_index(n) - 3 * nu2(n) - 4 * nu3(n) - 6 * nu_inf(n);
    debug_assert_eq!(g12 % 12, 0);
    g12 / 12
}

/// dim S_k(Gamma_0(N)) for even k >= 2.
pub fn dim_sk(n: u64, k: u32) -> u64 {
    assert!(k >= 2 && k % 2 == 0);
    if k == 2 {
        return genus_x0(n);
    }
    let g = genus_x0(n) as i64;
    let k = k as i64;
    let val = (k - 1) * (g - 1)
        + (k / 2 - 1) * nu_inf(n) as i64
        + nu2(n) as i64 * (k / 4)
        + nu3(n) as i64 * (k / 3);
    val.max(0) as u64
}

/// dim M_k(Gamma_0(N)) for even k >= 2.
pub fn dim_mk(n: u64, k: u32) -> u64 {
    assert!(k >= 2 && k % 2 == 0);
    if k == 2 {
        return genus_x0(n) + nu_inf(n) - 1;
    }
    dim_sk(n, k) + nu_inf(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_values() {
        assert_eq!(psi_index(1), 1);
        assert_eq!(psi_index(11), 12);
        assert_eq!(psi_index(141), 192);
        assert_eq!(psi_index(651), 1024);
        assert_eq!(psi_index(31), 32);
    }

    #[test]
    fn genus_values() {
        // known small genera
        for (n, g) in [
            (1, 0),
            (10, 0),
            (11, 1),
            (14, 1),
            (15, 1),
            (17, 1),
            (19, 1),
            (20, 1),
            (21, 1),
            (24, 1),
            (22, 2),
            (23, 2),
            (31, 2),
            (37, 2),
            (50, 2),
        ] {
            assert_eq!(genus_x0(n), g, "N = {n}");
        }
        assert_eq!(genus_x0(651), 81);
        assert_eq!(genus_x0(141), 15);
    }

    #[test]
    fn cusp_counts() {
        assert_eq!(nu_inf(1), 1);
        assert_eq!(nu_inf(4), 3);
        assert_eq!(nu_inf(11), 2);
        assert_eq!(nu_inf(31), 2);
        assert_eq!(nu_inf(651), 8);
        assert_eq!(nu_inf(100), 18);
    }

    #[test]
    fn weight_dims_31() {
        assert_eq!(dim_sk(31, 4), 7);
        assert_eq!(dim_mk(31, 4), 9);
        assert_eq!(dim_sk(31, 14), 33);
        assert_eq!(dim_mk(31, 14), 35);
        assert_eq!(dim_mk(31, 2), 3);
    }
}

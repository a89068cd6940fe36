//! Exact arithmetic: integers, the cyclotomic field K = Q(zeta_m), prime
//! slots with their residue fields, dense matrices over an abstract field,
//! exact determinants, and prime-divisor detection for matrices.

pub mod cyclotomic;
pub mod field;
pub mod integers;
pub mod matrix;
pub mod poly;
pub mod residue;

pub use cyclotomic::{CycField, FieldElement};
pub use field::Field;
pub use integers::{factor_integer, Factorization};
pub use matrix::Mat;
pub use residue::{primes_above, PrimeSlot, ResidueField, Slot};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExactError {
    #[error("prime {p} divides the cyclotomic order {m}; slot unsupported")]
    UnsupportedPrime { p: u64, m: u32 },
    #[error("element is not integral at the slot (denominator divisible by {p})")]
    NonIntegral { p: u64 },
    #[error("matrix is rank-deficient over K; prime-divisor detection is ill-posed")]
    RankDeficient,
    #[error("field mismatch between operands")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("prime {0} exceeds the machine-word bound for residue arithmetic")]
    PrimeTooLarge(String),
}

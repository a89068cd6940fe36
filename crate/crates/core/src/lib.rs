//! Computation of weight-1 modular form spaces over Q(chi) and over finite
//! residue fields simultaneously, by iterated intersection and Hecke
//! stabilization of spaces of modular ratios.
//!
//! Module layout:
//! - [`exact`]: arbitrary-precision exact arithmetic, cyclotomic fields,
//!   residue fields at prime slots, matrices, determinants, prime divisors.
//! - [`characters`]: Dirichlet characters, generalized Bernoulli numbers,
//!   Eisenstein congruence primes.
//! - [`qexp`]: truncated Laurent q-expansions and the Hecke operator on them.
//! - [`weight2`]: modular-symbols engine producing integral bases of
//!   S_2(Gamma_0(N)), plus basis file I/O.
//! - [`eisenstein`]: closed-form Eisenstein series (weight 1 and 2, level 1),
//!   the lambda sets that seed the pipeline, and weight-1 Eisenstein counts.
//! - [`hsm`]: the two-pass stabilization pipeline, torsion-prime detection,
//!   and report assembly.
//! - [`certify`]: certification of stability hypotheses (reduction equality,
//!   zero loci, supersingular bounds, square membership).
//! - [`isogeny`]: modular polynomials, l-isogeny graphs over F_{p^2}, polar
//!   conditions, and the tree/volcano lower-bound machinery.

pub mod characters;
pub mod certify;
pub mod eisenstein;
pub mod exact;
pub mod hsm;
pub mod isogeny;
pub mod qexp;
pub mod weight2;

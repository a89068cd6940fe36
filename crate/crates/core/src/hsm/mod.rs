//! The Hecke stability pipeline: Sturm bounds, subspace operations, the
//! characteristic-zero and residue-field passes, torsion-prime detection,
//! and report assembly.

pub mod pipeline;
pub mod subspace;

pub use pipeline::{
    build_u, detect_primes, full_run, intersect, run_pass, stable_core, stabilize, t_prime,
    DetectionLists, PassOutput, PipelineConfig, PipelineError, PipelineReport, SlotReport,
};
pub use subspace::{echelonize, LinAlgField, Subspace};

use crate::weight2::dims::psi_index;

/// Sturm bound: ceil((k/12) psi(N) + 1); truncated q-expansion is
/// injective on weight-k forms at this precision.
pub fn sturm(k: u32, n: u64) -> i64 {
    ((k as u64 * psi_index(n) + 23) / 12) as i64
}

/// Default working precision for the pipeline: l * Sturm_{l+2}(N).
pub fn required_precision(n: u64, ell: u64) -> i64 {
    ell as i64 * sturm(ell as u32 + 2, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sturm_values() {
        assert_eq!(sturm(2, 11), 3);
        assert_eq!(sturm(4, 141), 65);
        assert_eq!(sturm(4, 651), 343);
        assert_eq!(psi_index(141), 192);
        assert_eq!(psi_index(651), 1024);
    }

    #[test]
    fn required_precision_values() {
        assert_eq!(required_precision(141, 2), 130);
        assert_eq!(required_precision(11, 5), 40);
        assert_eq!(required_precision(651, 2), 686);
    }
}

//! l-isogeny graphs over F_{p^2}, polar conditions, and the tree/volcano
//! lower-bound machinery for pole loci of Hecke-stable spaces.

pub mod graph;
pub mod modpoly;
pub mod polar;

pub use graph::{build_graph, local_structure_audit, GraphRestriction, IsogenyGraph, LocalStructureReport};
pub use modpoly::{compute_modular_polynomial, modular_polynomial, ModularPolynomial};
pub use polar::{b_r_formula, min_polar_size_tree, min_polar_size_volcano};

//! Factorization into first-order pieces around a second-order core, and
//! composition of solution bases.

pub mod chain;
pub mod compose;
pub mod hyperexp;

pub use chain::{factor_chain, Factorization};
pub use compose::{compose_core_left_of_chain, compose_core_right_of_chain, compose_dalembertian, SolutionBasis, Witness};
pub use hyperexp::{hyperexp_solutions, HyperexpTerm};

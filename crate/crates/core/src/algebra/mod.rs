//! Exact algebra over the rationals: polynomials, rational functions,
//! differential and recurrence operators, linear algebra.

pub mod field;
pub mod linalg;
pub mod ore;
pub mod poly;
pub mod polysol;
pub mod ratfun;
pub mod recop;
pub mod roots;

//! Symbolic expressions for solutions, and exact integration.

pub mod expr;
pub mod integrate;
pub mod radical;
pub mod sexpr;

pub use expr::{normalize, Expr, Integral};
pub use sexpr::{parse_sexpr, to_sexpr};

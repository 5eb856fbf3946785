//! High-precision evaluation, quadrature, fitting and constant recognition.

pub mod eval;
pub mod fit;
pub mod quad;
pub mod real;
pub mod recognize;
pub mod verify;

pub use eval::{eval_expr, Evaluator};
pub use quad::{Point, QuadResult, TanhSinh};
pub use real::{bits_for_digits, Cx, Mp, Scalar};

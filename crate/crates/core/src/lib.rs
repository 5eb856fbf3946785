//! Integral representations of holonomic sequences.

pub mod algebra;
pub mod closedform;
pub mod error;
pub mod factor;
pub mod io;
pub mod kovacic;
pub mod mellin;
pub mod numerics;
pub mod pipeline;

pub use algebra::field::Q;
pub use algebra::ore::{DiffOp, RatDiffOp};
pub use algebra::recop::RecOp;
pub use error::{Error, Result};

/// Polynomial with rational coefficients.
pub type QPoly = algebra::poly::Poly<Q>;
/// Rational function with rational coefficients.
pub type QRatFun = algebra::ratfun::RatFun<Q>;

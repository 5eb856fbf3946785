//! Scalar abstraction for the exact kernel.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

/// Coefficient field of polynomials, rational functions and matrices.
///
/// Any `num_traits::Num` type with negation works; the kernel itself runs
/// over [`BigRational`], while `f64` is handy for quick numeric checks.
pub trait Field: Num + Clone + Neg<Output = Self> + Debug {}

impl<T> Field for T where T: Num + Clone + Neg<Output = T> + Debug {}

/// Exact rational number.
pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Parses `"p/q"`, `"p"` or a plain integer string.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let n: BigInt = a.trim().parse().ok()?;
            let d: BigInt = b.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Q::new(n, d))
        }
        None => Some(Q::from_integer(s.parse().ok()?)),
    }
}

/// Canonical text form: `p` for integers, `p/q` otherwise.
pub fn fmt_q(v: &Q) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

pub fn q_to_f64(v: &Q) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

pub fn is_integer(v: &Q) -> bool {
    v.denom().is_one()
}

/// `v^k` for an integer exponent (negative exponents invert).
pub fn q_pow(v: &Q, k: i64) -> Q {
    if k >= 0 {
        num_traits::pow(v.clone(), k as usize)
    } else {
        num_traits::pow(v.recip(), (-k) as usize)
    }
}

/// Exact rational square root, if one exists.
pub fn q_sqrt(v: &Q) -> Option<Q> {
    if v.is_negative() {
        return None;
    }
    let n = int_sqrt_exact(v.numer())?;
    let d = int_sqrt_exact(v.denom())?;
    Some(Q::new(n, d))
}

fn int_sqrt_exact(n: &BigInt) -> Option<BigInt> {
    let r = n.sqrt();
    if &(&r * &r) == n {
        Some(r)
    } else {
        None
    }
}

/// Least common multiple of the denominators.
pub fn denom_lcm<'a>(vals: impl IntoIterator<Item = &'a Q>) -> BigInt {
    vals.into_iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Gcd of the numerators (always nonnegative).
pub fn numer_gcd<'a>(vals: impl IntoIterator<Item = &'a Q>) -> BigInt {
    vals.into_iter().fold(BigInt::zero(), |acc, v| acc.gcd(v.numer()))
}

/// Height used for deterministic tie-breaking.
pub fn q_height(v: &Q) -> BigInt {
    v.numer().abs() + v.denom()
}

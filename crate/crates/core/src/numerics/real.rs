//! Arbitrary-precision reals and the [`Scalar`] abstraction used by the
//! numeric layer.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use num_bigint::{BigInt, Sign};
use num_complex::Complex;
use num_traits::{Num, One, ToPrimitive, Zero};
use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer};

use crate::algebra::field::Q;
use crate::error::{Error, Result};

/// Bits used for exactly representable constants such as 0 and 1.
const EXACT_BITS: u32 = 8;

/// Working precision in bits for `digits` decimal digits plus guard bits.
pub fn bits_for_digits(digits: u32) -> u32 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 16
}

/// MPFR float whose arithmetic runs at the larger operand precision.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct Mp(pub Float);

fn big_to_integer(n: &BigInt) -> Integer {
    let (sign, digits) = n.to_u64_digits();
    let v = Integer::from_digits(&digits, rug::integer::Order::Lsf);
    if sign == Sign::Minus {
        -v
    } else {
        v
    }
}

impl Mp {
    pub fn zero_with(bits: u32) -> Mp {
        Mp(Float::new(bits))
    }

    pub fn from_i64(v: i64, bits: u32) -> Mp {
        Mp(Float::with_val(bits, v))
    }

    pub fn from_f64(v: f64, bits: u32) -> Mp {
        Mp(Float::with_val(bits, v))
    }

    pub fn from_q(v: &Q, bits: u32) -> Mp {
        if let (Some(n), Some(d)) = (v.numer().to_i64(), v.denom().to_i64()) {
            return Mp(Float::with_val(bits, n) / d);
        }
        let n = big_to_integer(v.numer());
        let d = big_to_integer(v.denom());
        Mp(Float::with_val(bits, &n) / &d)
    }

    /// Parses a decimal literal such as `-1.25e-3`.
    pub fn parse(s: &str, bits: u32) -> Option<Mp> {
        Float::parse(s).ok().map(|p| Mp(Float::with_val(bits, p)))
    }

    pub fn pi(bits: u32) -> Mp {
        Mp(Float::with_val(bits, Constant::Pi))
    }

    pub fn ln2(bits: u32) -> Mp {
        Mp(Float::with_val(bits, Constant::Log2))
    }

    pub fn prec(&self) -> u32 {
        self.0.prec()
    }

    /// Copy rounded or extended to `bits`.
    pub fn with_prec(&self, bits: u32) -> Mp {
        Mp(Float::with_val(bits, &self.0))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_sign_negative() && !self.0.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    /// `log2 |self|`, `-inf` for zero. Safe far outside the f64 range.
    pub fn log2_abs(&self) -> f64 {
        if self.0.is_zero() {
            return f64::NEG_INFINITY;
        }
        if !self.0.is_finite() {
            return f64::INFINITY;
        }
        let (m, e) = self.0.to_f64_exp();
        m.abs().log2() + e as f64
    }

    pub fn abs(&self) -> Mp {
        Mp(self.0.clone().abs())
    }

    pub fn sqrt(&self) -> Mp {
        Mp(self.0.clone().sqrt())
    }

    pub fn ln(&self) -> Mp {
        Mp(self.0.clone().ln())
    }

    pub fn exp(&self) -> Mp {
        Mp(self.0.clone().exp())
    }

    pub fn sin(&self) -> Mp {
        Mp(self.0.clone().sin())
    }

    pub fn cos(&self) -> Mp {
        Mp(self.0.clone().cos())
    }

    pub fn sinh(&self) -> Mp {
        Mp(self.0.clone().sinh())
    }

    pub fn cosh(&self) -> Mp {
        Mp(self.0.clone().cosh())
    }

    pub fn atan2(&self, x: &Mp) -> Mp {
        let bits = self.prec().max(x.prec());
        Mp(Float::with_val(bits, self.0.atan2_ref(&x.0)))
    }

    pub fn powi(&self, k: i64) -> Mp {
        let k = i32::try_from(k).expect("exponent fits in i32");
        Mp(self.0.clone().pow(k))
    }

    pub fn powf(&self, k: &Mp) -> Mp {
        let bits = self.prec().max(k.prec());
        Mp(Float::with_val(bits, (&self.0).pow(&k.0)))
    }

    pub fn round(&self) -> Mp {
        Mp(self.0.clone().round())
    }

    pub fn floor(&self) -> Mp {
        Mp(self.0.clone().floor())
    }

    pub fn to_i64(&self) -> Option<i64> {
        self.0.to_integer().and_then(|i| i.to_i64())
    }

    /// Decimal string with `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        if self.0.is_zero() {
            return "0".to_string();
        }
        let s = self.0.to_string_radix(10, Some(digits.max(1)));
        tidy_decimal(&s)
    }

    pub fn max(self, other: Mp) -> Mp {
        if other > self {
            other
        } else {
            self
        }
    }
}

/// Rewrites MPFR output like `1.2340e-5` into `1.234e-5`.
fn tidy_decimal(s: &str) -> String {
    let (mant, exp) = match s.find('e') {
        Some(i) => (&s[..i], Some(&s[i + 1..])),
        None => (s, None),
    };
    let mant = if mant.contains('.') {
        mant.trim_end_matches('0').trim_end_matches('.')
    } else {
        mant
    };
    match exp {
        Some(e) => {
            let e: i64 = e.parse().unwrap_or(0);
            if e == 0 {
                mant.to_string()
            } else {
                format!("{mant}e{e}")
            }
        }
        None => mant.to_string(),
    }
}

impl fmt::Debug for Mp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(20))
    }
}

impl fmt::Display for Mp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = (self.prec() as f64 / std::f64::consts::LOG2_10).floor() as usize;
        write!(f, "{}", self.to_decimal(digits))
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident) => {
        impl $tr<&Mp> for &Mp {
            type Output = Mp;
            fn $m(self, o: &Mp) -> Mp {
                let bits = self.prec().max(o.prec());
                Mp(Float::with_val(bits, $tr::$m(&self.0, &o.0)))
            }
        }
        impl $tr<Mp> for Mp {
            type Output = Mp;
            fn $m(self, o: Mp) -> Mp {
                $tr::$m(&self, &o)
            }
        }
        impl $tr<&Mp> for Mp {
            type Output = Mp;
            fn $m(self, o: &Mp) -> Mp {
                $tr::$m(&self, o)
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);
binop!(Rem, rem);

impl Neg for Mp {
    type Output = Mp;
    fn neg(self) -> Mp {
        Mp(-self.0)
    }
}

impl Neg for &Mp {
    type Output = Mp;
    fn neg(self) -> Mp {
        Mp(-self.0.clone())
    }
}

impl Zero for Mp {
    fn zero() -> Mp {
        Mp(Float::new(EXACT_BITS))
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for Mp {
    fn one() -> Mp {
        Mp(Float::with_val(EXACT_BITS, 1))
    }
}

impl Num for Mp {
    type FromStrRadixErr = Error;
    fn from_str_radix(s: &str, radix: u32) -> Result<Mp> {
        if radix != 10 {
            return Err(Error::Parse("only decimal literals are supported".into()));
        }
        Mp::parse(s, 64).ok_or_else(|| Error::Parse(format!("bad number {s}")))
    }
}

/// Complex numbers over [`Mp`].
pub type Cx = Complex<Mp>;

/// Number type the evaluator and quadrature are generic over.
pub trait Scalar:
    Clone + fmt::Debug + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    const COMPLEX: bool;
    fn from_mp(v: Mp) -> Self;
    fn re(&self) -> Mp;
    fn im(&self) -> Mp;
    /// `log2 |self|`.
    fn log2_abs(&self) -> f64;
    fn is_zero(&self) -> bool;
    fn exp(&self) -> Self;
    /// Principal logarithm; real scalars reject non-positive arguments.
    fn ln(&self) -> Result<Self>;
    fn powi(&self, k: i64) -> Result<Self>;

    fn from_q(v: &Q, bits: u32) -> Self {
        Self::from_mp(Mp::from_q(v, bits))
    }

    /// Principal branch of `self^k`.
    fn powq(&self, k: &Q) -> Result<Self> {
        if k.is_integer() {
            let e = k.to_integer().to_i64().ok_or_else(|| Error::Domain("huge exponent".into()))?;
            return self.powi(e);
        }
        if self.is_zero() {
            return if k > &Q::zero() {
                Ok(self.clone())
            } else {
                Err(Error::PoleHit("zero base with negative exponent".into()))
            };
        }
        let bits = self.re().prec();
        let l = self.ln()?;
        Ok((l * Self::from_q(k, bits)).exp())
    }
}

impl Scalar for Mp {
    const COMPLEX: bool = false;

    fn from_mp(v: Mp) -> Self {
        v
    }

    fn re(&self) -> Mp {
        self.clone()
    }

    fn im(&self) -> Mp {
        Mp::zero_with(self.prec())
    }

    fn log2_abs(&self) -> f64 {
        Mp::log2_abs(self)
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn exp(&self) -> Self {
        Mp::exp(self)
    }

    fn ln(&self) -> Result<Self> {
        if self.0.is_zero() {
            return Err(Error::PoleHit("log(0)".into()));
        }
        if self.is_negative() {
            return Err(Error::Domain(format!("log of negative value {self:?}")));
        }
        Ok(Mp::ln(self))
    }

    fn powi(&self, k: i64) -> Result<Self> {
        if k < 0 && self.0.is_zero() {
            return Err(Error::PoleHit("division by zero".into()));
        }
        Ok(Mp::powi(self, k))
    }

    fn powq(&self, k: &Q) -> Result<Self> {
        if k.is_integer() {
            return Scalar::powi(
                self,
                k.to_integer().to_i64().ok_or_else(|| Error::Domain("huge exponent".into()))?,
            );
        }
        if self.is_negative() {
            return Err(Error::Domain(format!("fractional power of negative value {self:?}")));
        }
        if self.0.is_zero() {
            return if k > &Q::zero() {
                Ok(self.clone())
            } else {
                Err(Error::PoleHit("0^negative".into()))
            };
        }
        let bits = self.prec();
        if *k.denom() == BigInt::from(2) {
            let s = self.sqrt();
            return Scalar::powi(&s, k.numer().to_i64().unwrap());
        }
        Ok(self.powf(&Mp::from_q(k, bits)))
    }
}

impl Scalar for Cx {
    const COMPLEX: bool = true;

    fn from_mp(v: Mp) -> Self {
        let bits = v.prec();
        Complex::new(v, Mp::zero_with(bits))
    }

    fn re(&self) -> Mp {
        self.re.clone()
    }

    fn im(&self) -> Mp {
        self.im.clone()
    }

    fn log2_abs(&self) -> f64 {
        let a = self.re.log2_abs();
        let b = self.im.log2_abs();
        let m = a.max(b);
        if m == f64::NEG_INFINITY {
            return m;
        }
        m + 0.5 * (1.0 + (2f64).powf(2.0 * (a.min(b) - m))).log2()
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn exp(&self) -> Self {
        let r = self.re.exp();
        Complex::new(&r * &self.im.cos(), &r * &self.im.sin())
    }

    fn ln(&self) -> Result<Self> {
        if Scalar::is_zero(self) {
            return Err(Error::PoleHit("log(0)".into()));
        }
        let m = (&self.re * &self.re + &self.im * &self.im).sqrt();
        Ok(Complex::new(m.ln(), self.im.atan2(&self.re)))
    }

    fn powi(&self, k: i64) -> Result<Self> {
        if k < 0 && Scalar::is_zero(self) {
            return Err(Error::PoleHit("division by zero".into()));
        }
        let bits = self.re.prec().max(self.im.prec());
        let mut base = self.clone();
        let mut acc = Complex::new(Mp::from_i64(1, bits), Mp::zero_with(bits));
        let mut e = k.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        if k < 0 {
            let one = Complex::new(Mp::from_i64(1, bits), Mp::zero_with(bits));
            acc = one / acc;
        }
        Ok(acc)
    }
}

impl Scalar for f64 {
    const COMPLEX: bool = false;

    fn from_mp(v: Mp) -> Self {
        v.to_f64()
    }

    fn from_q(v: &Q, _bits: u32) -> Self {
        crate::algebra::field::q_to_f64(v)
    }

    fn re(&self) -> Mp {
        Mp::from_f64(*self, 53)
    }

    fn im(&self) -> Mp {
        Mp::zero_with(53)
    }

    fn log2_abs(&self) -> f64 {
        self.abs().log2()
    }

    fn is_zero(&self) -> bool {
        *self == 0.0
    }

    fn exp(&self) -> Self {
        f64::exp(*self)
    }

    fn ln(&self) -> Result<Self> {
        if *self <= 0.0 {
            return Err(Error::Domain(format!("log of {self}")));
        }
        Ok(f64::ln(*self))
    }

    fn powi(&self, k: i64) -> Result<Self> {
        if k < 0 && *self == 0.0 {
            return Err(Error::PoleHit("division by zero".into()));
        }
        Ok(f64::powi(*self, k as i32))
    }

    fn powq(&self, k: &Q) -> Result<Self> {
        if k.is_integer() {
            return Scalar::powi(self, k.to_integer().to_i64().unwrap_or(i64::MAX));
        }
        if *self < 0.0 {
            return Err(Error::Domain(format!("fractional power of {self}")));
        }
        Ok(self.powf(crate::algebra::field::q_to_f64(k)))
    }
}

/// Relative difference `|a - b| / max(|a|, |b|)`, or the absolute difference
/// when both vanish.
pub fn rel_err(a: &Mp, b: &Mp) -> Mp {
    let d = (a - b).abs();
    let m = a.abs().max(b.abs());
    if m.is_zero() {
        d
    } else {
        d / m
    }
}

impl PartialEq<f64> for Mp {
    fn eq(&self, o: &f64) -> bool {
        self.0 == *o
    }
}

impl PartialOrd<f64> for Mp {
    fn partial_cmp(&self, o: &f64) -> Option<Ordering> {
        self.0.partial_cmp(o)
    }
}

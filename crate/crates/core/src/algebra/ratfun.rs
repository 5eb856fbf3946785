//! Univariate rational functions in lowest terms.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::Zero;

use super::field::{Field, Q};
use super::poly::Poly;

/// `num / den` with `gcd(num, den) = 1` and `den` monic.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatFun<F> {
    num: Poly<F>,
    den: Poly<F>,
}

impl<F: Field> RatFun<F> {
    pub fn new(num: Poly<F>, den: Poly<F>) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        if num.is_zero() {
            return RatFun { num, den: Poly::one() };
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = if g.deg() > 0 {
            (num.div_exact(&g).unwrap(), den.div_exact(&g).unwrap())
        } else {
            (num, den)
        };
        let l = d.lc();
        if !l.is_one() {
            let inv = F::one() / l;
            n = n.scale(&inv);
            d = d.scale(&inv);
        }
        RatFun { num: n, den: d }
    }

    pub fn from_poly(p: Poly<F>) -> Self {
        RatFun {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn constant(c: F) -> Self {
        RatFun::from_poly(Poly::constant(c))
    }

    pub fn zero() -> Self {
        RatFun::from_poly(Poly::zero())
    }

    pub fn one() -> Self {
        RatFun::constant(F::one())
    }

    pub fn x() -> Self {
        RatFun::from_poly(Poly::x())
    }

    pub fn num(&self) -> &Poly<F> {
        &self.num
    }

    pub fn den(&self) -> &Poly<F> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_poly(&self) -> bool {
        self.den.deg() == 0
    }

    pub fn as_poly(&self) -> Option<Poly<F>> {
        self.is_poly().then(|| self.num.scale(&(F::one() / self.den.lc())))
    }

    pub fn inv(&self) -> Self {
        RatFun::new(self.den.clone(), self.num.clone())
    }

    pub fn scale(&self, c: &F) -> Self {
        RatFun::new(self.num.scale(c), self.den.clone())
    }

    pub fn derivative(&self) -> Self {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        RatFun::new(n, &self.den * &self.den)
    }

    /// Evaluates at a point that is not a pole.
    pub fn eval(&self, x: &F) -> Option<F> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(x) / d)
    }

    pub fn pow(&self, k: i64) -> Self {
        let base = if k < 0 { self.inv() } else { self.clone() };
        let k = k.unsigned_abs() as usize;
        RatFun::new(base.num.pow(k), base.den.pow(k))
    }

    /// `self(x + a)`.
    pub fn taylor_shift(&self, a: &F) -> Self {
        RatFun::new(self.num.taylor_shift(a), self.den.taylor_shift(a))
    }

    /// Order at `x = c` (positive for zeros, negative for poles);
    /// `None` for the zero function.
    pub fn order_at(&self, c: &F) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        let n = self.num.taylor_shift(c).valuation().unwrap() as i64;
        let d = self.den.taylor_shift(c).valuation().unwrap() as i64;
        Some(n - d)
    }

    /// Order at infinity, `deg den - deg num`.
    pub fn order_at_infinity(&self) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        Some(self.den.deg() - self.num.deg())
    }

    /// Laurent expansion at `x = c`: returns `(v, a)` with
    /// `self = sum_i a[i] (x - c)^(v + i)`, truncated to `len` terms.
    pub fn laurent_at(&self, c: &F, len: usize) -> (i64, Vec<F>) {
        let n = self.num.taylor_shift(c);
        let d = self.den.taylor_shift(c);
        laurent_from_parts(&n, &d, len)
    }

    /// Expansion at infinity in `t = 1/x`: `(v, a)` with
    /// `self = sum_i a[i] t^(v + i)`.
    pub fn laurent_at_infinity(&self, len: usize) -> (i64, Vec<F>) {
        if self.is_zero() {
            return (0, vec![F::zero(); len]);
        }
        let rn = reverse(&self.num);
        let rd = reverse(&self.den);
        let (v, a) = laurent_from_parts(&rn, &rd, len);
        (v + self.den.deg() - self.num.deg(), a)
    }

    /// Polynomial part and proper remainder: `self = p + r/den`.
    pub fn split_polynomial(&self) -> (Poly<F>, Poly<F>) {
        self.num.divrem(&self.den)
    }
}

fn reverse<F: Field>(p: &Poly<F>) -> Poly<F> {
    let mut c = p.coeffs().to_vec();
    c.reverse();
    Poly::new(c)
}

/// Series of `n/d` at 0 where both are given as polynomials in the local
/// parameter.
fn laurent_from_parts<F: Field>(n: &Poly<F>, d: &Poly<F>, len: usize) -> (i64, Vec<F>) {
    let Some(vn) = n.valuation() else {
        return (0, vec![F::zero(); len]);
    };
    let vd = d.valuation().unwrap();
    let n = n.shift_down(vn);
    let d = d.shift_down(vd);
    let d0 = d.coeff(0);
    let mut out: Vec<F> = Vec::with_capacity(len);
    for k in 0..len {
        let mut acc = n.coeff(k);
        for j in 1..=k {
            acc = acc - d.coeff(j) * out[k - j].clone();
        }
        out.push(acc / d0.clone());
    }
    (vn as i64 - vd as i64, out)
}

impl<F: Field> Add for &RatFun<F> {
    type Output = RatFun<F>;
    fn add(self, o: &RatFun<F>) -> RatFun<F> {
        if self.den == o.den {
            return RatFun::new(&self.num + &o.num, self.den.clone());
        }
        let n = &(&self.num * &o.den) + &(&o.num * &self.den);
        RatFun::new(n, &self.den * &o.den)
    }
}

impl<F: Field> Sub for &RatFun<F> {
    type Output = RatFun<F>;
    fn sub(self, o: &RatFun<F>) -> RatFun<F> {
        self + &(-o)
    }
}

impl<F: Field> Mul for &RatFun<F> {
    type Output = RatFun<F>;
    fn mul(self, o: &RatFun<F>) -> RatFun<F> {
        RatFun::new(&self.num * &o.num, &self.den * &o.den)
    }
}

impl<F: Field> Div for &RatFun<F> {
    type Output = RatFun<F>;
    fn div(self, o: &RatFun<F>) -> RatFun<F> {
        assert!(!o.is_zero(), "rational function division by zero");
        RatFun::new(&self.num * &o.den, &self.den * &o.num)
    }
}

impl<F: Field> Neg for &RatFun<F> {
    type Output = RatFun<F>;
    fn neg(self) -> RatFun<F> {
        RatFun {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<F: Field> $tr for RatFun<F> {
            type Output = RatFun<F>;
            fn $m(self, o: RatFun<F>) -> RatFun<F> {
                (&self).$m(&o)
            }
        }
        impl<F: Field> $tr<&RatFun<F>> for RatFun<F> {
            type Output = RatFun<F>;
            fn $m(self, o: &RatFun<F>) -> RatFun<F> {
                (&self).$m(o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl<F: Field> Neg for RatFun<F> {
    type Output = RatFun<F>;
    fn neg(self) -> RatFun<F> {
        -&self
    }
}

impl<F: Field> From<Poly<F>> for RatFun<F> {
    fn from(p: Poly<F>) -> Self {
        RatFun::from_poly(p)
    }
}

impl fmt::Display for RatFun<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl<F: fmt::Debug> fmt::Debug for RatFun<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?})/({:?})", self.num, self.den)
    }
}

impl RatFun<Q> {
    pub fn from_q(c: Q) -> Self {
        RatFun::constant(c)
    }

    /// `c / (x - a)^k`.
    pub fn pole(c: Q, a: Q, k: usize) -> Self {
        RatFun::new(Poly::constant(c), Poly::linear_root(a).pow(k))
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn constant_value(&self) -> Option<Q> {
        if self.is_zero() {
            return Some(Q::zero());
        }
        self.is_constant().then(|| self.num.lc() / self.den.lc())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::q;

    #[test]
    fn reduces_to_lowest_terms() {
        let r = RatFun::new(Poly::from_ints(&[-1, 0, 1]), Poly::from_ints(&[-2, 2]));
        assert_eq!(r.num(), &Poly::new(vec![q(1, 2), q(1, 2)]));
        assert_eq!(r.den(), &Poly::one());
    }

    #[test]
    fn laurent_coefficients() {
        // 2/x^2 + 1/x
        let r = RatFun::new(Poly::from_ints(&[2, 1]), Poly::from_ints(&[0, 0, 1]));
        let (v, a) = r.laurent_at(&q(0, 1), 3);
        assert_eq!(v, -2);
        assert_eq!(a, vec![q(2, 1), q(1, 1), q(0, 1)]);
        let (vi, ai) = r.laurent_at_infinity(2);
        assert_eq!(vi, 1);
        assert_eq!(ai, vec![q(1, 1), q(2, 1)]);
    }

    #[test]
    fn derivative_of_inverse() {
        let r = RatFun::new(Poly::one(), Poly::from_ints(&[0, 1]));
        assert_eq!(
            r.derivative(),
            RatFun::new(Poly::from_ints(&[-1]), Poly::from_ints(&[0, 0, 1]))
        );
    }
}

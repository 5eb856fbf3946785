//! Linear differential operators `sum_k c_k(x) D^k` over a differential
//! coefficient ring.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::field::{Field, Q};
use super::poly::Poly;
use super::ratfun::RatFun;

/// A commutative ring with a derivation.
pub trait DiffRing: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn deriv(&self) -> Self;
    fn from_i64(n: i64) -> Self;

    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
}

impl<F: Field> DiffRing for Poly<F> {
    fn zero() -> Self {
        Poly::zero()
    }
    fn one() -> Self {
        Poly::one()
    }
    fn is_zero(&self) -> bool {
        Poly::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn deriv(&self) -> Self {
        self.derivative()
    }
    fn from_i64(n: i64) -> Self {
        let mut c = F::zero();
        let one = F::one();
        for _ in 0..n.unsigned_abs() {
            c = c + one.clone();
        }
        Poly::constant(if n < 0 { -c } else { c })
    }
}

impl<F: Field> DiffRing for RatFun<F> {
    fn zero() -> Self {
        RatFun::zero()
    }
    fn one() -> Self {
        RatFun::one()
    }
    fn is_zero(&self) -> bool {
        RatFun::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn deriv(&self) -> Self {
        self.derivative()
    }
    fn from_i64(n: i64) -> Self {
        RatFun::from_poly(<Poly<F> as DiffRing>::from_i64(n))
    }
}

/// `coeffs[k]` multiplies `D^k`. Trailing zero coefficients are trimmed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct OreOp<C> {
    coeffs: Vec<C>,
}

pub type DiffOp = OreOp<Poly<Q>>;
pub type RatDiffOp = OreOp<RatFun<Q>>;

fn binomial_row(n: usize) -> Vec<i64> {
    let mut row = vec![1i64];
    for _ in 0..n {
        let mut next = vec![1i64; row.len() + 1];
        for j in 1..row.len() {
            next[j] = row[j - 1] + row[j];
        }
        row = next;
    }
    row
}

impl<C: DiffRing> OreOp<C> {
    pub fn new(mut coeffs: Vec<C>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        OreOp { coeffs }
    }

    pub fn zero() -> Self {
        OreOp { coeffs: vec![] }
    }

    pub fn one() -> Self {
        OreOp::new(vec![C::one()])
    }

    /// The derivation `D`.
    pub fn d() -> Self {
        OreOp::new(vec![C::zero(), C::one()])
    }

    /// Multiplication by `c`.
    pub fn mult(c: C) -> Self {
        OreOp::new(vec![c])
    }

    /// `D - u`.
    pub fn d_minus(u: C) -> Self {
        OreOp::new(vec![u.neg(), C::one()])
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> C {
        self.coeffs.get(k).cloned().unwrap_or_else(C::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Order; the zero operator has order 0.
    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> C {
        self.coeffs.last().cloned().unwrap_or_else(C::zero)
    }

    /// Applies the operator to a ring element.
    pub fn apply(&self, f: &C) -> C {
        let mut acc = C::zero();
        let mut der = f.clone();
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                der = der.deriv();
            }
            if !c.is_zero() {
                acc = acc.add(&c.mul(&der));
            }
        }
        acc
    }

    pub fn scale_left(&self, c: &C) -> Self {
        OreOp::new(self.coeffs.iter().map(|a| c.mul(a)).collect())
    }

    /// Composition `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return OreOp::zero();
        }
        let mut out = vec![C::zero(); self.order() + other.order() + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let binom = binomial_row(i);
            for (j, b) in other.coeffs.iter().enumerate() {
                // a D^i b D^j = a sum_k C(i,k) b^(k) D^(i+j-k)
                let mut bk = b.clone();
                for (k, &bc) in binom.iter().enumerate() {
                    if k > 0 {
                        bk = bk.deriv();
                    }
                    if bk.is_zero() {
                        break;
                    }
                    let term = a.mul(&bk).mul(&C::from_i64(bc));
                    let idx = i + j - k;
                    out[idx] = out[idx].add(&term);
                }
            }
        }
        OreOp::new(out)
    }

    /// Formal adjoint `sum_k (-D)^k c_k`.
    pub fn adjoint(&self) -> Self {
        let mut out = OreOp::zero();
        let mut dpow = OreOp::one();
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                dpow = OreOp::d().neg_op().compose(&dpow);
            }
            out = out.add_op(&dpow.compose(&OreOp::mult(c.clone())));
        }
        out
    }

    pub fn add_op(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        OreOp::new((0..n).map(|k| self.coeff(k).add(&o.coeff(k))).collect())
    }

    pub fn neg_op(&self) -> Self {
        OreOp::new(self.coeffs.iter().map(|c| c.neg()).collect())
    }

    pub fn sub_op(&self, o: &Self) -> Self {
        self.add_op(&o.neg_op())
    }
}

impl<F: Field> OreOp<RatFun<F>> {
    /// Right Euclidean division: `self = q ∘ r + rem` with
    /// `order(rem) < order(r)`.
    pub fn right_divrem(&self, r: &Self) -> (Self, Self) {
        assert!(!r.is_zero(), "division by the zero operator");
        let mut rem = self.clone();
        let mut quo = OreOp::zero();
        let lr = r.leading();
        while !rem.is_zero() && rem.order() >= r.order() {
            let shift = rem.order() - r.order();
            let c = &rem.leading() / &lr;
            let mut tc = vec![RatFun::zero(); shift + 1];
            tc[shift] = c;
            let t = OreOp::new(tc);
            rem = rem.sub_op(&t.compose(r));
            quo = quo.add_op(&t);
        }
        (quo, rem)
    }

    /// Divides through by the leading coefficient.
    pub fn make_monic(&self) -> Self {
        let l = self.leading();
        OreOp::new(self.coeffs.iter().map(|c| c / &l).collect())
    }
}

impl<C: DiffRing> Add for &OreOp<C> {
    type Output = OreOp<C>;
    fn add(self, o: &OreOp<C>) -> OreOp<C> {
        self.add_op(o)
    }
}

impl<C: DiffRing> Sub for &OreOp<C> {
    type Output = OreOp<C>;
    fn sub(self, o: &OreOp<C>) -> OreOp<C> {
        self.sub_op(o)
    }
}

impl<C: DiffRing> Mul for &OreOp<C> {
    type Output = OreOp<C>;
    fn mul(self, o: &OreOp<C>) -> OreOp<C> {
        self.compose(o)
    }
}

impl<C: DiffRing> Neg for &OreOp<C> {
    type Output = OreOp<C>;
    fn neg(self) -> OreOp<C> {
        self.neg_op()
    }
}

impl<C: fmt::Debug> fmt::Debug for OreOp<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coeffs.iter()).finish()
    }
}

fn fmt_terms<T: fmt::Display>(coeffs: &[T], is_zero: impl Fn(&T) -> bool, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let mut first = true;
    for (k, c) in coeffs.iter().enumerate().rev() {
        if is_zero(c) {
            continue;
        }
        if !first {
            write!(f, " + ")?;
        }
        first = false;
        match k {
            0 => write!(f, "({c})")?,
            1 => write!(f, "({c})*D")?,
            _ => write!(f, "({c})*D^{k}")?,
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_terms(&self.coeffs, |c| c.is_zero(), f)
    }
}

impl fmt::Display for RatDiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_terms(&self.coeffs, |c| c.is_zero(), f)
    }
}

/// Falling factorial `l (l-1) ... (l-j+1)` as a polynomial in `l`.
pub fn falling_factorial(j: usize) -> Poly<Q> {
    let mut p = Poly::one();
    for i in 0..j {
        p = &p * &Poly::new(vec![Q::from_integer(BigInt::from(-(i as i64))), Q::one()]);
    }
    p
}

/// Indicial data at a point: the polynomial whose roots are the local
/// exponents, and whether the point is a regular singularity (or ordinary).
#[derive(Clone, Debug, PartialEq)]
pub struct Indicial {
    pub poly: Poly<Q>,
    pub regular: bool,
}

impl DiffOp {
    pub fn from_ints(coeffs: &[&[i64]]) -> Self {
        OreOp::new(coeffs.iter().map(|c| Poly::from_ints(c)).collect())
    }

    pub fn to_rat(&self) -> RatDiffOp {
        OreOp::new(self.coeffs.iter().map(|c| RatFun::from_poly(c.clone())).collect())
    }

    /// Clears denominators of a rational operator and normalizes.
    pub fn from_rat(op: &RatDiffOp) -> Self {
        let mut l = Poly::one();
        for c in op.coeffs() {
            let g = l.gcd(c.den());
            l = (&l * c.den()).div_exact(&g).unwrap();
        }
        let coeffs = op
            .coeffs()
            .iter()
            .map(|c| (c.num() * &l).div_exact(c.den()).unwrap())
            .collect();
        OreOp::new(coeffs).normalize()
    }

    /// Removes the common polynomial factor and the rational content of the
    /// coefficients; the leading coefficient gets a positive leading term.
    pub fn normalize(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = Poly::zero();
        for c in &self.coeffs {
            g = if g.is_zero() { c.monic() } else { g.gcd(c) };
        }
        let mut coeffs: Vec<Poly<Q>> = self
            .coeffs
            .iter()
            .map(|c| c.div_exact(&g).unwrap_or_else(|| c.clone()))
            .collect();
        let mut den = BigInt::one();
        let mut num = BigInt::zero();
        for c in &coeffs {
            for a in c.coeffs() {
                den = den.lcm(a.denom());
                num = num.gcd(a.numer());
            }
        }
        let mut factor = Q::new(den, num);
        if coeffs.last().unwrap().lc().is_negative() {
            factor = -factor;
        }
        for c in coeffs.iter_mut() {
            *c = c.scale(&factor);
        }
        OreOp::new(coeffs)
    }

    /// Largest degree among the coefficients.
    pub fn degree(&self) -> i64 {
        self.coeffs.iter().map(|c| c.deg()).max().unwrap_or(-1)
    }

    /// Indicial polynomial at the finite point `c`.
    pub fn indicial_at(&self, c: &Q) -> Indicial {
        let shifted: Vec<Poly<Q>> = self.coeffs.iter().map(|p| p.taylor_shift(c)).collect();
        let mut m = i64::MAX;
        for (j, p) in shifted.iter().enumerate() {
            if let Some(v) = p.valuation() {
                m = m.min(v as i64 - j as i64);
            }
        }
        let mut poly = Poly::zero();
        let mut top = 0;
        for (j, p) in shifted.iter().enumerate() {
            if let Some(v) = p.valuation() {
                if v as i64 - j as i64 == m {
                    poly = &poly + &falling_factorial(j).scale(&p.coeff(v));
                    top = j;
                }
            }
        }
        Indicial {
            poly,
            regular: top == self.order(),
        }
    }

    /// Indicial polynomial at infinity, in the variable `mu` with local
    /// behaviour `y ~ x^(-mu)`.
    pub fn indicial_at_infinity(&self) -> Indicial {
        let mut mx = i64::MIN;
        for (j, p) in self.coeffs.iter().enumerate() {
            if !p.is_zero() {
                mx = mx.max(p.deg() - j as i64);
            }
        }
        let neg = Poly::new(vec![Q::zero(), -Q::one()]);
        let mut poly = Poly::zero();
        let mut top = 0;
        for (j, p) in self.coeffs.iter().enumerate() {
            if !p.is_zero() && p.deg() - j as i64 == mx {
                poly = &poly + &falling_factorial(j).compose(&neg).scale(&p.lc());
                top = j;
            }
        }
        Indicial {
            poly,
            regular: top == self.order(),
        }
    }

    /// Rational singular points (roots of the leading coefficient).
    pub fn rational_singularities(&self) -> Vec<Q> {
        super::roots::rational_roots(&self.leading())
    }
}

/// A finite rational point or infinity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Point {
    Finite(Q),
    Infinity,
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Finite(c) => write!(f, "{}", super::field::fmt_q(c)),
            Point::Infinity => write!(f, "infinity"),
        }
    }
}

/// Indicial polynomial at `c`; fails unless `c` is an ordinary or regular
/// singular point.
pub fn indicial_polynomial(op: &DiffOp, c: &Point) -> crate::error::Result<Poly<Q>> {
    let ind = match c {
        Point::Finite(c) => op.indicial_at(c),
        Point::Infinity => op.indicial_at_infinity(),
    };
    if ind.regular {
        Ok(ind.poly)
    } else {
        Err(crate::error::Error::IrregularSingularPoint(c.to_string()))
    }
}

impl RatDiffOp {
    pub fn to_poly_op(&self) -> DiffOp {
        DiffOp::from_rat(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::{q, qi};

    fn x() -> Poly<Q> {
        Poly::x()
    }

    #[test]
    fn commutation_rule() {
        // D ∘ x = x D + 1
        let d = DiffOp::d();
        let xm = DiffOp::mult(x());
        let lhs = d.compose(&xm);
        let rhs = DiffOp::new(vec![Poly::one(), x()]);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn apply_matches_composition() {
        let a = DiffOp::from_ints(&[&[1, 2], &[0, 0, 1], &[3]]);
        let b = DiffOp::from_ints(&[&[0, 1], &[1, 1]]);
        let f = Poly::from_ints(&[1, -1, 2, 5, 0, 1]);
        assert_eq!(a.compose(&b).apply(&f), a.apply(&b.apply(&f)));
    }

    #[test]
    fn adjoint_is_involution() {
        let a = DiffOp::from_ints(&[&[1, 2], &[0, 0, 1], &[3, 0, 0, 1]]);
        assert_eq!(a.adjoint().adjoint(), a);
    }

    #[test]
    fn right_division_recovers_factor() {
        let a = DiffOp::from_ints(&[&[1, 2], &[0, 0, 1], &[3, 1]]).to_rat();
        let b = DiffOp::from_ints(&[&[0, 1], &[1, 1]]).to_rat();
        let p = a.compose(&b);
        let (quo, rem) = p.right_divrem(&b);
        assert!(rem.is_zero());
        assert_eq!(quo, a);
    }

    #[test]
    fn indicial_at_origin() {
        // x^2 D^2 + x D - 1/4: exponents ±1/2
        let l = DiffOp::new(vec![Poly::constant(q(-1, 4)), x(), &x() * &x()]);
        let ind = l.indicial_at(&qi(0));
        assert!(ind.regular);
        assert_eq!(ind.poly, Poly::new(vec![q(-1, 4), qi(0), qi(1)]));
        let inf = l.indicial_at_infinity();
        assert!(inf.regular);
        assert_eq!(inf.poly, Poly::new(vec![q(-1, 4), qi(0), qi(1)]));
    }

    #[test]
    fn normalize_strips_common_factor() {
        let l = DiffOp::from_ints(&[&[0, -2], &[0, 0, -4]]);
        assert_eq!(l.normalize(), DiffOp::from_ints(&[&[1], &[0, 2]]));
    }
}

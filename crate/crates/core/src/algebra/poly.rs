//! Dense univariate polynomials.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::field::{denom_lcm, fmt_q, numer_gcd, Field, Q};

/// Dense polynomial, `coeffs[i]` multiplies `x^i`.
///
/// The coefficient vector never carries trailing zeros, so the zero
/// polynomial is the empty vector.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly<F> {
    coeffs: Vec<F>,
}

impl<F: Field> Poly<F> {
    pub fn new(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(F::one())
    }

    pub fn constant(c: F) -> Self {
        Poly::new(vec![c])
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        Poly::new(vec![F::zero(), F::one()])
    }

    /// `c * x^k`.
    pub fn monomial(c: F, k: usize) -> Self {
        let mut v = vec![F::zero(); k + 1];
        v[k] = c;
        Poly::new(v)
    }

    /// `x - a`.
    pub fn linear_root(a: F) -> Self {
        Poly::new(vec![-a, F::one()])
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<F> {
        self.coeffs
    }

    pub fn coeff(&self, i: usize) -> F {
        self.coeffs.get(i).cloned().unwrap_or_else(F::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to `-1`.
    pub fn deg(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn lc(&self) -> F {
        self.coeffs.last().cloned().unwrap_or_else(F::zero)
    }

    /// Lowest power of `x` with nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn scale(&self, c: &F) -> Self {
        Poly::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = F::one() / self.lc();
        self.scale(&inv)
    }

    /// Multiplies by `x^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut v = vec![F::zero(); k];
        v.extend(self.coeffs.iter().cloned());
        Poly { coeffs: v }
    }

    /// Divides by `x^k`, dropping the low coefficients.
    pub fn shift_down(&self, k: usize) -> Self {
        Poly::new(self.coeffs.iter().skip(k).cloned().collect())
    }

    pub fn eval(&self, x: &F) -> F {
        let mut acc = F::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        let mut v = Vec::with_capacity(self.coeffs.len().saturating_sub(1));
        let mut k = F::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                v.push(c.clone() * k.clone());
            }
            k = k + F::one();
        }
        Poly::new(v)
    }

    /// Antiderivative with zero constant term.
    pub fn integral(&self) -> Self {
        let mut v = vec![F::zero()];
        let mut k = F::one();
        for c in &self.coeffs {
            v.push(c.clone() / k.clone());
            k = k + F::one();
        }
        Poly::new(v)
    }

    /// `self(inner(x))`.
    pub fn compose(&self, inner: &Poly<F>) -> Self {
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * inner) + &Poly::constant(c.clone());
        }
        acc
    }

    /// `self(x + a)`.
    pub fn taylor_shift(&self, a: &F) -> Self {
        self.compose(&Poly::new(vec![a.clone(), F::one()]))
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut acc = Poly::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn divrem(&self, b: &Poly<F>) -> (Poly<F>, Poly<F>) {
        assert!(!b.is_zero(), "polynomial division by zero");
        let db = b.coeffs.len() - 1;
        if self.coeffs.len() < b.coeffs.len() {
            return (Poly::zero(), self.clone());
        }
        let lcb = b.lc();
        let mut r = self.coeffs.clone();
        let mut q = vec![F::zero(); r.len() - db];
        for k in (0..q.len()).rev() {
            let c = r[k + db].clone() / lcb.clone();
            if !c.is_zero() {
                for (j, bj) in b.coeffs.iter().enumerate() {
                    r[k + j] = r[k + j].clone() - c.clone() * bj.clone();
                }
            }
            q[k] = c;
        }
        r.truncate(db);
        (Poly::new(q), Poly::new(r))
    }

    pub fn rem(&self, b: &Poly<F>) -> Poly<F> {
        self.divrem(b).1
    }

    /// Exact quotient; `None` if `b` does not divide `self`.
    pub fn div_exact(&self, b: &Poly<F>) -> Option<Poly<F>> {
        let (q, r) = self.divrem(b);
        r.is_zero().then_some(q)
    }

    /// Monic gcd (zero if both are zero).
    pub fn gcd(&self, b: &Poly<F>) -> Poly<F> {
        let mut a = self.clone();
        let mut b = b.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Extended gcd: returns `(g, s, t)` with `s*a + t*b = g`, `g` monic.
    pub fn gcdex(&self, b: &Poly<F>) -> (Poly<F>, Poly<F>, Poly<F>) {
        let (mut r0, mut r1) = (self.clone(), b.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (qq, r) = r0.divrem(&r1);
            let s = &s0 - &(&qq * &s1);
            let t = &t0 - &(&qq * &t1);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = F::one() / r0.lc();
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    /// Solves `s*a + t*b = c` with `deg s < deg b`, provided `gcd(a, b) | c`.
    pub fn diophantine(a: &Poly<F>, b: &Poly<F>, c: &Poly<F>) -> Option<(Poly<F>, Poly<F>)> {
        let (g, s, _) = a.gcdex(b);
        let cg = c.div_exact(&g)?;
        let s = &s * &cg;
        let s = if b.deg() > 0 { s.rem(b) } else { Poly::zero() };
        let t = (c - &(&s * a)).div_exact(b)?;
        Some((s, t))
    }

    /// Modular inverse of `self` modulo `m`.
    pub fn inv_mod(&self, m: &Poly<F>) -> Option<Poly<F>> {
        let (g, s, _) = self.gcdex(m);
        if g.deg() != 0 {
            return None;
        }
        Some(s.rem(m))
    }

    /// Yun's squarefree decomposition: `self = lc * prod(parts[i]^(i+1))`.
    pub fn squarefree(&self) -> Vec<Poly<F>> {
        if self.deg() <= 0 {
            return Vec::new();
        }
        let a = self.monic();
        let da = a.derivative();
        let g = a.gcd(&da);
        let mut c = a.div_exact(&g).expect("gcd divides");
        let mut d = &da.div_exact(&g).expect("gcd divides") - &c.derivative();
        let mut out = Vec::new();
        while c.deg() > 0 {
            let y = c.gcd(&d);
            let c2 = c.div_exact(&y).expect("gcd divides");
            d = &d.div_exact(&y).expect("gcd divides") - &c2.derivative();
            out.push(y);
            c = c2;
        }
        while out.last().is_some_and(|p| p.deg() == 0) {
            out.pop();
        }
        out
    }

    /// Product of the distinct irreducible factors.
    pub fn squarefree_part(&self) -> Poly<F> {
        let parts = self.squarefree();
        parts.iter().fold(Poly::one(), |acc, p| &acc * p)
    }

    /// Resultant via the Euclidean remainder sequence.
    pub fn resultant(&self, b: &Poly<F>) -> F {
        let (mut a, mut b) = (self.clone(), b.clone());
        if a.is_zero() || b.is_zero() {
            return F::zero();
        }
        let mut res = F::one();
        loop {
            let (da, db) = (a.deg(), b.deg());
            if db == 0 {
                return res * pow_f(&b.lc(), da as usize);
            }
            let r = a.rem(&b);
            if r.is_zero() {
                return F::zero();
            }
            let dr = r.deg();
            if (da * db) % 2 == 1 {
                res = -res;
            }
            res = res * pow_f(&b.lc(), (da - dr) as usize);
            a = b;
            b = r;
        }
    }
}

fn pow_f<F: Field>(x: &F, k: usize) -> F {
    let mut acc = F::one();
    for _ in 0..k {
        acc = acc * x.clone();
    }
    acc
}

impl Poly<Q> {
    pub fn from_ints(c: &[i64]) -> Self {
        Poly::new(c.iter().map(|&v| Q::from_integer(v.into())).collect())
    }

    /// Splits into `(content, primitive)` with integer primitive part and
    /// positive leading coefficient.
    pub fn content_primitive(&self) -> (Q, Poly<Q>) {
        if self.is_zero() {
            return (Q::zero(), Poly::zero());
        }
        let l = denom_lcm(self.coeffs.iter());
        let scaled: Vec<Q> = self.coeffs.iter().map(|c| c * Q::from_integer(l.clone())).collect();
        let g = numer_gcd(scaled.iter());
        let mut content = Q::new(g.clone(), l);
        let mut prim: Vec<Q> = scaled.into_iter().map(|c| c / Q::from_integer(g.clone())).collect();
        if prim.last().unwrap().is_negative() {
            content = -content;
            prim = prim.into_iter().map(|c| -c).collect();
        }
        (content, Poly::new(prim))
    }

    pub fn primitive(&self) -> Poly<Q> {
        self.content_primitive().1
    }

    /// Integer coefficients of a polynomial known to be integral.
    pub fn int_coeffs(&self) -> Vec<BigInt> {
        self.coeffs.iter().map(|c| c.to_integer()).collect()
    }

    pub fn to_string_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            let cs = if mono.is_empty() {
                fmt_q(c)
            } else if c.is_one() {
                String::new()
            } else if *c == -Q::one() {
                "-".into()
            } else if c.denom().is_one() {
                format!("{}*", fmt_q(c))
            } else {
                format!("({})*", fmt_q(c))
            };
            parts.push(format!("{cs}{mono}"));
        }
        let mut s = parts.join(" + ");
        s = s.replace("+ -", "- ");
        s
    }
}

impl<F: Field> Add for &Poly<F> {
    type Output = Poly<F>;
    fn add(self, o: &Poly<F>) -> Poly<F> {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl<F: Field> Sub for &Poly<F> {
    type Output = Poly<F>;
    fn sub(self, o: &Poly<F>) -> Poly<F> {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl<F: Field> Mul for &Poly<F> {
    type Output = Poly<F>;
    fn mul(self, o: &Poly<F>) -> Poly<F> {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![F::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] = v[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(v)
    }
}

impl<F: Field> Neg for &Poly<F> {
    type Output = Poly<F>;
    fn neg(self) -> Poly<F> {
        Poly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<F: Field> $tr for Poly<F> {
            type Output = Poly<F>;
            fn $m(self, o: Poly<F>) -> Poly<F> {
                (&self).$m(&o)
            }
        }
        impl<F: Field> $tr<&Poly<F>> for Poly<F> {
            type Output = Poly<F>;
            fn $m(self, o: &Poly<F>) -> Poly<F> {
                (&self).$m(o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<F: Field> Neg for Poly<F> {
    type Output = Poly<F>;
    fn neg(self) -> Poly<F> {
        -&self
    }
}

impl fmt::Display for Poly<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_in("x"))
    }
}

impl<F: fmt::Debug> fmt::Debug for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly{:?}", self.coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::q;

    fn p(c: &[i64]) -> Poly<Q> {
        Poly::from_ints(c)
    }

    #[test]
    fn divrem_and_gcd() {
        let a = p(&[-1, 0, 1]);
        let b = p(&[-1, 1]);
        let (qq, r) = a.divrem(&b);
        assert_eq!(qq, p(&[1, 1]));
        assert!(r.is_zero());
        assert_eq!(a.gcd(&p(&[1, 1])), p(&[1, 1]));
    }

    #[test]
    fn squarefree_decomposition() {
        // x^2 (x-1)^3 (x+2)
        let f = &(&p(&[0, 0, 1]) * &p(&[-1, 1]).pow(3)) * &p(&[2, 1]);
        let parts = f.squarefree();
        assert_eq!(parts.len(), 3);
        assert_eq!(parts[0], p(&[2, 1]));
        assert_eq!(parts[1], p(&[0, 1]));
        assert_eq!(parts[2], p(&[-1, 1]));
    }

    #[test]
    fn resultant_detects_common_root() {
        assert!(p(&[-1, 0, 1]).resultant(&p(&[1, 1])).is_zero());
        // res(x^2 - 2, x - 1) = (1)^2 - 2 = -1
        assert_eq!(p(&[-2, 0, 1]).resultant(&p(&[-1, 1])), q(-1, 1));
    }

    #[test]
    fn content_and_sign() {
        let (c, pp) = Poly::new(vec![q(1, 2), q(-3, 4)]).content_primitive();
        assert_eq!(c, q(-1, 4));
        assert_eq!(pp, p(&[-2, 3]));
    }

    #[test]
    fn diophantine_solution() {
        let a = p(&[1, 1]);
        let b = p(&[-1, 1]);
        let c = p(&[5]);
        let (s, t) = Poly::diophantine(&a, &b, &c).unwrap();
        assert_eq!(&(&s * &a) + &(&t * &b), c);
        assert!(s.deg() < b.deg());
    }
}

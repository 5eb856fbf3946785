//! Expression trees for closed-form solutions.
//!
//! Every expression is a function of a single variable. An [`Integral`]
//! node `int_base^x body(t) dt` owns a body that is again a function of its
//! own (dummy) variable, so nested integrals need no name resolution.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::field::{fmt_q, q, q_pow, Q};
use crate::algebra::poly::Poly;
use crate::algebra::ratfun::RatFun;

type QPoly = Poly<Q>;
type QRatFun = RatFun<Q>;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Const(Q),
    /// Decimal literal for constants that were not recognized exactly.
    Approx(String),
    Pi,
    /// Polynomial in the variable.
    Poly(QPoly),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    /// Principal branch of `base^q`.
    Pow(Box<Expr>, Q),
    Log(Box<Expr>),
    Exp(Box<Expr>),
    /// `exp(int_{1/2}^x r(t) dt)`.
    ExpInt(QRatFun),
    Integral(Arc<Integral>),
}

/// `int_base^x body(t) dt`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Integral {
    pub base: Q,
    pub body: Expr,
}

/// Base point of `ExpInt` and of integrals that cannot start at 0.
pub fn base_point() -> Q {
    q(1, 2)
}

impl Expr {
    pub fn c(v: Q) -> Expr {
        Expr::Const(v)
    }

    pub fn int(n: i64) -> Expr {
        Expr::Const(Q::from_integer(n.into()))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn x() -> Expr {
        Expr::Poly(Poly::x())
    }

    pub fn poly(p: QPoly) -> Expr {
        Expr::Poly(p)
    }

    pub fn add(terms: Vec<Expr>) -> Expr {
        Expr::Add(terms)
    }

    pub fn mul(factors: Vec<Expr>) -> Expr {
        Expr::Mul(factors)
    }

    pub fn pow(base: Expr, e: Q) -> Expr {
        Expr::Pow(Box::new(base), e)
    }

    pub fn powi(base: Expr, e: i64) -> Expr {
        Expr::pow(base, Q::from_integer(e.into()))
    }

    pub fn sqrt(base: Expr) -> Expr {
        Expr::pow(base, q(1, 2))
    }

    pub fn log(arg: Expr) -> Expr {
        Expr::Log(Box::new(arg))
    }

    pub fn exp(arg: Expr) -> Expr {
        Expr::Exp(Box::new(arg))
    }

    pub fn integral(base: Q, body: Expr) -> Expr {
        Expr::Integral(Arc::new(Integral { base, body }))
    }

    pub fn int0(body: Expr) -> Expr {
        Expr::integral(Q::zero(), body)
    }

    /// `num(x) / den(x)` as a product.
    pub fn ratfun(r: &QRatFun) -> Expr {
        normalize(&Expr::mul(vec![
            Expr::Poly(r.num().clone()),
            Expr::powi(Expr::Poly(r.den().clone()), -1),
        ]))
    }

    pub fn neg(self) -> Expr {
        Expr::mul(vec![Expr::int(-1), self])
    }

    pub fn as_const(&self) -> Option<&Q> {
        match self {
            Expr::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const().is_some_and(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.as_const().is_some_and(|c| c.is_one())
    }

    /// True when the expression contains no variable.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Approx(_) | Expr::Pi => true,
            Expr::Poly(p) => p.is_constant(),
            Expr::Add(v) | Expr::Mul(v) => v.iter().all(Expr::is_constant),
            Expr::Pow(b, _) | Expr::Log(b) | Expr::Exp(b) => b.is_constant(),
            Expr::ExpInt(r) => r.is_zero(),
            Expr::Integral(_) => false,
        }
    }

    /// Maximal nesting depth of integral nodes.
    pub fn integral_depth(&self) -> usize {
        match self {
            Expr::Add(v) | Expr::Mul(v) => v.iter().map(Expr::integral_depth).max().unwrap_or(0),
            Expr::Pow(b, _) | Expr::Log(b) | Expr::Exp(b) => b.integral_depth(),
            Expr::Integral(i) => 1 + i.body.integral_depth(),
            _ => 0,
        }
    }

    /// Number of nodes, for size limits.
    pub fn size(&self) -> usize {
        match self {
            Expr::Add(v) | Expr::Mul(v) => 1 + v.iter().map(Expr::size).sum::<usize>(),
            Expr::Pow(b, _) | Expr::Log(b) | Expr::Exp(b) => 1 + b.size(),
            Expr::Integral(i) => 1 + i.body.size(),
            _ => 1,
        }
    }
}

/// Splits a normalized term into rational coefficient and remaining factor.
fn split_coeff(e: Expr) -> (Q, Expr) {
    match e {
        Expr::Const(c) => (c, Expr::one()),
        Expr::Mul(mut fs) => {
            if let Some(Expr::Const(_)) = fs.first() {
                let Expr::Const(c) = fs.remove(0) else { unreachable!() };
                let rest = if fs.len() == 1 { fs.pop().unwrap() } else { Expr::Mul(fs) };
                (c, rest)
            } else {
                (Q::one(), Expr::Mul(fs))
            }
        }
        other => (Q::one(), other),
    }
}

fn small_factor(n: &BigInt) -> Option<Vec<(BigInt, u32)>> {
    let limit = BigInt::from(1_000_000_000_000i64);
    if n > &limit {
        return None;
    }
    let mut m = n.to_u64()?;
    let mut out = vec![];
    let mut p = 2u64;
    while p * p <= m {
        let mut e = 0;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        if e > 0 {
            out.push((BigInt::from(p), e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        out.push((BigInt::from(m), 1));
    }
    Some(out)
}

/// `n^e` for a positive integer `n`, as exact rational times radicals with
/// exponents in (0, 1).
fn int_pow(n: &BigInt, e: &Q) -> Vec<Expr> {
    let t = e.denom().clone();
    let s = e.numer().clone();
    let (f, r) = s.div_mod_floor(&t);
    let whole = q_pow(&Q::from_integer(n.clone()), f.to_i64().unwrap_or(0));
    let mut out = vec![Expr::Const(whole)];
    if r.is_zero() {
        return out;
    }
    let Some(factors) = small_factor(n) else {
        out.push(Expr::pow(Expr::Const(Q::from_integer(n.clone())), Q::new(r, t)));
        return out;
    };
    let mut rational = BigInt::one();
    let mut groups: BTreeMap<Q, BigInt> = BTreeMap::new();
    for (p, k) in factors {
        let num = BigInt::from(k) * &r;
        let (whole_p, frac_p) = num.div_mod_floor(&t);
        rational *= num_traits::pow(p.clone(), whole_p.to_usize().unwrap());
        if !frac_p.is_zero() {
            *groups.entry(Q::new(frac_p, t.clone())).or_insert_with(BigInt::one) *= p;
        }
    }
    out.push(Expr::Const(Q::from_integer(rational)));
    for (g, m) in groups {
        out.push(Expr::pow(Expr::Const(Q::from_integer(m)), g));
    }
    out
}

/// `k^e` for a rational constant.
fn const_pow(k: &Q, e: &Q) -> Expr {
    if e.is_integer() {
        if k.is_zero() && e.is_negative() {
            return Expr::pow(Expr::Const(k.clone()), e.clone());
        }
        return Expr::Const(q_pow(k, e.to_integer().to_i64().unwrap()));
    }
    if k.is_zero() || k.is_one() {
        return Expr::Const(k.clone());
    }
    if k.is_negative() {
        return Expr::pow(Expr::Const(k.clone()), e.clone());
    }
    let mut fs = int_pow(k.numer(), e);
    fs.extend(int_pow(k.denom(), &-e.clone()));
    let mut rational = Q::one();
    let mut radicals = vec![];
    for f in fs {
        match f {
            Expr::Const(c) => rational *= c,
            other => radicals.push(other),
        }
    }
    if radicals.is_empty() {
        return Expr::Const(rational);
    }
    if rational.is_one() && radicals.len() == 1 {
        return radicals.pop().unwrap();
    }
    if !rational.is_one() {
        radicals.insert(0, Expr::Const(rational));
    }
    Expr::Mul(radicals)
}

/// Canonical form; idempotent.
pub fn normalize(e: &Expr) -> Expr {
    let mut cur = normalize_once(e);
    for _ in 0..32 {
        let next = normalize_once(&cur);
        if next == cur {
            return cur;
        }
        cur = next;
    }
    cur
}

fn normalize_once(e: &Expr) -> Expr {
    match e {
        Expr::Const(_) | Expr::Approx(_) | Expr::Pi => e.clone(),
        Expr::Poly(p) => {
            if p.is_constant() {
                Expr::Const(p.coeff(0))
            } else {
                e.clone()
            }
        }
        Expr::Add(ts) => norm_add(ts),
        Expr::Mul(fs) => norm_mul(fs),
        Expr::Pow(b, k) => norm_pow(normalize_once(b), k),
        Expr::Log(a) => {
            let a = normalize_once(a);
            if a.is_one() {
                Expr::zero()
            } else {
                Expr::log(a)
            }
        }
        Expr::Exp(a) => {
            let a = normalize_once(a);
            if a.is_zero() {
                Expr::one()
            } else {
                Expr::exp(a)
            }
        }
        Expr::ExpInt(r) => {
            if r.is_zero() {
                Expr::one()
            } else {
                e.clone()
            }
        }
        Expr::Integral(i) => {
            let body = normalize_once(&i.body);
            if body.is_zero() {
                Expr::zero()
            } else {
                Expr::integral(i.base.clone(), body)
            }
        }
    }
}

fn norm_add(ts: &[Expr]) -> Expr {
    let mut flat = vec![];
    for t in ts {
        match normalize_once(t) {
            Expr::Add(inner) => flat.extend(inner),
            other => flat.push(other),
        }
    }
    let mut poly = Poly::zero();
    let mut terms: BTreeMap<Expr, Q> = BTreeMap::new();
    for t in flat {
        match t {
            Expr::Const(c) => poly = &poly + &Poly::constant(c),
            Expr::Poly(p) => poly = &poly + &p,
            other => {
                let (c, rest) = split_coeff(other);
                match rest {
                    Expr::Poly(p) => poly = &poly + &p.scale(&c),
                    rest if rest.is_one() => poly = &poly + &Poly::constant(c),
                    rest => *terms.entry(rest).or_insert_with(Q::zero) += c,
                }
            }
        }
    }
    let mut out: Vec<Expr> = vec![];
    for (rest, c) in terms {
        if c.is_zero() {
            continue;
        }
        if c.is_one() {
            out.push(rest);
        } else {
            let mut fs = vec![Expr::Const(c)];
            match rest {
                Expr::Mul(inner) => fs.extend(inner),
                other => fs.push(other),
            }
            out.push(Expr::Mul(fs));
        }
    }
    if !poly.is_zero() {
        out.push(if poly.is_constant() {
            Expr::Const(poly.coeff(0))
        } else {
            Expr::Poly(poly)
        });
    }
    out.sort();
    match out.len() {
        0 => Expr::zero(),
        1 => out.pop().unwrap(),
        _ => Expr::Add(out),
    }
}

fn norm_mul(fs: &[Expr]) -> Expr {
    let mut flat = vec![];
    for f in fs {
        match normalize_once(f) {
            Expr::Mul(inner) => flat.extend(inner),
            other => flat.push(other),
        }
    }
    let mut c = Q::one();
    let mut bases: BTreeMap<Expr, Q> = BTreeMap::new();
    let mut exps: Vec<Expr> = vec![];
    let mut expint = RatFun::zero();
    for f in flat {
        match f {
            Expr::Const(k) => {
                if k.is_zero() {
                    return Expr::zero();
                }
                c *= k;
            }
            Expr::Pow(b, k) => *bases.entry(*b).or_insert_with(Q::zero) += k,
            Expr::Exp(a) => exps.push(*a),
            Expr::ExpInt(r) => expint = &expint + &r,
            Expr::Poly(p) => {
                let (k, prim) = sign_normalized(&p);
                c *= k;
                *bases.entry(Expr::Poly(prim)).or_insert_with(Q::zero) += Q::one();
            }
            other => *bases.entry(other).or_insert_with(Q::zero) += Q::one(),
        }
    }
    let mut out: Vec<Expr> = vec![];
    // polynomials with positive integer exponents multiply out
    let mut prod = Poly::one();
    let mut merged = 0;
    bases.retain(|b, k| {
        if let Expr::Poly(p) = b {
            if k.is_integer() && k.is_positive() {
                prod = &prod * &p.pow(k.to_integer().to_usize().unwrap_or(1));
                merged += 1;
                return false;
            }
        }
        true
    });
    if merged > 0 {
        let (k, prim) = sign_normalized(&prod);
        c *= k;
        if !prim.is_constant() {
            out.push(Expr::Poly(prim));
        }
    }
    for (b, k) in bases {
        if k.is_zero() {
            continue;
        }
        if k.is_one() {
            out.push(b);
        } else {
            out.push(Expr::Pow(Box::new(b), k));
        }
    }
    if !exps.is_empty() {
        out.push(Expr::exp(if exps.len() == 1 {
            exps.pop().unwrap()
        } else {
            Expr::Add(exps)
        }));
    }
    if !expint.is_zero() {
        out.push(Expr::ExpInt(expint));
    }
    out.sort();
    if let [Expr::Poly(p)] = out.as_slice() {
        return Expr::Poly(p.scale(&c));
    }
    if !c.is_one() {
        out.insert(0, Expr::Const(c));
    }
    match out.len() {
        0 => Expr::one(),
        1 => out.pop().unwrap(),
        _ => Expr::Mul(out),
    }
}

/// `p = c * prim` with `prim` integer-primitive and positive at 1/2 (or with
/// positive leading coefficient when it vanishes there).
fn sign_normalized(p: &QPoly) -> (Q, QPoly) {
    let (mut c, mut prim) = p.content_primitive();
    if prim.eval(&q(1, 2)).is_negative() {
        prim = -&prim;
        c = -c;
    }
    (c, prim)
}

fn norm_pow(b: Expr, k: &Q) -> Expr {
    if k.is_zero() {
        return Expr::one();
    }
    if k.is_one() {
        return b;
    }
    let integral = k.is_integer();
    match b {
        Expr::Const(c) => const_pow(&c, k),
        Expr::Pow(inner, j) if integral => Expr::Pow(inner, j * k),
        Expr::Mul(fs) => {
            if integral {
                return Expr::Mul(fs.into_iter().map(|f| Expr::pow(f, k.clone())).collect());
            }
            let mut consts = vec![];
            let mut rest = vec![];
            for f in fs {
                match f {
                    Expr::Const(c) if c.is_positive() => consts.push(const_pow(&c, k)),
                    other => rest.push(other),
                }
            }
            if consts.is_empty() {
                return Expr::pow(Expr::Mul(rest), k.clone());
            }
            consts.push(Expr::pow(Expr::Mul(rest), k.clone()));
            Expr::Mul(consts)
        }
        Expr::Exp(a) => Expr::exp(Expr::mul(vec![Expr::Const(k.clone()), *a])),
        Expr::ExpInt(r) => Expr::ExpInt(r.scale(k)),
        Expr::Poly(p) => {
            let (mut c, mut prim) = if integral {
                sign_normalized(&p)
            } else {
                p.content_primitive()
            };
            if !integral && c.is_negative() {
                prim = -&prim;
                c = -c;
            }
            if c.is_one() {
                Expr::pow(Expr::Poly(prim), k.clone())
            } else {
                Expr::Mul(vec![const_pow(&c, k), Expr::pow(Expr::Poly(prim), k.clone())])
            }
        }
        other => Expr::pow(other, k.clone()),
    }
}

/// Exact derivative, normalized.
pub fn differentiate(e: &Expr) -> Expr {
    normalize(&deriv(e))
}

fn deriv(e: &Expr) -> Expr {
    match e {
        Expr::Const(_) | Expr::Approx(_) | Expr::Pi => Expr::zero(),
        Expr::Poly(p) => Expr::Poly(p.derivative()),
        Expr::Add(ts) => Expr::Add(ts.iter().map(deriv).collect()),
        Expr::Mul(fs) => {
            let mut terms = vec![];
            for i in 0..fs.len() {
                let d = deriv(&fs[i]);
                if d.is_zero() {
                    continue;
                }
                let mut prod = fs.clone();
                prod[i] = d;
                terms.push(Expr::Mul(prod));
            }
            Expr::Add(terms)
        }
        Expr::Pow(b, k) => Expr::Mul(vec![Expr::Const(k.clone()), Expr::Pow(b.clone(), k - Q::one()), deriv(b)]),
        Expr::Log(a) => Expr::Mul(vec![deriv(a), Expr::powi((**a).clone(), -1)]),
        Expr::Exp(a) => Expr::Mul(vec![deriv(a), e.clone()]),
        Expr::ExpInt(r) => Expr::Mul(vec![Expr::ratfun(r), e.clone()]),
        Expr::Integral(i) => i.body.clone(),
    }
}

/// Variable name used when printing at integral depth `depth`.
pub fn var_name(depth: usize) -> String {
    if depth == 0 {
        "x".to_string()
    } else {
        format!("t{depth}")
    }
}

fn fmt_expr(e: &Expr, depth: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let v = var_name(depth);
    match e {
        Expr::Const(c) => write!(f, "{}", fmt_q(c)),
        Expr::Approx(s) => write!(f, "{s}"),
        Expr::Pi => write!(f, "pi"),
        Expr::Poly(p) => write!(f, "({})", p.to_string_in(&v)),
        Expr::Add(ts) => {
            write!(f, "(")?;
            for (i, t) in ts.iter().enumerate() {
                if i > 0 {
                    write!(f, " + ")?;
                }
                fmt_expr(t, depth, f)?;
            }
            write!(f, ")")
        }
        Expr::Mul(fs) => {
            for (i, t) in fs.iter().enumerate() {
                if i > 0 {
                    write!(f, "*")?;
                }
                fmt_expr(t, depth, f)?;
            }
            Ok(())
        }
        Expr::Pow(b, k) => {
            if matches!(**b, Expr::Mul(_)) {
                write!(f, "(")?;
                fmt_expr(b, depth, f)?;
                write!(f, ")")?;
            } else {
                fmt_expr(b, depth, f)?;
            }
            write!(f, "^({})", fmt_q(k))
        }
        Expr::Log(a) => {
            write!(f, "log(")?;
            fmt_expr(a, depth, f)?;
            write!(f, ")")
        }
        Expr::Exp(a) => {
            write!(f, "exp(")?;
            fmt_expr(a, depth, f)?;
            write!(f, ")")
        }
        Expr::ExpInt(r) => {
            let s = format!("({})/({})", r.num().to_string_in(&v), r.den().to_string_in(&v));
            write!(f, "exp(int_1/2^{v} {s} d{v})")
        }
        Expr::Integral(i) => {
            let t = var_name(depth + 1);
            write!(f, "int_{}^{v} [", fmt_q(&i.base))?;
            fmt_expr(&i.body, depth + 1, f)?;
            write!(f, "] d{t}")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_expr(self, 0, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::qi;

    fn one_minus_x() -> Expr {
        Expr::Poly(Poly::from_ints(&[1, -1]))
    }

    #[test]
    fn merges_powers() {
        let e = Expr::mul(vec![Expr::pow(Expr::x(), q(1, 2)), Expr::pow(Expr::x(), q(1, 6))]);
        assert_eq!(normalize(&e), Expr::pow(Expr::x(), q(2, 3)));
    }

    #[test]
    fn drops_zero_terms() {
        let e = Expr::add(vec![Expr::log(Expr::x()), Expr::zero()]);
        assert_eq!(normalize(&e), Expr::log(Expr::x()));
    }

    #[test]
    fn constant_radicals() {
        assert_eq!(normalize(&Expr::pow(Expr::int(27), q(1, 3))), Expr::int(3));
        assert_eq!(
            normalize(&Expr::pow(Expr::int(12), q(1, 2))),
            Expr::Mul(vec![Expr::int(2), Expr::pow(Expr::int(3), q(1, 2))])
        );
        let e = Expr::mul(vec![Expr::sqrt(Expr::int(3)), Expr::sqrt(Expr::int(3))]);
        assert_eq!(normalize(&e), Expr::int(3));
    }

    #[test]
    fn derivative_of_sqrt() {
        let d = differentiate(&Expr::sqrt(one_minus_x()));
        let expect = normalize(&Expr::mul(vec![Expr::c(q(-1, 2)), Expr::pow(one_minus_x(), q(-1, 2))]));
        assert_eq!(d, expect);
    }

    #[test]
    fn derivative_of_integral_is_body() {
        let body = Expr::pow(Expr::x(), q(-1, 3));
        assert_eq!(differentiate(&Expr::int0(body.clone())), body);
    }

    #[test]
    fn polynomial_content_extracted() {
        // (2 - 2x)^(1/2) = 2^(1/2) (1 - x)^(1/2)
        let e = Expr::sqrt(Expr::Poly(Poly::from_ints(&[2, -2])));
        let n = normalize(&e);
        assert_eq!(n, Expr::Mul(vec![Expr::sqrt(Expr::int(2)), Expr::sqrt(one_minus_x())]));
        // integer powers are sign-normalized: (4 - 27x)^-1 = -(27x - 4)^-1
        let e = Expr::powi(Expr::Poly(Poly::from_ints(&[4, -27])), -1);
        assert_eq!(
            normalize(&e),
            Expr::Mul(vec![Expr::int(-1), Expr::powi(Expr::Poly(Poly::from_ints(&[-4, 27])), -1)])
        );
        let _ = qi(0);
    }
}

//! Solutions with rational logarithmic derivative.

use num_traits::{One, Signed, Zero};

use crate::algebra::field::{fmt_q, q, Q};
use crate::algebra::ore::DiffOp;
use crate::algebra::poly::Poly;
use crate::algebra::polysol::polynomial_kernel;
use crate::algebra::ratfun::RatFun;
use crate::algebra::roots::{rational_roots, split_rational};
use crate::closedform::expr::{normalize, Expr};
use crate::closedform::integrate::{exp_integral_or_node, integrate_rational};
use crate::closedform::sexpr::to_sexpr;
use crate::error::{Error, Result};

type QPoly = Poly<Q>;
type QRatFun = RatFun<Q>;

/// Largest number of exponent combinations tried.
const MAX_COMBINATIONS: usize = 1 << 12;

/// `constant * prod p_i^e_i * exp(int exppart)`, with monic, pairwise
/// coprime `p_i` and nonzero `e_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperexpTerm {
    pub constant: Q,
    pub factors: Vec<(QPoly, Q)>,
    pub exppart: QRatFun,
}

impl HyperexpTerm {
    /// The logarithmic derivative.
    pub fn certificate(&self) -> QRatFun {
        let mut acc = self.exppart.clone();
        for (p, e) in &self.factors {
            acc = &acc + &RatFun::new(p.derivative().scale(e), p.clone());
        }
        acc
    }

    /// Term with the given logarithmic derivative, up to a constant.
    pub fn from_certificate(r: &QRatFun) -> HyperexpTerm {
        let mut factors = vec![];
        let exppart = match integrate_rational(r) {
            Ok(ri) => {
                for (c, p) in ri.log_terms {
                    factors.push((p.monic(), c));
                }
                ri.rational_part.derivative()
            }
            Err(_) => r.clone(),
        };
        sort_factors(&mut factors);
        HyperexpTerm {
            constant: Q::one(),
            factors,
            exppart,
        }
    }

    /// The term as an expression, without its constant. Fractional powers
    /// take the sign that is positive at 1/2.
    pub fn to_expr(&self) -> Expr {
        let mut fs = vec![];
        for (p, e) in &self.factors {
            let base = if !e.is_integer() && p.eval(&q(1, 2)).is_negative() {
                -p
            } else {
                p.clone()
            };
            fs.push(Expr::pow(Expr::Poly(base), e.clone()));
        }
        if !self.exppart.is_zero() {
            fs.push(exp_integral_or_node(&self.exppart));
        }
        strip_constant(normalize(&Expr::mul(fs)))
    }

    /// Sum of `|num| + den` over the exponents.
    pub fn height(&self) -> u64 {
        let h = |e: &Q| -> u64 {
            let n: u64 = e.numer().abs().try_into().unwrap_or(u64::MAX / 4);
            let d: u64 = e.denom().try_into().unwrap_or(u64::MAX / 4);
            n.saturating_add(d)
        };
        self.factors.iter().map(|(_, e)| h(e)).fold(0u64, u64::saturating_add)
    }

    /// The reciprocal term.
    pub fn inverse(&self) -> HyperexpTerm {
        HyperexpTerm {
            constant: Q::one() / &self.constant,
            factors: self.factors.iter().map(|(p, e)| (p.clone(), -e.clone())).collect(),
            exppart: -&self.exppart,
        }
    }
}

/// Drops a leading rational factor.
pub fn strip_constant(e: Expr) -> Expr {
    match e {
        Expr::Const(c) if !c.is_zero() => Expr::one(),
        Expr::Mul(mut fs) if matches!(fs.first(), Some(Expr::Const(_))) => {
            fs.remove(0);
            if fs.len() == 1 {
                fs.pop().unwrap()
            } else {
                Expr::Mul(fs)
            }
        }
        other => other,
    }
}

fn sort_factors(fs: &mut [(QPoly, Q)]) {
    fs.sort_by(|a, b| (a.0.deg(), a.0.coeffs()).cmp(&(b.0.deg(), b.0.coeffs())));
}

/// `h^-1 L(h p)` where `h'/h = r`.
pub fn lifted_apply(op: &DiffOp, r: &QRatFun, p: &QRatFun) -> QRatFun {
    let mut t = p.clone();
    let mut acc = &RatFun::from_poly(op.coeff(0)) * &t;
    for j in 1..=op.order() {
        t = &t.derivative() + &(r * &t);
        acc = &acc + &(&RatFun::from_poly(op.coeff(j)) * &t);
    }
    acc
}

/// Whether `exp(int r)` solves `op`, decided exactly.
pub fn certificate_holds(op: &DiffOp, r: &QRatFun) -> bool {
    lifted_apply(op, r, &RatFun::one()).is_zero()
}

/// Smallest root in each class modulo the integers.
fn class_minima(mut roots: Vec<Q>) -> Vec<Q> {
    roots.sort();
    let mut out: Vec<Q> = vec![];
    for r in roots {
        if !out.iter().any(|m| (&r - m).is_integer()) {
            out.push(r);
        }
    }
    out
}

fn term_from(exps: &[(Q, Q)], p: &QPoly) -> HyperexpTerm {
    let mut factors: Vec<(QPoly, Q)> = exps.iter().map(|(c, e)| (Poly::linear_root(c.clone()), e.clone())).collect();
    let (roots, rest) = split_rational(p);
    for (c, m) in roots {
        let lin = Poly::linear_root(c);
        let m = Q::from_integer((m as i64).into());
        match factors.iter_mut().find(|(f, _)| f == &lin) {
            Some(entry) => entry.1 += m,
            None => factors.push((lin, m)),
        }
    }
    for (i, part) in rest.squarefree().iter().enumerate() {
        if part.deg() > 0 {
            factors.push((part.monic(), Q::from_integer(((i + 1) as i64).into())));
        }
    }
    factors.retain(|(_, e)| !e.is_zero());
    sort_factors(&mut factors);
    HyperexpTerm {
        constant: p.lc(),
        factors,
        exppart: RatFun::zero(),
    }
}

/// Solutions `prod (x - c)^e_c * P(x)` over the rational singular points,
/// a spanning set up to constants, ordered by height and then by printed
/// form. Singular points that are not rational are assumed to carry
/// exponent 0.
pub fn hyperexp_solutions(op: &DiffOp) -> Result<Vec<HyperexpTerm>> {
    let op = op.normalize();
    if op.order() == 0 {
        return Ok(vec![]);
    }
    let sing = op.rational_singularities();
    let mut choices: Vec<Vec<Q>> = vec![];
    for c in &sing {
        let ind = op.indicial_at(c);
        if !ind.regular {
            return Err(Error::UnsupportedSingularity(format!(
                "irregular singular point at {}",
                fmt_q(c)
            )));
        }
        let roots = class_minima(rational_roots(&ind.poly));
        if roots.is_empty() {
            return Ok(vec![]);
        }
        choices.push(roots);
    }
    let total: usize = choices.iter().map(Vec::len).product();
    if total > MAX_COMBINATIONS {
        return Err(Error::UnsupportedSingularity(format!("{total} exponent combinations")));
    }
    let inf = rational_roots(&op.indicial_at_infinity().poly);
    let mut found: Vec<(QRatFun, HyperexpTerm)> = vec![];
    for idx in 0..total {
        let mut k = idx;
        let mut exps = vec![];
        for (c, ch) in sing.iter().zip(&choices) {
            exps.push((c.clone(), ch[k % ch.len()].clone()));
            k /= ch.len();
        }
        let sigma: Q = exps.iter().map(|(_, e)| e.clone()).sum();
        // y ~ x^(-mu) at infinity fixes the degree of the cofactor
        let dmax = inf
            .iter()
            .map(|mu| -mu - &sigma)
            .filter(|d| d.is_integer() && !d.is_negative())
            .max();
        let Some(d) = dmax else { continue };
        let d: usize = d.to_integer().try_into().unwrap_or(0);
        let mut r = RatFun::zero();
        for (c, e) in &exps {
            r = &r + &RatFun::new(Poly::constant(e.clone()), Poly::linear_root(c.clone()));
        }
        let images: Vec<QRatFun> = (0..=d)
            .map(|k| lifted_apply(&op, &r, &RatFun::from_poly(Poly::monomial(Q::one(), k))))
            .collect();
        for p in polynomial_kernel(&images) {
            let cert = &r + &RatFun::new(p.derivative(), p.clone());
            if found.iter().any(|(c, _)| c == &cert) {
                continue;
            }
            if !certificate_holds(&op, &cert) {
                continue;
            }
            found.push((cert, term_from(&exps, &p)));
        }
    }
    let mut terms: Vec<HyperexpTerm> = found.into_iter().map(|(_, t)| t).collect();
    terms.sort_by_cached_key(|t| (t.height(), to_sexpr(&t.to_expr())));
    Ok(terms)
}

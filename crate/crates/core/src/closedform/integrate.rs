//! Exact integration of rational functions with rational residues.

use num_traits::{One, Zero};

use super::expr::{normalize, Expr};
use crate::algebra::field::{q_to_f64, Q};
use crate::algebra::linalg::Matrix;
use crate::algebra::poly::Poly;
use crate::algebra::ratfun::RatFun;
use crate::algebra::roots::rational_roots;
use crate::error::{Error, Result};

type QPoly = Poly<Q>;
type QRatFun = RatFun<Q>;

/// `int f = rational_part + sum c_i log(p_i)`, with each `p_i` a primitive
/// integer polynomial with positive leading coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalIntegral {
    pub rational_part: QRatFun,
    pub log_terms: Vec<(Q, QPoly)>,
}

impl RationalIntegral {
    /// Derivative of the antiderivative, for checking.
    pub fn derivative(&self) -> QRatFun {
        let mut acc = self.rational_part.derivative();
        for (c, p) in &self.log_terms {
            acc = &acc + &RatFun::new(p.derivative().scale(c), p.clone());
        }
        acc
    }

    pub fn to_expr(&self) -> Expr {
        let mut terms = vec![Expr::ratfun(&self.rational_part)];
        for (c, p) in &self.log_terms {
            terms.push(Expr::mul(vec![Expr::c(c.clone()), Expr::log(Expr::Poly(sign_at_base(p)))]));
        }
        normalize(&Expr::add(terms))
    }

    /// `exp(kappa * int f)` as a product of powers, up to a constant factor.
    pub fn exp_expr(&self, kappa: &Q) -> Expr {
        let mut fs = vec![];
        if !self.rational_part.is_zero() {
            fs.push(Expr::exp(Expr::ratfun(&self.rational_part.scale(kappa))));
        }
        for (c, p) in &self.log_terms {
            fs.push(Expr::pow(Expr::Poly(sign_at_base(p)), c * kappa));
        }
        normalize(&Expr::mul(fs))
    }
}

/// Flips the sign of `p` if it is negative at the base point 1/2, so that
/// logarithms and fractional powers are real near the middle of (0, 1).
fn sign_at_base(p: &QPoly) -> QPoly {
    let v = p.eval(&super::expr::base_point());
    if q_to_f64(&v) < 0.0 {
        -p
    } else {
        p.clone()
    }
}

/// Antiderivative of `f` by Hermite reduction and a rational-residue log part.
pub fn integrate_rational(f: &QRatFun) -> Result<RationalIntegral> {
    if f.is_zero() {
        return Ok(RationalIntegral {
            rational_part: RatFun::zero(),
            log_terms: vec![],
        });
    }
    let (p, a) = f.split_polynomial();
    let (g, a, d) = hermite_reduce(&a, f.den());
    let rational_part = &RatFun::from_poly(p.integral()) + &g;
    let mut log_terms = vec![];
    if !a.is_zero() {
        for (c, v) in log_part(&a, &d)? {
            log_terms.push((c, v.primitive()));
        }
    }
    Ok(RationalIntegral {
        rational_part,
        log_terms,
    })
}

/// Returns `(g, a, d)` with `int num/den = g + int a/d`, `d` squarefree.
fn hermite_reduce(num: &QPoly, den: &QPoly) -> (QRatFun, QPoly, QPoly) {
    let parts = den.squarefree();
    let mut g = RatFun::zero();
    let mut a = num.clone();
    let mut d = den.monic();
    a = a.scale(&(Q::one() / den.lc()));
    for (idx, v) in parts.iter().enumerate() {
        let i = idx + 1;
        if i < 2 || v.deg() <= 0 {
            continue;
        }
        let u = d.div_exact(&v.pow(i)).expect("squarefree factor divides");
        let uv = &u * &v.derivative();
        for j in (1..i).rev() {
            let jq = Q::from_integer((j as i64).into());
            let rhs = a.scale(&(-Q::one() / &jq));
            let (b, c) = Poly::diophantine(&uv, v, &rhs).expect("coprime in Hermite reduction");
            g = &g + &RatFun::new(b.clone(), v.pow(j));
            a = &c.scale(&(-jq)) - &(&u * &b.derivative());
        }
        d = &u * v;
    }
    (g, a, d)
}

/// Log part of `int a/d` for squarefree `d`, `deg a < deg d`.
fn log_part(a: &QPoly, d: &QPoly) -> Result<Vec<(Q, QPoly)>> {
    let n = d.deg() as usize;
    let dp = d.derivative();
    // residues are the eigenvalues of multiplication by a/d' in Q[x]/(d)
    let h = (a * &dp.inv_mod(d).expect("squarefree")).rem(d);
    let mut powers: Vec<Vec<Q>> = vec![];
    let mut cur = QPoly::one();
    let minpoly = loop {
        let vec: Vec<Q> = (0..n).map(|k| cur.coeff(k)).collect();
        powers.push(vec);
        let m = Matrix::from_columns(n, &powers);
        let ns = m.nullspace();
        if let Some(rel) = ns.into_iter().next() {
            break QPoly::new(rel);
        }
        cur = (&cur * &h).rem(d);
    };
    let mut out = vec![];
    let mut covered = 0;
    for c in rational_roots(&minpoly) {
        let v = d.gcd(&(a - &dp.scale(&c)));
        if v.deg() > 0 {
            covered += v.deg();
            if !c.is_zero() {
                out.push((c, v));
            }
        }
    }
    if covered != d.deg() {
        return Err(Error::NonRationalResidues);
    }
    Ok(out)
}

/// `exp(int r)` in closed form when possible, otherwise as an `ExpInt` node.
pub fn exp_integral_or_node(r: &QRatFun) -> Expr {
    if r.is_zero() {
        return Expr::one();
    }
    match integrate_rational(r) {
        Ok(ri) => ri.exp_expr(&Q::one()),
        Err(_) => Expr::ExpInt(r.clone()),
    }
}

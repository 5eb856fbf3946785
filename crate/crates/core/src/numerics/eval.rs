//! Numerical evaluation of [`Expr`] trees, including nested integral nodes.
//!
//! Each integral node gets a lazily grown table of unit panels in the logit
//! variable, anchored at its base point. A query sums whole panels from the
//! table and integrates the remaining partial panel directly. Tables of
//! nested integrals run at a higher precision than their parent.

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::Zero;

use super::quad::{gl_panel, GaussLegendre, Point};
use super::real::{bits_for_digits, Mp, Scalar};
use crate::algebra::field::{q_to_f64, Q};
use crate::closedform::expr::{base_point, Expr, Integral};
use crate::error::{Error, Result};
use crate::QRatFun;

/// Extra bits per level of integral nesting.
const NEST_BITS: u32 = 34;
const MAX_PANELS: usize = 6000;

struct Table<S> {
    base_zero: bool,
    anchor: Mp,
    bits: u32,
    rule: Arc<GaussLegendre>,
    /// `right[k] = int_anchor^(anchor + k)` in `w`.
    right: Vec<S>,
    /// `left[k] = int_(anchor - k)^anchor`.
    left: Vec<S>,
    /// `int_-inf^anchor` for base 0.
    tail: Option<S>,
}

/// Evaluator with integral tables cached per node.
pub struct Evaluator<S: Scalar> {
    bits: u32,
    depth: u32,
    tables: HashMap<usize, (Arc<Integral>, Table<S>)>,
    expints: HashMap<QRatFun, Arc<Integral>>,
}

fn logit_q(b: &Q, bits: u32) -> Mp {
    let x = Mp::from_q(b, bits);
    let one = Mp::from_i64(1, bits);
    (&x / &(&one - &x)).ln()
}

impl<S: Scalar> Evaluator<S> {
    pub fn new(bits: u32) -> Self {
        Evaluator {
            bits,
            depth: 0,
            tables: HashMap::new(),
            expints: HashMap::new(),
        }
    }

    pub fn with_digits(digits: u32) -> Self {
        Self::new(bits_for_digits(digits))
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Value at a rational point of (0, 1).
    pub fn eval_q(&mut self, e: &Expr, x: &Q) -> Result<S> {
        let p = Point::from_q(x, self.bits);
        self.eval(e, &p)
    }

    pub fn eval(&mut self, e: &Expr, p: &Point) -> Result<S> {
        let bits = p.x.prec();
        Ok(match e {
            Expr::Const(c) => S::from_q(c, bits),
            Expr::Approx(s) => S::from_mp(Mp::parse(s, bits).ok_or_else(|| Error::Parse(format!("bad literal {s}")))?),
            Expr::Pi => S::from_mp(Mp::pi(bits)),
            Expr::Poly(poly) => {
                let mut acc = Mp::zero_with(bits);
                for c in poly.coeffs().iter().rev() {
                    acc = &(&acc * &p.x) + &Mp::from_q(c, bits);
                }
                S::from_mp(acc)
            }
            Expr::Add(ts) => {
                let mut acc = S::from_mp(Mp::zero_with(bits));
                for t in ts {
                    acc = acc + self.eval(t, p)?;
                }
                acc
            }
            Expr::Mul(fs) => {
                let mut acc = S::from_mp(Mp::from_i64(1, bits));
                for f in fs {
                    acc = acc * self.eval(f, p)?;
                }
                acc
            }
            Expr::Pow(b, k) => {
                let v = self.eval(b, p)?;
                if v.is_zero() && k < &Q::zero() {
                    return Err(Error::PoleHit(format!("{b} vanishes at x = {:?}", p.x)));
                }
                v.powq(k)?
            }
            Expr::Log(a) => self.eval(a, p)?.ln()?,
            Expr::Exp(a) => self.eval(a, p)?.exp(),
            Expr::ExpInt(r) => {
                let node = self
                    .expints
                    .entry(r.clone())
                    .or_insert_with(|| {
                        Arc::new(Integral {
                            base: base_point(),
                            body: Expr::ratfun(r),
                        })
                    })
                    .clone();
                self.integral(&node, p)?.exp()
            }
            Expr::Integral(i) => self.integral(i, p)?,
        })
    }

    fn new_table(&self, node: &Integral) -> Result<Table<S>> {
        let bits = self.bits + NEST_BITS * (self.depth + 1);
        let base_zero = node.base.is_zero();
        let anchor = if base_zero {
            Mp::zero_with(bits)
        } else {
            let b = q_to_f64(&node.base);
            if !(b > 0.0 && b < 1.0) {
                return Err(Error::Domain(format!("integral base {} outside (0, 1)", node.base)));
            }
            logit_q(&node.base, bits)
        };
        let zero = S::from_mp(Mp::zero_with(bits));
        Ok(Table {
            base_zero,
            anchor,
            bits,
            rule: GaussLegendre::cached(GaussLegendre::order_for(bits), bits),
            right: vec![zero.clone()],
            left: vec![zero],
            tail: None,
        })
    }

    /// `int_a^b body(x) dx` with `a, b` given in the logit variable.
    fn panel(&mut self, t: &Table<S>, body: &Expr, a: &Mp, b: &Mp) -> Result<S> {
        self.depth += 1;
        let bits = t.bits;
        let r = gl_panel(&t.rule, a, b, |w| {
            let p = Point::from_w(w, bits);
            Ok(self.eval(body, &p)? * S::from_mp(p.jacobian()))
        });
        self.depth -= 1;
        r
    }

    fn offset(&self, t: &Table<S>, k: i64) -> Mp {
        &t.anchor + &Mp::from_i64(k, t.bits)
    }

    fn extend_right(&mut self, t: &mut Table<S>, body: &Expr, k: usize) -> Result<()> {
        while t.right.len() <= k {
            if t.right.len() > MAX_PANELS {
                return Err(Error::DivergentIntegral("integral table exceeded its panel limit".into()));
            }
            let j = t.right.len() as i64 - 1;
            let (a, b) = (self.offset(t, j), self.offset(t, j + 1));
            let v = self.panel(t, body, &a, &b)?;
            let last = t.right.last().unwrap().clone();
            t.right.push(last + v);
        }
        Ok(())
    }

    fn extend_left(&mut self, t: &mut Table<S>, body: &Expr, k: usize) -> Result<()> {
        while t.left.len() <= k {
            if t.left.len() > MAX_PANELS {
                return Err(Error::DivergentIntegral(
                    "integrand does not decay towards 0; the integral from 0 diverges".into(),
                ));
            }
            let j = t.left.len() as i64 - 1;
            let (a, b) = (self.offset(t, -j - 1), self.offset(t, -j));
            let v = self.panel(t, body, &a, &b)?;
            let last = t.left.last().unwrap().clone();
            t.left.push(last + v);
        }
        Ok(())
    }

    /// Makes `tail - left[k]` accurate to the table precision.
    fn settle_tail(&mut self, t: &mut Table<S>, body: &Expr, k: usize) -> Result<()> {
        let need = k + 2;
        self.extend_left(t, body, need.max(2))?;
        loop {
            let n = t.left.len();
            let total = t.left[n - 1].clone();
            let remainder = (total - t.left[k].clone()).log2_abs();
            let scale = if remainder.is_finite() {
                remainder
            } else {
                t.left[n - 1].log2_abs()
            };
            let p1 = (t.left[n - 1].clone() - t.left[n - 2].clone()).log2_abs();
            let p2 = (t.left[n - 2].clone() - t.left[n - 3.min(n - 1)].clone()).log2_abs();
            let cut = scale - t.bits as f64 - 16.0;
            if n > need && p1 < cut && p2 < cut + 4.0 {
                t.tail = Some(t.left[n - 1].clone());
                return Ok(());
            }
            let grow = (n / 4).max(8);
            self.extend_left(t, body, n - 1 + grow)?;
        }
    }

    fn integral(&mut self, node: &Arc<Integral>, p: &Point) -> Result<S> {
        let key = Arc::as_ptr(node) as usize;
        let mut t = match self.tables.remove(&key) {
            Some((_, t)) => t,
            None => self.new_table(node)?,
        };
        let r = self.query(&mut t, &node.body, p);
        self.tables.insert(key, (node.clone(), t));
        r
    }

    fn query(&mut self, t: &mut Table<S>, body: &Expr, p: &Point) -> Result<S> {
        let w = p.w.with_prec(p.w.prec().max(t.bits));
        let rel = (&w - &t.anchor).to_f64();
        if !rel.is_finite() {
            return Err(Error::Domain("integral queried outside (0, 1)".into()));
        }
        if rel >= 0.0 {
            let k = rel.floor() as usize;
            self.extend_right(t, body, k)?;
            let a = self.offset(t, k as i64);
            let partial = self.panel(t, body, &a, &w)?;
            let mut v = t.right[k].clone() + partial;
            if t.base_zero {
                if t.tail.is_none() {
                    self.settle_tail(t, body, 0)?;
                }
                v = t.tail.clone().unwrap() + v;
            }
            Ok(v)
        } else {
            let k = (-rel).floor() as usize;
            self.extend_left(t, body, k)?;
            let b = self.offset(t, -(k as i64));
            let partial = self.panel(t, body, &w, &b)?;
            let inner = t.left[k].clone() + partial;
            if t.base_zero {
                self.settle_tail(t, body, k)?;
                Ok(t.tail.clone().unwrap() - inner)
            } else {
                Ok(-inner)
            }
        }
    }
}

/// Value of `e` at a rational `x`, checked by re-evaluating with 32 more
/// bits. Returns the value at the higher precision.
pub fn eval_expr<S: Scalar>(e: &Expr, x: &Q, digits: u32) -> Result<S> {
    let bits = bits_for_digits(digits);
    let lo: S = Evaluator::new(bits).eval_q(e, x)?;
    let hi: S = Evaluator::new(bits + 32).eval_q(e, x)?;
    let diff = (hi.clone() - lo).log2_abs();
    let mag = hi.log2_abs();
    if diff > mag - digits as f64 * std::f64::consts::LOG2_10 && diff.is_finite() {
        return Err(Error::PrecisionLoss(format!(
            "evaluation at x = {x} changed by 2^{:.1} relative when precision was raised",
            diff - mag
        )));
    }
    Ok(hi)
}

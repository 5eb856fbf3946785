//! Correspondence between recurrences for Mellin moments and differential
//! equations for the integrand, and between differential equations and the
//! recurrences of their power-series coefficients.

use num_traits::{One, Zero};

use crate::algebra::field::{q_pow, qi, Q};
use crate::algebra::ore::{falling_factorial, DiffOp};
use crate::algebra::poly::Poly;
use crate::algebra::recop::RecOp;
use crate::error::{Error, Result};

/// `T = -(x D + 1)`, the image of `n` under the Mellin correspondence.
fn theta_image() -> DiffOp {
    DiffOp::new(vec![Poly::constant(-Q::one()), Poly::new(vec![Q::zero(), -Q::one()])])
}

/// Evaluates `p(T)` by Horner's rule in the operator algebra.
fn poly_of_op(p: &Poly<Q>, t: &DiffOp) -> DiffOp {
    let mut acc = DiffOp::zero();
    for c in p.coeffs().iter().rev() {
        acc = acc.compose(t).add_op(&DiffOp::mult(Poly::constant(c.clone())));
    }
    acc
}

/// Image of `sum_k p_k(n) S^k` under `S -> x`, `n -> -(x D + 1)`, without
/// normalization.
pub fn recurrence_image(rec: &RecOp) -> DiffOp {
    let t = theta_image();
    let mut out = DiffOp::zero();
    for (k, p) in rec.coeffs().iter().enumerate() {
        if p.is_zero() {
            continue;
        }
        let xk = DiffOp::mult(Poly::monomial(Q::one(), k));
        out = out.add_op(&poly_of_op(p, &t).compose(&xk));
    }
    out
}

/// Differential operator annihilating `f` whenever `M[f](n)` satisfies
/// `rec` (boundary terms assumed to vanish).
pub fn recurrence_to_ode(rec: &RecOp) -> DiffOp {
    recurrence_image(rec).normalize()
}

/// Recurrence for the coefficients `f_n` of power-series solutions
/// `sum f_n x^n` of `ode`.
pub fn ode_to_recurrence(ode: &DiffOp) -> RecOp {
    // x^i D^j x^m = m^(j) x^(m - j + i); collect by s = j - i.
    let mut smin = i64::MAX;
    let mut smax = i64::MIN;
    for (j, q) in ode.coeffs().iter().enumerate() {
        for (i, c) in q.coeffs().iter().enumerate() {
            if !c.is_zero() {
                let s = j as i64 - i as i64;
                smin = smin.min(s);
                smax = smax.max(s);
            }
        }
    }
    if smin > smax {
        return RecOp::new(vec![]);
    }
    let mut coeffs = vec![Poly::zero(); (smax - smin + 1) as usize];
    for (j, q) in ode.coeffs().iter().enumerate() {
        let ff = falling_factorial(j);
        for (i, c) in q.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let k = (j as i64 - i as i64 - smin) as usize;
            // coefficient of f_{n+k} is c (n + k)^(j)
            let shifted = ff.taylor_shift(&qi(k as i64));
            coeffs[k] = &coeffs[k] + &shifted.scale(c);
        }
    }
    RecOp::new(coeffs).normalize()
}

/// `(x^n - a^n) / (x - a) = sum_{k<n} x^k a^(n-1-k)`.
pub fn regularized_kernel(n: u32, a: &Q) -> Poly<Q> {
    assert!(n >= 1, "regularized kernel needs n >= 1");
    Poly::new((0..n).map(|k| q_pow(a, (n - 1 - k) as i64)).collect())
}

/// A recurrence with enough initial values to pin down one sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct SequenceSpec {
    pub rec: RecOp,
    /// Smallest `n` for which the recurrence is asserted.
    pub offset: i64,
    pub initial_values: Vec<(i64, Q)>,
}

impl SequenceSpec {
    pub fn new(rec: RecOp, offset: i64, initial_values: Vec<(i64, Q)>) -> Self {
        SequenceSpec {
            rec,
            offset,
            initial_values,
        }
    }

    pub fn first_index(&self) -> i64 {
        self.initial_values
            .iter()
            .map(|(n, _)| *n)
            .min()
            .unwrap_or(self.offset)
            .min(self.offset)
    }

    /// Exact values `F(first_index) ..= F(last)`.
    pub fn values(&self, last: i64) -> Result<Vec<Q>> {
        let start = self.first_index();
        let r = self.rec.order() as i64;
        let lead = &self.rec.coeffs()[r as usize];
        let mut out: Vec<Q> = Vec::new();
        for m in start..=last {
            if let Some((_, v)) = self.initial_values.iter().find(|(n, _)| *n == m) {
                out.push(v.clone());
                continue;
            }
            let n = m - r;
            let nq = qi(n);
            let l = lead.eval(&nq);
            if n < self.offset || n < start || l.is_zero() {
                return Err(Error::MissingInitialValue(m));
            }
            let mut acc = Q::zero();
            for k in 0..r {
                acc += self.rec.coeffs()[k as usize].eval(&nq) * &out[(n + k - start) as usize];
            }
            out.push(-acc / l);
        }
        Ok(out)
    }

    pub fn value(&self, n: i64) -> Result<Q> {
        let start = self.first_index();
        if n < start {
            return Err(Error::MissingInitialValue(n));
        }
        Ok(self.values(n)?.pop().unwrap())
    }

    /// Checks that the initial values determine the sequence and agree with
    /// the recurrence wherever it can be tested.
    pub fn validate(&self) -> Result<()> {
        if self.rec.is_zero() {
            return Err(Error::Invalid("zero recurrence".into()));
        }
        let last = self.initial_values.iter().map(|(n, _)| *n).max().unwrap_or(self.offset);
        let horizon = last.max(self.offset + self.rec.order() as i64) + 2;
        let vals = self.values(horizon)?;
        let start = self.first_index();
        for n in self.offset.max(start)..=horizon - self.rec.order() as i64 {
            let res = self.rec.residual(start, &vals, n).unwrap_or_else(Q::zero);
            if !res.is_zero() {
                return Err(Error::Invalid(format!("initial values violate the recurrence at n = {n}")));
            }
        }
        Ok(())
    }

    /// Sequence `F(n) / rho^n`.
    pub fn rescaled(&self, rho: &Q) -> SequenceSpec {
        SequenceSpec {
            rec: self.rec.rescale(rho).normalize(),
            offset: self.offset,
            initial_values: self.initial_values.iter().map(|(n, v)| (*n, v / q_pow(rho, *n))).collect(),
        }
    }
}

/// Largest positive rational root of the characteristic polynomial, used to
/// strip exponential growth before the Mellin correspondence.
pub fn growth_rate(rec: &RecOp) -> Option<Q> {
    crate::algebra::roots::rational_roots(&rec.characteristic())
        .into_iter()
        .filter(|r| *r > Q::zero())
        .max()
}

/// Largest integer root of the leading coefficient, if any.
pub fn largest_leading_root(rec: &RecOp) -> Option<i64> {
    let lead = rec.coeffs().last()?;
    crate::algebra::roots::integer_roots(lead)
        .into_iter()
        .filter_map(|r| i64::try_from(r).ok())
        .max()
}

/// Recurrence, derived ODE and n-window for the inverse problem.
#[derive(Clone, Debug, PartialEq)]
pub struct MellinProblem {
    pub seq: SequenceSpec,
    pub ode: DiffOp,
    pub n_window: (i64, i64),
}

impl MellinProblem {
    pub fn new(seq: SequenceSpec, n_window: (i64, i64)) -> Self {
        let ode = recurrence_to_ode(&seq.rec);
        MellinProblem { seq, ode, n_window }
    }
}

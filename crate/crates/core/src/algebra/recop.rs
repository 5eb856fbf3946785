//! Linear recurrence operators `sum_k p_k(n) S^k` acting on sequences.

use std::fmt;

use num_traits::{Signed, Zero};

use super::field::{q_pow, Q};
use super::poly::Poly;

/// `coeffs[k]` is the polynomial `p_k(n)` multiplying `F(n + k)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RecOp {
    coeffs: Vec<Poly<Q>>,
}

impl RecOp {
    pub fn new(mut coeffs: Vec<Poly<Q>>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RecOp { coeffs }
    }

    pub fn from_ints(coeffs: &[&[i64]]) -> Self {
        RecOp::new(coeffs.iter().map(|c| Poly::from_ints(c)).collect())
    }

    pub fn coeffs(&self) -> &[Poly<Q>] {
        &self.coeffs
    }

    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Leading terms of the coefficients of maximal degree, as a polynomial
    /// in the shift; its roots are the possible exponential growth rates.
    pub fn characteristic(&self) -> Poly<Q> {
        let dmax = self.coeffs.iter().map(|c| c.deg()).max().unwrap_or(-1);
        Poly::new(
            self.coeffs
                .iter()
                .map(|c| if c.deg() == dmax { c.lc() } else { Q::zero() })
                .collect(),
        )
    }

    /// Operator annihilating `F(n) / rho^n` when `self` annihilates `F`.
    pub fn rescale(&self, rho: &Q) -> Self {
        RecOp::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c.scale(&q_pow(rho, k as i64)))
                .collect(),
        )
    }

    /// Operator in the variable `n + s`.
    pub fn shift_index(&self, s: &Q) -> Self {
        RecOp::new(self.coeffs.iter().map(|c| c.taylor_shift(s)).collect())
    }

    /// `sum_k p_k(n) F(n + k)` given `values[i] = F(start + i)`.
    pub fn residual(&self, start: i64, values: &[Q], n: i64) -> Option<Q> {
        let mut acc = Q::zero();
        for (k, p) in self.coeffs.iter().enumerate() {
            let idx = n + k as i64 - start;
            if idx < 0 || idx as usize >= values.len() {
                return None;
            }
            acc += p.eval(&Q::from_integer(n.into())) * &values[idx as usize];
        }
        Some(acc)
    }

    /// Extends `values` (indexed from `start`) to `len` terms. Fails when the
    /// leading coefficient vanishes at a needed index.
    pub fn extend(&self, start: i64, values: &mut Vec<Q>, len: usize) -> Result<(), i64> {
        let r = self.order();
        if values.len() < r {
            return Err(start + values.len() as i64);
        }
        while values.len() < len {
            let n = start + values.len() as i64 - r as i64;
            let nq = Q::from_integer(n.into());
            let lead = self.coeffs[r].eval(&nq);
            if lead.is_zero() {
                return Err(n + r as i64);
            }
            let mut acc = Q::zero();
            for k in 0..r {
                acc += self.coeffs[k].eval(&nq) * &values[values.len() - r + k];
            }
            values.push(-acc / lead);
        }
        Ok(())
    }

    /// Product `self * other` in the shift algebra, `S p(n) = p(n+1) S`.
    pub fn compose(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return RecOp::new(vec![]);
        }
        let mut out = vec![Poly::zero(); self.order() + other.order() + 1];
        for (a, p) in self.coeffs.iter().enumerate() {
            let shift = Q::from_integer((a as i64).into());
            for (b, q) in other.coeffs.iter().enumerate() {
                out[a + b] = &out[a + b] + &(p * &q.taylor_shift(&shift));
            }
        }
        RecOp::new(out)
    }

    /// Integer-primitive form with positive leading term in the top shift;
    /// vanishing low-order coefficients are shifted out.
    pub fn normalize(&self) -> Self {
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 && lead < self.coeffs.len() {
            let back = Q::from_integer((-(lead as i64)).into());
            let shifted = RecOp::new(self.coeffs[lead..].iter().map(|c| c.taylor_shift(&back)).collect());
            return shifted.normalize();
        }
        let mut all: Vec<Q> = vec![];
        for c in &self.coeffs {
            all.extend(c.coeffs().iter().cloned());
        }
        let den = super::field::denom_lcm(all.iter());
        let num = super::field::numer_gcd(all.iter());
        if num.is_zero() {
            return self.clone();
        }
        let mut f = Q::new(den, num);
        if self.coeffs.last().unwrap().lc().is_negative() {
            f = -f;
        }
        RecOp::new(self.coeffs.iter().map(|c| c.scale(&f)).collect())
    }
}

impl fmt::Display for RecOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})*F(n+{k})", c.to_string_in("n"))?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for RecOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

//! Peeling first-order factors from both sides of an operator.

use std::fmt;

use crate::algebra::ore::{DiffOp, RatDiffOp};
use crate::algebra::ratfun::RatFun;
use crate::error::{Error, Result};

use super::hyperexp::{hyperexp_solutions, HyperexpTerm};
use crate::QRatFun;

/// `L ~ left[0] * left[1] * .. * core * .. * right[1] * right[0]`, up to a
/// rational left multiplier. Each first-order factor carries a solution.
#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    /// Rightmost first.
    pub right_chain: Vec<(DiffOp, HyperexpTerm)>,
    pub core: Option<DiffOp>,
    /// Leftmost first.
    pub left_chain: Vec<(DiffOp, HyperexpTerm)>,
}

impl Factorization {
    /// The factors from left to right.
    pub fn factors(&self) -> Vec<DiffOp> {
        let mut out: Vec<DiffOp> = self.left_chain.iter().map(|(op, _)| op.clone()).collect();
        out.extend(self.core.iter().cloned());
        out.extend(self.right_chain.iter().rev().map(|(op, _)| op.clone()));
        out
    }

    /// Normalized product of the factors.
    pub fn product(&self) -> DiffOp {
        let mut acc = DiffOp::one();
        for f in self.factors() {
            acc = acc.compose(&f);
        }
        acc.normalize()
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors().iter().map(|op| format!("({op})")).collect();
        f.write_str(&parts.join(" * "))
    }
}

/// `den(r) D - num(r)`, normalized.
fn first_order(r: &QRatFun) -> DiffOp {
    DiffOp::from_rat(&RatDiffOp::d_minus(r.clone()))
}

fn solution_of_first_order(op: &DiffOp) -> HyperexpTerm {
    let r = -(&RatFun::from_poly(op.coeff(0)) / &RatFun::from_poly(op.coeff(1)));
    HyperexpTerm::from_certificate(&r)
}

fn divide_right(l: &DiffOp, r: &DiffOp) -> DiffOp {
    let (quo, rem) = l.to_rat().right_divrem(&r.to_rat());
    assert!(rem.is_zero(), "right factor does not divide");
    DiffOp::from_rat(&quo)
}

/// Smallest candidate by height, then by printed form; the solver returns
/// them in that order.
fn best(l: &DiffOp) -> Result<Option<HyperexpTerm>> {
    Ok(hyperexp_solutions(l)?.into_iter().next())
}

/// Peels right factors while hyperexponential solutions exist, then left
/// factors through the adjoint while the order exceeds 2.
pub fn factor_chain(op: &DiffOp) -> Result<Factorization> {
    if op.order() == 0 {
        return Err(Error::Invalid("operator of order 0".into()));
    }
    let mut cur = op.normalize();
    let mut right_chain = vec![];
    let mut left_chain = vec![];
    loop {
        if cur.order() == 1 {
            let t = solution_of_first_order(&cur);
            right_chain.push((cur, t));
            return Ok(Factorization {
                right_chain,
                core: None,
                left_chain,
            });
        }
        let Some(t) = best(&cur)? else { break };
        let f = first_order(&t.certificate());
        cur = divide_right(&cur, &f);
        right_chain.push((f, t));
    }
    while cur.order() > 2 {
        let adj = cur.adjoint().normalize();
        let Some(h) = best(&adj)? else {
            return Err(Error::IrreducibleHighOrder(cur.order()));
        };
        // adj = M (D - r) gives cur ~ (D - r)^* M^*
        let (m, rem) = adj.to_rat().right_divrem(&RatDiffOp::d_minus(h.certificate()));
        assert!(rem.is_zero());
        let middle = DiffOp::from_rat(&m.adjoint());
        let left = divide_right(&cur, &middle);
        let t = solution_of_first_order(&left);
        left_chain.push((left, t));
        cur = middle;
    }
    if cur.order() == 1 {
        let t = solution_of_first_order(&cur);
        right_chain.push((cur, t));
        return Ok(Factorization {
            right_chain,
            core: None,
            left_chain,
        });
    }
    Ok(Factorization {
        right_chain,
        core: Some(cur),
        left_chain,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::q;
    use crate::algebra::poly::Poly;
    use crate::mellin::recurrence_to_ode;
    use crate::RecOp;

    #[test]
    fn d_cubed_splits_completely() {
        let op = DiffOp::from_ints(&[&[], &[], &[], &[1]]);
        let f = factor_chain(&op).unwrap();
        assert_eq!(f.right_chain.len(), 3);
        assert!(f.core.is_none() && f.left_chain.is_empty());
        for (g, _) in &f.right_chain {
            assert_eq!(g, &DiffOp::d());
        }
        assert_eq!(f.product(), op);
    }

    #[test]
    fn binom_3n_ode_is_its_own_core() {
        let rec = RecOp::from_ints(&[&[-4, -18, -18], &[9, 27, 18]]);
        let op = recurrence_to_ode(&rec);
        let f = factor_chain(&op).unwrap();
        assert!(f.right_chain.is_empty() && f.left_chain.is_empty());
        assert_eq!(f.core, Some(op));
    }

    #[test]
    fn third_order_with_pole_solution() {
        let op = DiffOp::from_ints(&[
            &[-108, 729],
            &[16, -2160, 4131],
            &[0, 144, -2682, 3159],
            &[0, 0, 72, -558, 486],
        ]);
        let f = factor_chain(&op).unwrap();
        assert_eq!(f.right_chain.len(), 1);
        let (g, t) = &f.right_chain[0];
        assert_eq!(g, &DiffOp::from_ints(&[&[27], &[-4, 27]]));
        assert_eq!(t.factors, vec![(Poly::linear_root(q(4, 27)), q(-1, 1))]);
        assert_eq!(f.core.as_ref().unwrap().order(), 2);
        assert_eq!(f.product(), op.normalize());
    }

    #[test]
    fn left_factor_through_adjoint() {
        // (x D + 2) * (D^2 - x): the right part has no hyperexponential solution
        let left = DiffOp::from_ints(&[&[2], &[0, 1]]);
        let airy = DiffOp::from_ints(&[&[0, -1], &[], &[1]]);
        let op = left.compose(&airy);
        let f = factor_chain(&op).unwrap();
        assert!(f.right_chain.is_empty());
        assert_eq!(f.left_chain.len(), 1);
        assert_eq!(f.core.as_ref().unwrap().order(), 2);
        assert_eq!(f.product(), op.normalize());
    }

    #[test]
    fn airy_alone_is_a_core() {
        let airy = DiffOp::from_ints(&[&[0, -1], &[], &[1]]);
        assert_eq!(factor_chain(&airy).unwrap().core, Some(airy));
    }

    #[test]
    fn reducible_second_order_is_peeled() {
        // x D^2 - D: solutions 1 and x^2
        let op = DiffOp::from_ints(&[&[], &[-1], &[0, 1]]);
        let f = factor_chain(&op).unwrap();
        assert_eq!(f.right_chain.len(), 2);
        assert_eq!(f.product(), op);
    }
}

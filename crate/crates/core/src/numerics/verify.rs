//! Residual checks of candidate solutions, Wronskians and local exponents.

use num_traits::{ToPrimitive, Zero};

use super::eval::Evaluator;
use super::quad::Point;
use super::real::{Mp, Scalar};
use crate::algebra::field::{q, Q};
use crate::algebra::ore::DiffOp;
use crate::closedform::expr::{differentiate, Expr};
use crate::error::{Error, Result};

/// `[e, e', .., e^(k)]`.
pub fn derivatives(e: &Expr, k: usize) -> Vec<Expr> {
    let mut out = vec![e.clone()];
    for _ in 0..k {
        let next = differentiate(out.last().unwrap());
        out.push(next);
    }
    out
}

/// `log2` of the relative residual `|L(e)| / sum_j |q_j e^(j)|` at `p`.
fn residual_at<S: Scalar>(ev: &mut Evaluator<S>, op: &DiffOp, ders: &[Expr], p: &Point) -> Result<f64> {
    let bits = p.x.prec();
    let mut total = S::from_mp(Mp::zero_with(bits));
    let mut scale = f64::NEG_INFINITY;
    for (j, c) in op.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mut cv = Mp::zero_with(bits);
        for a in c.coeffs().iter().rev() {
            cv = &(&cv * &p.x) + &Mp::from_q(a, bits);
        }
        let term = ev.eval(&ders[j], p)? * S::from_mp(cv);
        scale = scale.max(term.log2_abs());
        total = total + term;
    }
    let num = total.log2_abs();
    if scale == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(num - scale)
}

/// Relative ODE residuals of `e` at each point.
pub fn verify_ode_residual<S: Scalar>(e: &Expr, op: &DiffOp, points: &[Q], bits: u32) -> Result<Vec<f64>> {
    let ders = derivatives(e, op.order());
    let mut ev: Evaluator<S> = Evaluator::new(bits);
    let mut out = vec![];
    for x in points {
        let p = Point::from_q(x, bits);
        out.push(residual_at(&mut ev, op, &ders, &p)?.exp2());
    }
    Ok(out)
}

/// `count` sample points spread over (0, 1), avoiding `avoid`.
pub fn sample_points(count: usize, avoid: &[Q]) -> Vec<Q> {
    let mut out = vec![];
    let mut k = 1i64;
    let den = count as i64 + 1;
    while out.len() < count {
        // offset by 1/97 of a step so that simple rationals are missed
        let x = q(97 * k - 41, 97 * den);
        if x > Q::zero() && x < q(1, 1) && avoid.iter().all(|a| a != &x) {
            out.push(x);
        }
        k += 1;
        if k > 10 * den {
            break;
        }
    }
    out
}

/// `det [d^j/dx^j e_i](x)` at a rational point.
pub fn wronskian<S: Scalar>(basis: &[Expr], x: &Q, bits: u32) -> Result<S> {
    let n = basis.len();
    let mut ev: Evaluator<S> = Evaluator::new(bits);
    let p = Point::from_q(x, bits);
    let mut m: Vec<Vec<S>> = vec![];
    for e in basis {
        let ders = derivatives(e, n.saturating_sub(1));
        m.push(ders.iter().map(|d| ev.eval(d, &p)).collect::<Result<_>>()?);
    }
    let mut det = S::from_mp(Mp::from_i64(1, bits));
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].log2_abs().partial_cmp(&m[j][col].log2_abs()).unwrap())
            .unwrap();
        if m[piv][col].is_zero() {
            return Ok(S::from_mp(Mp::zero_with(bits)));
        }
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        det = det * m[col][col].clone();
        for r in col + 1..n {
            let f = m[r][col].clone() / m[col][col].clone();
            for c in col..n {
                let v = m[r][c].clone() - f.clone() * m[col][c].clone();
                m[r][c] = v;
            }
        }
    }
    Ok(det)
}

/// Estimated exponent `e` with `|f| ~ x^e` as `x -> 0` (or `(1-x)^e` as
/// `x -> 1` when `at_one`), from values at `2^-300` and `2^-600`. Values
/// within 0.01 of a fraction with denominator at most 12 are snapped to it.
pub fn local_exponent<S: Scalar>(e: &Expr, at_one: bool, bits: u32) -> Result<f64> {
    let mut ev: Evaluator<S> = Evaluator::new(bits);
    let mut logs = vec![];
    for k in [300i64, 600] {
        let eps = crate::algebra::field::q_pow(&q(1, 2), k);
        let x = if at_one { q(1, 1) - eps } else { eps };
        let v = ev.eval_q(e, &x)?;
        logs.push(v.log2_abs());
    }
    if logs.iter().any(|l| !l.is_finite()) {
        return Err(Error::Domain("function vanishes identically near the endpoint".into()));
    }
    Ok(snap((logs[0] - logs[1]) / 300.0))
}

fn snap(v: f64) -> f64 {
    for d in 1..=12 {
        let n = (v * d as f64).round();
        if (v - n / d as f64).abs() < 0.01 {
            return n / d as f64;
        }
    }
    v
}

/// Snapped exponent as a rational, when it is one.
pub fn exponent_q(v: f64) -> Option<Q> {
    for d in 1..=12i64 {
        let n = (v * d as f64).round();
        if (v - n / d as f64).abs() < 1e-9 {
            return Some(q(n.to_i64()?, d));
        }
    }
    None
}

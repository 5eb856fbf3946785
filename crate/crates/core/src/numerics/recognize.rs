//! Integer relation search (PSLQ) and recognition of fitted constants as
//! rational combinations of `1, pi, sqrt3 pi, 1/pi, sqrt3/pi, log 2`.

use num_traits::{One, Signed, Zero};

use super::real::{rel_err, Mp};
use crate::algebra::field::Q;
use crate::closedform::expr::{normalize, Expr};

/// Largest numerator and denominator accepted in a recognized constant.
pub const COEFF_BOUND: i64 = 64;

/// Finds integers `a` with `sum a_i x_i ~ 0` and `max |a_i| <= bound`.
pub fn pslq(x: &[Mp], bound: i64, bits: u32) -> Option<Vec<i64>> {
    let n = x.len();
    if n < 2 {
        return None;
    }
    let mp = |v: i64| Mp::from_i64(v, bits);
    let x: Vec<Mp> = x.iter().map(|v| v.with_prec(bits)).collect();
    if x.iter().any(|v| v.is_zero()) {
        let i = x.iter().position(|v| v.is_zero()).unwrap();
        let mut rel = vec![0; n];
        rel[i] = 1;
        return Some(rel);
    }
    let gamma = (Mp::from_i64(4, bits) / mp(3)).sqrt();
    // partial norms s_j = sqrt(sum_{k >= j} x_k^2)
    let mut s = vec![Mp::zero_with(bits); n];
    let mut acc = Mp::zero_with(bits);
    for j in (0..n).rev() {
        acc = &acc + &(&x[j] * &x[j]);
        s[j] = acc.sqrt();
    }
    let t = s[0].clone();
    let mut y: Vec<Mp> = x.iter().map(|v| v / &t).collect();
    let s: Vec<Mp> = s.iter().map(|v| v / &t).collect();
    let mut h = vec![vec![Mp::zero_with(bits); n - 1]; n];
    for i in 0..n {
        for j in 0..(n - 1).min(i + 1) {
            h[i][j] = if i == j {
                &s[j + 1] / &s[j]
            } else {
                -(&(&y[i] * &y[j]) / &(&s[j] * &s[j + 1]))
            };
        }
    }
    let mut a: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
    let mut b = a.clone();

    let reduce = |h: &mut Vec<Vec<Mp>>,
                  y: &mut Vec<Mp>,
                  a: &mut Vec<Vec<i64>>,
                  b: &mut Vec<Vec<i64>>,
                  rows: std::ops::Range<usize>|
     -> Option<()> {
        for i in rows {
            for j in (0..i.min(n - 1)).rev() {
                if h[j][j].is_zero() {
                    continue;
                }
                let q = (&h[i][j] / &h[j][j]).round();
                let qi = q.to_i64()?;
                if qi == 0 {
                    continue;
                }
                let yi = y[i].clone();
                y[j] = &y[j] + &(&q * &yi);
                for k in 0..=j {
                    let v = &h[i][k] - &(&q * &h[j][k]);
                    h[i][k] = v;
                }
                for k in 0..n {
                    a[i][k] = a[i][k].checked_sub(qi.checked_mul(a[j][k])?)?;
                    b[k][j] = b[k][j].checked_add(qi.checked_mul(b[k][i])?)?;
                }
            }
        }
        Some(())
    };
    reduce(&mut h, &mut y, &mut a, &mut b, 1..n)?;

    let threshold = -(bits as f64) + 24.0;
    for _ in 0..2000 {
        // exchange step
        let mut m = 0;
        let mut best = f64::NEG_INFINITY;
        let mut gp = Mp::from_i64(1, bits);
        for i in 0..n - 1 {
            gp = &gp * &gamma;
            let v = (&gp * &h[i][i].abs()).log2_abs();
            if v > best {
                best = v;
                m = i;
            }
        }
        y.swap(m, m + 1);
        a.swap(m, m + 1);
        h.swap(m, m + 1);
        for row in b.iter_mut() {
            row.swap(m, m + 1);
        }
        if m < n - 2 {
            let t0 = (&(&h[m][m] * &h[m][m]) + &(&h[m][m + 1] * &h[m][m + 1])).sqrt();
            if t0.is_zero() {
                return None;
            }
            let t1 = &h[m][m] / &t0;
            let t2 = &h[m][m + 1] / &t0;
            for row in h.iter_mut().skip(m) {
                let t3 = row[m].clone();
                let t4 = row[m + 1].clone();
                row[m] = &(&t1 * &t3) + &(&t2 * &t4);
                row[m + 1] = &(&t1 * &t4) - &(&t2 * &t3);
            }
        }
        reduce(&mut h, &mut y, &mut a, &mut b, m + 1..n)?;
        // a column of b is a relation once the matching y entry vanishes
        let ymax = y.iter().map(Mp::log2_abs).fold(f64::NEG_INFINITY, f64::max);
        for (j, yj) in y.iter().enumerate() {
            if yj.log2_abs() < threshold.min(ymax - bits as f64 * 0.5) {
                let rel: Vec<i64> = (0..n).map(|k| b[k][j]).collect();
                if rel.iter().all(|v| v.abs() <= bound) {
                    return Some(rel);
                }
                return None;
            }
        }
        let amax = a.iter().flatten().map(|v| v.unsigned_abs()).max().unwrap_or(0);
        if amax > (bound as u64) * (bound as u64) * 1024 {
            return None;
        }
        if (0..n - 1).any(|i| h[i][i].is_zero()) {
            return None;
        }
    }
    None
}

/// The recognition basis as expressions, in the order used by [`recognize`].
pub fn basis_exprs() -> Vec<Expr> {
    let sqrt3 = Expr::sqrt(Expr::int(3));
    let inv_pi = Expr::powi(Expr::Pi, -1);
    vec![
        Expr::one(),
        Expr::Pi,
        Expr::mul(vec![sqrt3.clone(), Expr::Pi]),
        inv_pi.clone(),
        Expr::mul(vec![sqrt3, inv_pi]),
        Expr::log(Expr::int(2)),
    ]
}

fn basis_values(bits: u32) -> Vec<Mp> {
    let pi = Mp::pi(bits);
    let s3 = Mp::from_i64(3, bits).sqrt();
    vec![
        Mp::from_i64(1, bits),
        pi.clone(),
        &s3 * &pi,
        &Mp::from_i64(1, bits) / &pi,
        &s3 / &pi,
        Mp::ln2(bits),
    ]
}

/// A constant as `sum q_i b_i` over the recognition basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Recognized {
    pub coeffs: Vec<Q>,
    pub expr: Expr,
}

/// Recognizes `v` using `digits` significant digits; the candidate must
/// reproduce `v` to within `10^-(digits - 10)`.
pub fn recognize(v: &Mp, digits: u32) -> Option<Recognized> {
    let bits = (digits as f64 * std::f64::consts::LOG2_10) as u32;
    let basis = basis_values(bits + 64);
    if v.is_zero() {
        return Some(Recognized {
            coeffs: vec![Q::zero(); basis.len()],
            expr: Expr::zero(),
        });
    }
    let mut xs = vec![v.with_prec(bits)];
    xs.extend(basis.iter().map(|b| b.with_prec(bits)));
    let rel = pslq(&xs, COEFF_BOUND * COEFF_BOUND, bits)?;
    if rel[0] == 0 {
        return None;
    }
    let d = Q::from_integer(rel[0].into());
    let coeffs: Vec<Q> = rel[1..].iter().map(|&a| -Q::from_integer(a.into()) / &d).collect();
    let bound = num_bigint::BigInt::from(COEFF_BOUND);
    if coeffs.iter().any(|c| c.numer().abs() > bound || c.denom() > &bound) {
        return None;
    }
    // confirm against the value at the full precision
    let mut acc = Mp::zero_with(v.prec().max(bits + 64));
    for (c, b) in coeffs.iter().zip(&basis) {
        acc = &acc + &(&Mp::from_q(c, bits + 64) * b);
    }
    let tol = -((digits as f64 - 10.0) * std::f64::consts::LOG2_10);
    if rel_err(&acc, v).log2_abs() > tol {
        return None;
    }
    let terms: Vec<Expr> = coeffs
        .iter()
        .zip(basis_exprs())
        .filter(|(c, _)| !c.is_zero())
        .map(|(c, e)| {
            if c.is_one() {
                e
            } else {
                Expr::mul(vec![Expr::c(c.clone()), e])
            }
        })
        .collect();
    Some(Recognized {
        coeffs,
        expr: normalize(&Expr::add(terms)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::q;
    use crate::closedform::sexpr::to_sexpr;
    use crate::numerics::real::bits_for_digits;

    #[test]
    fn recognizes_sqrt3_over_4pi() {
        let bits = bits_for_digits(50);
        let v = &Mp::from_i64(3, bits).sqrt() / &(&Mp::from_i64(4, bits) * &Mp::pi(bits));
        let r = recognize(&v, 50).unwrap();
        assert_eq!(r.coeffs[4], q(1, 4));
        assert_eq!(to_sexpr(&r.expr), "(* 1/4 (sqrtint 3) (pow pi -1))");
    }

    #[test]
    fn recognizes_mixed_combination() {
        let bits = bits_for_digits(50);
        let pi = Mp::pi(bits);
        let v = &(&Mp::from_q(&q(-3, 7), bits) * &pi) + &(&Mp::from_q(&q(5, 2), bits) * &Mp::ln2(bits));
        let r = recognize(&v, 50).unwrap();
        assert_eq!(r.coeffs[1], q(-3, 7));
        assert_eq!(r.coeffs[5], q(5, 2));
    }

    #[test]
    fn rejects_unrelated_constant() {
        // e is not in the span
        let v = Mp::from_i64(1, bits_for_digits(50)).exp();
        assert!(recognize(&v, 50).is_none());
    }

    #[test]
    fn pslq_finds_simple_relation() {
        let bits = 200;
        let s2 = Mp::from_i64(2, bits).sqrt();
        let xs = vec![&Mp::from_i64(3, bits) * &s2, s2.clone(), Mp::from_i64(1, bits)];
        let rel = pslq(&xs, 100, bits).unwrap();
        assert_eq!(rel[0] * 3 + rel[1], 0);
        assert_eq!(rel[2], 0);
    }
}

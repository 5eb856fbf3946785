//! Mellin moments of basis functions and the linear fit of the constants.

use super::eval::Evaluator;
use super::quad::{check_accuracy, TanhSinh};
use super::real::{rel_err, Mp, Scalar};
use crate::algebra::field::Q;
use crate::algebra::poly::Poly;
use crate::closedform::expr::{normalize, Expr};
use crate::error::{Error, Result};
use crate::mellin::regularized_kernel;

/// Kernel of the moment integral.
#[derive(Clone, Debug, PartialEq)]
pub enum Kernel {
    /// `x^n`.
    Power,
    /// `x^n - a^n`, for integrands with a simple pole at an interior `a`.
    Regularized(Q),
}

fn kernel_poly(kernel: &Kernel, n: i64) -> Result<Poly<Q>> {
    if n < 0 {
        return Err(Error::Invalid(format!("moment index {n} is negative")));
    }
    Ok(match kernel {
        Kernel::Power => Poly::monomial(num_traits::One::one(), n as usize),
        Kernel::Regularized(a) => {
            if n == 0 {
                Poly::zero()
            } else {
                regularized_kernel(n as u32, a)
            }
        }
    })
}

/// The integrand after absorbing `x - a` for a regularized kernel.
fn absorbed(f: &Expr, kernel: &Kernel) -> Expr {
    match kernel {
        Kernel::Power => f.clone(),
        Kernel::Regularized(a) => normalize(&Expr::mul(vec![Expr::Poly(Poly::linear_root(a.clone())), f.clone()])),
    }
}

/// Moment values with the quadrature error estimates (relative, log2).
#[derive(Clone, Debug)]
pub struct MomentTable {
    pub values: Vec<Vec<Mp>>,
    pub log2_errors: Vec<Vec<f64>>,
}

/// `M[i][j] = int_0^1 K_{ns[j]}(x) fs[i](x) dx`, real parts.
pub fn moments<S: Scalar>(fs: &[Expr], kernel: &Kernel, ns: &[i64], bits: u32) -> Result<Vec<Vec<Mp>>> {
    Ok(moment_table::<S>(fs, kernel, ns, bits)?.values)
}

/// [`moments`] with error estimates.
pub fn moment_table<S: Scalar>(fs: &[Expr], kernel: &Kernel, ns: &[i64], bits: u32) -> Result<MomentTable> {
    let gs: Vec<Expr> = fs.iter().map(|f| absorbed(f, kernel)).collect();
    let polys: Vec<Poly<Q>> = ns.iter().map(|&n| kernel_poly(kernel, n)).collect::<Result<_>>()?;
    let mut ev: Evaluator<S> = Evaluator::new(bits);
    let ts = TanhSinh::new(bits);
    let count = gs.len() * ns.len();
    let res = ts.integrate_many::<S>(count, |p| {
        let mut out = Vec::with_capacity(count);
        let kvals: Vec<Mp> = polys
            .iter()
            .map(|k| {
                let mut acc = Mp::zero_with(p.x.prec());
                for c in k.coeffs().iter().rev() {
                    acc = &(&acc * &p.x) + &Mp::from_q(c, p.x.prec());
                }
                acc
            })
            .collect();
        for g in &gs {
            let v = ev.eval(g, p)?;
            for k in &kvals {
                out.push(v.clone() * S::from_mp(k.clone()));
            }
        }
        Ok(out)
    })?;
    let target = -(bits as f64) * 0.5;
    let mut table = vec![];
    let mut errors = vec![];
    for (i, chunk) in res.chunks(ns.len()).enumerate() {
        let mut row = vec![];
        errors.push(chunk.iter().map(|r| r.error.log2() - r.value.log2_abs()).collect());
        for (j, r) in chunk.iter().enumerate() {
            if !r.value.log2_abs().is_finite() && !r.value.is_zero() {
                return Err(Error::DivergentIntegral(format!("moment {} of basis element {i}", ns[j])));
            }
            if !r.value.is_zero() {
                check_accuracy(r, target)?;
            }
            row.push(r.value.re());
        }
        table.push(row);
    }
    Ok(MomentTable {
        values: table,
        log2_errors: errors,
    })
}

/// [`moment_table`] in real arithmetic, falling back to complex arithmetic
/// when an integrand leaves the reals.
pub fn moment_table_auto(fs: &[Expr], kernel: &Kernel, ns: &[i64], bits: u32) -> Result<MomentTable> {
    match moment_table::<Mp>(fs, kernel, ns, bits) {
        Err(Error::Domain(_)) => moment_table::<super::real::Cx>(fs, kernel, ns, bits),
        r => r,
    }
}

/// Solves the square system `a c = b` by Gaussian elimination with partial
/// pivoting.
pub fn solve_mp(a: &[Vec<Mp>], b: &[Mp]) -> Result<Vec<Mp>> {
    let n = b.len();
    let mut m: Vec<Vec<Mp>> = a.iter().cloned().collect();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].log2_abs().partial_cmp(&m[j][col].log2_abs()).unwrap())
            .unwrap();
        if m[piv][col].is_zero() {
            return Err(Error::SingularSystem);
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for r in col + 1..n {
            let f = &m[r][col] / &m[col][col];
            for c in col..n {
                let v = &m[r][c] - &(&f * &m[col][c]);
                m[r][c] = v;
            }
            let v = &rhs[r] - &(&f * &rhs[col]);
            rhs[r] = v;
        }
    }
    let mut x = vec![Mp::zero_with(rhs[0].prec()); n];
    for r in (0..n).rev() {
        let mut acc = rhs[r].clone();
        for c in r + 1..n {
            acc = &acc - &(&m[r][c] * &x[c]);
        }
        x[r] = &acc / &m[r][r];
    }
    Ok(x)
}

/// Outcome of fitting `G(n) = sum_i c_i M_i(n)`.
#[derive(Clone, Debug)]
pub struct Fit {
    pub constants: Vec<Mp>,
    /// Relative residual on the held-out indices, `(n, value)`.
    pub held_out: Vec<(i64, Mp)>,
    /// Condition estimate: ratio of the largest to the smallest pivot.
    pub conditioning: f64,
}

/// Fits constants on the first `moments.len()` indices of `ns` and reports
/// the relative residual on the rest. `moments[i][j]` belongs to `ns[j]`.
pub fn fit_constants(moments: &[Vec<Mp>], targets: &[Q], ns: &[i64]) -> Result<Fit> {
    let k = moments.len();
    if ns.len() < k {
        return Err(Error::Invalid(format!("fit needs {k} equations, window has {}", ns.len())));
    }
    let bits = moments.first().and_then(|r| r.first()).map_or(64, Mp::prec);
    let a: Vec<Vec<Mp>> = (0..k).map(|j| (0..k).map(|i| moments[i][j].clone()).collect()).collect();
    let b: Vec<Mp> = targets[..k].iter().map(|t| Mp::from_q(t, bits)).collect();
    let constants = solve_mp(&a, &b)?;
    let diag: Vec<f64> = (0..k).map(|i| a[i][i].log2_abs()).collect();
    let conditioning =
        diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - diag.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut held_out = vec![];
    for j in k..ns.len() {
        let mut acc = Mp::zero_with(bits);
        for i in 0..k {
            acc = &acc + &(&constants[i] * &moments[i][j]);
        }
        held_out.push((ns[j], rel_err(&acc, &Mp::from_q(&targets[j], bits))));
    }
    Ok(Fit {
        constants,
        held_out,
        conditioning,
    })
}

/// `sum_i c_i M_i(n)` for each column.
pub fn combine(constants: &[Mp], moments: &[Vec<Mp>]) -> Vec<Mp> {
    let cols = moments.first().map_or(0, Vec::len);
    (0..cols)
        .map(|j| {
            let mut acc = Mp::zero_with(constants[0].prec());
            for (c, row) in constants.iter().zip(moments) {
                acc = &acc + &(c * &row[j]);
            }
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::q;
    use crate::closedform::parse_sexpr;
    use crate::numerics::real::bits_for_digits;

    #[test]
    fn power_moments_of_monomial() {
        // int_0^1 x^n x^(-1/2) = 1/(n + 1/2)
        let bits = bits_for_digits(40);
        let f = parse_sexpr("(pow x -1/2)").unwrap();
        let m = moments::<Mp>(&[f], &Kernel::Power, &[0, 1, 5], bits).unwrap();
        for (j, n) in [0i64, 1, 5].iter().enumerate() {
            let exact = Mp::from_q(&(Q::from_integer(1.into()) / (q(*n, 1) + q(1, 2))), bits);
            assert!(rel_err(&m[0][j], &exact).log2_abs() < -120.0);
        }
    }

    #[test]
    fn regularized_moment_through_pole() {
        // int_0^1 (x^n - a^n)/(x - a) dx = sum_k a^(n-1-k)/(k+1)
        let bits = bits_for_digits(40);
        let a = q(1, 3);
        let f = parse_sexpr("(pow [-1 3] -1)").unwrap();
        let m = moments::<Mp>(&[f], &Kernel::Regularized(a.clone()), &[3], bits).unwrap();
        let k = regularized_kernel(3, &a).integral().eval(&q(1, 1)) / q(3, 1);
        assert!(rel_err(&m[0][0], &Mp::from_q(&k, bits)).log2_abs() < -120.0);
    }

    #[test]
    fn fit_recovers_combination() {
        let bits = 128;
        let f = |v: &[i64]| v.iter().map(|&x| Mp::from_i64(x, bits)).collect::<Vec<_>>();
        let m = vec![f(&[1, 2, 3, 4]), f(&[1, 0, 1, 0])];
        // 2*row0 + 3*row1
        let targets = vec![q(5, 1), q(4, 1), q(9, 1), q(8, 1)];
        let fit = fit_constants(&m, &targets, &[1, 2, 3, 4]).unwrap();
        assert!((fit.constants[0].to_f64() - 2.0).abs() < 1e-30);
        assert!(fit.held_out.iter().all(|(_, r)| r.log2_abs() < -100.0));
    }
}

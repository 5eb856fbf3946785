//! Polynomial solutions of linear equations given by the images of monomials.

use num_traits::{One, Zero};

use super::field::Q;
use super::linalg::Matrix;
use super::poly::Poly;
use super::ratfun::RatFun;

/// Coefficient columns `images[k] * den` over a common denominator.
fn columns(images: &[RatFun<Q>]) -> (usize, Vec<Vec<Q>>) {
    let mut den = Poly::one();
    for im in images {
        let g = den.gcd(im.den());
        den = (&den * im.den()).div_exact(&g).unwrap();
    }
    let nums: Vec<Poly<Q>> = images
        .iter()
        .map(|im| (im.num() * &den).div_exact(im.den()).unwrap())
        .collect();
    let rows = nums.iter().map(|p| p.deg() + 1).max().unwrap_or(0).max(0) as usize;
    let cols = nums.iter().map(|p| (0..rows).map(|i| p.coeff(i)).collect()).collect();
    (rows, cols)
}

/// Basis of `{ sum c_k x^k : sum c_k images[k] = 0 }`.
pub fn polynomial_kernel(images: &[RatFun<Q>]) -> Vec<Poly<Q>> {
    if images.is_empty() {
        return vec![];
    }
    let (rows, cols) = columns(images);
    if rows == 0 {
        return (0..images.len()).map(|k| Poly::monomial(Q::one(), k)).collect();
    }
    Matrix::from_columns(rows, &cols)
        .nullspace()
        .into_iter()
        .map(Poly::new)
        .collect()
}

/// The monic polynomial of degree `images.len() - 1` in the kernel, if any.
pub fn monic_solution(images: &[RatFun<Q>]) -> Option<Poly<Q>> {
    let d = images.len().checked_sub(1)?;
    let (rows, cols) = columns(images);
    if rows == 0 {
        return Some(Poly::monomial(Q::one(), d));
    }
    // one extra column for the fixed top coefficient
    let mut m = Matrix::zeros(rows, d + 1);
    for (j, c) in cols.iter().enumerate() {
        for (i, v) in c.iter().enumerate() {
            let v = if j == d { -v.clone() } else { v.clone() };
            m.set(i, j, v);
        }
    }
    let piv = m.rref();
    if piv.contains(&d) {
        return None;
    }
    let mut coeffs = vec![Q::zero(); d + 1];
    coeffs[d] = Q::one();
    for (r, &pc) in piv.iter().enumerate() {
        coeffs[pc] = m.get(r, d).clone();
    }
    Some(Poly::new(coeffs))
}

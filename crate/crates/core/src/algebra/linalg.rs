//! Exact dense linear algebra.

use super::field::Field;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<F> {
    pub rows: usize,
    pub cols: usize,
    data: Vec<F>,
}

impl<F: Field> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn from_columns(rows: usize, cols: &[Vec<F>]) -> Self {
        let mut m = Matrix::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, v) in c.iter().enumerate().take(rows) {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.cols + j] = v;
    }

    /// Reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..self.cols {
                    self.data.swap(p * self.cols + j, r * self.cols + j);
                }
            }
            let inv = F::one() / self.get(r, c).clone();
            for j in c..self.cols {
                let v = self.get(r, j).clone() * inv.clone();
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r || self.get(i, c).is_zero() {
                    continue;
                }
                let f = self.get(i, c).clone();
                for j in c..self.cols {
                    let v = self.get(i, j).clone() - f.clone() * self.get(r, j).clone();
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Basis of the right nullspace.
    pub fn nullspace(&self) -> Vec<Vec<F>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![F::zero(); self.cols];
            v[free] = F::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m.get(r, free).clone();
            }
            basis.push(v);
        }
        basis
    }

    /// Solves the square system `self * x = b`; `None` if singular.
    pub fn solve(&self, b: &[F]) -> Option<Vec<F>> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Matrix::zeros(n, n + 1);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n, b[i].clone());
        }
        let piv = aug.rref();
        if piv.len() < n || piv.iter().any(|&c| c >= n) {
            return None;
        }
        Some((0..n).map(|i| aug.get(i, n).clone()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::{q, Q};

    #[test]
    fn nullspace_of_rank_one() {
        let m = Matrix::from_columns(1, &[vec![q(1, 1)], vec![q(2, 1)]]);
        let ns = m.nullspace();
        assert_eq!(ns, vec![vec![q(-2, 1), q(1, 1)]]);
    }

    #[test]
    fn solves_square_system() {
        let m: Matrix<Q> = Matrix::from_columns(2, &[vec![q(1, 1), q(1, 1)], vec![q(1, 1), q(-1, 1)]]);
        assert_eq!(m.solve(&[q(3, 1), q(1, 1)]).unwrap(), vec![q(2, 1), q(1, 1)]);
    }
}

//! Dense exact linear algebra over the rationals.
//!
//! Everything the solvers need reduces to row reduction: ranks, kernels,
//! particular solutions, and deterministic representative selection.  Pivots
//! are always chosen in column order (first nonzero entry scanning down), and
//! particular solutions set every free variable to zero, so any two runs on
//! the same input produce identical witnesses.

use num_traits::Zero;

use crate::scalar::{self, Scalar};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![scalar::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Build from column vectors, all of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<Scalar>]) -> Self {
        let mut m = Matrix::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    /// Append the columns of `other` on the right.
    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows);
        let mut m = Matrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).clone());
            }
            for j in 0..other.cols {
                m.set(i, self.cols + j, other.get(i, j).clone());
            }
        }
        m
    }

    /// In-place reduced row echelon form; returns the pivot columns in order.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut pivot_row = 0;
        for col in 0..self.cols {
            if pivot_row == self.rows {
                break;
            }
            let Some(src) = (pivot_row..self.rows).find(|&r| !self.get(r, col).is_zero()) else {
                continue;
            };
            if src != pivot_row {
                for j in 0..self.cols {
                    self.data
                        .swap(src * self.cols + j, pivot_row * self.cols + j);
                }
            }
            let inv = scalar::one() / self.get(pivot_row, col).clone();
            for j in col..self.cols {
                let v = self.get(pivot_row, j) * &inv;
                self.set(pivot_row, j, v);
            }
            for r in 0..self.rows {
                if r != pivot_row && !self.get(r, col).is_zero() {
                    let factor = self.get(r, col).clone();
                    for j in col..self.cols {
                        let v = self.get(r, j) - self.get(pivot_row, j) * &factor;
                        self.set(r, j, v);
                    }
                }
            }
            pivots.push(col);
            pivot_row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Solve `A x = b`.  Returns the unique solution with all free variables
    /// set to zero, or `None` when the system is inconsistent.
    pub fn solve(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(b.len(), self.rows);
        let rhs = Matrix::from_columns(self.rows, &[b.to_vec()]);
        let mut aug = self.hstack(&rhs);
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![scalar::zero(); self.cols];
        for (row, &col) in pivots.iter().enumerate() {
            x[col] = aug.get(row, self.cols).clone();
        }
        Some(x)
    }

    /// Basis of the null space, one vector per free column, in column order.
    pub fn kernel_basis(&self) -> Vec<Vec<Scalar>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = vec![scalar::zero(); self.cols];
            v[free] = scalar::one();
            for (row, &col) in pivots.iter().enumerate() {
                v[col] = -m.get(row, free).clone();
            }
            basis.push(v);
        }
        basis
    }
}

/// Dimension of `span(a) intersect span(b)` where both are given by
/// spanning column vectors of length `rows`.
pub fn intersection_dim(rows: usize, a: &[Vec<Scalar>], b: &[Vec<Scalar>]) -> usize {
    let ma = Matrix::from_columns(rows, a);
    let mb = Matrix::from_columns(rows, b);
    let joint = ma.hstack(&mb).rank();
    ma.rank() + mb.rank() - joint
}

/// Select, in order, those vectors of `candidates` that are independent
/// modulo `span(baseline)`; the result is a deterministic set of coset
/// representatives for `span(candidates) / (span(candidates) n span(baseline))`.
pub fn representatives_mod(
    rows: usize,
    candidates: &[Vec<Scalar>],
    baseline: &[Vec<Scalar>],
) -> Vec<usize> {
    let mut chosen: Vec<Vec<Scalar>> = baseline.to_vec();
    let mut rank = Matrix::from_columns(rows, &chosen).rank();
    let mut picked = Vec::new();
    for (idx, cand) in candidates.iter().enumerate() {
        chosen.push(cand.clone());
        let new_rank = Matrix::from_columns(rows, &chosen).rank();
        if new_rank > rank {
            rank = new_rank;
            picked.push(idx);
        } else {
            chosen.pop();
        }
    }
    picked
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::from_i64;

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| from_i64(v)).collect())
                .collect(),
        )
    }

    #[test]
    fn rref_rank_kernel() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(a.rank(), 2);
        let kernel = a.kernel_basis();
        assert_eq!(kernel.len(), 1);
        // Check A k = 0.
        for i in 0..a.rows {
            let mut acc = from_i64(0);
            for j in 0..a.cols {
                acc += a.get(i, j) * &kernel[0][j];
            }
            assert!(acc.is_zero());
        }
    }

    #[test]
    fn solve_deterministic_free_vars_zero() {
        // x + y = 2 with free variable y: expect x = 2, y = 0.
        let a = m(&[&[1, 1]]);
        let x = a.solve(&[from_i64(2)]).unwrap();
        assert_eq!(x, vec![from_i64(2), from_i64(0)]);
        // Inconsistent system.
        let a = m(&[&[1, 1], &[1, 1]]);
        assert!(a.solve(&[from_i64(0), from_i64(1)]).is_none());
    }

    #[test]
    fn intersection_and_representatives() {
        let e1 = vec![from_i64(1), from_i64(0), from_i64(0)];
        let e2 = vec![from_i64(0), from_i64(1), from_i64(0)];
        let e12 = vec![from_i64(1), from_i64(1), from_i64(0)];
        let e3 = vec![from_i64(0), from_i64(0), from_i64(1)];
        assert_eq!(intersection_dim(3, &[e1.clone(), e2.clone()], &[e12.clone()]), 1);
        assert_eq!(intersection_dim(3, &[e1.clone()], &[e3.clone()]), 0);
        let picked = representatives_mod(3, &[e1.clone(), e2.clone(), e3.clone()], &[e12]);
        // e1 is new, e2 is dependent on {e12, e1}, e3 is new.
        assert_eq!(picked, vec![0, 2]);
    }
}

//! Dense linear algebra for `n <= MAX_DIM`.

#![allow(clippy::needless_range_loop)]

use core::fmt;

use alloc::vec::Vec;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::vector::MAX_DIM;
use crate::{Error, Result, Vector};

/// A square `n x n` matrix, row major.
#[derive(Clone, Copy, PartialEq)]
pub struct Matrix {
    rows: [[f64; MAX_DIM]; MAX_DIM],
    dim: usize,
}

impl Matrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || n > MAX_DIM {
            return Err(Error::invalid(alloc::format!("matrix size {n} outside 1..={MAX_DIM}")));
        }
        let mut m = Matrix::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::invalid(alloc::format!(
                    "matrix row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::invalid(alloc::format!("matrix entry ({i},{j}) not finite")));
                }
                m.rows[i][j] = v;
            }
        }
        Ok(m)
    }

    pub fn zeros(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim));
        Matrix {
            rows: [[0.0; MAX_DIM]; MAX_DIM],
            dim,
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Matrix::zeros(dim);
        for i in 0..dim {
            m.rows[i][i] = 1.0;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rows[i][j]
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        Vector::from_fn(self.dim, |i| {
            (0..self.dim).map(|j| self.rows[i][j] * v[j]).sum()
        })
    }

    /// `I + s A`.
    pub fn shifted_identity(&self, s: f64) -> Matrix {
        let mut m = Matrix::identity(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m.rows[i][j] += s * self.rows[i][j];
            }
        }
        m
    }

    /// Symmetric part `(A + A^T) / 2`.
    pub fn symmetric_part(&self) -> Matrix {
        let mut m = Matrix::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m.rows[i][j] = 0.5 * (self.rows[i][j] + self.rows[j][i]);
            }
        }
        m
    }

    /// Solves `A x = b` by Gaussian elimination with partial pivoting.
    pub fn solve(&self, b: &Vector) -> Result<Vector> {
        let n = self.dim;
        let mut a = self.rows;
        let mut rhs = *b;
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
                .unwrap();
            if a[piv][col].abs() < 1e-300 {
                return Err(Error::invalid("singular linear system"));
            }
            a.swap(col, piv);
            let (rc, rp) = (rhs[col], rhs[piv]);
            rhs.set(col, rp);
            rhs.set(piv, rc);
            for row in col + 1..n {
                let f = a[row][col] / a[col][col];
                if f != 0.0 {
                    for k in col..n {
                        a[row][k] -= f * a[col][k];
                    }
                    rhs.set(row, rhs[row] - f * rhs[col]);
                }
            }
        }
        let mut x = Vector::zeros(n);
        for row in (0..n).rev() {
            let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
            x.set(row, (rhs[row] - s) / a[row][row]);
        }
        Ok(x)
    }

    /// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
    pub fn symmetric_eigenvalues(&self) -> Vec<f64> {
        let n = self.dim;
        let mut a = self.symmetric_part().rows;
        for _sweep in 0..100 {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[i][j] * a[i][j])
                .sum();
            if off < 1e-30 {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    if a[p][q].abs() < 1e-300 {
                        continue;
                    }
                    let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                    let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                    let c = 1.0 / libm::sqrt(t * t + 1.0);
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[k][p];
                        let akq = a[k][q];
                        a[k][p] = c * akp - s * akq;
                        a[k][q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[p][k];
                        let aqk = a[q][k];
                        a[p][k] = c * apk - s * aqk;
                        a[q][k] = s * apk + c * aqk;
                    }
                }
            }
        }
        (0..n).map(|i| a[i][i]).collect()
    }

    /// Spectral norm bound `max_i sum_j |a_ij|` (infinity norm), cheap and
    /// sufficient for scaling heuristics.
    pub fn inf_norm(&self) -> f64 {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.rows[i][j].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries((0..self.dim).map(|i| &self.rows[i][..self.dim]))
            .finish()
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        let rows: Vec<&[f64]> = (0..self.dim).map(|i| &self.rows[i][..self.dim]).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        Matrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

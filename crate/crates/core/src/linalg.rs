//! Dense exact-rational matrices: products, determinants, linear solves and
//! an exact positive-semidefiniteness test by symmetric elimination.

use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{one, zero, Scalar};

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch {
                    expected: c,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * out.cols + j;
                        out.data[idx] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: other.rows,
            });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    /// Off-diagonal positions holding nonzero entries.
    pub fn off_diagonal_support(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                if i != j && !self.get(i, j).is_zero() {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn kronecker(&self, other: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.set(i * other.rows + k, j * other.cols + l, a * other.get(k, l));
                    }
                }
            }
        }
        out
    }

    /// Determinant by fraction-free elimination on rationals.
    pub fn determinant(&self) -> Result<Scalar> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: self.cols,
            });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !a.get(i, k).is_zero()) else {
                return Ok(zero());
            };
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                det = -det;
            }
            let pivot = a.get(k, k).clone();
            det *= &pivot;
            for i in k + 1..n {
                let f = a.get(i, k) / &pivot;
                if f.is_zero() {
                    continue;
                }
                for j in k..n {
                    let v = a.get(i, j) - &f * a.get(k, j);
                    a.set(i, j, v);
                }
            }
        }
        Ok(det)
    }

    /// Solves `self * x = b`. Returns `None` when the system is singular.
    pub fn solve(&self, b: &[Scalar]) -> Result<Option<Vec<Scalar>>> {
        if !self.is_square() || b.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: b.len(),
            });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut rhs = b.to_vec();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !a.get(i, k).is_zero()) else {
                return Ok(None);
            };
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                rhs.swap(k, p);
            }
            let pivot = a.get(k, k).clone();
            for i in 0..n {
                if i == k {
                    continue;
                }
                let f = a.get(i, k) / &pivot;
                if f.is_zero() {
                    continue;
                }
                for j in k..n {
                    let v = a.get(i, j) - &f * a.get(k, j);
                    a.set(i, j, v);
                }
                let r = &rhs[i] - &f * &rhs[k];
                rhs[i] = r;
            }
        }
        Ok(Some((0..n).map(|i| &rhs[i] / a.get(i, i)).collect()))
    }

    /// Exact PSD decision for a symmetric matrix by LDLᵀ-style elimination.
    /// A zero pivot is admissible only if its whole remaining row vanishes.
    pub fn is_positive_semidefinite(&self) -> Result<bool> {
        if !self.is_symmetric() {
            return Err(Error::Precondition(
                "PSD test requires a symmetric matrix".into(),
            ));
        }
        let n = self.rows;
        let mut a = self.clone();
        for k in 0..n {
            let pivot = a.get(k, k).clone();
            if pivot.is_negative() {
                return Ok(false);
            }
            if pivot.is_zero() {
                if (k + 1..n).any(|j| !a.get(k, j).is_zero()) {
                    return Ok(false);
                }
                continue;
            }
            for i in k + 1..n {
                let f = a.get(i, k) / &pivot;
                if f.is_zero() {
                    continue;
                }
                for j in k + 1..n {
                    let v = a.get(i, j) - &f * a.get(k, j);
                    a.set(i, j, v);
                }
            }
        }
        Ok(true)
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| crate::scalar::format_rational(self.get(i, j)))
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| int(v)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn psd_decisions() {
        assert!(m(&[&[2, 1], &[1, 2]]).is_positive_semidefinite().unwrap());
        assert!(m(&[&[1, 1], &[1, 1]]).is_positive_semidefinite().unwrap());
        assert!(!m(&[&[1, 2], &[2, 1]]).is_positive_semidefinite().unwrap());
        assert!(!m(&[&[0, 1], &[1, 0]]).is_positive_semidefinite().unwrap());
        assert!(m(&[&[0, 0], &[0, 0]]).is_positive_semidefinite().unwrap());
        assert!(!m(&[&[-1]]).is_positive_semidefinite().unwrap());
        assert!(m(&[&[1, 2], &[3, 4]]).is_positive_semidefinite().is_err());
    }

    #[test]
    fn determinant_and_solve() {
        let a = m(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert_eq!(a.determinant().unwrap(), int(18));
        let x = a.solve(&[int(3), int(5), int(5)]).unwrap().unwrap();
        assert_eq!(x, vec![int(1), int(1), int(1)]);
        assert!(m(&[&[1, 2], &[2, 4]])
            .solve(&[int(1), int(2)])
            .unwrap()
            .is_none());
    }

    #[test]
    fn kronecker_of_identities() {
        let k = Matrix::identity(2).kronecker(&Matrix::identity(3));
        assert_eq!(k, Matrix::identity(6));
    }
}

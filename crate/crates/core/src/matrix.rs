use std::fmt;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fourti2::{self, Table};
use crate::scalar::{dot, LatticeInt};

/// Dense integer matrix, row-major, at least 1×1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: LatticeInt> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension { expected: rows * cols, found: data.len() });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let t = Table::from_rows(cols, rows)?;
        Matrix::new(t.rows, t.cols, t.data)
    }

    /// Builds from `i64` rows; convenient for literals in any scalar type.
    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<Self> {
        let converted = rows
            .iter()
            .map(|r| r.iter().map(|&v| T::from_i64_c(v)).collect::<Result<Vec<T>>>())
            .collect::<Result<Vec<_>>>()?;
        Matrix::from_rows(&converted)
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Matrix::new(rows, cols, vec![T::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Matrix::zeros(n, n)?;
        for i in 0..n {
            m.set(i, i, T::one());
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j));
            }
        }
        Matrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn mul(&self, rhs: &Matrix<T>) -> Result<Matrix<T>> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension { expected: self.cols, found: rhs.rows });
        }
        let rt = rhs.transpose();
        let mut data = Vec::with_capacity(self.rows * rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                data.push(dot(self.row(i), rt.row(j))?);
            }
        }
        Matrix::new(self.rows, rhs.cols, data)
    }

    /// `A·v`.
    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.cols {
            return Err(Error::Dimension { expected: self.cols, found: v.len() });
        }
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// `A·v == 0`, with overflow reported rather than treated as nonzero.
    pub fn annihilates(&self, v: &[T]) -> Result<bool> {
        Ok(self.mul_vec(v)?.iter().all(|x| x.is_zero()))
    }

    /// Determinant by fraction-free elimination; square matrices only.
    pub fn determinant(&self) -> Result<T> {
        if self.rows != self.cols {
            return Err(Error::Dimension { expected: self.rows, found: self.cols });
        }
        let n = self.rows;
        let mut a = self.to_rows();
        let mut sign = T::one();
        let mut prev = T::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
                return Ok(T::zero());
            };
            if p != k {
                a.swap(p, k);
                sign = sign.neg_c()?;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = a[i][j].mul_c(a[k][k])?.sub_c(a[i][k].mul_c(a[k][j])?)?;
                    a[i][j] = num.div_c(prev)?;
                }
                a[i][k] = T::zero();
            }
            prev = a[k][k];
        }
        sign.mul_c(a[n - 1][n - 1])
    }

    /// Keeps the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Matrix<T>> {
        let mut data = Vec::with_capacity(self.rows * cols.len());
        for i in 0..self.rows {
            for &j in cols {
                if j >= self.cols {
                    return Err(Error::Dimension { expected: self.cols, found: j });
                }
                data.push(self.get(i, j));
            }
        }
        Matrix::new(self.rows, cols.len(), data)
    }

    /// Converts every entry to another scalar type, failing on overflow.
    pub fn try_cast<U: LatticeInt>(&self) -> Result<Matrix<U>> {
        let data = self
            .data
            .iter()
            .map(|v| v.to_i128().and_then(U::from).ok_or(Error::Overflow))
            .collect::<Result<Vec<U>>>()?;
        Matrix::new(self.rows, self.cols, data)
    }

    pub fn to_table(&self) -> Table<T> {
        Table { rows: self.rows, cols: self.cols, data: self.data.clone() }
    }

    pub fn from_table(t: Table<T>) -> Result<Self> {
        Matrix::new(t.rows, t.cols, t.data)
    }

    pub fn to_4ti2(&self) -> String {
        fourti2::format(&self.to_table())
    }

    pub fn from_4ti2(text: &str) -> Result<Self> {
        Matrix::from_table(fourti2::parse(text)?)
    }

    /// Digest of the 4ti2 text; equal for equal matrices in any scalar type.
    pub fn fingerprint(&self) -> Fingerprint {
        let digest = Sha256::digest(self.to_4ti2().as_bytes());
        Fingerprint(hex::encode(&digest[..8]))
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{:>4?}", self.data[i * self.cols + j])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Short hex digest identifying a configuration matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct Fingerprint(pub String);

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

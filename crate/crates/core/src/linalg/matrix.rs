use std::fmt;
use std::ops::{Add, Mul};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{self, Q, Z};

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type IntegerMatrix = Matrix<Z>;
pub type RationalMatrix = Matrix<Q>;

impl<T: Clone + Zero> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Build from column vectors (all of the same length).
    pub fn from_cols(rows: usize, cols: &[Vec<T>]) -> Result<Self> {
        if cols.iter().any(|c| c.len() != rows) {
            return Err(Error::Dimension("column length mismatch".into()));
        }
        let mut m = Matrix::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, v) in c.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vec(&self, i: usize) -> Vec<T> {
        self.row(i).to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row_vec(i)).collect()
    }

    pub fn to_cols(&self) -> Vec<Vec<T>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        let cols: Vec<Vec<T>> = idx.iter().map(|&j| self.col(j)).collect();
        Matrix::from_cols(self.rows, &cols).expect("consistent shape")
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Matrix::from_rows(idx.iter().map(|&i| self.row_vec(i)).collect()).expect("consistent shape")
    }

    pub fn map<U, F: Fn(&T) -> U>(&self, f: F) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }
}

impl<T: Clone + Zero + One> Matrix<T> {
    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }
}

impl<T> Matrix<T>
where
    T: Clone + Zero,
    for<'a> &'a T: Mul<&'a T, Output = T> + Add<&'a T, Output = T>,
{
    pub fn matmul(&self, other: &Matrix<T>) -> Result<Matrix<T>> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = &out.data[i * other.cols + j] + &(a * other.get(k, j));
                    out.data[i * other.cols + j] = v;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.cols {
            return Err(Error::Dimension("vector length mismatch".into()));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(T::zero(), |acc, (a, b)| &acc + &(a * b)))
            .collect())
    }
}

impl IntegerMatrix {
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| num::int(v)).collect()).collect())
            .expect("rectangular input")
    }

    pub fn to_rational(&self) -> RationalMatrix {
        self.map(num::from_int)
    }
}

impl RationalMatrix {
    pub fn from_ratios(rows: &[&[(i64, i64)]]) -> Self {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&(n, d)| num::rat(n, d)).collect())
                .collect(),
        )
        .expect("rectangular input")
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|q| q.is_integer())
    }

    /// Integer matrix if every entry is integral.
    pub fn to_integer(&self) -> Option<IntegerMatrix> {
        self.is_integral().then(|| self.map(|q| q.to_integer()))
    }

    pub fn scale(&self, k: &Q) -> RationalMatrix {
        self.map(|q| q * k)
    }
}

impl<T: fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.data[i * self.cols + j])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

pub fn norm_sq(a: &[Q]) -> Q {
    dot(a, a)
}

/// Matrix JSON: `{"rows", "cols", "entries"}` with decimal or `p/q` strings.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<String>>,
}

impl From<&IntegerMatrix> for MatrixJson {
    fn from(m: &IntegerMatrix) -> Self {
        MatrixJson {
            rows: m.rows,
            cols: m.cols,
            entries: m
                .to_rows()
                .iter()
                .map(|r| r.iter().map(|v| v.to_string()).collect())
                .collect(),
        }
    }
}

impl From<&RationalMatrix> for MatrixJson {
    fn from(m: &RationalMatrix) -> Self {
        MatrixJson {
            rows: m.rows,
            cols: m.cols,
            entries: m
                .to_rows()
                .iter()
                .map(|r| r.iter().map(num::fmt_rational).collect())
                .collect(),
        }
    }
}

impl MatrixJson {
    fn check_shape(&self) -> Result<()> {
        if self.entries.len() != self.rows || self.entries.iter().any(|r| r.len() != self.cols) {
            return Err(Error::Parse(format!(
                "matrix JSON declares {}x{} but entries disagree",
                self.rows, self.cols
            )));
        }
        Ok(())
    }

    pub fn to_integer(&self) -> Result<IntegerMatrix> {
        self.check_shape()?;
        let rows = self
            .entries
            .iter()
            .map(|r| r.iter().map(|s| num::parse_integer(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        if self.rows == 0 {
            return Ok(Matrix::zeros(0, self.cols));
        }
        Matrix::from_rows(rows)
    }

    pub fn to_rational(&self) -> Result<RationalMatrix> {
        self.check_shape()?;
        let rows = self
            .entries
            .iter()
            .map(|r| r.iter().map(|s| num::parse_rational(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        if self.rows == 0 {
            return Ok(Matrix::zeros(0, self.cols));
        }
        Matrix::from_rows(rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matmul_and_transpose() {
        let a = IntegerMatrix::from_i64(&[&[1, 2, 3], &[4, 5, 6]]);
        let at = a.transpose();
        let g = a.matmul(&at).unwrap();
        assert_eq!(g, IntegerMatrix::from_i64(&[&[14, 32], &[32, 77]]));
        assert!(a.matmul(&a).is_err());
    }

    #[test]
    fn json_roundtrip_preserves_big_entries() {
        let big: Z = "123456789012345678901234567890".parse().unwrap();
        let m = Matrix::from_rows(vec![vec![big.clone(), num::int(-1)]]).unwrap();
        let j = MatrixJson::from(&m);
        let text = serde_json::to_string(&j).unwrap();
        assert!(text.contains("123456789012345678901234567890"));
        let back: MatrixJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_integer().unwrap(), m);
    }

    #[test]
    fn json_rejects_bad_shape() {
        let j = MatrixJson {
            rows: 2,
            cols: 2,
            entries: vec![vec!["1".into(), "2".into()]],
        };
        assert!(j.to_integer().is_err());
    }
}

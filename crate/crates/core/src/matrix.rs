//! Dense row-major matrices over a [`Scalar`].

use std::fmt::Write as _;

use serde::Serialize;

use crate::element::Element;
use crate::error::{CdError, Result};
use crate::scalar::{Rational, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

pub type RatMatrix = Matrix<Rational>;
pub type FloatMatrix = Matrix<f64>;

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = S::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(CdError::Precondition("ragged rows".into()));
        }
        Ok(Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Matrix whose columns are the coordinate vectors of `cols`.
    pub fn from_columns(cols: &[Element<S>]) -> Self {
        let n = cols.first().map_or(0, Element::dim);
        Self::from_fn(n, cols.len(), |i, j| cols[j].coords()[i].clone())
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

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(CdError::Precondition(format!(
                "shape mismatch {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.add(b)).collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.sub(b)).collect(),
        })
    }

    pub fn scale(&self, k: &S) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a.mul(k)).collect() }
    }

    pub fn neg(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(S::neg).collect() }
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(CdError::Precondition(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = out.data[idx].add(&a.mul(b));
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[S]) -> Result<Vec<S>> {
        if v.len() != self.cols {
            return Err(CdError::Precondition(format!("vector of length {} against {} columns", v.len(), self.cols)));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(S::zero(), |acc, (a, b)| acc.add(&a.mul(b))))
            .collect())
    }

    /// Applies the matrix to an element of matching dimension.
    pub fn apply_element(&self, x: &Element<S>) -> Result<Element<S>> {
        Element::from_coords(x.level(), self.apply(x.coords())?)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(S::is_zero)
    }

    /// `M + M^T = 0`.
    pub fn is_skew_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (i..self.cols).all(|j| self.get(i, j).add(self.get(j, i)).is_zero()))
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Square block matrix `((tl, tr), (bl, br))`.
    pub fn block2(tl: &Self, tr: &Self, bl: &Self, br: &Self) -> Result<Self> {
        let n = tl.rows;
        for m in [tl, tr, bl, br] {
            if m.rows != n || m.cols != n {
                return Err(CdError::Precondition("blocks must be equal squares".into()));
            }
        }
        Ok(Self::from_fn(2 * n, 2 * n, |i, j| {
            let src = match (i < n, j < n) {
                (true, true) => tl,
                (true, false) => tr,
                (false, true) => bl,
                (false, false) => br,
            };
            src.get(i % n, j % n).clone()
        }))
    }

    pub fn to_f64(&self) -> FloatMatrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(S::to_f64).collect() }
    }

    /// Plain-text grid, one row per line, entries separated by a single space.
    pub fn to_text_grid(&self) -> String
    where
        S: std::fmt::Display,
    {
        let mut out = String::new();
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }
}

impl RatMatrix {
    /// Nested arrays of rational strings.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            (0..self.rows)
                .map(|i| {
                    serde_json::Value::Array(
                        self.row(i).iter().map(|v| serde_json::Value::String(v.to_string())).collect(),
                    )
                })
                .collect(),
        )
    }
}

impl FloatMatrix {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.to_rows()).expect("finite matrix")
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// JSON-friendly wrapper used by the command-line front end.
#[derive(Serialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: serde_json::Value,
}

impl From<&RatMatrix> for MatrixJson {
    fn from(m: &RatMatrix) -> Self {
        Self { rows: m.rows, cols: m.cols, entries: m.to_json() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn m(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| rat(v, 1)).collect()).collect()).unwrap()
    }

    #[test]
    fn multiply_and_transpose() {
        let a = m(&[&[1, 2], &[3, 4]]);
        let b = m(&[&[0, 1], &[1, 0]]);
        assert_eq!(a.try_mul(&b).unwrap(), m(&[&[2, 1], &[4, 3]]));
        assert_eq!(a.transpose(), m(&[&[1, 3], &[2, 4]]));
        assert!(a.try_mul(&m(&[&[1, 2, 3]])).is_err());
    }

    #[test]
    fn symmetry_predicates() {
        assert!(m(&[&[0, -2], &[2, 0]]).is_skew_symmetric());
        assert!(!m(&[&[1, -2], &[2, 0]]).is_skew_symmetric());
        assert!(m(&[&[1, 5], &[5, 0]]).is_symmetric());
    }

    #[test]
    fn block_assembly() {
        let i = RatMatrix::identity(1);
        let z = RatMatrix::zeros(1, 1);
        let b = RatMatrix::block2(&z, &i.neg(), &i, &z).unwrap();
        assert_eq!(b, m(&[&[0, -1], &[1, 0]]));
    }

    #[test]
    fn text_grid() {
        let a = RatMatrix::from_rows(vec![vec![rat(1, 2), rat(0, 1)], vec![rat(-3, 1), rat(1, 1)]]).unwrap();
        assert_eq!(a.to_text_grid(), "1/2 0\n-3 1\n");
        assert_eq!(a.to_json(), serde_json::json!([["1/2", "0"], ["-3", "1"]]));
    }
}

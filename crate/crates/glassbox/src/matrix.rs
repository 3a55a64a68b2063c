//! Column-major dense matrix used throughout training and explanation.

use crate::error::{Error, Result};

/// Dense numeric matrix stored column-major. Columns are cheap to slice,
/// which is what histogram training, SMOTE neighbor search, and the
/// explainers all want.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n_rows: usize,
    cols: Vec<Vec<f64>>,
}

impl Matrix {
    pub fn from_columns(cols: Vec<Vec<f64>>) -> Result<Matrix> {
        let n_rows = cols.first().map_or(0, |c| c.len());
        if cols.iter().any(|c| c.len() != n_rows) {
            return Err(Error::Data("matrix columns have differing lengths".into()));
        }
        Ok(Matrix { n_rows, cols })
    }

    /// Build from row-major data.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Matrix> {
        let n_cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::Data("matrix rows have differing lengths".into()));
        }
        let mut cols = vec![Vec::with_capacity(rows.len()); n_cols];
        for row in rows {
            for (j, v) in row.iter().enumerate() {
                cols[j].push(*v);
            }
        }
        Ok(Matrix {
            n_rows: rows.len(),
            cols,
        })
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Matrix {
        Matrix {
            n_rows,
            cols: vec![vec![0.0; n_rows]; n_cols],
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn col(&self, j: usize) -> &[f64] {
        &self.cols[j]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.cols[j]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.cols[j][i]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.cols[j][i] = v;
    }

    /// Copy row `i` into a fresh vector.
    pub fn row(&self, i: usize) -> Vec<f64> {
        self.cols.iter().map(|c| c[i]).collect()
    }

    /// New matrix containing the given rows, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let cols = self
            .cols
            .iter()
            .map(|c| idx.iter().map(|&i| c[i]).collect())
            .collect();
        Matrix {
            n_rows: idx.len(),
            cols,
        }
    }

    /// New matrix containing the given columns, in the given order.
    pub fn select_cols(&self, idx: &[usize]) -> Matrix {
        Matrix {
            n_rows: self.n_rows,
            cols: idx.iter().map(|&j| self.cols[j].clone()).collect(),
        }
    }

    /// Append the rows of `other` below `self`. Column counts must match.
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.n_cols() != other.n_cols() {
            return Err(Error::Data(format!(
                "vstack: column mismatch ({} vs {})",
                self.n_cols(),
                other.n_cols()
            )));
        }
        let cols = self
            .cols
            .iter()
            .zip(&other.cols)
            .map(|(a, b)| {
                let mut c = a.clone();
                c.extend_from_slice(b);
                c
            })
            .collect();
        Ok(Matrix {
            n_rows: self.n_rows + other.n_rows,
            cols,
        })
    }

    pub fn push_row(&mut self, row: &[f64]) {
        assert_eq!(row.len(), self.n_cols(), "row width mismatch");
        for (c, v) in self.cols.iter_mut().zip(row) {
            c.push(*v);
        }
        self.n_rows += 1;
    }
}

use serde::Serialize;

use crate::error::{Error, Result};

/// Dense finite window of an infinite matrix, stored row-major.
///
/// `triangular` marks a lower-triangular window; such windows keep every
/// entry above the diagonal at exactly zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixWindow {
    rows: usize,
    cols: usize,
    triangular: bool,
    data: Vec<f64>,
}

impl MatrixWindow {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        MatrixWindow {
            rows,
            cols,
            triangular: false,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::lower_zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Square zero window flagged as lower-triangular.
    pub fn lower_zeros(n: usize) -> Self {
        MatrixWindow {
            triangular: true,
            ..Self::zeros(n, n)
        }
    }

    /// Builds a window from row vectors. The window is flagged triangular when
    /// it is square and every entry above the diagonal is zero.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::invalid(
                "matrix",
                "matrix must have at least one row",
            ));
        }
        let cols = rows[0].len();
        if cols == 0 {
            return Err(Error::invalid(
                "matrix",
                "matrix must have at least one column",
            ));
        }
        let mut data = Vec::with_capacity(n * cols);
        for (j, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(Error::invalid(
                    "matrix",
                    format!("row {j} has {} entries, expected {cols}", row.len()),
                ));
            }
            if let Some(k) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::invalid(
                    "matrix",
                    format!("entry ({j}, {k}) is not finite"),
                ));
            }
            data.extend(row);
        }
        let mut m = MatrixWindow {
            rows: n,
            cols,
            triangular: false,
            data,
        };
        m.triangular = m.is_lower_triangular();
        Ok(m)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..rows {
            for k in 0..cols {
                data.push(f(j, k));
            }
        }
        let mut m = MatrixWindow {
            rows,
            cols,
            triangular: false,
            data,
        };
        m.triangular = m.is_lower_triangular();
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn triangular(&self) -> bool {
        self.triangular
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.data[j * self.cols + k]
    }

    pub(crate) fn set(&mut self, j: usize, k: usize, value: f64) {
        debug_assert!(!self.triangular || k <= j || value == 0.0);
        self.data[j * self.cols + k] = value;
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.data[j * self.cols..(j + 1) * self.cols]
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        (0..self.rows).map(|j| self.get(j, k)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|j| self.row(j).to_vec()).collect()
    }

    /// Largest absolute entry; 0 for an all-zero window.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn is_lower_triangular(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|j| self.row(j)[j + 1..].iter().all(|&v| v == 0.0))
    }

    /// Leading `rows × cols` block, clipped to the window size.
    pub fn leading_block(&self, rows: usize, cols: usize) -> MatrixWindow {
        let rows = rows.min(self.rows);
        let cols = cols.min(self.cols);
        MatrixWindow::from_fn(rows, cols, |j, k| self.get(j, k))
    }

    pub fn transpose(&self) -> MatrixWindow {
        MatrixWindow::from_fn(self.cols, self.rows, |j, k| self.get(k, j))
    }

    pub fn mul(&self, other: &MatrixWindow) -> Result<MatrixWindow> {
        if self.cols != other.rows {
            return Err(Error::invalid(
                "matrix",
                format!(
                    "cannot multiply {}x{} by {}x{}",
                    self.rows, self.cols, other.rows, other.cols
                ),
            ));
        }
        Ok(MatrixWindow::from_fn(self.rows, other.cols, |j, k| {
            (0..self.cols)
                .map(|v| self.get(j, v) * other.get(v, k))
                .sum()
        }))
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::invalid(
                "vector",
                format!("expected {} entries, got {}", self.cols, x.len()),
            ));
        }
        Ok((0..self.rows)
            .map(|j| self.row(j).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }
}

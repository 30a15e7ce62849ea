//! Small complex matrices for z-domain evaluation.

use super::{spectral_norm, Matrix};
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1);
        CMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn from_real(m: &Matrix) -> Self {
        CMatrix {
            rows: m.rows(),
            cols: m.cols(),
            data: m.data().iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn sub(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::dims(
                "cmatrix_sub",
                format!("{}x{} vs {}x{}", self.rows, self.cols, other.rows, other.cols),
            ));
        }
        Ok(CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Largest singular value, computed through the real 2r x 2c embedding
    /// `[[Re, -Im], [Im, Re]]`, whose spectrum duplicates the complex one.
    pub fn spectral_norm(&self) -> Result<f64> {
        let mut e = Matrix::zeros(2 * self.rows, 2 * self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let v = self.get(i, j);
                e.set(i, j, v.re);
                e.set(i, j + self.cols, -v.im);
                e.set(i + self.rows, j, v.im);
                e.set(i + self.rows, j + self.cols, v.re);
            }
        }
        spectral_norm(&e)
    }

    /// `real * self` with a real left factor.
    pub fn left_mul_real(&self, a: &Matrix) -> Result<CMatrix> {
        if a.cols() != self.rows {
            return Err(Error::dims(
                "left_mul_real",
                format!("{}x{} * {}x{}", a.rows(), a.cols(), self.rows, self.cols),
            ));
        }
        let mut out = CMatrix::zeros(a.rows(), self.cols);
        for i in 0..a.rows() {
            for k in 0..a.cols() {
                let aik = a.get(i, k);
                if aik == 0.0 {
                    continue;
                }
                for j in 0..self.cols {
                    let add = self.get(k, j) * aik;
                    let cur = out.get(i, j);
                    out.set(i, j, cur + add);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::dims(
                "cmatrix_add",
                format!("{}x{} vs {}x{}", self.rows, self.cols, other.rows, other.cols),
            ));
        }
        Ok(CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }
}

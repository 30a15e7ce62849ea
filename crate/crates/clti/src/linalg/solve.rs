//! LU factorization with partial pivoting, real and complex. Linear systems
//! are always resolved through a factorization; no explicit inverses.

use super::Matrix;
use crate::error::{Error, Result};
use num_complex::Complex64;

pub(crate) struct LuFactors {
    n: usize,
    lu: Vec<f64>,
    piv: Vec<usize>,
}

impl LuFactors {
    pub fn factor(a: &Matrix, context: &'static str) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NotSquare {
                rows: a.rows(),
                cols: a.cols(),
            });
        }
        let n = a.rows();
        let mut lu = a.data().to_vec();
        let mut piv: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut best = lu[k * n + k].abs();
            for i in (k + 1)..n {
                let v = lu[i * n + k].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(Error::Singular(context));
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                piv.swap(k, p);
            }
            let pivot = lu[k * n + k];
            for i in (k + 1)..n {
                let f = lu[i * n + k] / pivot;
                lu[i * n + k] = f;
                for j in (k + 1)..n {
                    lu[i * n + j] -= f * lu[k * n + j];
                }
            }
        }
        Ok(LuFactors { n, lu, piv })
    }

    /// Solve `A x = b` for every column of `b`.
    pub fn solve_matrix(&self, b: &Matrix) -> Result<Matrix> {
        if b.rows() != self.n {
            return Err(Error::dims(
                "lu_solve",
                format!("factor is {0}x{0}, rhs has {1} rows", self.n, b.rows()),
            ));
        }
        let n = self.n;
        let ncols = b.cols();
        let mut x = Matrix::zeros(n, ncols);
        let mut col = vec![0.0; n];
        for j in 0..ncols {
            for i in 0..n {
                col[i] = b.get(self.piv[i], j);
            }
            for i in 1..n {
                let mut acc = col[i];
                for k in 0..i {
                    acc -= self.lu[i * n + k] * col[k];
                }
                col[i] = acc;
            }
            for i in (0..n).rev() {
                let mut acc = col[i];
                for k in (i + 1)..n {
                    acc -= self.lu[i * n + k] * col[k];
                }
                col[i] = acc / self.lu[i * n + i];
            }
            for i in 0..n {
                x.set(i, j, col[i]);
            }
        }
        Ok(x)
    }
}

/// Complex LU with partial pivoting for resolvent solves.
pub(crate) struct CluFactors {
    n: usize,
    lu: Vec<Complex64>,
    piv: Vec<usize>,
}

impl CluFactors {
    pub fn factor(n: usize, data: &[Complex64], context: &'static str) -> Result<Self> {
        debug_assert_eq!(data.len(), n * n);
        let mut lu = data.to_vec();
        let mut piv: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut best = lu[k * n + k].norm_sqr();
            for i in (k + 1)..n {
                let v = lu[i * n + k].norm_sqr();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(Error::Singular(context));
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                piv.swap(k, p);
            }
            let pivot = lu[k * n + k];
            for i in (k + 1)..n {
                let f = lu[i * n + k] / pivot;
                lu[i * n + k] = f;
                for j in (k + 1)..n {
                    let sub = f * lu[k * n + j];
                    lu[i * n + j] -= sub;
                }
            }
        }
        Ok(CluFactors { n, lu, piv })
    }

    /// Solve for every column of a complex right-hand side held row-major.
    pub fn solve(&self, rhs_rows: usize, rhs_cols: usize, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
        if rhs_rows != self.n {
            return Err(Error::dims(
                "clu_solve",
                format!("factor is {0}x{0}, rhs has {rhs_rows} rows", self.n),
            ));
        }
        let n = self.n;
        let mut x = vec![Complex64::new(0.0, 0.0); n * rhs_cols];
        let mut col = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..rhs_cols {
            for i in 0..n {
                col[i] = rhs[self.piv[i] * rhs_cols + j];
            }
            for i in 1..n {
                let mut acc = col[i];
                for k in 0..i {
                    acc -= self.lu[i * n + k] * col[k];
                }
                col[i] = acc;
            }
            for i in (0..n).rev() {
                let mut acc = col[i];
                for k in (i + 1)..n {
                    acc -= self.lu[i * n + k] * col[k];
                }
                col[i] = acc / self.lu[i * n + i];
            }
            for i in 0..n {
                x[i * rhs_cols + j] = col[i];
            }
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::mat_mul;

    #[test]
    fn lu_solves_small_system() {
        let a = Matrix::from_vec(3, 3, vec![2.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 4.0]).unwrap();
        let b = Matrix::from_vec(3, 1, vec![1.0, 2.0, 3.0]).unwrap();
        let lu = LuFactors::factor(&a, "test").unwrap();
        let x = lu.solve_matrix(&b).unwrap();
        let back = mat_mul(&a, &x).unwrap();
        assert!(back.sub(&b).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn lu_reports_singularity() {
        let a = Matrix::from_vec(2, 2, vec![1.0, 2.0, 2.0, 4.0]).unwrap();
        assert!(matches!(
            LuFactors::factor(&a, "test"),
            Err(Error::Singular("test"))
        ));
    }

    #[test]
    fn complex_lu_roundtrip() {
        let n = 2;
        let a = vec![
            Complex64::new(1.0, 1.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(2.0, 0.0),
        ];
        let rhs = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)];
        let lu = CluFactors::factor(n, &a, "test").unwrap();
        let x = lu.solve(n, 1, &rhs).unwrap();
        // multiply back
        for i in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                acc += a[i * n + k] * x[k];
            }
            assert!((acc - rhs[i]).norm() < 1e-13);
        }
    }
}

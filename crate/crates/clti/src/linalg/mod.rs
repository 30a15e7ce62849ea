//! Dense real matrices and vectors plus the numerical kernels the rest of
//! the crate is built on: deterministic products, repeated squaring,
//! spectral norms and truncated SVD for block compression.
//!
//! Storage is IEEE-754 binary64 row-major throughout. Accumulations run in
//! plain ascending-index order so results are reproducible bit-for-bit.

mod complex;
mod expm;
mod solve;
mod svd;

pub use complex::CMatrix;
pub(crate) use expm::matrix_exp;
pub(crate) use solve::{CluFactors, LuFactors};

use crate::error::{Error, Result};

/// Dense row-major matrix of f64 entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// All-zero matrix. Dimensions must be at least 1x1.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be >= 1");
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Construct from a row-major buffer, validating length and finiteness.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(format!(
                "matrix dimensions must be >= 1, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::dims(
                "from_vec",
                format!("{rows}x{cols} needs {} entries, got {}", rows * cols, data.len()),
            ));
        }
        if let Some((index, &value)) = data.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidArgument("no rows given".into()));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::dims("from_rows", "ragged rows".to_string()));
        }
        Matrix::from_vec(rows.len(), cols, rows.concat())
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
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    /// Rectangular sub-block, rows `r0..r1`, cols `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Matrix {
        assert!(r0 < r1 && r1 <= self.rows && c0 < c1 && c1 <= self.cols);
        let mut b = Matrix::zeros(r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                b.data[(i - r0) * (c1 - c0) + (j - c0)] = self.get(i, j);
            }
        }
        b
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    fn zip_with(&self, other: &Matrix, op: &'static str, f: impl Fn(f64, f64) -> f64) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::dims(
                op,
                format!("{}x{} vs {}x{}", self.rows, self.cols, other.rows, other.cols),
            ));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Largest column sum of absolute values.
    pub fn one_norm(&self) -> f64 {
        let mut best = 0.0f64;
        for j in 0..self.cols {
            let mut s = 0.0;
            for i in 0..self.rows {
                s += self.get(i, j).abs();
            }
            best = best.max(s);
        }
        best
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).collect()
    }

    /// Exact-zero test of the strictly upper part.
    pub fn is_lower_triangular(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if self.get(i, j) != 0.0 {
                    return false;
                }
            }
        }
        true
    }

    /// Exact-zero test of the strictly lower part.
    pub fn is_upper_triangular(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        for i in 1..self.rows {
            for j in 0..i.min(self.cols) {
                if self.get(i, j) != 0.0 {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_triangular(&self) -> bool {
        self.is_lower_triangular() || self.is_upper_triangular()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }
}

/// Dense vector of f64 entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    data: Vec<f64>,
}

impl Vector {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "vector dimension must be >= 1");
        Vector { data: vec![0.0; dim] }
    }

    pub fn from_vec(data: Vec<f64>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::InvalidArgument("vector dimension must be >= 1".into()));
        }
        if let Some((index, &value)) = data.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Vector { data })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        self.data[i]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Dense product `a * b`.
///
/// Per-entry accumulation runs over the inner index in ascending order, so
/// the result is deterministic.
pub fn mat_mul(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.cols != b.rows {
        return Err(Error::dims(
            "mat_mul",
            format!("{}x{} * {}x{}", a.rows, a.cols, b.rows, b.cols),
        ));
    }
    let mut out = Matrix::zeros(a.rows, b.cols);
    let n = b.cols;
    for i in 0..a.rows {
        let arow = a.row(i);
        let orow = &mut out.data[i * n..(i + 1) * n];
        for (k, &aik) in arow.iter().enumerate() {
            if aik == 0.0 {
                continue;
            }
            let brow = b.row(k);
            for j in 0..n {
                orow[j] += aik * brow[j];
            }
        }
    }
    Ok(out)
}

/// Dense matrix-vector product `a * x`.
pub fn mat_vec(a: &Matrix, x: &Vector) -> Result<Vector> {
    if a.cols != x.dim() {
        return Err(Error::dims(
            "mat_vec",
            format!("{}x{} * vector of dim {}", a.rows, a.cols, x.dim()),
        ));
    }
    let mut out = Vector::zeros(a.rows);
    mat_vec_into(a, x.as_slice(), &mut out.data);
    Ok(out)
}

/// Slice-level matvec used on hot paths; `out` is overwritten.
#[inline]
pub(crate) fn mat_vec_into(a: &Matrix, x: &[f64], out: &mut [f64]) {
    debug_assert_eq!(a.cols, x.len());
    debug_assert_eq!(a.rows, out.len());
    for (i, o) in out.iter_mut().enumerate() {
        let row = a.row(i);
        let mut acc = 0.0;
        for (av, xv) in row.iter().zip(x) {
            acc += av * xv;
        }
        *o = acc;
    }
}

/// Powers `[a, a^2, a^4, ..., a^(2^(count-1))]` by successive squaring.
pub fn repeated_squares(a: &Matrix, count: usize) -> Result<Vec<Matrix>> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    if count == 0 {
        return Err(Error::InvalidArgument("repeated_squares needs count >= 1".into()));
    }
    let mut out = Vec::with_capacity(count);
    out.push(a.clone());
    for _ in 1..count {
        let last = out.last().unwrap();
        out.push(mat_mul(last, last)?);
    }
    Ok(out)
}

/// Largest singular value.
///
/// Power iteration on the Gram operator with a Jacobi-SVD fallback when the
/// iteration stalls; accurate to well inside 1e-10 relative either way.
pub fn spectral_norm(a: &Matrix) -> Result<f64> {
    if a.is_zero() {
        return Ok(0.0);
    }
    // Scale into a safe range so squaring inside the Gram product cannot
    // overflow or flush tiny matrices to zero.
    let scale = a.max_abs();
    let w = a.scale(1.0 / scale);
    if let Some(sigma) = gram_power_iteration(&w) {
        return Ok(sigma * scale);
    }
    let (_, s, _) = svd::jacobi_svd(&w)?;
    Ok(s.first().copied().unwrap_or(0.0) * scale)
}

fn gram_power_iteration(a: &Matrix) -> Option<f64> {
    let n = a.cols;
    let at = a.transpose();
    // Deterministic, mildly uneven start vector.
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64) / (2.0 * n as f64)).collect();
    let mut tmp = vec![0.0; a.rows];
    let mut y = vec![0.0; n];
    let mut prev = f64::INFINITY;
    let mut stable = 0;
    for _ in 0..20_000 {
        mat_vec_into(a, &x, &mut tmp);
        mat_vec_into(&at, &tmp, &mut y);
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Some(0.0);
        }
        let sigma_sq = y.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>()
            / x.iter().map(|v| v * v).sum::<f64>();
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / norm;
        }
        if (sigma_sq - prev).abs() <= 1e-14 * sigma_sq.abs().max(f64::MIN_POSITIVE) {
            stable += 1;
            if stable >= 3 {
                return Some(sigma_sq.max(0.0).sqrt());
            }
        } else {
            stable = 0;
        }
        prev = sigma_sq;
    }
    None
}

/// Truncated singular value decomposition of a block.
#[derive(Debug, Clone)]
pub struct TruncatedSvd {
    /// Left singular vectors, `rows x rank`.
    pub u: Matrix,
    /// Singular values, descending, length `rank`.
    pub s: Vec<f64>,
    /// Right singular vectors, `cols x rank`.
    pub v: Matrix,
    /// Number of singular values kept: those strictly above `tol * sigma_max`.
    pub rank: usize,
}

impl TruncatedSvd {
    /// Dense `u * diag(s) * v^T`, or the zero block when rank is 0.
    pub fn reconstruct(&self, rows: usize, cols: usize) -> Matrix {
        let mut out = Matrix::zeros(rows, cols);
        for k in 0..self.rank {
            for i in 0..rows {
                let uik = self.u.get(i, k) * self.s[k];
                for j in 0..cols {
                    out.data[i * cols + j] += uik * self.v.get(j, k);
                }
            }
        }
        out
    }
}

/// SVD truncated at `tol` relative to the largest singular value.
///
/// Keeps singular values strictly greater than `tol * sigma_max`; the dropped
/// tail satisfies `|a - u s v^T|_2 <= tol * sigma_max`.
pub fn block_svd(a: &Matrix, tol: f64) -> Result<TruncatedSvd> {
    if tol < 0.0 {
        return Err(Error::InvalidArgument(format!("block_svd tol must be >= 0, got {tol}")));
    }
    let (u, s, v) = svd::jacobi_svd(a)?;
    let sigma_max = s.first().copied().unwrap_or(0.0);
    let rank = if sigma_max == 0.0 {
        0
    } else {
        s.iter().take_while(|&&sv| sv > tol * sigma_max).count()
    };
    let take_cols = |m: &Matrix, k: usize| -> Matrix {
        if k == 0 {
            Matrix::zeros(m.rows, 1)
        } else {
            m.block(0, m.rows, 0, k)
        }
    };
    Ok(TruncatedSvd {
        u: take_cols(&u, rank),
        s: s[..rank].to_vec(),
        v: take_cols(&v, rank),
        rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn mat2(a: f64, b: f64, c: f64, d: f64) -> Matrix {
        Matrix::from_vec(2, 2, vec![a, b, c, d]).unwrap()
    }

    #[test]
    fn mat_mul_identity_left() {
        let m = mat2(0.3, -1.2, 7.0, 0.25);
        let out = mat_mul(&Matrix::identity(2), &m).unwrap();
        assert_eq!(out, m);
    }

    #[test]
    fn mat_mul_scalar_case() {
        let a = Matrix::from_vec(1, 1, vec![0.5]).unwrap();
        let out = mat_mul(&a, &a).unwrap();
        assert_eq!(out.get(0, 0), 0.25);
    }

    #[test]
    fn mat_mul_hand_example() {
        let a = mat2(1.0, 1.0, 0.0, 1.0);
        let out = mat_mul(&a, &a).unwrap();
        assert_eq!(out, mat2(1.0, 2.0, 0.0, 1.0));
    }

    #[test]
    fn mat_mul_dimension_mismatch() {
        let a = Matrix::zeros(2, 3);
        let b = Matrix::zeros(2, 3);
        assert!(matches!(mat_mul(&a, &b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn mat_vec_identity_and_zero() {
        let x = Vector::from_vec(vec![1.0, 2.0, 3.0]).unwrap();
        let y = mat_vec(&Matrix::identity(3), &x).unwrap();
        assert_eq!(y, x);
        let z = mat_vec(&Matrix::zeros(3, 3), &x).unwrap();
        assert!(z.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn mat_vec_hand_example() {
        let a = mat2(2.0, 0.0, 1.0, 1.0);
        let x = Vector::from_vec(vec![1.0, 1.0]).unwrap();
        let y = mat_vec(&a, &x).unwrap();
        assert_eq!(y.data(), &[2.0, 2.0]);
    }

    #[test]
    fn repeated_squares_identity() {
        let pows = repeated_squares(&Matrix::identity(3), 4).unwrap();
        assert_eq!(pows.len(), 4);
        for p in &pows {
            assert_eq!(*p, Matrix::identity(3));
        }
    }

    #[test]
    fn repeated_squares_contraction_scalar() {
        // 16 squarings of the leading eigenvalue of the m=100 test system.
        let a = Matrix::from_vec(1, 1, vec![0.999000499750125]).unwrap();
        let pows = repeated_squares(&a, 16).unwrap();
        let last = pows[15].get(0, 0);
        assert_relative_eq!(last, 5.87548e-15, max_relative = 1e-4);
    }

    #[test]
    fn repeated_squares_rejects_rectangular() {
        assert!(matches!(
            repeated_squares(&Matrix::zeros(2, 3), 2),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn repeated_squares_triangular_diagonal_is_scalar_powers() {
        let a = crate::lti::hippo_matrix(9);
        let m = a.rows();
        let delta = 0.5e-3;
        let sys = crate::lti::ContinuousLti::new(
            a,
            Matrix::zeros(m, 1),
            Matrix::zeros(1, m),
            Matrix::zeros(1, 1),
        )
        .unwrap();
        let disc = crate::lti::discretize_bilinear(&sys, delta).unwrap();
        let pows = repeated_squares(disc.abar(), 6).unwrap();
        let diag0 = disc.abar().diag();
        for (s, p) in pows.iter().enumerate() {
            assert!(p.is_lower_triangular());
            let e = 1u64 << s;
            for (d, d0) in p.diag().iter().zip(&diag0) {
                // Diagonal of a triangular power is the elementwise power.
                let expect = d0.powi(e as i32);
                assert_relative_eq!(*d, expect, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn spectral_norm_diagonal() {
        let a = mat2(0.5, 0.0, 0.0, 0.9);
        assert_relative_eq!(spectral_norm(&a).unwrap(), 0.9, max_relative = 1e-12);
    }

    #[test]
    fn spectral_norm_zero() {
        assert_eq!(spectral_norm(&Matrix::zeros(4, 4)).unwrap(), 0.0);
    }

    #[test]
    fn spectral_norm_nilpotent() {
        let a = mat2(0.0, 1.0, 0.0, 0.0);
        assert_relative_eq!(spectral_norm(&a).unwrap(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn block_svd_rank_one_outer_product() {
        let u = [1.0, -2.0, 0.5];
        let v = [0.3, 0.7];
        let mut a = Matrix::zeros(3, 2);
        for i in 0..3 {
            for j in 0..2 {
                a.set(i, j, u[i] * v[j]);
            }
        }
        let svd = block_svd(&a, 1e-12).unwrap();
        assert_eq!(svd.rank, 1);
    }

    #[test]
    fn block_svd_zero_block() {
        let svd = block_svd(&Matrix::zeros(4, 4), 1e-12).unwrap();
        assert_eq!(svd.rank, 0);
        assert!(svd.reconstruct(4, 4).is_zero());
    }

    #[test]
    fn block_svd_full_rank_reconstruction() {
        // Deterministic "random-looking" 8x8 block.
        let mut a = Matrix::zeros(8, 8);
        let mut state = 0x9e3779b97f4a7c15u64;
        for i in 0..8 {
            for j in 0..8 {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let r = ((state >> 11) as f64) / ((1u64 << 53) as f64);
                a.set(i, j, 2.0 * r - 1.0);
            }
        }
        let svd = block_svd(&a, 0.0).unwrap();
        let rec = svd.reconstruct(8, 8);
        let sigma = spectral_norm(&a).unwrap();
        let resid = spectral_norm(&a.sub(&rec).unwrap()).unwrap();
        assert!(resid <= 1e-13 * sigma, "resid {resid:.3e} sigma {sigma:.3e}");
    }

    #[test]
    fn from_vec_rejects_non_finite() {
        let out = Matrix::from_vec(1, 2, vec![1.0, f64::NAN]);
        assert!(matches!(out, Err(Error::NonFinite { index: 1, .. })));
    }

    proptest! {
        #[test]
        fn mat_mul_associative_to_tolerance(seed in 0u64..500) {
            let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
            let mut next = || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                2.0 * (((state >> 11) as f64) / ((1u64 << 53) as f64)) - 1.0
            };
            let rand_mat = |next: &mut dyn FnMut() -> f64| {
                let data: Vec<f64> = (0..64).map(|_| next()).collect();
                Matrix::from_vec(8, 8, data).unwrap()
            };
            let a = rand_mat(&mut next);
            let b = rand_mat(&mut next);
            let c = rand_mat(&mut next);
            let lhs = mat_mul(&mat_mul(&a, &b).unwrap(), &c).unwrap();
            let rhs = mat_mul(&a, &mat_mul(&b, &c).unwrap()).unwrap();
            let diff = spectral_norm(&lhs.sub(&rhs).unwrap()).unwrap();
            let scale = spectral_norm(&a).unwrap() * spectral_norm(&b).unwrap() * spectral_norm(&c).unwrap();
            prop_assert!(diff <= 1e-12 * scale);
        }

        #[test]
        fn repeated_squares_matches_iterated_products(seed in 0u64..200, k in 1usize..=6) {
            let mut state = seed.wrapping_mul(0x2545f4914f6cdd1d).wrapping_add(7);
            let mut next = || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                2.0 * (((state >> 11) as f64) / ((1u64 << 53) as f64)) - 1.0
            };
            let data: Vec<f64> = (0..16).map(|_| next()).collect();
            let raw = Matrix::from_vec(4, 4, data).unwrap();
            let sigma = spectral_norm(&raw).unwrap();
            let a = if sigma > 0.9 { raw.scale(0.9 / sigma) } else { raw };
            let pows = repeated_squares(&a, k + 1).unwrap();
            // 2^k - 1 extra multiplications starting from a.
            let mut direct = a.clone();
            for _ in 1..(1u64 << k) {
                direct = mat_mul(&direct, &a).unwrap();
            }
            let err = pows[k].sub(&direct).unwrap().max_abs();
            let scale = direct.max_abs().max(1e-300);
            prop_assert!(err <= 1e-12 * scale.max(1.0));
        }

        #[test]
        fn spectral_norm_dominates_triangular_eigenvalues(seed in 0u64..300) {
            let mut state = seed.wrapping_mul(0xd1342543de82ef95).wrapping_add(3);
            let mut next = || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                2.0 * (((state >> 11) as f64) / ((1u64 << 53) as f64)) - 1.0
            };
            let n = 5;
            let mut a = Matrix::zeros(n, n);
            for i in 0..n {
                for j in 0..=i {
                    a.set(i, j, next());
                }
            }
            let sigma = spectral_norm(&a).unwrap();
            for &lambda in &a.diag() {
                prop_assert!(sigma >= lambda.abs() - 1e-12 * sigma.max(1.0));
            }
        }
    }
}

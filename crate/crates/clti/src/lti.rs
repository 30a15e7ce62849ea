//! State-space model construction, discretization and z-domain evaluation.
//!
//! A continuous model `x' = A x + B u`, `y = C x + D u` is discretized with
//! step `delta` either by the trapezoidal (bilinear) rule,
//! `Abar = (I - d/2 A)^-1 (I + d/2 A)`, `Bbar = d (I - d/2 A)^-1 B`, or by the
//! exponential rule `Abar = exp(d A)` with zero-order-hold
//! `Bbar = A^-1 (exp(d A) - I) B`. The discrete model's transfer function
//! `H(z) = C (I - z^-1 Abar)^-1 Bbar + D` can be evaluated exactly through a
//! resolvent solve or through its truncated cascade factorization
//! `C prod_{s<S} (I + (z^-1 Abar)^(2^s)) Bbar + D` of polynomial degree
//! `2^S - 1`.

use crate::error::{Error, Result};
use crate::linalg::{
    mat_mul, matrix_exp, repeated_squares, spectral_norm, CMatrix, CluFactors, LuFactors, Matrix,
};
use num_complex::Complex64;

/// Discretization rule used to produce a [`DiscreteLti`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Bilinear,
    Exponential,
}

impl Scheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::Bilinear => "bilinear",
            Scheme::Exponential => "exponential",
        }
    }

    pub fn parse(s: &str) -> Result<Scheme> {
        match s {
            "bilinear" => Ok(Scheme::Bilinear),
            "exponential" => Ok(Scheme::Exponential),
            other => Err(Error::InvalidArgument(format!("unknown scheme '{other}'"))),
        }
    }
}

/// Continuous-time system `(A, B, C, D)` with `A` m-by-m, `B` m-by-p,
/// `C` q-by-m, `D` q-by-p and `1 <= p, q <= m`.
#[derive(Debug, Clone)]
pub struct ContinuousLti {
    a: Matrix,
    b: Matrix,
    c: Matrix,
    d: Matrix,
}

impl ContinuousLti {
    pub fn new(a: Matrix, b: Matrix, c: Matrix, d: Matrix) -> Result<Self> {
        let m = a.rows();
        if !a.is_square() {
            return Err(Error::NotSquare {
                rows: a.rows(),
                cols: a.cols(),
            });
        }
        let (p, q) = (b.cols(), c.rows());
        if b.rows() != m || c.cols() != m || d.rows() != q || d.cols() != p {
            return Err(Error::dims(
                "continuous_lti",
                format!(
                    "A {m}x{m}, B {}x{}, C {}x{}, D {}x{}",
                    b.rows(),
                    b.cols(),
                    c.rows(),
                    c.cols(),
                    d.rows(),
                    d.cols()
                ),
            ));
        }
        if p > m || q > m {
            return Err(Error::dims(
                "continuous_lti",
                format!("need 1 <= p,q <= m, got p={p}, q={q}, m={m}"),
            ));
        }
        Ok(ContinuousLti { a, b, c, d })
    }

    pub fn state_dim(&self) -> usize {
        self.a.rows()
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn c(&self) -> &Matrix {
        &self.c
    }

    pub fn d(&self) -> &Matrix {
        &self.d
    }
}

/// Discrete-time system `(Abar, Bbar, C, D)` with step `delta`.
#[derive(Debug, Clone)]
pub struct DiscreteLti {
    abar: Matrix,
    bbar: Matrix,
    c: Matrix,
    d: Matrix,
    delta: f64,
    scheme: Scheme,
}

impl DiscreteLti {
    pub fn new(
        abar: Matrix,
        bbar: Matrix,
        c: Matrix,
        d: Matrix,
        delta: f64,
        scheme: Scheme,
    ) -> Result<Self> {
        if !abar.is_square() {
            return Err(Error::NotSquare {
                rows: abar.rows(),
                cols: abar.cols(),
            });
        }
        let m = abar.rows();
        let (p, q) = (bbar.cols(), c.rows());
        if bbar.rows() != m || c.cols() != m || d.rows() != q || d.cols() != p {
            return Err(Error::dims(
                "discrete_lti",
                format!(
                    "Abar {m}x{m}, Bbar {}x{}, C {}x{}, D {}x{}",
                    bbar.rows(),
                    bbar.cols(),
                    c.rows(),
                    c.cols(),
                    d.rows(),
                    d.cols()
                ),
            ));
        }
        if !delta.is_finite() || delta <= 0.0 {
            return Err(Error::InvalidArgument(format!("delta must be > 0, got {delta}")));
        }
        Ok(DiscreteLti {
            abar,
            bbar,
            c,
            d,
            delta,
            scheme,
        })
    }

    pub fn state_dim(&self) -> usize {
        self.abar.rows()
    }

    pub fn input_dim(&self) -> usize {
        self.bbar.cols()
    }

    pub fn output_dim(&self) -> usize {
        self.c.rows()
    }

    pub fn abar(&self) -> &Matrix {
        &self.abar
    }

    pub fn bbar(&self) -> &Matrix {
        &self.bbar
    }

    pub fn c(&self) -> &Matrix {
        &self.c
    }

    pub fn d(&self) -> &Matrix {
        &self.d
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// Spectral radius estimate together with whether it is exact.
    ///
    /// Triangular state matrices expose their eigenvalues on the diagonal;
    /// otherwise the estimate is `|Abar^(2^k)|_2^(1/2^k)` from a few levels
    /// of squaring, which converges to the radius from above.
    pub fn spectral_radius_estimate(&self) -> Result<(f64, bool)> {
        if self.abar.is_triangular() {
            let rho = self
                .abar
                .diag()
                .iter()
                .fold(0.0f64, |acc, d| acc.max(d.abs()));
            return Ok((rho, true));
        }
        let levels = 6;
        let pows = repeated_squares(&self.abar, levels + 1)?;
        let norm = spectral_norm(&pows[levels])?;
        let k = (1u64 << levels) as f64;
        Ok((norm.powf(1.0 / k), false))
    }

    /// True when the spectral radius estimate is strictly below one.
    pub fn is_stable(&self) -> Result<bool> {
        Ok(self.spectral_radius_estimate()?.0 < 1.0)
    }
}

/// Transfer function sampled on the unit circle.
#[derive(Debug, Clone)]
pub struct FrequencySample {
    pub z: Complex64,
    pub h: CMatrix,
}

impl FrequencySample {
    pub fn new(z: Complex64, h: CMatrix) -> Result<Self> {
        check_unit_modulus(z)?;
        Ok(FrequencySample { z, h })
    }
}

fn check_unit_modulus(z: Complex64) -> Result<()> {
    if (z.norm() - 1.0).abs() > 1e-14 {
        return Err(Error::InvalidArgument(format!(
            "|z| must be 1 within 1e-14, got |z| = {}",
            z.norm()
        )));
    }
    Ok(())
}

/// Lower-triangular m-by-m polynomial-projection state matrix with entries
/// `-sqrt(2n+1) sqrt(2k+1)` below the diagonal and `-(n+1)` on it, for
/// 1-based indices `n, k`. Its strictly lower part is the rank-1 outer
/// product `-u u^T` of `u_n = sqrt(2n+1)`.
pub fn hippo_matrix(m: usize) -> Matrix {
    assert!(m >= 1, "hippo_matrix needs m >= 1");
    let u: Vec<f64> = (1..=m).map(|n| (2.0 * n as f64 + 1.0).sqrt()).collect();
    let mut a = Matrix::zeros(m, m);
    for n in 0..m {
        for k in 0..n {
            a.set(n, k, -(u[n] * u[k]));
        }
        a.set(n, n, -((n + 2) as f64));
    }
    a
}

/// Trapezoidal-rule discretization with step `delta`.
///
/// Both products against `(I - d/2 A)^-1` are carried out as solves against
/// a single LU factorization.
pub fn discretize_bilinear(sys: &ContinuousLti, delta: f64) -> Result<DiscreteLti> {
    if !delta.is_finite() || delta <= 0.0 {
        return Err(Error::InvalidArgument(format!("delta must be > 0, got {delta}")));
    }
    let m = sys.state_dim();
    let half = sys.a().scale(delta / 2.0);
    let minus = Matrix::identity(m).sub(&half)?;
    let plus = Matrix::identity(m).add(&half)?;
    let lu = LuFactors::factor(&minus, "bilinear (I - d/2 A)")?;
    let abar = lu.solve_matrix(&plus)?;
    let bbar = lu.solve_matrix(sys.b())?.scale(delta);
    DiscreteLti::new(abar, bbar, sys.c().clone(), sys.d().clone(), delta, Scheme::Bilinear)
}

/// Exponential discretization `Abar = exp(delta A)` with zero-order-hold
/// input matrix `Bbar = A^-1 (exp(delta A) - I) B`.
///
/// `A = 0` is handled as its limit `Abar = I`, `Bbar = delta B`; any other
/// singular `A` is rejected.
pub fn discretize_exponential(sys: &ContinuousLti, delta: f64) -> Result<DiscreteLti> {
    if !delta.is_finite() || delta <= 0.0 {
        return Err(Error::InvalidArgument(format!("delta must be > 0, got {delta}")));
    }
    let m = sys.state_dim();
    if sys.a().is_zero() {
        return DiscreteLti::new(
            Matrix::identity(m),
            sys.b().scale(delta),
            sys.c().clone(),
            sys.d().clone(),
            delta,
            Scheme::Exponential,
        );
    }
    let abar = matrix_exp(&sys.a().scale(delta))?;
    let em = abar.sub(&Matrix::identity(m))?;
    let rhs = mat_mul(&em, sys.b())?;
    let lu = LuFactors::factor(sys.a(), "exponential A for Bbar")?;
    let bbar = lu.solve_matrix(&rhs)?;
    DiscreteLti::new(abar, bbar, sys.c().clone(), sys.d().clone(), delta, Scheme::Exponential)
}

/// Exact transfer function `H(z) = C (I - z^-1 Abar)^-1 Bbar + D` by one
/// complex solve against `Bbar`.
pub fn transfer_eval(sys: &DiscreteLti, z: Complex64) -> Result<CMatrix> {
    check_unit_modulus(z)?;
    let m = sys.state_dim();
    let zinv = z.inv();
    let mut resolvent = vec![Complex64::new(0.0, 0.0); m * m];
    for i in 0..m {
        for j in 0..m {
            let v = -zinv * sys.abar.get(i, j);
            resolvent[i * m + j] = if i == j { v + 1.0 } else { v };
        }
    }
    let lu = CluFactors::factor(m, &resolvent, "transfer resolvent")?;
    let p = sys.input_dim();
    let rhs: Vec<Complex64> = sys
        .bbar
        .data()
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .collect();
    let x = lu.solve(m, p, &rhs)?;
    let mut xc = CMatrix::zeros(m, p);
    for i in 0..m {
        for j in 0..p {
            xc.set(i, j, x[i * p + j]);
        }
    }
    let h = xc.left_mul_real(&sys.c)?;
    h.add(&CMatrix::from_real(&sys.d))
}

/// Cascade-truncated transfer function of `stages` factors,
/// `C prod_{s<stages} (I + (z^-1 Abar)^(2^s)) Bbar + D`.
pub fn truncated_transfer_eval(sys: &DiscreteLti, z: Complex64, stages: usize) -> Result<CMatrix> {
    if stages == 0 {
        return Err(Error::InvalidArgument("stages must be >= 1".into()));
    }
    let powers = repeated_squares(&sys.abar, stages)?;
    truncated_transfer_eval_with_powers(sys, z, &powers)
}

/// Same as [`truncated_transfer_eval`] against precomputed powers
/// `[Abar, Abar^2, Abar^4, ...]`.
pub fn truncated_transfer_eval_with_powers(
    sys: &DiscreteLti,
    z: Complex64,
    powers: &[Matrix],
) -> Result<CMatrix> {
    check_unit_modulus(z)?;
    if powers.is_empty() {
        return Err(Error::InvalidArgument("stages must be >= 1".into()));
    }
    let mut w = CMatrix::from_real(&sys.bbar);
    // z^(-2^s), advanced by squaring alongside the matrix powers.
    let mut phase = z.inv();
    for pw in powers {
        // The factors commute, so the product applies left to right.
        let shifted = w.left_mul_real(pw)?;
        for i in 0..w.rows() {
            for j in 0..w.cols() {
                let v = w.get(i, j) + phase * shifted.get(i, j);
                w.set(i, j, v);
            }
        }
        phase *= phase;
    }
    let h = w.left_mul_real(&sys.c)?;
    h.add(&CMatrix::from_real(&sys.d))
}

//! One-sided Jacobi SVD for the small dense blocks the compression and norm
//! paths work with. Converges to machine precision, no external dependencies.

use super::Matrix;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 64;

/// Thin SVD `a = u * diag(s) * v^T` with singular values sorted descending.
///
/// `u` is `rows x k`, `v` is `cols x k` with `k = min(rows, cols)`. Columns of
/// `u` belonging to zero singular values are left as zero vectors.
pub(crate) fn jacobi_svd(a: &Matrix) -> Result<(Matrix, Vec<f64>, Matrix)> {
    if a.rows() >= a.cols() {
        jacobi_svd_tall(a)
    } else {
        let (u, s, v) = jacobi_svd_tall(&a.transpose())?;
        Ok((v, s, u))
    }
}

fn jacobi_svd_tall(a: &Matrix) -> Result<(Matrix, Vec<f64>, Matrix)> {
    let rows = a.rows();
    let cols = a.cols();
    debug_assert!(rows >= cols);

    // Normalize so column norms sit in a sane range regardless of the
    // block's absolute scale; singular values are rescaled at the end.
    let scale = a.max_abs();
    if scale == 0.0 {
        let u = Matrix::zeros(rows, cols);
        let v = Matrix::identity(cols);
        return Ok((u, vec![0.0; cols], v));
    }

    // Column-major working copy; rotations act on column pairs.
    let mut w: Vec<Vec<f64>> = (0..cols)
        .map(|j| (0..rows).map(|i| a.get(i, j) / scale).collect())
        .collect();
    let mut v: Vec<Vec<f64>> = (0..cols)
        .map(|j| {
            let mut col = vec![0.0; cols];
            col[j] = 1.0;
            col
        })
        .collect();

    let eps = f64::EPSILON;
    // Columns whose norm has collapsed to roundoff relative to the largest
    // one are final: rotating them further only chases noise.
    let max_col = w
        .iter()
        .map(|col| col.iter().map(|x| x * x).sum::<f64>().sqrt())
        .fold(0.0f64, f64::max);
    let col_floor = eps * max_col;
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let (mut alpha, mut beta, mut g) = (0.0f64, 0.0f64, 0.0f64);
                for i in 0..rows {
                    alpha += w[p][i] * w[p][i];
                    beta += w[q][i] * w[q][i];
                    g += w[p][i] * w[q][i];
                }
                let (sa, sb) = (alpha.sqrt(), beta.sqrt());
                if sa <= col_floor || sb <= col_floor {
                    continue;
                }
                if g.abs() <= 1e2 * eps * sa * sb {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..rows {
                    let wp = w[p][i];
                    let wq = w[q][i];
                    w[p][i] = c * wp - s * wq;
                    w[q][i] = s * wp + c * wq;
                }
                for i in 0..cols {
                    let vp = v[p][i];
                    let vq = v[q][i];
                    v[p][i] = c * vp - s * vq;
                    v[q][i] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Numerical(format!(
            "jacobi svd did not converge within {MAX_SWEEPS} sweeps on a {rows}x{cols} block"
        )));
    }

    let mut order: Vec<usize> = (0..cols).collect();
    let mut sigma: Vec<f64> = w
        .iter()
        .map(|col| col.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    order.sort_by(|&i, &j| sigma[j].partial_cmp(&sigma[i]).unwrap());

    let mut u = Matrix::zeros(rows, cols);
    let mut vt = Matrix::zeros(cols, cols);
    for (k, &src) in order.iter().enumerate() {
        let s = sigma[src];
        if s > 0.0 {
            for i in 0..rows {
                u.set(i, k, w[src][i] / s);
            }
        }
        for i in 0..cols {
            vt.set(i, k, v[src][i]);
        }
    }
    sigma.sort_by(|x, y| y.partial_cmp(x).unwrap());
    for s in sigma.iter_mut() {
        *s *= scale;
    }
    Ok((u, sigma, vt))
}

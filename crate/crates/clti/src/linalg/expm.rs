//! Matrix exponential by scaling and squaring with a degree-13 Pade kernel.

use super::{mat_mul, Matrix};
use crate::error::Result;
use crate::linalg::solve::LuFactors;

// Pade-13 coefficients and its backward-error radius.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// `exp(a)` for square `a`; backward error at the level of unit roundoff.
pub(crate) fn matrix_exp(a: &Matrix) -> Result<Matrix> {
    debug_assert!(a.is_square());
    let n = a.rows();
    if a.is_zero() {
        return Ok(Matrix::identity(n));
    }
    let norm = a.one_norm();
    let scaling = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.scale(0.5f64.powi(scaling as i32));

    let a2 = mat_mul(&scaled, &scaled)?;
    let a4 = mat_mul(&a2, &a2)?;
    let a6 = mat_mul(&a2, &a4)?;
    let ident = Matrix::identity(n);

    // u = a * (a6*(b13 a6 + b11 a4 + b9 a2) + b7 a6 + b5 a4 + b3 a2 + b1 I)
    let inner_u = a6
        .scale(PADE13[13])
        .add(&a4.scale(PADE13[11]))?
        .add(&a2.scale(PADE13[9]))?;
    let u_poly = mat_mul(&a6, &inner_u)?
        .add(&a6.scale(PADE13[7]))?
        .add(&a4.scale(PADE13[5]))?
        .add(&a2.scale(PADE13[3]))?
        .add(&ident.scale(PADE13[1]))?;
    let u = mat_mul(&scaled, &u_poly)?;

    // v = a6*(b12 a6 + b10 a4 + b8 a2) + b6 a6 + b4 a4 + b2 a2 + b0 I
    let inner_v = a6
        .scale(PADE13[12])
        .add(&a4.scale(PADE13[10]))?
        .add(&a2.scale(PADE13[8]))?;
    let v = mat_mul(&a6, &inner_v)?
        .add(&a6.scale(PADE13[6]))?
        .add(&a4.scale(PADE13[4]))?
        .add(&a2.scale(PADE13[2]))?
        .add(&ident.scale(PADE13[0]))?;

    // (v - u) x = (v + u)
    let lhs = v.sub(&u)?;
    let rhs = v.add(&u)?;
    let lu = LuFactors::factor(&lhs, "matrix_exp pade denominator")?;
    let mut x = lu.solve_matrix(&rhs)?;
    for _ in 0..scaling {
        x = mat_mul(&x, &x)?;
    }
    Ok(x)
}

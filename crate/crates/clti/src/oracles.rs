//! Exact reference paths: the sequential state recurrence and the
//! materialized-kernel convolution. Both compute the same map; they anchor
//! every correctness test and serve as benchmark baselines.

use crate::cascade::SignalBlock;
use crate::error::{Error, Result};
use crate::linalg::{mat_mul, mat_vec_into, Matrix};
use crate::lti::DiscreteLti;

/// Materialized convolution kernel: taps `h_k = C Abar^k Bbar` plus the
/// feedthrough matrix applied outside the sum.
#[derive(Debug, Clone)]
pub struct Kernel {
    taps: Vec<Matrix>,
    feedthrough: Matrix,
}

impl Kernel {
    pub fn taps(&self) -> &[Matrix] {
        &self.taps
    }

    pub fn feedthrough(&self) -> &Matrix {
        &self.feedthrough
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }
}

/// Run the state recurrence `x_n = Abar x_(n-1) + Bbar u_n`,
/// `y_n = C x_n + D u_n` with `x_(-1) = 0`, one step per column.
pub fn recurrence_apply(sys: &DiscreteLti, input: &SignalBlock) -> Result<SignalBlock> {
    let (m, p, q) = (sys.state_dim(), sys.input_dim(), sys.output_dim());
    if input.dim() != p {
        return Err(Error::dims(
            "recurrence_apply",
            format!("input dim {} but system has p={}", input.dim(), p),
        ));
    }
    let len = input.len();
    let mut output = SignalBlock::zeros(q, len);
    let mut x = vec![0.0; m];
    let mut ax = vec![0.0; m];
    let mut bu = vec![0.0; m];
    let mut tmp_q = vec![0.0; q];
    for l in 0..len {
        mat_vec_into(sys.abar(), &x, &mut ax);
        mat_vec_into(sys.bbar(), input.column(l), &mut bu);
        for i in 0..m {
            x[i] = ax[i] + bu[i];
        }
        let out = output.column_mut(l);
        mat_vec_into(sys.c(), &x, &mut tmp_q);
        out.copy_from_slice(&tmp_q);
        mat_vec_into(sys.d(), input.column(l), &mut tmp_q);
        for (o, t) in out.iter_mut().zip(&tmp_q) {
            *o += *t;
        }
    }
    Ok(output)
}

/// Materialize the first `length` kernel taps by propagating an m-by-p state
/// block through `Abar` (dense powers are never formed).
pub fn kernel_materialize(sys: &DiscreteLti, length: usize) -> Result<Kernel> {
    if length == 0 {
        return Err(Error::InvalidArgument("kernel length must be >= 1".into()));
    }
    let mut taps = Vec::with_capacity(length);
    let mut walker = sys.bbar().clone();
    for k in 0..length {
        taps.push(mat_mul(sys.c(), &walker)?);
        if k + 1 < length {
            walker = mat_mul(sys.abar(), &walker)?;
        }
    }
    Ok(Kernel {
        taps,
        feedthrough: sys.d().clone(),
    })
}

/// Direct convolution `y_l = sum_k h_k u_(l-k) + D u_l` over the available
/// taps; O(L K) scalar work.
pub fn conv_apply(kernel: &Kernel, input: &SignalBlock) -> Result<SignalBlock> {
    let q = kernel.feedthrough.rows();
    let p = kernel.feedthrough.cols();
    if input.dim() != p {
        return Err(Error::dims(
            "conv_apply",
            format!("input dim {} but kernel has p={}", input.dim(), p),
        ));
    }
    let len = input.len();
    let mut output = SignalBlock::zeros(q, len);
    let mut tmp = vec![0.0; q];
    for l in 0..len {
        let out = output.column_mut(l);
        for (k, tap) in kernel.taps.iter().enumerate().take(l + 1) {
            mat_vec_into(tap, input.column(l - k), &mut tmp);
            for (o, t) in out.iter_mut().zip(&tmp) {
                *o += *t;
            }
        }
        mat_vec_into(&kernel.feedthrough, input.column(l), &mut tmp);
        for (o, t) in out.iter_mut().zip(&tmp) {
            *o += *t;
        }
    }
    Ok(output)
}

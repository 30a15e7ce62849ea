//! Partitioned low rank representation: a dyadic block tree with dense
//! diagonal leaves and SVD-compressed off-diagonal blocks, plus the fast
//! matvec it enables. Used as an alternative backend for the cascade's
//! stage operators.

use crate::cascade::ColumnOperator;
use crate::error::{Error, Result};
use crate::linalg::{block_svd, repeated_squares, Matrix};
use crate::lti::DiscreteLti;

/// Default dense-leaf size for the dyadic partition.
pub const DEFAULT_LEAF_SIZE: usize = 16;

/// Off-diagonal block stored as `u * v^T`; `None` when the block compressed
/// to rank zero.
#[derive(Debug, Clone)]
struct LowRankBlock {
    factors: Option<(Matrix, Matrix)>,
    rank: usize,
}

impl LowRankBlock {
    fn compress(block: &Matrix, eps: f64) -> Result<Self> {
        let svd = block_svd(block, eps)?;
        if svd.rank == 0 {
            return Ok(LowRankBlock {
                factors: None,
                rank: 0,
            });
        }
        // Fold the singular values into the left factor.
        let mut u = svd.u.clone();
        for k in 0..svd.rank {
            for i in 0..u.rows() {
                u.set(i, k, svd.u.get(i, k) * svd.s[k]);
            }
        }
        Ok(LowRankBlock {
            factors: Some((u, svd.v)),
            rank: svd.rank,
        })
    }

    /// y += (u v^T) x, counting multiply-add pairs as two flops each.
    fn matvec_add(&self, x: &[f64], y: &mut [f64], flops: &mut u64) {
        let Some((u, v)) = &self.factors else {
            return;
        };
        let r = self.rank;
        let mut t = vec![0.0; r];
        for k in 0..r {
            let mut acc = 0.0;
            for (i, &xv) in x.iter().enumerate() {
                acc += v.get(i, k) * xv;
            }
            t[k] = acc;
        }
        *flops += 2 * (v.rows() as u64) * (r as u64);
        for (i, yv) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (k, &tk) in t.iter().enumerate() {
                acc += u.get(i, k) * tk;
            }
            *yv += acc;
        }
        *flops += 2 * (u.rows() as u64) * (r as u64);
    }

    fn to_dense(&self, rows: usize, cols: usize) -> Matrix {
        let mut out = Matrix::zeros(rows, cols);
        if let Some((u, v)) = &self.factors {
            for i in 0..rows {
                for j in 0..cols {
                    let mut acc = 0.0;
                    for k in 0..self.rank {
                        acc += u.get(i, k) * v.get(j, k);
                    }
                    out.set(i, j, acc);
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
enum PlrNode {
    Leaf(Matrix),
    Split {
        head_size: usize,
        head: Box<PlrNode>,
        tail: Box<PlrNode>,
        upper_right: LowRankBlock,
        lower_left: LowRankBlock,
    },
}

/// Hierarchical compressed form of a square matrix.
#[derive(Debug, Clone)]
pub struct PlrMatrix {
    size: usize,
    leaf_size: usize,
    eps: f64,
    max_offdiag_rank: usize,
    offdiag_ranks: Vec<usize>,
    root: PlrNode,
}

impl PlrMatrix {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn leaf_size(&self) -> usize {
        self.leaf_size
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Largest rank among all compressed off-diagonal blocks.
    pub fn max_offdiag_rank(&self) -> usize {
        self.max_offdiag_rank
    }

    /// Ranks of every off-diagonal block in build order.
    pub fn offdiag_ranks(&self) -> &[usize] {
        &self.offdiag_ranks
    }

    /// Fast matvec; error stays within the tree-depth multiple of `eps`.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut flops = 0u64;
        self.matvec_counted(x, &mut flops)
    }

    /// Matvec that also accumulates the floating-point operation count.
    pub fn matvec_counted(&self, x: &[f64], flops: &mut u64) -> Result<Vec<f64>> {
        if x.len() != self.size {
            return Err(Error::dims(
                "plr_matvec",
                format!("matrix is {0}x{0}, vector has dim {1}", self.size, x.len()),
            ));
        }
        let mut y = vec![0.0; self.size];
        matvec_rec(&self.root, x, &mut y, flops);
        Ok(y)
    }

    /// Reassemble the dense matrix (tests and diagnostics).
    pub fn to_dense(&self) -> Matrix {
        let mut out = Matrix::zeros(self.size, self.size);
        fill_dense(&self.root, 0, &mut out);
        out
    }
}

fn matvec_rec(node: &PlrNode, x: &[f64], y: &mut [f64], flops: &mut u64) {
    match node {
        PlrNode::Leaf(block) => {
            let n = block.cols();
            for (i, yv) in y.iter_mut().enumerate() {
                let row = block.row(i);
                let mut acc = 0.0;
                for (rv, xv) in row.iter().zip(x) {
                    acc += rv * xv;
                }
                *yv += acc;
            }
            *flops += 2 * (n as u64) * (block.rows() as u64);
        }
        PlrNode::Split {
            head_size,
            head,
            tail,
            upper_right,
            lower_left,
        } => {
            let (x_head, x_tail) = x.split_at(*head_size);
            let (y_head, y_tail) = y.split_at_mut(*head_size);
            matvec_rec(head, x_head, y_head, flops);
            matvec_rec(tail, x_tail, y_tail, flops);
            upper_right.matvec_add(x_tail, y_head, flops);
            lower_left.matvec_add(x_head, y_tail, flops);
        }
    }
}

fn fill_dense(node: &PlrNode, offset: usize, out: &mut Matrix) {
    match node {
        PlrNode::Leaf(block) => {
            for i in 0..block.rows() {
                for j in 0..block.cols() {
                    out.set(offset + i, offset + j, block.get(i, j));
                }
            }
        }
        PlrNode::Split {
            head_size,
            head,
            tail,
            upper_right,
            lower_left,
        } => {
            fill_dense(head, offset, out);
            fill_dense(tail, offset + head_size, out);
            let rows = *head_size;
            let cols = dense_span(tail);
            let ur = upper_right.to_dense(rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    out.set(offset + i, offset + head_size + j, ur.get(i, j));
                }
            }
            let ll = lower_left.to_dense(cols, rows);
            for i in 0..cols {
                for j in 0..rows {
                    out.set(offset + head_size + i, offset + j, ll.get(i, j));
                }
            }
        }
    }
}

fn dense_span(node: &PlrNode) -> usize {
    match node {
        PlrNode::Leaf(block) => block.rows(),
        PlrNode::Split { head, tail, .. } => dense_span(head) + dense_span(tail),
    }
}

/// Compress a square matrix into PLR form.
///
/// The partition splits at the midpoint (head gets the extra row for odd
/// sizes); blocks of side `<= leaf_size` stay dense and every off-diagonal
/// block is SVD-truncated at `eps` relative to its own largest singular
/// value.
pub fn plr_build(a: &Matrix, eps: f64, leaf_size: usize) -> Result<PlrMatrix> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if eps < 0.0 {
        return Err(Error::InvalidArgument(format!("eps must be >= 0, got {eps}")));
    }
    if leaf_size == 0 {
        return Err(Error::InvalidArgument("leaf_size must be >= 1".into()));
    }
    let mut ranks = Vec::new();
    let root = build_rec(a, 0, a.rows(), eps, leaf_size, &mut ranks)?;
    Ok(PlrMatrix {
        size: a.rows(),
        leaf_size,
        eps,
        max_offdiag_rank: ranks.iter().copied().max().unwrap_or(0),
        offdiag_ranks: ranks,
        root,
    })
}

fn build_rec(
    a: &Matrix,
    lo: usize,
    hi: usize,
    eps: f64,
    leaf_size: usize,
    ranks: &mut Vec<usize>,
) -> Result<PlrNode> {
    let n = hi - lo;
    if n <= leaf_size {
        return Ok(PlrNode::Leaf(a.block(lo, hi, lo, hi)));
    }
    let head_size = n.div_ceil(2);
    let mid = lo + head_size;
    let upper_right = LowRankBlock::compress(&a.block(lo, mid, mid, hi), eps)?;
    ranks.push(upper_right.rank);
    let lower_left = LowRankBlock::compress(&a.block(mid, hi, lo, mid), eps)?;
    ranks.push(lower_left.rank);
    let head = build_rec(a, lo, mid, eps, leaf_size, ranks)?;
    let tail = build_rec(a, mid, hi, eps, leaf_size, ranks)?;
    Ok(PlrNode::Split {
        head_size,
        head: Box::new(head),
        tail: Box::new(tail),
        upper_right,
        lower_left,
    })
}

/// Compress each cascade power `Abar^(2^s)`, `s = 0..stages`, independently.
///
/// Powers are formed densely by repeated squaring first; ranks can grow with
/// `s` and are reported per power by the caller via
/// [`PlrMatrix::max_offdiag_rank`].
pub fn plr_power_build(sys: &DiscreteLti, stages: usize, eps: f64) -> Result<Vec<PlrMatrix>> {
    if stages == 0 {
        return Err(Error::InvalidArgument("stages must be >= 1".into()));
    }
    let powers = repeated_squares(sys.abar(), stages)?;
    powers
        .iter()
        .map(|p| plr_build(p, eps, DEFAULT_LEAF_SIZE))
        .collect()
}

impl ColumnOperator for PlrMatrix {
    fn dim(&self) -> usize {
        self.size
    }

    fn matvec_into(&self, x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        let mut flops = 0u64;
        matvec_rec(&self.root, x, out, &mut flops);
    }
}

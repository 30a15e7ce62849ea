//! Partitioned-low-rank compression of the discretized HiPPO operator: the
//! off-diagonal blocks compress to rank 1, the matvec flop count drops well
//! below dense, and the compressed powers still drive the cascade to
//! engineering accuracy.
//!
//! ```bash
//! cargo run --release -p clti --example plr_compression
//! ```

use clti::cascade::{self, SignalBlock, DEFAULT_MAX_STAGES};
use clti::linalg::{Matrix, Vector};
use clti::lti::{discretize_bilinear, hippo_matrix, ContinuousLti};
use clti::plr;

fn main() -> clti::Result<()> {
    let m = 100;
    let csys = ContinuousLti::new(
        hippo_matrix(m),
        Matrix::from_vec(m, 1, vec![1.0; m])?,
        Matrix::from_vec(1, m, vec![1.0 / m as f64; m])?,
        Matrix::zeros(1, 1),
    )?;
    let sys = discretize_bilinear(&csys, 0.5e-3)?;

    let eps = 1e-10;
    let built = plr::plr_build(sys.abar(), eps, plr::DEFAULT_LEAF_SIZE)?;
    println!(
        "Abar in PLR form: max off-diagonal rank = {} (eps = {eps:.0e}, leaf = {})",
        built.max_offdiag_rank(),
        built.leaf_size()
    );

    let x = SignalBlock::random_uniform(m, 1, 2);
    let mut flops = 0u64;
    let fast = built.matvec_counted(x.column(0), &mut flops)?;
    let dense = clti::linalg::mat_vec(sys.abar(), &Vector::from_vec(x.column(0).to_vec())?)?;
    let err: f64 = fast
        .iter()
        .zip(dense.data())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    println!(
        "matvec: {flops} flops vs {} dense, error {:.3e}",
        2 * m * m,
        err / dense.norm()
    );

    // Powers lose the rank-1 structure; ranks rise then fall with the decay.
    let plan = cascade::plan(&sys, 1e-12, DEFAULT_MAX_STAGES)?;
    let compressed = plr::plr_power_build(&sys, plan.stages(), eps)?;
    let ranks: Vec<usize> = compressed.iter().map(|p| p.max_offdiag_rank()).collect();
    println!("per-power max off-diagonal ranks: {ranks:?}");

    let input = SignalBlock::random_uniform(1, 1024, 3);
    let (dense_out, dense_stats) = cascade::apply(&plan, &sys, &input)?;
    let (plr_out, plr_stats) =
        cascade::apply_with_operators(&compressed, plan.stages(), &sys, &input)?;
    println!(
        "cascade on L = 1024: dense {:?}, plr-backed {:?}, rel difference {:.3e}",
        dense_stats.wall_time,
        plr_stats.wall_time,
        plr_out.rel_l2_err(&dense_out)?
    );
    Ok(())
}

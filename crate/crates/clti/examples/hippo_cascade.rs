//! End-to-end demo on the m=100 HiPPO system: build, discretize, plan a
//! stage count from a tolerance, run the staged convolution and compare it
//! against the exact recurrence.
//!
//! ```bash
//! cargo run --release -p clti --example hippo_cascade
//! ```

use clti::cascade::{self, SignalBlock, DEFAULT_MAX_STAGES};
use clti::linalg::Matrix;
use clti::lti::{discretize_bilinear, hippo_matrix, ContinuousLti};
use clti::oracles;

fn main() -> clti::Result<()> {
    let m = 100;
    let delta = 0.5e-3;
    let csys = ContinuousLti::new(
        hippo_matrix(m),
        Matrix::from_vec(m, 1, vec![1.0; m])?,
        Matrix::from_vec(1, m, vec![1.0 / m as f64; m])?,
        Matrix::zeros(1, 1),
    )?;
    let sys = discretize_bilinear(&csys, delta)?;
    println!(
        "discretized: d_1 = {}, d_{} = {}",
        sys.abar().get(0, 0),
        m,
        sys.abar().get(m - 1, m - 1)
    );

    let plan = cascade::plan(&sys, 1e-12, DEFAULT_MAX_STAGES)?;
    println!(
        "plan: stages = {} (degree {}), gamma = {:.6}, rho = {:.12}, heuristic = {}",
        plan.stages(),
        (1u64 << plan.stages()) - 1,
        plan.gamma(),
        plan.rho_hat(),
        plan.is_heuristic()
    );
    println!("tail |Abar^(2^S)|_2 = {:.3e}", plan.heuristic_tail());

    let len = 2048;
    let input = SignalBlock::random_uniform(1, len, 0);
    let (output, stats) = cascade::apply(&plan, &sys, &input)?;
    println!(
        "applied L = {len}: effective stages = {}, state matvecs = {} (vs {} for the recurrence), wall = {:?}",
        stats.effective_stages, stats.matvec_count, len, stats.wall_time
    );

    let reference = oracles::recurrence_apply(&sys, &input)?;
    println!(
        "relative l2 error vs recurrence: {:.3e}",
        output.rel_l2_err(&reference)?
    );
    Ok(())
}

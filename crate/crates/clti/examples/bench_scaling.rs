//! Scaling study: distinct state-matrix count and wall time across block
//! lengths for the cascade versus the sequential recurrence, written to a
//! results CSV.
//!
//! ```bash
//! cargo run --release -p clti --example bench_scaling
//! ```

use clti::cascade::{self, SignalBlock, DEFAULT_MAX_STAGES};
use clti::io::{export_csv, ResultRow};
use clti::linalg::Matrix;
use clti::lti::{discretize_bilinear, hippo_matrix, ContinuousLti};
use clti::oracles;
use std::time::Instant;

fn main() -> clti::Result<()> {
    let m = 100;
    let csys = ContinuousLti::new(
        hippo_matrix(m),
        Matrix::from_vec(m, 1, vec![1.0; m])?,
        Matrix::from_vec(1, m, vec![1.0 / m as f64; m])?,
        Matrix::zeros(1, 1),
    )?;
    let sys = discretize_bilinear(&csys, 0.5e-3)?;
    let plan = cascade::plan(&sys, 1e-12, DEFAULT_MAX_STAGES)?;
    println!(
        "plan: {} stages; the cascade touches {} distinct state matrices regardless of L",
        plan.stages(),
        plan.stages()
    );
    println!(
        "{:>7} {:>10} {:>14} {:>14} {:>12}",
        "L", "stages*", "cascade", "recurrence", "rel err"
    );

    let mut rows = Vec::new();
    for len in [256usize, 1024, 4096, 16384] {
        let input = SignalBlock::random_uniform(1, len, len as u64);

        let (output, stats) = cascade::apply(&plan, &sys, &input)?;

        let t0 = Instant::now();
        let reference = oracles::recurrence_apply(&sys, &input)?;
        let rec_wall = t0.elapsed();

        let rel = output.rel_l2_err(&reference)?;
        println!(
            "{len:>7} {:>10} {:>14?} {:>14?} {rel:>12.3e}",
            stats.effective_stages, stats.wall_time, rec_wall
        );
        rows.push(ResultRow {
            method: "cascade".into(),
            m,
            p: 1,
            q: 1,
            len,
            stages: plan.stages(),
            tol: 1e-12,
            matvec_count: stats.matvec_count,
            wall_ns: stats.wall_time.as_nanos() as u64,
            rel_l2_err: Some(rel),
        });
        rows.push(ResultRow {
            method: "recurrence".into(),
            m,
            p: 1,
            q: 1,
            len,
            stages: 0,
            tol: 1e-12,
            matvec_count: len as u64,
            wall_ns: rec_wall.as_nanos() as u64,
            rel_l2_err: None,
        });
    }
    let path = std::env::temp_dir().join("clti_bench_scaling.csv");
    export_csv(&rows, &path)?;
    println!("(* executed stages, min(S, floor(log2(L-1)) + 1))");
    println!("wrote {}", path.display());
    Ok(())
}

//! How the truncated transfer function converges: sweep the unit circle for
//! growing stage counts and compare the measured worst-case error against the
//! reported bound.
//!
//! ```bash
//! cargo run --release -p clti --example transfer_truncation
//! ```

use clti::cascade::{self, plan_fixed};
use clti::cli::random_system;

fn main() -> clti::Result<()> {
    let sys = random_system(4, 0.9)?;
    println!(
        "random system: m = {}, p = {}, q = {}, sigma_max(Abar) = 0.9",
        sys.state_dim(),
        sys.input_dim(),
        sys.output_dim()
    );
    println!("{:>7} {:>12} {:>14} {:>14}", "stages", "degree", "max error", "bound");
    for stages in 1..=8 {
        let plan = plan_fixed(&sys, stages)?;
        let (max_err, bound) = cascade::frequency_check(&plan, &sys, 256)?;
        println!(
            "{stages:>7} {:>12} {max_err:>14.3e} {bound:>14.3e}",
            (1u64 << stages) - 1
        );
    }
    println!("the error roughly squares per extra stage until roundoff takes over");
    Ok(())
}

//! Persistence tour: write a model directory, reload it, round-trip a signal
//! block through the binary format and read a hand-written CSV fixture.
//!
//! ```bash
//! cargo run --release -p clti --example model_files
//! ```

use clti::cascade::SignalBlock;
use clti::io;
use clti::linalg::Matrix;
use clti::lti::{discretize_bilinear, hippo_matrix, ContinuousLti};

fn main() -> clti::Result<()> {
    let dir = std::env::temp_dir().join("clti_model_demo");
    std::fs::create_dir_all(&dir).map_err(|e| clti::Error::FileAccess {
        path: dir.display().to_string(),
        source: e,
    })?;

    let m = 16;
    let csys = ContinuousLti::new(
        hippo_matrix(m),
        Matrix::from_vec(m, 1, vec![1.0; m])?,
        Matrix::from_vec(1, m, vec![1.0 / m as f64; m])?,
        Matrix::zeros(1, 1),
    )?;
    let sys = discretize_bilinear(&csys, 1e-2)?;

    let model_dir = dir.join("model");
    io::write_model(&model_dir, &sys)?;
    println!("model directory at {}", model_dir.display());
    for name in ["abar.clti", "bbar.clti", "c.clti", "d.clti", "meta"] {
        let len = std::fs::metadata(model_dir.join(name)).map(|md| md.len()).unwrap_or(0);
        println!("  {name:<10} {len:>6} bytes");
    }

    let back = io::read_model(&model_dir)?;
    println!(
        "reload is bit-exact: {}",
        back.abar().data() == sys.abar().data() && back.bbar().data() == sys.bbar().data()
    );

    let signal = SignalBlock::random_uniform(1, 32, 123);
    let sig_path = dir.join("u.clti");
    io::write_signal(&sig_path, &signal)?;
    let signal_back = io::read_signal(&sig_path)?;
    println!("signal round-trip bit-exact: {}", signal_back == signal);

    let fixture = dir.join("fixture.csv");
    std::fs::write(&fixture, "1.0, 0.5\n0.0, 2.0\n").map_err(|e| clti::Error::FileAccess {
        path: fixture.display().to_string(),
        source: e,
    })?;
    let parsed = io::read_matrix_csv(&fixture)?;
    println!(
        "csv fixture parsed as {}x{}, entry (1,1) = {}",
        parsed.rows(),
        parsed.cols(),
        parsed.get(1, 1)
    );
    Ok(())
}

//! Compare the two discretization rules on a small stable system: the
//! trapezoidal (bilinear) map and the exponential map with zero-order hold.
//!
//! ```bash
//! cargo run --release -p clti --example discretization
//! ```

use clti::linalg::Matrix;
use clti::lti::{discretize_bilinear, discretize_exponential, ContinuousLti};

fn main() -> clti::Result<()> {
    // Two-state system with eigenvalues -1 and -5.
    let a = Matrix::from_rows(&[vec![-1.0, 0.0], vec![2.0, -5.0]])?;
    let b = Matrix::from_vec(2, 1, vec![1.0, 0.5])?;
    let c = Matrix::from_vec(1, 2, vec![1.0, 1.0])?;
    let d = Matrix::zeros(1, 1);
    let sys = ContinuousLti::new(a, b, c, d)?;

    for delta in [0.5, 0.1, 0.01] {
        let bil = discretize_bilinear(&sys, delta)?;
        let exp = discretize_exponential(&sys, delta)?;
        println!("delta = {delta}");
        for (name, disc) in [("bilinear", &bil), ("exponential", &exp)] {
            let diag = disc.abar().diag();
            let (rho, exact) = disc.spectral_radius_estimate()?;
            println!(
                "  {name:12} Abar diag = [{:.6}, {:.6}]  rho = {:.6}{}  Bbar = [{:.6}, {:.6}]",
                diag[0],
                diag[1],
                rho,
                if exact { "" } else { " (est)" },
                disc.bbar().get(0, 0),
                disc.bbar().get(1, 0),
            );
        }
        // The bilinear rule maps eigenvalue lambda to (1 + d l/2)/(1 - d l/2),
        // the exponential rule to e^(d l); both stay inside the unit disk.
        let lam = -1.0f64;
        println!(
            "  eigenvalue -1 maps to {:.6} (bilinear) vs {:.6} (exponential)",
            (1.0 + delta * lam / 2.0) / (1.0 - delta * lam / 2.0),
            (delta * lam).exp()
        );
    }
    Ok(())
}

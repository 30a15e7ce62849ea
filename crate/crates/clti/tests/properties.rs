//! Cross-module properties: the cascade against its oracles, structural
//! invariants of apply, PLR error/flop bounds, and persistence laws.

mod common;

use clti::cascade::{self, SignalBlock, DEFAULT_MAX_STAGES};
use clti::cli::random_system;
use clti::io;
use clti::linalg::{spectral_norm, Matrix, Vector};
use clti::oracles;
use clti::plr;
use common::hippo_system;
use proptest::prelude::*;

#[test]
fn cascade_covering_full_degree_equals_recurrence() {
    // Degree 2^S - 1 >= L - 1 makes the cascade an exact convolution.
    for seed in 0..10u64 {
        let sys = random_system(seed.wrapping_mul(97).wrapping_add(13), 0.9).unwrap();
        let len = 48;
        let plan = cascade::plan_fixed(&sys, 6).unwrap(); // degree 63 >= 47
        let input = SignalBlock::random_uniform(sys.input_dim(), len, seed);
        let (casc, _) = cascade::apply(&plan, &sys, &input).unwrap();
        let rec = oracles::recurrence_apply(&sys, &input).unwrap();
        let rel = casc.rel_l2_err(&rec).unwrap();
        assert!(rel <= 1e-11, "seed {seed}: rel {rel:.3e}");
    }
}

#[test]
fn planned_tolerance_carries_to_time_domain() {
    // With the planned S, the end-to-end error stays within 10x the tol.
    for (seed, tol) in [(3u64, 1e-6), (11, 1e-8), (29, 1e-10)] {
        let sys = random_system(seed, 0.9).unwrap();
        let plan = cascade::plan(&sys, tol, DEFAULT_MAX_STAGES).unwrap();
        let input = SignalBlock::random_uniform(sys.input_dim(), 512, seed + 1);
        let (casc, _) = cascade::apply(&plan, &sys, &input).unwrap();
        let rec = oracles::recurrence_apply(&sys, &input).unwrap();
        let rel = casc.rel_l2_err(&rec).unwrap();
        assert!(rel <= 10.0 * tol, "seed {seed} tol {tol:.1e}: rel {rel:.3e}");
    }
}

#[test]
fn causality_is_exact() {
    let sys = random_system(42, 0.9).unwrap();
    let plan = cascade::plan_fixed(&sys, 4).unwrap();
    let len = 24;
    let input = SignalBlock::random_uniform(sys.input_dim(), len, 5);
    let (full, _) = cascade::apply(&plan, &sys, &input).unwrap();
    for cut in [5usize, 12, 20] {
        // Zero all columns after `cut`.
        let mut cols: Vec<Vec<f64>> = (0..len).map(|l| input.column(l).to_vec()).collect();
        for col in cols.iter_mut().skip(cut + 1) {
            col.fill(0.0);
        }
        let truncated_input = SignalBlock::from_columns(&cols).unwrap();
        let (head, _) = cascade::apply(&plan, &sys, &truncated_input).unwrap();
        for l in 0..=cut {
            assert_eq!(head.column(l), full.column(l), "column {l} after cut {cut}");
        }
    }
}

#[test]
fn plr_matvec_error_bound_holds_on_seeded_vectors() {
    let sys = hippo_system(100);
    let eps = 1e-10;
    let built = plr::plr_build(sys.abar(), eps, 16).unwrap();
    let norm_a = spectral_norm(sys.abar()).unwrap();
    // c_tree = 2 log2(m / leaf) + 1
    let c_tree = 2.0 * (100.0f64 / 16.0).log2() + 1.0;
    for seed in 0..100u64 {
        let x = SignalBlock::random_uniform(100, 1, seed);
        let xv = x.column(0);
        let fast = built.matvec(xv).unwrap();
        let dense = clti::linalg::mat_vec(sys.abar(), &Vector::from_vec(xv.to_vec()).unwrap()).unwrap();
        let err: f64 = fast
            .iter()
            .zip(dense.data())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let xnorm: f64 = xv.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(
            err <= c_tree * eps * norm_a * xnorm,
            "seed {seed}: err {err:.3e} bound {:.3e}",
            c_tree * eps * norm_a * xnorm
        );
    }
}

#[test]
fn plr_flops_sane_at_larger_size() {
    // Rank stays <= 2 for the discretized operator even at m = 256, so the
    // compressed matvec must undercut the dense 2 m^2 count.
    let m = 256;
    let sys = hippo_system(m);
    let built = plr::plr_build(sys.abar(), 1e-10, 16).unwrap();
    assert!(built.max_offdiag_rank() <= 2);
    assert!((built.max_offdiag_rank() * ((m / 16) as f64).log2() as usize * 4) < m);
    let x = SignalBlock::random_uniform(m, 1, 7);
    let mut flops = 0u64;
    built.matvec_counted(x.column(0), &mut flops).unwrap();
    assert!(
        flops <= (2 * m * m) as u64,
        "plr flops {flops} vs dense {}",
        2 * m * m
    );
}

proptest! {
    #[test]
    fn apply_is_linear(seed in 0u64..200, alpha in -3.0f64..3.0, beta in -3.0f64..3.0) {
        let sys = random_system(seed, 0.9).unwrap();
        let plan = cascade::plan_fixed(&sys, 4).unwrap();
        let len = 20;
        let u = SignalBlock::random_uniform(sys.input_dim(), len, seed + 1);
        let w = SignalBlock::random_uniform(sys.input_dim(), len, seed + 2);
        let mixed_cols: Vec<Vec<f64>> = (0..len)
            .map(|l| {
                u.column(l)
                    .iter()
                    .zip(w.column(l))
                    .map(|(a, b)| alpha * a + beta * b)
                    .collect()
            })
            .collect();
        let mixed = SignalBlock::from_columns(&mixed_cols).unwrap();
        let (yu, _) = cascade::apply(&plan, &sys, &u).unwrap();
        let (yw, _) = cascade::apply(&plan, &sys, &w).unwrap();
        let (ym, _) = cascade::apply(&plan, &sys, &mixed).unwrap();
        let mut num = 0.0f64;
        let mut den = 0.0f64;
        for l in 0..len {
            for i in 0..sys.output_dim() {
                let want = alpha * yu.column(l)[i] + beta * yw.column(l)[i];
                num += (ym.column(l)[i] - want) * (ym.column(l)[i] - want);
                den += want * want;
            }
        }
        let rel = if den > 0.0 { num.sqrt() / den.sqrt() } else { num.sqrt() };
        prop_assert!(rel <= 1e-12, "rel {rel:.3e}");
    }

    #[test]
    fn recurrence_equals_convolution_on_random_systems(seed in 0u64..150, len in 1usize..128) {
        let sys = random_system(seed, 0.85).unwrap();
        let input = SignalBlock::random_uniform(sys.input_dim(), len, seed ^ 0xabcd);
        let rec = oracles::recurrence_apply(&sys, &input).unwrap();
        let kernel = oracles::kernel_materialize(&sys, len).unwrap();
        let conv = oracles::conv_apply(&kernel, &input).unwrap();
        let rel = conv.rel_l2_err(&rec).unwrap();
        prop_assert!(rel <= 1e-12, "rel {rel:.3e}");
    }

    #[test]
    fn clti_files_roundtrip(rows in 1usize..6, cols in 1usize..6, seed in 0u64..1000) {
        let dir = tempfile::tempdir().unwrap();
        let block = SignalBlock::random_uniform(rows, cols, seed);
        let data: Vec<f64> = block.data().to_vec();
        let matrix = Matrix::from_vec(rows, cols, data).unwrap();

        let mpath = dir.path().join("m.clti");
        io::write_matrix(&mpath, &matrix).unwrap();
        let mback = io::read_matrix(&mpath).unwrap();
        prop_assert_eq!(mback.data(), matrix.data());

        let spath = dir.path().join("s.clti");
        io::write_signal(&spath, &block).unwrap();
        let sback = io::read_signal(&spath).unwrap();
        prop_assert_eq!(sback.data(), block.data());
    }
}

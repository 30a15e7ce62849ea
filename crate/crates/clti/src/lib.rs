//! Fast time-domain convolution for discrete LTI state-space models.
//!
//! Applying a length-L block of inputs through the recurrence
//! `x_n = Abar x_(n-1) + Bbar u_n`, `y_n = C x_n + D u_n` normally costs one
//! state-matrix application per sample. This crate factors the z-domain
//! resolvent as `(I - W)^-1 = prod_s (I + W^(2^s))` and applies the truncated
//! product in the time domain as `S ~ log2 L` column-update stages, each
//! driven by one precomputed power `Abar^(2^s)`. Stage counts are selected
//! from a user tolerance with an explicit accuracy report, exact recurrence
//! and convolution oracles verify every path, and a partitioned-low-rank
//! backend accelerates the stage operators for rank-structured state
//! matrices.
//!
//! ## Modules
//!
//! - [`linalg`] - dense matrices/vectors, repeated squaring, spectral norms,
//!   truncated SVD
//! - [`lti`] - model construction (including the HiPPO generator),
//!   bilinear/exponential discretization, transfer-function evaluation
//! - [`cascade`] - stage planning, the staged convolution itself,
//!   frequency-domain error checks
//! - [`oracles`] - exact recurrence and direct-convolution references
//! - [`plr`] - partitioned-low-rank compression and fast matvec
//! - [`io`] - bit-exact `.clti` persistence, model directories, bench CSV
//! - [`cli`] - the `clti` command-line tool
//!
//! ## Examples
//!
//! Each major capability has a runnable example:
//!
//! ```bash
//! cargo run --release -p clti --example hippo_cascade
//! cargo run --release -p clti --example discretization
//! cargo run --release -p clti --example transfer_truncation
//! cargo run --release -p clti --example plr_compression
//! cargo run --release -p clti --example bench_scaling
//! cargo run --release -p clti --example model_files
//! ```

// Index-based loops are the clearer idiom in the dense kernels here.
#![allow(clippy::needless_range_loop)]

pub mod cascade;
pub mod cli;
pub mod error;
pub mod io;
pub mod linalg;
pub mod lti;
pub mod oracles;
pub mod plr;

pub use error::{Error, Result};

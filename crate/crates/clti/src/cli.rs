//! Command-line interface: generation, discretization, planning, application,
//! frequency checks, PLR reports, benchmarking and cross-method verification.
//!
//! Exit codes: 0 success, 1 numerical/verification failure, 2 usage or file
//! errors.

use crate::cascade::{self, CascadePlan, SignalBlock, DEFAULT_MAX_STAGES};
use crate::error::{Error, Result};
use crate::io::{self, ResultRow};
use crate::linalg::{spectral_norm, Matrix};
use crate::lti::{self, DiscreteLti};
use crate::oracles;
use crate::plr;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "clti", version, about = "Cascade convolution for LTI state-space models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Cascade,
    Recurrence,
    Conv,
    #[value(name = "cascade-plr")]
    CascadePlr,
}

impl Method {
    fn as_str(&self) -> &'static str {
        match self {
            Method::Cascade => "cascade",
            Method::Recurrence => "recurrence",
            Method::Conv => "conv",
            Method::CascadePlr => "cascade-plr",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    Bilinear,
    Exponential,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the m-by-m HiPPO state matrix and write it as a .clti file.
    Hippo {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Discretize a continuous (A, B) pair; B defaults to a column of ones.
    Discretize {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: Option<PathBuf>,
        #[arg(long)]
        delta: f64,
        #[arg(long, value_enum)]
        scheme: SchemeArg,
        #[arg(long)]
        out_a: PathBuf,
        #[arg(long)]
        out_b: PathBuf,
    },
    /// Select a stage count for a model directory and print the report.
    Plan {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_MAX_STAGES)]
        max_stages: usize,
    },
    /// Apply a model to an input signal with the chosen method.
    Apply {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, conflicts_with = "stages")]
        tol: Option<f64>,
        #[arg(long)]
        stages: Option<usize>,
        #[arg(long, default_value_t = 1e-10)]
        plr_eps: f64,
    },
    /// Sweep the unit circle and report max truncation error vs the bound.
    Freq {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        stages: usize,
        #[arg(long)]
        grid: usize,
    },
    /// Compress a matrix to PLR form and report ranks and matvec flops.
    Plr {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = plr::DEFAULT_LEAF_SIZE)]
        leaf: usize,
    },
    /// Time methods over block lengths and write a results CSV.
    Bench(BenchArgs),
    /// Run cross-method consistency checks; nonzero exit on any failure.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        deterministic: bool,
    },
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    model: PathBuf,
    /// Comma-separated block lengths, e.g. 1024,4096,16384.
    #[arg(long = "L")]
    lengths: String,
    /// Comma-separated methods from cascade,recurrence,conv,cascade-plr.
    #[arg(long)]
    methods: String,
    #[arg(long, default_value_t = 5)]
    reps: usize,
    #[arg(long)]
    csv: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 1e-10)]
    plr_eps: f64,
    #[arg(long, default_value_t = false, action = clap::ArgAction::Set)]
    deterministic: bool,
}

/// Parse arguments, run, and translate errors into exit codes.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::FileAccess { .. } | Error::Format { .. } | Error::InvalidArgument(_) => 2,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}

fn run(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Hippo { m, out } => {
            if m == 0 {
                return Err(Error::InvalidArgument("--m must be >= 1".into()));
            }
            let a = lti::hippo_matrix(m);
            io::write_matrix(&out, &a)?;
            println!("wrote {}x{} state matrix to {}", m, m, out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Discretize {
            a,
            b,
            delta,
            scheme,
            out_a,
            out_b,
        } => {
            let a = io::read_matrix(&a)?;
            let m = a.rows();
            let b = match b {
                Some(path) => io::read_matrix(&path)?,
                None => Matrix::from_vec(m, 1, vec![1.0; m])?,
            };
            let csys = lti::ContinuousLti::new(a, b, Matrix::zeros(1, m), Matrix::zeros(1, 1))?;
            let disc = match scheme {
                SchemeArg::Bilinear => lti::discretize_bilinear(&csys, delta)?,
                SchemeArg::Exponential => lti::discretize_exponential(&csys, delta)?,
            };
            io::write_matrix(&out_a, disc.abar())?;
            io::write_matrix(&out_b, disc.bbar())?;
            if disc.abar().is_triangular() {
                let diag = disc.abar().diag();
                println!("diagonal extremes: first={} last={}", diag[0], diag[m - 1]);
            }
            println!(
                "wrote Abar to {} and Bbar to {}",
                out_a.display(),
                out_b.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Plan {
            model,
            tol,
            max_stages,
        } => {
            let sys = io::read_model(&model)?;
            let plan = cascade::plan(&sys, tol, max_stages)?;
            print_plan(&plan, &sys)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Apply {
            model,
            method,
            input,
            out,
            tol,
            stages,
            plr_eps,
        } => {
            let sys = io::read_model(&model)?;
            let signal = io::read_signal(&input)?;
            let prepared = prepare_method(&sys, method, signal.len(), tol, stages, plr_eps)?;
            match &prepared {
                Prepared::Cascade(plan) => print_plan(plan, &sys)?,
                Prepared::CascadePlr(plan, compressed) => {
                    print_plan(plan, &sys)?;
                    let ranks: Vec<usize> =
                        compressed.iter().map(|p| p.max_offdiag_rank()).collect();
                    println!("plr max offdiag ranks per power: {ranks:?}");
                }
                _ => {}
            }
            let (output, _, matvecs) = execute_method(&prepared, &sys, &signal)?;
            println!("state matvecs: {matvecs}");
            io::write_signal(&out, &output)?;
            println!("wrote {}x{} output to {}", output.dim(), output.len(), out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Freq {
            model,
            stages,
            grid,
        } => {
            let sys = io::read_model(&model)?;
            let plan = cascade::plan_fixed(&sys, stages)?;
            let (max_error, bound) = cascade::frequency_check(&plan, &sys, grid)?;
            println!(
                "stages={} grid={} max_error={:.6e} bound={:.6e}{}",
                stages,
                grid,
                max_error,
                bound,
                if plan.gamma() >= 1.0 { " (heuristic)" } else { "" }
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Plr { a, eps, leaf } => {
            let a = io::read_matrix(&a)?;
            let m = a.rows();
            let built = plr::plr_build(&a, eps, leaf)?;
            let x = SignalBlock::random_uniform(m, 1, 1);
            let mut flops = 0u64;
            let y = built.matvec_counted(x.column(0), &mut flops)?;
            let dense = crate::linalg::mat_vec(
                &a,
                &crate::linalg::Vector::from_vec(x.column(0).to_vec())?,
            )?;
            let diff: f64 = y
                .iter()
                .zip(dense.data())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let rel = if dense.norm() > 0.0 { diff / dense.norm() } else { diff };
            println!(
                "size={} leaf={} eps={:.3e} max_offdiag_rank={} matvec_flops={} dense_flops={} rel_matvec_err={:.3e}",
                m,
                built.leaf_size(),
                eps,
                built.max_offdiag_rank(),
                flops,
                2 * m * m,
                rel
            );
            println!("offdiag ranks: {:?}", built.offdiag_ranks());
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench(args) => {
            bench(args)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            seed,
            tol,
            deterministic: _,
        } => verify(seed, tol),
    }
}

fn print_plan(plan: &CascadePlan, sys: &DiscreteLti) -> Result<()> {
    let bound = cascade::bound(plan, sys)?;
    let marker = if plan.is_heuristic() { " (heuristic)" } else { "" };
    println!(
        "stages={} gamma={:.12} rho={:.12}{} bound={:.6e}{} tail={:.6e} degree={}",
        plan.stages(),
        plan.gamma(),
        plan.rho_hat(),
        if plan.rho_exact() { "" } else { " (estimate)" },
        bound,
        marker,
        plan.heuristic_tail(),
        (1u128 << plan.stages()) - 1
    );
    Ok(())
}

/// Per-method state built once before any timing: plans, compressed powers
/// or materialized kernels.
enum Prepared {
    Cascade(CascadePlan),
    CascadePlr(CascadePlan, Vec<plr::PlrMatrix>),
    Recurrence,
    Conv(oracles::Kernel),
}

fn prepare_method(
    sys: &DiscreteLti,
    method: Method,
    input_len: usize,
    tol: Option<f64>,
    stages: Option<usize>,
    plr_eps: f64,
) -> Result<Prepared> {
    let make_plan = || -> Result<CascadePlan> {
        match stages {
            Some(s) => cascade::plan_fixed(sys, s),
            None => cascade::plan(sys, tol.unwrap_or(1e-12), DEFAULT_MAX_STAGES),
        }
    };
    Ok(match method {
        Method::Cascade => Prepared::Cascade(make_plan()?),
        Method::CascadePlr => {
            let plan = make_plan()?;
            let compressed = plr::plr_power_build(sys, plan.stages(), plr_eps)?;
            Prepared::CascadePlr(plan, compressed)
        }
        Method::Recurrence => Prepared::Recurrence,
        Method::Conv => Prepared::Conv(oracles::kernel_materialize(sys, input_len)?),
    })
}

/// Apply a prepared method; returns the output, the stage count used, and
/// the instrumented matvec count.
fn execute_method(
    prepared: &Prepared,
    sys: &DiscreteLti,
    input: &SignalBlock,
) -> Result<(SignalBlock, usize, u64)> {
    match prepared {
        Prepared::Cascade(plan) => {
            let (out, stats) = cascade::apply(plan, sys, input)?;
            Ok((out, plan.stages(), stats.matvec_count))
        }
        Prepared::CascadePlr(plan, compressed) => {
            let (out, stats) =
                cascade::apply_with_operators(compressed, plan.stages(), sys, input)?;
            Ok((out, plan.stages(), stats.matvec_count))
        }
        Prepared::Recurrence => {
            let out = oracles::recurrence_apply(sys, input)?;
            Ok((out, 0, input.len() as u64))
        }
        Prepared::Conv(kernel) => {
            let out = oracles::conv_apply(kernel, input)?;
            let matvecs = (input.len() as u64).saturating_sub(1) * sys.input_dim() as u64;
            Ok((out, 0, matvecs))
        }
    }
}

fn bench(args: BenchArgs) -> Result<()> {
    let sys = io::read_model(&args.model)?;
    let lengths: Vec<usize> = args
        .lengths
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidArgument(format!("bad length '{tok}'")))
        })
        .collect::<Result<_>>()?;
    let methods: Vec<Method> = args
        .methods
        .split(',')
        .map(|tok| match tok.trim() {
            "cascade" => Ok(Method::Cascade),
            "recurrence" => Ok(Method::Recurrence),
            "conv" => Ok(Method::Conv),
            "cascade-plr" => Ok(Method::CascadePlr),
            other => Err(Error::InvalidArgument(format!("unknown method '{other}'"))),
        })
        .collect::<Result<_>>()?;
    if args.reps == 0 {
        return Err(Error::InvalidArgument("--reps must be >= 1".into()));
    }

    let mut rows = Vec::new();
    for &len in &lengths {
        // Load phase: inputs, plans/kernels and the oracle reference are all
        // built before any timing starts.
        let input = SignalBlock::random_uniform(sys.input_dim(), len, args.seed.wrapping_add(len as u64));
        let reference = oracles::recurrence_apply(&sys, &input)?;
        for &method in &methods {
            let prepared = prepare_method(&sys, method, len, Some(args.tol), None, args.plr_eps)?;
            // Warm pass, untimed; also yields stage/matvec counts and the error.
            let (out, stages, matvecs) = execute_method(&prepared, &sys, &input)?;
            let rel = if method == Method::Recurrence {
                None
            } else {
                Some(out.rel_l2_err(&reference)?)
            };
            let mut samples = Vec::with_capacity(args.reps);
            for _ in 0..args.reps {
                let t0 = Instant::now();
                let _ = execute_method(&prepared, &sys, &input)?;
                samples.push(t0.elapsed().as_nanos() as u64);
            }
            samples.sort_unstable();
            let wall_ns = samples[samples.len() / 2];
            println!(
                "L={len} method={} stages={} matvecs={} median_ns={} rel_err={}",
                method.as_str(),
                stages,
                matvecs,
                wall_ns,
                rel.map(|v| format!("{v:.3e}")).unwrap_or_else(|| "-".into())
            );
            rows.push(ResultRow {
                method: method.as_str().to_string(),
                m: sys.state_dim(),
                p: sys.input_dim(),
                q: sys.output_dim(),
                len,
                stages,
                tol: args.tol,
                matvec_count: matvecs,
                wall_ns,
                rel_l2_err: rel,
            });
        }
    }
    io::export_csv(&rows, &args.csv)?;
    println!("wrote {} rows to {}", rows.len(), args.csv.display());
    Ok(())
}

/// Canonical verification model: the m=100 HiPPO system with B = ones,
/// C = ones/m, D = 0, discretized at delta = 5e-4.
pub fn hippo_reference_system() -> Result<DiscreteLti> {
    let m = 100;
    let csys = lti::ContinuousLti::new(
        lti::hippo_matrix(m),
        Matrix::from_vec(m, 1, vec![1.0; m])?,
        Matrix::from_vec(1, m, vec![1.0 / m as f64; m])?,
        Matrix::zeros(1, 1),
    )?;
    lti::discretize_bilinear(&csys, 0.5e-3)
}

/// Seeded dense system with every dimension drawn small and `Abar` rescaled
/// to the requested spectral norm.
pub fn random_system(seed: u64, sigma: f64) -> Result<DiscreteLti> {
    let noise = SignalBlock::random_uniform(1, 256, seed);
    let mut stream = noise.data().iter().copied();
    let mut take = |n: usize| -> Vec<f64> { (0..n).map(|_| stream.next().unwrap()).collect() };
    let m = 2 + (seed % 7) as usize; // 2..=8
    let p = 1 + (seed % 2) as usize;
    let q = 1 + (seed % 3) as usize;
    let raw = Matrix::from_vec(m, m, take(m * m))?;
    let norm = spectral_norm(&raw)?;
    let abar = if norm > 0.0 { raw.scale(sigma / norm) } else { raw };
    DiscreteLti::new(
        abar,
        Matrix::from_vec(m, p, take(m * p))?,
        Matrix::from_vec(q, m, take(q * m))?,
        Matrix::from_vec(q, p, take(q * p))?,
        1.0,
        lti::Scheme::Bilinear,
    )
}

struct CheckReport {
    failures: usize,
}

impl CheckReport {
    fn record(&mut self, name: &str, pass: bool, detail: String) {
        if pass {
            println!("PASS {name}: {detail}");
        } else {
            self.failures += 1;
            println!("FAIL {name}: {detail}");
        }
    }
}

fn verify(seed: u64, tol: f64) -> Result<ExitCode> {
    let mut report = CheckReport { failures: 0 };
    let hippo = hippo_reference_system()?;

    // cascade vs recurrence on seeded random systems plus the HiPPO model
    {
        let mut worst = 0.0f64;
        for k in 0..8u64 {
            let sys = random_system(seed.wrapping_add(31 * k + 1), 0.9)?;
            let plan = cascade::plan(&sys, tol.min(1e-8), DEFAULT_MAX_STAGES)?;
            let input = SignalBlock::random_uniform(sys.input_dim(), 96, seed.wrapping_add(k));
            let (casc, _) = cascade::apply(&plan, &sys, &input)?;
            let rec = oracles::recurrence_apply(&sys, &input)?;
            worst = worst.max(casc.rel_l2_err(&rec)?);
        }
        let plan = cascade::plan(&hippo, 1e-12, DEFAULT_MAX_STAGES)?;
        let input = SignalBlock::random_uniform(1, 2048, seed.wrapping_add(99));
        let (casc, _) = cascade::apply(&plan, &hippo, &input)?;
        let rec = oracles::recurrence_apply(&hippo, &input)?;
        worst = worst.max(casc.rel_l2_err(&rec)?);
        report.record(
            "cascade-vs-recurrence",
            worst <= tol.max(1e-10),
            format!("worst rel l2 err {worst:.3e} (tol {:.1e})", tol.max(1e-10)),
        );
    }

    // recurrence vs direct convolution
    {
        let mut worst = 0.0f64;
        for k in 0..8u64 {
            let sys = random_system(seed.wrapping_add(17 * k + 5), 0.85)?;
            let input = SignalBlock::random_uniform(sys.input_dim(), 80, seed.wrapping_add(2 * k));
            let rec = oracles::recurrence_apply(&sys, &input)?;
            let kernel = oracles::kernel_materialize(&sys, input.len())?;
            let conv = oracles::conv_apply(&kernel, &input)?;
            worst = worst.max(conv.rel_l2_err(&rec)?);
        }
        report.record(
            "recurrence-vs-conv",
            worst <= tol.max(1e-12),
            format!("worst rel l2 err {worst:.3e} (tol {:.1e})", tol.max(1e-12)),
        );
    }

    // frequency-domain truncation error against the reported bound
    {
        let mut ok = true;
        let mut worst_margin = f64::INFINITY;
        for k in 0..8u64 {
            let sys = random_system(seed.wrapping_add(13 * k + 3), 0.9)?;
            let plan = cascade::plan(&sys, 1e-8, DEFAULT_MAX_STAGES)?;
            let (max_err, bnd) = cascade::frequency_check(&plan, &sys, 128)?;
            if max_err > bnd {
                ok = false;
            }
            if bnd > 0.0 {
                worst_margin = worst_margin.min(bnd - max_err);
            }
        }
        let plan15 = cascade::plan_fixed(&hippo, 15)?;
        let (hippo_err, _) = cascade::frequency_check(&plan15, &hippo, 64)?;
        ok &= hippo_err <= 1e-10;
        report.record(
            "frequency-bound",
            ok,
            format!("hippo S=15 max err {hippo_err:.3e}, min margin {worst_margin:.3e}"),
        );
    }

    // PLR backend vs dense backend
    {
        let plan = cascade::plan(&hippo, 1e-12, DEFAULT_MAX_STAGES)?;
        let input = SignalBlock::random_uniform(1, 512, seed.wrapping_add(7));
        let (dense_out, _) = cascade::apply(&plan, &hippo, &input)?;
        let compressed = plr::plr_power_build(&hippo, plan.stages(), 1e-10)?;
        let (plr_out, _) =
            cascade::apply_with_operators(&compressed, plan.stages(), &hippo, &input)?;
        let rel = plr_out.rel_l2_err(&dense_out)?;
        report.record(
            "plr-vs-dense",
            rel <= (100.0 * tol).max(1e-8),
            format!("rel l2 err {rel:.3e} (tol {:.1e})", (100.0 * tol).max(1e-8)),
        );
    }

    if report.failures == 0 {
        println!("verify: all checks passed");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("verify: {} check(s) failed", report.failures);
        Ok(ExitCode::from(1))
    }
}

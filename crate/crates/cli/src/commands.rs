//! Subcommand implementations.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{anyhow, Context, Result};
use clap::Args;

use fracops_core::ell1::{ell1_derivative, ell1_frac_derivative, Ell1Path};
use fracops_core::frac_gd::{descend, DescentConfig, DescentStatus, Objective};
use fracops_core::gl::{gl_derivative, GLPlan};
use fracops_core::io;
use fracops_core::laplace::{
    invert_stehfest, invert_talbot, lt_derivative, LaplaceField, STEHFEST_TERMS,
    TALBOT_NODES,
};
use fracops_core::rl_caputo::{caputo_derivative, rl_derivative, Side};
use fracops_core::special::{mittag_leffler, MLParams};
use fracops_core::types::{DistributionalSignal, FracOrder, Grid, SignalSource};
use fracops_core::validation;

use crate::config::FileConfig;
use crate::UsageError;

const MAX_GRID_POINTS: usize = 10_000_000;

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(UsageError(msg.into()))
}

#[derive(Args, Debug)]
pub struct DerivArgs {
    /// gl | rl | caputo | laplace | ell1
    #[arg(long)]
    method: Option<String>,
    /// differintegration order (optional for ell1, which defaults to its
    /// first-order operator)
    #[arg(long)]
    alpha: Option<f64>,
    /// expression in t, e.g. "t^2" or "abs(t-1)"
    #[arg(long)]
    f: Option<String>,
    /// input CSV with header `t,value` and strictly increasing t
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    t0: Option<f64>,
    #[arg(long)]
    t1: Option<f64>,
    /// number of grid nodes (2 ..= 1e7)
    #[arg(long)]
    n: Option<usize>,
    /// output CSV path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// rl only: left | right terminal
    #[arg(long)]
    side: Option<String>,
    /// ell1 only: closed | laplace evaluation path
    #[arg(long)]
    path: Option<String>,
    /// gl only: short-memory truncation window in time units
    #[arg(long)]
    memory: Option<f64>,
}

pub fn run_deriv(args: DerivArgs, cfg: &FileConfig) -> Result<u8> {
    let method = cfg
        .resolve_opt(args.method, "method")?
        .ok_or_else(|| usage("--method is required (gl, rl, caputo, laplace, ell1)"))?;
    let alpha = cfg.resolve_opt(args.alpha, "alpha")?;
    let expr: Option<String> = cfg.resolve_opt(args.f, "f")?;
    let input: Option<PathBuf> = cfg.resolve_opt(args.input, "input")?;

    let (signal, grid) = match (&expr, &input) {
        (Some(_), Some(_)) => {
            return Err(usage("give exactly one of --f and --input, not both"))
        }
        (None, None) => return Err(usage("one of --f or --input is required")),
        (Some(text), None) => {
            let t0 = cfg.resolve(args.t0, "t0", 0.0)?;
            let t1 = cfg.resolve(args.t1, "t1", 1.0)?;
            let n = cfg.resolve(args.n, "n", 1001usize)?;
            let grid = build_grid(t0, t1, n)?;
            (SignalSource::from_expr_str(text)?, grid)
        }
        (None, Some(path)) => {
            let file = File::open(path)
                .with_context(|| format!("cannot open {}", path.display()))?;
            // rejected before any computation when t is not increasing
            let (times, values) = io::read_samples(BufReader::new(file))?;
            let t0 = cfg.resolve(args.t0, "t0", times[0])?;
            let t1 = cfg.resolve(args.t1, "t1", *times.last().unwrap())?;
            let n = cfg.resolve(args.n, "n", times.len().max(2))?;
            let grid = build_grid(t0, t1, n)?;
            let resampled = io::resample_to_grid(&times, &values, &grid)?;
            (SignalSource::from_samples(grid.clone(), resampled)?, grid)
        }
    };

    let need_alpha = || {
        alpha.ok_or_else(|| usage(format!("--alpha is required for method `{method}`")))
    };

    let result: DistributionalSignal = match method.as_str() {
        "gl" => {
            let order = FracOrder::new(need_alpha()?)?;
            let memory = cfg.resolve_opt(args.memory, "memory")?;
            let plan = match memory {
                Some(window) => GLPlan::with_memory_length(order, grid.clone(), window)?,
                None => GLPlan::new(order, grid.clone()),
            };
            gl_derivative(&signal, &plan)?
        }
        "rl" => {
            let side = match cfg.resolve(args.side, "side", "left".to_string())?.as_str() {
                "left" => Side::Left,
                "right" => Side::Right,
                other => return Err(usage(format!("--side must be left or right, got {other}"))),
            };
            rl_derivative(&signal, FracOrder::new(need_alpha()?)?, &grid, side)?
        }
        "caputo" => caputo_derivative(&signal, FracOrder::new(need_alpha()?)?, &grid)?,
        "laplace" => lt_derivative(&signal, need_alpha()?, &grid)?,
        "ell1" => {
            let path = match cfg.resolve(args.path, "path", "closed".to_string())?.as_str() {
                "closed" => Ell1Path::ClosedForm,
                "laplace" => Ell1Path::LaplaceNumeric,
                other => {
                    return Err(usage(format!("--path must be closed or laplace, got {other}")))
                }
            };
            let out = match alpha {
                Some(a) => ell1_frac_derivative(&signal, a, &grid, path)?,
                None => ell1_derivative(&signal, &grid, path)?,
            };
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            out.value
        }
        other => {
            return Err(usage(format!(
                "unknown method `{other}`; expected gl, rl, caputo, laplace or ell1"
            )))
        }
    };

    write_signal_out(&result, cfg.resolve_opt(args.out, "out")?)?;
    Ok(0)
}

fn build_grid(t0: f64, t1: f64, n: usize) -> Result<Grid> {
    if !(2..=MAX_GRID_POINTS).contains(&n) {
        return Err(usage(format!("--n must lie in [2, {MAX_GRID_POINTS}], got {n}")));
    }
    Ok(Grid::new(t0, t1, n)?)
}

fn write_signal_out(sig: &DistributionalSignal, out: Option<PathBuf>) -> Result<()> {
    match out {
        Some(path) => {
            let file = File::create(&path)
                .with_context(|| format!("cannot create {}", path.display()))?;
            let mut w = BufWriter::new(file);
            io::write_signal(&mut w, sig)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            io::write_signal(&mut w, sig)?;
            w.flush()?;
        }
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct MlArgs {
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    z: Option<f64>,
}

pub fn run_ml(args: MlArgs, cfg: &FileConfig) -> Result<u8> {
    let beta = cfg
        .resolve_opt(args.beta, "beta")?
        .ok_or_else(|| usage("--beta is required"))?;
    let gamma = cfg
        .resolve_opt(args.gamma, "gamma")?
        .ok_or_else(|| usage("--gamma is required"))?;
    let z = cfg.resolve_opt(args.z, "z")?.ok_or_else(|| usage("--z is required"))?;
    let value = mittag_leffler(MLParams::new(beta, gamma)?, z)?;
    println!("{value:.11e}");
    Ok(0)
}

#[derive(Args, Debug)]
pub struct InvlapArgs {
    /// transform expression in s, e.g. "1/s^1.5"
    #[arg(long = "F")]
    transform: Option<String>,
    /// talbot | stehfest
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    t: Option<f64>,
    /// Stehfest term count (even)
    #[arg(long)]
    n_terms: Option<usize>,
    /// Talbot node count
    #[arg(long)]
    n_nodes: Option<usize>,
}

pub fn run_invlap(args: InvlapArgs, cfg: &FileConfig) -> Result<u8> {
    let transform: String = cfg
        .resolve_opt(args.transform, "F")?
        .ok_or_else(|| usage("--F is required"))?;
    let t = cfg.resolve_opt(args.t, "t")?.ok_or_else(|| usage("--t is required"))?;
    let method = cfg.resolve(args.method, "method", "talbot".to_string())?;
    let field = LaplaceField::from_s_expr_str(&transform)?;
    let value = match method.as_str() {
        "talbot" => {
            let nodes = cfg.resolve(args.n_nodes, "n-nodes", TALBOT_NODES)?;
            invert_talbot(&field, t, nodes)?
        }
        "stehfest" => {
            let terms = cfg.resolve(args.n_terms, "n-terms", STEHFEST_TERMS)?;
            invert_stehfest(&field, t, terms)?
        }
        other => {
            return Err(usage(format!("--method must be talbot or stehfest, got {other}")))
        }
    };
    println!("{value:.11e}");
    Ok(0)
}

#[derive(Args, Debug)]
pub struct OptimizeArgs {
    /// fractional order in (0, 1]
    #[arg(long)]
    alpha: Option<f64>,
    /// l1 penalty weight
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    dim: Option<usize>,
    /// step size (default: half the classical stability bound)
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    base_offset: Option<f64>,
    /// output CSV path for the trace (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run_optimize(args: OptimizeArgs, cfg: &FileConfig) -> Result<u8> {
    let alpha = cfg.resolve(args.alpha, "alpha", 1.0)?;
    let lambda = cfg.resolve(args.lambda, "lambda", 0.0)?;
    let dim = cfg.resolve(args.dim, "dim", 2usize)?;
    let iters = cfg.resolve(args.iters, "iters", 100usize)?;
    let seed = cfg.resolve(args.seed, "seed", 0u64)?;
    let tolerance = cfg.resolve(args.tolerance, "tolerance", 1e-8)?;
    let base_offset = cfg.resolve(args.base_offset, "base-offset", 1.0)?;
    if dim == 0 || dim > 64 {
        return Err(usage(format!("--dim must lie in [1, 64], got {dim}")));
    }

    let objective = Objective::seeded(dim, lambda, seed)?;
    let step = match cfg.resolve_opt(args.step, "step")? {
        Some(s) => s,
        None => 0.5 / objective.eigen_upper_bound(),
    };
    let mut descent = DescentConfig::new(alpha, step)?;
    descent.max_iters = iters;
    descent.tolerance = tolerance;
    descent.base_offset = base_offset;

    // deterministic alternating start keeps runs reproducible
    let x0: Vec<f64> = (0..dim).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let trace = descend(&objective, &x0, &descent)?;

    let render = |w: &mut dyn Write| -> Result<()> {
        write!(w, "iter")?;
        for i in 0..dim {
            write!(w, ",x{i}")?;
        }
        writeln!(w, ",objective")?;
        for (k, (x, obj)) in trace.iterates.iter().zip(&trace.objectives).enumerate() {
            write!(w, "{k}")?;
            for v in x {
                write!(w, ",{v}")?;
            }
            writeln!(w, ",{obj}")?;
        }
        Ok(())
    };
    match cfg.resolve_opt(args.out, "out")? {
        Some(path) => {
            let file = File::create(&path)
                .with_context(|| format!("cannot create {}", path.display()))?;
            let mut w = BufWriter::new(file);
            render(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            render(&mut w)?;
            w.flush()?;
        }
    }

    match trace.status {
        DescentStatus::Converged { iterations } => {
            eprintln!("converged after {iterations} iterations");
        }
        DescentStatus::MaxIterations => eprintln!("stopped at the iteration budget"),
        DescentStatus::Diverged { at_iteration } => {
            eprintln!("diverged at iteration {at_iteration} (objective rose 10 times in a row)");
        }
    }
    Ok(0)
}

pub fn run_validate(suite: &str) -> Result<u8> {
    let reports = validation::run_suites(suite).map_err(|e| match e {
        fracops_core::Error::InvalidArgument(msg) => usage(msg),
        other => anyhow!(other),
    })?;

    let mut total = 0usize;
    let mut passed = 0usize;
    println!("{:<52} {:>18} {:>10}  status", "check", "observed", "tolerance");
    for report in &reports {
        for row in &report.rows {
            total += 1;
            passed += row.pass as usize;
            println!(
                "{:<52} {:>18.11e} {:>10.0e}  {}",
                format!("{} :: {}", report.suite, row.name),
                row.observed,
                row.tolerance,
                if row.pass { "PASS" } else { "FAIL" }
            );
        }
    }
    println!("summary: {passed}/{total} checks passed");
    Ok(if passed == total { 0 } else { 3 })
}

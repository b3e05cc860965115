//! Command-line front end: evaluate divergences on operator files, sweep
//! alpha, reproduce the support-gap counterexample, run fuzz suites, and
//! solve hypothesis-testing instances.
//!
//! Exit codes: 0 success, 1 numerical failure, 2 malformed input file,
//! 3 invalid parameter combination, 4 fuzz gate failed (the property's
//! expected outcome did not hold).

use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use renyi::divergences::{
    alpha_relative_renyi_with_tol, d0_with_tol, d_max_with_tol, d_min_with_tol,
    hypothesis_testing_with_tol, relative_entropy_with_tol, sandwiched_renyi_with_tol,
};
use renyi::io::{operator_from_json, OperatorJson, SYMMETRIZATION_WARN_TOL};
use renyi::verify::{
    counterexample_report, fuzz_alt, fuzz_dpi, fuzz_joint_convexity, fuzz_positivity,
    fuzz_upper_bound, FuzzReport,
};
use renyi::{DensityOperator, Error, PsdOperator, DEFAULT_RANK_TOL};

const DEFAULT_ALPHA_GRID: [f64; 8] = [0.1, 0.25, 0.5, 0.75, 0.9, 1.5, 2.0, 5.0];
const DEFAULT_R_GRID: [f64; 6] = [0.2, 0.5, 0.8, 1.0, 1.5, 3.0];
const DEFAULT_Q_GRID: [f64; 3] = [0.5, 1.0, 2.0];
/// Minimum margin for a data-processing counterexample to count as found.
const DPI_SEARCH_MARGIN: f64 = 1e-6;

#[derive(Parser)]
#[command(
    name = "renyi",
    about = "Quantum Renyi-type divergences between positive semi-definite operators",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one divergence on a pair of operator files.
    Eval {
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long)]
        quantity: Quantity,
        /// Order parameter; required for sandwiched and petz.
        #[arg(long)]
        alpha: Option<f64>,
        /// Type-I error budget; required for hypothesis.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Relative eigenvalue threshold for support decisions.
        #[arg(long)]
        rank_tol: Option<f64>,
    },
    /// Sweep alpha, printing sandwiched and petz values with their gap.
    Sweep {
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
        /// Explicit comma-separated alpha list (alternative to start/stop/count).
        #[arg(long, conflicts_with_all = ["start", "stop", "count", "scale"])]
        alphas: Option<String>,
        #[arg(long, requires_all = ["stop", "count"])]
        start: Option<f64>,
        #[arg(long)]
        stop: Option<f64>,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long, value_enum, default_value_t = Scale::Log)]
        scale: Scale,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        rank_tol: Option<f64>,
        /// Accepted for interface compatibility; the sweep is deterministic.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Reproduce the support-gap counterexample for a given off-diagonal c.
    Counterexample {
        #[arg(long)]
        c: f64,
        /// Smallest alpha the numeric path is evaluated at.
        #[arg(long, default_value_t = 1e-5)]
        alpha_min: f64,
    },
    /// Run a randomized property suite and gate on its expected outcome.
    Fuzz {
        #[arg(long)]
        property: Property,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Comma-separated Hilbert-space dimensions to draw from.
        #[arg(long, default_value = "2,3")]
        dims: String,
        #[arg(long, default_value_t = 2)]
        mixture_size: usize,
    },
    /// Solve a hypothesis-testing instance and emit the optimal test.
    Np {
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        rank_tol: Option<f64>,
    },
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Quantity {
    Sandwiched,
    Petz,
    Relative,
    Min,
    Max,
    Zero,
    Hypothesis,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Scale {
    Linear,
    Log,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Property {
    Dpi,
    JointConvexity,
    Lemma3,
    Positivity,
    Alt,
}

struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
    fn params(message: impl Into<String>) -> Self {
        Self {
            code: 3,
            message: message.into(),
        }
    }
    fn numerical(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
    fn gate(message: impl Into<String>) -> Self {
        Self {
            code: 4,
            message: message.into(),
        }
    }
}

/// Errors raised while computing (inputs already certified).
fn compute_error(e: Error) -> CliError {
    match e {
        Error::InvalidAlpha(_) | Error::InvalidEpsilon(_) | Error::InvalidParameter(_) => {
            CliError::params(e.to_string())
        }
        Error::NumericalFailure(_) | Error::SupportMismatch => CliError::numerical(e.to_string()),
        other => CliError::input(other.to_string()),
    }
}

fn main() {
    // Usage errors are invalid parameter combinations (exit 3); help and
    // version are ordinary successes.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            print!("{e}");
            return;
        }
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(3);
        }
    };
    match run(cli.command) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {}", e.message);
            std::process::exit(e.code);
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Eval {
            rho,
            sigma,
            quantity,
            alpha,
            epsilon,
            rank_tol,
        } => cmd_eval(&rho, &sigma, quantity, alpha, epsilon, rank_tol),
        Command::Sweep {
            rho,
            sigma,
            alphas,
            start,
            stop,
            count,
            scale,
            format,
            rank_tol,
            seed: _,
        } => {
            let grid = sweep_grid(alphas.as_deref(), start, stop, count, scale)?;
            cmd_sweep(&rho, &sigma, &grid, format, rank_tol)
        }
        Command::Counterexample { c, alpha_min } => cmd_counterexample(c, alpha_min),
        Command::Fuzz {
            property,
            alpha,
            trials,
            seed,
            dims,
            mixture_size,
        } => cmd_fuzz(property, alpha, trials, seed, &dims, mixture_size),
        Command::Np {
            rho,
            sigma,
            epsilon,
            rank_tol,
        } => cmd_np(&rho, &sigma, epsilon, rank_tol),
    }
}

fn load_operator(path: &PathBuf) -> Result<renyi::HermitianOperator, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let (op, defect) =
        operator_from_json(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    if defect > SYMMETRIZATION_WARN_TOL {
        eprintln!(
            "warning: {} required a Hermiticity correction of {defect:.3e}",
            path.display()
        );
    }
    Ok(op)
}

fn load_density(path: &PathBuf) -> Result<DensityOperator, CliError> {
    let op = load_operator(path)?;
    DensityOperator::from_op(op).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn load_psd(path: &PathBuf) -> Result<PsdOperator, CliError> {
    let op = load_operator(path)?;
    PsdOperator::new(op).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

/// 12-digit fixed-point value formatting; `inf` for infinite divergences.
fn fmt_value(v: f64) -> String {
    if v.is_infinite() {
        "inf".to_string()
    } else if v.is_nan() {
        "nan".to_string()
    } else {
        let v = if v == 0.0 { 0.0 } else { v };
        format!("{v:.12}")
    }
}

fn json_value(v: f64) -> serde_json::Value {
    if v.is_finite() {
        let v = if v == 0.0 { 0.0 } else { v };
        serde_json::json!(v)
    } else if v.is_nan() {
        serde_json::json!("nan")
    } else if v > 0.0 {
        serde_json::json!("inf")
    } else {
        serde_json::json!("-inf")
    }
}

fn cmd_eval(
    rho_path: &PathBuf,
    sigma_path: &PathBuf,
    quantity: Quantity,
    alpha: Option<f64>,
    epsilon: Option<f64>,
    rank_tol: Option<f64>,
) -> Result<(), CliError> {
    let needs_alpha = matches!(quantity, Quantity::Sandwiched | Quantity::Petz);
    if needs_alpha && alpha.is_none() {
        return Err(CliError::params("--alpha is required for this quantity"));
    }
    if !needs_alpha && alpha.is_some() {
        return Err(CliError::params("--alpha is not accepted for this quantity"));
    }
    if matches!(quantity, Quantity::Hypothesis) != epsilon.is_some() {
        return Err(CliError::params(
            "--epsilon is required for hypothesis and only for it",
        ));
    }
    let tol = rank_tol.unwrap_or(DEFAULT_RANK_TOL);
    let rho = load_density(rho_path)?;
    let sigma = load_psd(sigma_path)?;
    let value = match quantity {
        Quantity::Sandwiched => {
            sandwiched_renyi_with_tol(&rho, &sigma, alpha.unwrap(), tol)
                .map_err(compute_error)?
                .value
        }
        Quantity::Petz => {
            alpha_relative_renyi_with_tol(&rho, &sigma, alpha.unwrap(), tol)
                .map_err(compute_error)?
                .value
        }
        Quantity::Relative => {
            relative_entropy_with_tol(&rho, &sigma, tol)
                .map_err(compute_error)?
                .value
        }
        Quantity::Min => d_min_with_tol(&rho, &sigma, tol).map_err(compute_error)?.value,
        Quantity::Max => d_max_with_tol(&rho, &sigma, tol).map_err(compute_error)?.value,
        Quantity::Zero => d0_with_tol(&rho, &sigma, tol).map_err(compute_error)?.value,
        Quantity::Hypothesis => {
            hypothesis_testing_with_tol(&rho, &sigma, epsilon.unwrap(), tol)
                .map_err(compute_error)?
                .value
        }
    };
    println!("{}", fmt_value(value));
    Ok(())
}

fn sweep_grid(
    alphas: Option<&str>,
    start: Option<f64>,
    stop: Option<f64>,
    count: Option<usize>,
    scale: Scale,
) -> Result<Vec<f64>, CliError> {
    let mut grid: Vec<f64> = if let Some(list) = alphas {
        list.split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| CliError::params(format!("bad alpha '{s}': {e}")))
            })
            .collect::<Result<_, _>>()?
    } else {
        let (start, stop, count) = match (start, stop, count) {
            (Some(a), Some(b), Some(n)) => (a, b, n),
            _ => {
                return Err(CliError::params(
                    "provide either --alphas or --start/--stop/--count",
                ))
            }
        };
        if count == 0 {
            return Err(CliError::params("--count must be at least 1"));
        }
        if count == 1 {
            vec![start]
        } else {
            match scale {
                Scale::Linear => (0..count)
                    .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
                    .collect(),
                Scale::Log => {
                    if start <= 0.0 || stop <= 0.0 {
                        return Err(CliError::params("log scale needs positive bounds"));
                    }
                    let (ls, le) = (start.ln(), stop.ln());
                    (0..count)
                        .map(|i| (ls + (le - ls) * i as f64 / (count - 1) as f64).exp())
                        .collect()
                }
            }
        }
    };
    if grid.is_empty() {
        return Err(CliError::params("alpha grid is empty"));
    }
    if grid.iter().any(|&a| a <= 0.0 || a == 1.0 || !a.is_finite()) {
        return Err(CliError::params(
            "sweep alphas must be positive and finite, and the grid must not contain 1",
        ));
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(grid)
}

fn cmd_sweep(
    rho_path: &PathBuf,
    sigma_path: &PathBuf,
    grid: &[f64],
    format: Format,
    rank_tol: Option<f64>,
) -> Result<(), CliError> {
    let tol = rank_tol.unwrap_or(DEFAULT_RANK_TOL);
    let rho = load_density(rho_path)?;
    let sigma = load_psd(sigma_path)?;
    let mut rows = Vec::with_capacity(grid.len());
    for &alpha in grid {
        let sandwiched = sandwiched_renyi_with_tol(&rho, &sigma, alpha, tol)
            .map_err(compute_error)?
            .value;
        let petz = alpha_relative_renyi_with_tol(&rho, &sigma, alpha, tol)
            .map_err(compute_error)?
            .value;
        let gap = if sandwiched.is_infinite() && petz.is_infinite() {
            0.0
        } else {
            petz - sandwiched
        };
        rows.push((alpha, sandwiched, petz, gap));
    }
    match format {
        Format::Csv => {
            println!("# base=2");
            println!("alpha,sandwiched,petz,gap");
            for (alpha, s, p, g) in rows {
                println!(
                    "{},{},{},{}",
                    fmt_value(alpha),
                    fmt_value(s),
                    fmt_value(p),
                    fmt_value(g)
                );
            }
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = rows
                .into_iter()
                .map(|(alpha, s, p, g)| {
                    serde_json::json!({
                        "alpha": alpha,
                        "sandwiched": json_value(s),
                        "petz": json_value(p),
                        "gap": json_value(g),
                    })
                })
                .collect();
            let doc = serde_json::json!({ "base": 2, "rows": rows });
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        }
    }
    Ok(())
}

fn cmd_counterexample(c: f64, alpha_min: f64) -> Result<(), CliError> {
    let report = counterexample_report(c, alpha_min).map_err(compute_error)?;
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
    if report.invariants_hold() {
        Ok(())
    } else {
        Err(CliError::numerical(
            "counterexample report invariants failed",
        ))
    }
}

fn parse_dims(dims: &str) -> Result<Vec<usize>, CliError> {
    let parsed: Result<Vec<usize>, _> = dims
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect();
    let parsed = parsed.map_err(|e| CliError::params(format!("bad dims '{dims}': {e}")))?;
    if parsed.is_empty() || parsed.iter().any(|&d| d == 0) {
        return Err(CliError::params("dims must be positive integers"));
    }
    Ok(parsed)
}

fn cmd_fuzz(
    property: Property,
    alpha: Option<f64>,
    trials: u64,
    seed: u64,
    dims: &str,
    mixture_size: usize,
) -> Result<(), CliError> {
    let dims = parse_dims(dims)?;
    match property {
        Property::Dpi => {
            let alpha =
                alpha.ok_or_else(|| CliError::params("--alpha is required for dpi fuzzing"))?;
            let report = fuzz_dpi(alpha, trials, seed, &dims).map_err(compute_error)?;
            println!("{}", report.to_json());
            gate_dpi(alpha, &report)
        }
        Property::JointConvexity => {
            let alpha = alpha.ok_or_else(|| {
                CliError::params("--alpha is required for joint-convexity fuzzing")
            })?;
            let report = fuzz_joint_convexity(alpha, trials, seed, mixture_size, &dims)
                .map_err(compute_error)?;
            println!("{}", report.to_json());
            gate_clean(&report)
        }
        Property::Lemma3 => {
            let grid = single_or_default(alpha);
            let report = fuzz_upper_bound(trials, seed, &dims, &grid).map_err(compute_error)?;
            println!("{}", report.to_json());
            gate_clean(&report)
        }
        Property::Positivity => {
            let grid = single_or_default(alpha);
            let report = fuzz_positivity(trials, seed, &dims, &grid).map_err(compute_error)?;
            println!("{}", report.to_json());
            gate_clean(&report)
        }
        Property::Alt => {
            if alpha.is_some() {
                return Err(CliError::params("--alpha is not accepted for alt fuzzing"));
            }
            let (report_i, report_ii) =
                fuzz_alt(trials, seed, &dims, &DEFAULT_R_GRID, &DEFAULT_Q_GRID)
                    .map_err(compute_error)?;
            let doc = serde_json::json!([report_i, report_ii]);
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
            if report_i.is_clean() && report_ii.is_clean() {
                Ok(())
            } else {
                Err(CliError::gate("trace-power inequality fuzz found violations"))
            }
        }
    }
}

fn single_or_default(alpha: Option<f64>) -> Vec<f64> {
    match alpha {
        Some(a) => vec![a],
        None => DEFAULT_ALPHA_GRID.to_vec(),
    }
}

fn gate_clean(report: &FuzzReport) -> Result<(), CliError> {
    if report.is_clean() {
        Ok(())
    } else {
        Err(CliError::gate(format!(
            "{} violations recorded",
            report.violations.len()
        )))
    }
}

/// For alpha >= 1/2 monotonicity must hold; below 1/2 the run is a
/// counterexample search that succeeds by finding a solid violation.
fn gate_dpi(alpha: f64, report: &FuzzReport) -> Result<(), CliError> {
    if alpha >= 0.5 {
        gate_clean(report)
    } else if report
        .violations
        .iter()
        .any(|v| v.margin > DPI_SEARCH_MARGIN)
    {
        Ok(())
    } else {
        Err(CliError::gate(format!(
            "inconclusive: no data-processing violation with margin > {DPI_SEARCH_MARGIN:.0e} \
             found in {} trials",
            report.trials
        )))
    }
}

fn cmd_np(
    rho_path: &PathBuf,
    sigma_path: &PathBuf,
    epsilon: f64,
    rank_tol: Option<f64>,
) -> Result<(), CliError> {
    let tol = rank_tol.unwrap_or(DEFAULT_RANK_TOL);
    let rho = load_density(rho_path)?;
    let sigma = load_psd(sigma_path)?;
    let test = hypothesis_testing_with_tol(&rho, &sigma, epsilon, tol).map_err(compute_error)?;
    let doc = serde_json::json!({
        "value": json_value(test.value),
        "type1_error": test.type1_error,
        "type2_error": test.type2_error,
        "epsilon": test.epsilon,
        "test_operator": OperatorJson::from_matrix(test.test_operator.matrix()),
    });
    println!("{}", serde_json::to_string_pretty(&doc).unwrap());
    Ok(())
}

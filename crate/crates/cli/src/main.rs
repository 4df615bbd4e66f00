//! `hspline`: evaluation, verification suites, Riesz bounds and duals from the command line.

mod cache;
mod commands;
mod config;
mod report;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use config::{ConfigFile, Format, RunConfig, CACHE_ENV};
use std::path::PathBuf;
use std::process::ExitCode;

const CSV_HELP: &str = "\
CSV output: commands that produce data (eval points or grids, riesz symbol \
samples, dual profile samples) emit that series with a header row, e.g. \
x,y,t,value / lambda,symbol / t,dual. Otherwise one row per check with columns \
name,expected,measured,tolerance,relation,pass, followed by scalar values as \
name,,value,,value,. Numbers carry 17 significant digits in JSON and CSV and 10 \
in tables.

Exit codes: 0 all checks pass, 1 a check failed or the moment problem is \
unsolvable, 2 usage or configuration error, 3 numerical non-convergence.";

#[derive(Parser, Debug)]
#[command(name = "hspline", version, about = "B-splines on the Heisenberg group", after_long_help = CSV_HELP)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// JSON file whose fields override the command-line values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Seed for sample-point generation.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Grid cache directory (default: $HSPLINE_CACHE_DIR, else .hspline-cache).
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Absolute tolerance of adaptive quadrature
    #[arg(long, global = true)]
    pub abs_tol: Option<f64>,
    /// Relative tolerance of adaptive quadrature
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,
    /// Maximum bisection depth of adaptive quadrature
    #[arg(long, global = true)]
    pub max_depth: Option<usize>,
    /// Gauss–Legendre points per panel.
    #[arg(long, global = true)]
    pub quad_order: Option<usize>,
    /// Tolerance of truncated r-sums (sets the radius R).
    #[arg(long, global = true)]
    pub r_tol: Option<f64>,
    /// Initial λ-truncation of the φ₂ slice inversion.
    #[arg(long, global = true)]
    pub lambda_max: Option<f64>,
    /// Points of the λ-grid on [0, 1].
    #[arg(long, global = true)]
    pub lambda_grid: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate φₙ at points or on a cached grid.
    Eval(EvalArgs),
    /// Run a verification suite; exit code 0 iff every check passes.
    Verify(VerifyArgs),
    /// Riesz bounds and symbol diagnostics.
    Riesz(RieszArgs),
    /// Oblique dual generator from the finite moment problem.
    Dual(DualArgs),
}

#[derive(Args, Debug, Clone)]
pub struct EvalArgs {
    /// Spline order (1 to 3).
    #[arg(long)]
    pub n: Option<usize>,
    /// Evaluation point x,y,t (repeatable).
    #[arg(long = "point", value_name = "X,Y,T", allow_hyphen_values = true)]
    pub points: Vec<String>,
    /// Grid shape nx,ny,nt; the box defaults to the support of φₙ.
    #[arg(long, value_name = "NX,NY,NT")]
    pub grid_shape: Option<String>,
    /// Lower grid corner (default: support of φₙ)
    #[arg(long, value_name = "X,Y,T", allow_hyphen_values = true)]
    pub grid_lo: Option<String>,
    /// Upper grid corner (default: support of φₙ)
    #[arg(long, value_name = "X,Y,T", allow_hyphen_values = true)]
    pub grid_hi: Option<String>,
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    /// Recompute the grid even if a cache file exists.
    #[arg(long)]
    pub refresh_cache: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// (1/√2)χ_Q, n = 1.
    Closed,
    /// Inverse t-transform of the λ-slices, n = 2.
    Slice,
    /// Direct convolution: exact for n ≤ 2, nested quadrature for n = 3.
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Integrals,
    Periodization,
    Orthonormality,
    Kernels,
    VectorFields,
    Nonsymmetry,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum FieldForm {
    /// Difference-operator weights (v − y), (x − u).
    #[default]
    Printed,
    /// Including the derivative of the t-argument: (v − 2y), (2x − u).
    ChainRule,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Restrict the suite to one spline order.
    #[arg(long)]
    pub n: Option<usize>,
    /// Orthonormality window W: translates with |k|,|l|,|m| ≤ W.
    #[arg(long)]
    pub window: Option<i64>,
    /// Number of sample points.
    #[arg(long)]
    pub points: Option<usize>,
    /// Difference step of the vector-field check.
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long, value_enum, default_value_t)]
    pub form: FieldForm,
    /// λ values for the kernel suite.
    #[arg(long, value_delimiter = ',')]
    pub lambda: Vec<f64>,
}

#[derive(Args, Debug, Clone)]
#[command(group(ArgGroup::new("generator").required(true).args(["separable", "phi2_bounds", "psi_min", "chi"])))]
pub struct RieszArgs {
    /// Separable generator with cardinal B-spline profile: B1, B2, B3, ...
    #[arg(long, value_name = "Bk")]
    pub separable: Option<String>,
    /// Upper bound and lower estimates for φ₂.
    #[arg(long)]
    pub phi2_bounds: bool,
    /// Minimum of Ψ = 3 − A₃.
    #[arg(long)]
    pub psi_min: bool,
    /// ĥ = χ_{[0,p)}: constant symbol and the minimum of p − A_p.
    #[arg(long, value_name = "P")]
    pub chi: Option<usize>,
}

#[derive(Args, Debug, Clone)]
#[command(group(ArgGroup::new("generator").required(true).args(["separable", "phi"])))]
pub struct DualArgs {
    /// Separable generator χ_{[0,2]}χ_{[0,1]}B_k: B1, B2, B3, ...
    #[arg(long, value_name = "Bk")]
    pub separable: Option<String>,
    /// The spline φₙ itself.
    #[arg(long, value_name = "N")]
    pub phi: Option<usize>,
    /// Add this amount to d₀ before verifying (sensitivity demo).
    #[arg(long, allow_hyphen_values = true)]
    pub perturb: Option<f64>,
    /// Number of t-intervals in the φ̃ samples on [0, 1].
    #[arg(long)]
    pub samples: Option<usize>,
}

/// Failure of a command together with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl From<hspline::Error> for Failure {
    fn from(e: hspline::Error) -> Self {
        use hspline::Error as E;
        let code = match &e {
            E::Domain(_) | E::OrderTooHigh { .. } => 2,
            E::UnsolvableMoment(_) => 1,
            E::NonConvergence { .. } | E::TailNotCertified(_) | E::IllConditioned(_) | E::Bracket(_) => 3,
        };
        let mut message = e.to_string();
        if let E::UnsolvableMoment(_) = e {
            message.push_str(
                "\n  solvability condition fails: φ restricted to Q lies in the span of the other translates restricted to Q",
            );
        }
        Failure { code, message }
    }
}

impl From<cache::CacheError> for Failure {
    fn from(e: cache::CacheError) -> Self {
        Failure::usage(e.to_string())
    }
}

fn build_config(g: &GlobalArgs, file: &ConfigFile) -> Result<RunConfig, Failure> {
    let d = RunConfig::default();
    let env = std::env::var(CACHE_ENV).ok();
    let quad = hspline::QuadSpec {
        abs_tol: config::pick(&file.abs_tol, g.abs_tol.unwrap_or(d.quad.abs_tol)),
        rel_tol: config::pick(&file.rel_tol, g.rel_tol.unwrap_or(d.quad.rel_tol)),
        max_depth: config::pick(&file.max_depth, g.max_depth.unwrap_or(d.quad.max_depth)),
        base_order: config::pick(&file.quad_order, g.quad_order.unwrap_or(d.quad.base_order)),
    };
    let cfg = RunConfig {
        format: config::pick(&file.format, g.format.unwrap_or(d.format)),
        seed: config::pick(&file.seed, g.seed.unwrap_or(d.seed)),
        cache_dir: config::resolve_cache_dir(file.cache_dir.as_ref(), g.cache_dir.as_ref(), env),
        quad,
        r_tol: config::pick(&file.r_tol, g.r_tol.unwrap_or(d.r_tol)),
        lambda_max: config::pick(&file.lambda_max, g.lambda_max.unwrap_or(d.lambda_max)),
        lambda_grid: config::pick(&file.lambda_grid, g.lambda_grid.unwrap_or(d.lambda_grid)),
    };
    cfg.validate().map_err(Failure::usage)?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let file = match &cli.global.config {
        Some(p) => ConfigFile::load(p).map_err(Failure::usage)?,
        None => ConfigFile::default(),
    };
    let cfg = build_config(&cli.global, &file)?;
    let output = match &cli.command {
        Command::Eval(a) => commands::eval::run(a, &file, &cfg)?,
        Command::Verify(a) => commands::verify::run(a, &file, &cfg)?,
        Command::Riesz(a) => commands::riesz::run(a, &file, &cfg)?,
        Command::Dual(a) => commands::dual::run(a, &file, &cfg)?,
    };
    print!("{}", output.text);
    Ok(if output.pass { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

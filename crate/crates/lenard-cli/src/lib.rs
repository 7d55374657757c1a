//! Command-line surface for the hierarchy/symmetry/quadrature engine.
//!
//! Exit codes: `0` = success / claims verified, `1` = verification failed
//! or a computation could not be completed, `2` = usage error. Flags are
//! validated before any computation starts.
//!
//! Two different κ parameters appear across subcommands, related by
//! `κ_com = (−1)^N · 2 · κ_fam` at level `N`:
//! * `symmetry` and `verify` take the **commutator** κ of `[Q, H] = κH`;
//! * `constraint` and `check` take the **family** κ, the coefficient of
//!   the scaling term `xV′/2 + V` in the stationary constraint `G`.
//!
//! A config file (`--config FILE`, `key = value` lines, `#` comments) may
//! supply defaults for the optional flags `format`, `output`, `tol`,
//! `samples`, `potential`, `kappa`, `constants`, `bconstants`; required
//! flags must come from the command line. The environment variable
//! `LENARD_CACHE_DIR` names a directory where computed hierarchy levels
//! are persisted between invocations (validated on load, never trusted
//! blindly).

mod commands;
mod config;
mod render;

use std::ffi::OsString;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use lenard_core::Rat;

pub use config::FileConfig;
use render::{Format, SolveOutput};

/// Error carried out of a command handler, tagged with its exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// Bad flags, expressions, or input files: exit code 2.
    Usage(String),
    /// A computation ran and failed or could not be completed: exit code 1.
    Failed(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failed(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Failed(m) => m,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "lenard",
    version,
    about = "Exact engine for the stationary KdV hierarchy, higher-order symmetries \
             of H = -d²/dx² + V(x), and quadrature solution of Hψ = 0",
    after_help = "Exit codes: 0 success / verified, 1 verification failed, 2 usage error."
)]
pub struct Cli {
    /// Config file with `key = value` lines supplying defaults for optional
    /// flags (keys: format, output, tol, samples, potential, kappa,
    /// constants, bconstants)
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Print the hierarchy flow F_N and density U_N
    Hierarchy(HierarchyArgs),
    /// Print the stationary constraint G = F_N + Σ C_j F_j + κ(xV'/2 + V)
    Constraint(ConstraintArgs),
    /// Build a symmetry operator Q of order 2N+1 with [Q,H] = κH modulo G
    Symmetry(SymmetryArgs),
    /// Verify the commutator identity symbolically or numerically
    Verify(VerifyArgs),
    /// Solve Hψ = 0 by quadrature from a first-order symmetry coefficient ξ
    Solve(SolveArgs),
    /// Check a potential (catalog, expression, or CSV samples) against a constraint
    Check(CheckArgs),
    /// Inspect and re-verify the built-in potential catalog
    Catalog(CatalogArgs),
    /// Write golden regression files for the hierarchy and fixed operators
    Golden(GoldenArgs),
}

#[derive(Args)]
pub struct HierarchyArgs {
    /// Hierarchy level N >= 0
    #[arg(long, allow_negative_numbers = true)]
    pub level: i64,
    /// Output format [default: plain]
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Args)]
pub struct ConstraintArgs {
    /// Constraint level N >= 0
    #[arg(long, allow_negative_numbers = true)]
    pub level: i64,
    /// Family κ, the coefficient of the scaling term (rational) [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<String>,
    /// Comma-separated rational constants C_0,...,C_{N-1} [default: zeros]
    #[arg(long, allow_hyphen_values = true)]
    pub constants: Option<String>,
    /// Output format [default: plain]
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Args)]
pub struct SymmetryArgs {
    /// Operator order n = 2N+1 (odd)
    #[arg(long, allow_negative_numbers = true)]
    pub order: i64,
    /// Commutator κ of [Q,H] = κH (rational) [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<String>,
    /// Comma-separated rational constants C_0,...,C_{N-1} [default: zeros].
    /// At order 1 with κ != 0 the single constant is the translation
    /// parameter c of ξ = -κx/2 + c
    #[arg(long, allow_hyphen_values = true)]
    pub constants: Option<String>,
    /// Comma-separated rational gauge constants B_0,...,B_N added to the
    /// zeroth-order pieces of the first-order chain
    #[arg(long, allow_hyphen_values = true)]
    pub bconstants: Option<String>,
    /// Specialize the coefficients on this potential (catalog name or
    /// power-sum expression; must have an exact polynomial form)
    #[arg(long)]
    pub potential: Option<String>,
    /// Output format [default: plain]
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// Operator order n = 2N+1 (odd)
    #[arg(long, allow_negative_numbers = true)]
    pub order: i64,
    /// Commutator κ of [Q,H] = κH (rational) [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<String>,
    /// Comma-separated rational constants C_0,...,C_{N-1} [default: zeros]
    #[arg(long, allow_hyphen_values = true)]
    pub constants: Option<String>,
    /// Comma-separated rational gauge constants B_0,...,B_N
    #[arg(long, allow_hyphen_values = true)]
    pub bconstants: Option<String>,
    /// Potential to verify on (catalog name or power-sum expression)
    #[arg(long)]
    pub potential: Option<String>,
    /// Symbolic verification: reduce [Q,H] - κH modulo the constraint ideal
    /// (without --potential), or expand it exactly on the potential's
    /// polynomial form (with --potential) [default when no potential given]
    #[arg(long)]
    pub symbolic: bool,
    /// Numeric verification: apply [Q,H] - κH to the standard test
    /// functions on the potential's probe points [default with a potential]
    #[arg(long, conflicts_with = "symbolic")]
    pub numeric: bool,
    /// Numeric residual tolerance [default: 1e-8]
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Args)]
pub struct SolveArgs {
    /// Potential (catalog name or power-sum expression)
    #[arg(long)]
    pub potential: Option<String>,
    /// Symmetry coefficient ξ: `auto` (derive from a commuting membership
    /// claim, else integrate the ξ-equation numerically) or a power-sum
    /// expression in x such as `x`, `1+x^2`
    #[arg(long, allow_hyphen_values = true)]
    pub xi: String,
    /// Left endpoint of the solution interval
    #[arg(long, allow_negative_numbers = true)]
    pub x0: f64,
    /// Right endpoint of the solution interval
    #[arg(long, allow_negative_numbers = true)]
    pub x1: f64,
    /// Residual tolerance for the verified basis [default: 1e-8]
    #[arg(long)]
    pub tol: Option<f64>,
    /// Output format [default: json]
    #[arg(long, value_enum)]
    pub output: Option<SolveOutput>,
    /// Number of sample points [default: 201]
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Args)]
pub struct CheckArgs {
    /// Potential (catalog name or power-sum expression)
    #[arg(long)]
    pub potential: Option<String>,
    /// CSV file of samples with header `x,V` (derivatives computed by
    /// finite differences) or `x,V,V1,...,Vk` (supplied derivatives)
    #[arg(long, value_name = "FILE.csv", conflicts_with = "potential")]
    pub samples: Option<PathBuf>,
    /// Constraint level N >= 0
    #[arg(long, allow_negative_numbers = true)]
    pub level: i64,
    /// Family κ (rational). With --fit, omit to fit κ as an unknown
    /// [default without --fit: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<String>,
    /// Fit the constants C_j (and κ, if not given) by least squares
    /// instead of checking fixed values
    #[arg(long)]
    pub fit: bool,
    /// Comma-separated rational constants C_0,...,C_{N-1} for the direct
    /// check [default: zeros; ignored with --fit]
    #[arg(long, allow_hyphen_values = true)]
    pub constants: Option<String>,
    /// Residual tolerance [default: 1e-8]
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Args)]
pub struct CatalogArgs {
    #[command(subcommand)]
    pub action: CatalogAction,
}

#[derive(Subcommand)]
pub enum CatalogAction {
    /// List the built-in potential names
    List,
    /// Show one catalog entry
    Show {
        /// Catalog name
        name: String,
        /// Output format: plain or json [default: plain]
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Re-verify membership claims (all entries, or one)
    Verify {
        /// Catalog name (omit to verify every entry)
        name: Option<String>,
    },
}

#[derive(Args)]
pub struct GoldenArgs {
    #[command(subcommand)]
    pub action: GoldenAction,
}

#[derive(Subcommand)]
pub enum GoldenAction {
    /// Write the golden files (flows/densities up to level 5 and the fixed
    /// order-3 and order-5 operators) into a directory
    Write {
        /// Target directory (created if missing)
        #[arg(long)]
        dir: PathBuf,
    },
}

/// Parse arguments, dispatch, and return the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // --help/--version print to stdout and succeed; anything else
            // is a usage error.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let cfg = match FileConfig::load_opt(cli.config.as_deref()) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {}", e.message());
            return e.code();
        }
    };
    let result = match cli.command {
        Command::Hierarchy(args) => commands::hierarchy::run(&args, &cfg),
        Command::Constraint(args) => commands::constraint::run(&args, &cfg),
        Command::Symmetry(args) => commands::symmetry::run(&args, &cfg),
        Command::Verify(args) => commands::verify::run(&args, &cfg),
        Command::Solve(args) => commands::solve::run(&args, &cfg),
        Command::Check(args) => commands::check::run(&args, &cfg),
        Command::Catalog(args) => commands::catalog::run(&args, &cfg),
        Command::Golden(args) => commands::golden::run(&args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.code()
        }
    }
}

/// Validate a level flag: nonnegative and within `u32`.
fn checked_level(level: i64) -> Result<u32, CliError> {
    u32::try_from(level)
        .map_err(|_| CliError::Usage(format!("--level must be a nonnegative integer, got {level}")))
}

/// Validate an order flag: odd, positive, `n = 2N + 1`; returns `N`.
fn checked_order(order: i64) -> Result<u32, CliError> {
    if order < 1 || order % 2 == 0 {
        return Err(CliError::Usage(format!(
            "--order must be a positive odd integer 2N+1, got {order}"
        )));
    }
    checked_level((order - 1) / 2)
}

/// Parse one rational flag value like `-1`, `3/4`.
fn parse_rat(flag: &str, s: &str) -> Result<Rat, CliError> {
    Rat::from_str(s.trim())
        .map_err(|e| CliError::Usage(format!("--{flag}: bad rational {s:?}: {e}")))
}

/// Parse a comma-separated rational list; empty string means empty list.
fn parse_rat_list(flag: &str, s: &str) -> Result<Vec<Rat>, CliError> {
    let trimmed = s.trim();
    if trimmed.is_empty() {
        return Ok(Vec::new());
    }
    trimmed.split(',').map(|part| parse_rat(flag, part)).collect()
}

/// Resolve an optional rational flag against the config file, with default.
fn resolve_rat(
    flag_value: &Option<String>,
    key: &str,
    cfg: &FileConfig,
    default: Rat,
) -> Result<Rat, CliError> {
    match flag_value.as_deref().or_else(|| cfg.get(key)) {
        Some(s) => parse_rat(key, s),
        None => Ok(default),
    }
}

/// Resolve an optional constants list against the config file; `None`
/// means the flag was absent everywhere (callers substitute zeros).
fn resolve_rat_list(
    flag_value: &Option<String>,
    key: &str,
    cfg: &FileConfig,
) -> Result<Option<Vec<Rat>>, CliError> {
    match flag_value.as_deref().or_else(|| cfg.get(key)) {
        Some(s) => parse_rat_list(key, s).map(Some),
        None => Ok(None),
    }
}

/// Resolve an optional tolerance against the config file, with default.
fn resolve_tol(flag_value: Option<f64>, cfg: &FileConfig, default: f64) -> Result<f64, CliError> {
    let tol = match flag_value {
        Some(t) => t,
        None => match cfg.get("tol") {
            Some(s) => s
                .parse::<f64>()
                .map_err(|e| CliError::Usage(format!("config key tol: bad float {s:?}: {e}")))?,
            None => default,
        },
    };
    if !tol.is_finite() || tol <= 0.0 {
        return Err(CliError::Usage(format!(
            "--tol must be positive and finite, got {tol}"
        )));
    }
    Ok(tol)
}

//! `coarse`: command-line front end for coarse-core.
//!
//! Every subcommand prints one JSON report (to stdout or `--out`) carrying the
//! run manifest. Exit codes: 0 success, 1 a checked invariant failed, 2 bad
//! input, 3 a resource cap was hit.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "coarse", version, about = "Desk-scale coarse fixed-point computations")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Numerical tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Expander threshold on the two-sided gap.
    #[arg(long, global = true, default_value_t = 0.05)]
    pub threshold: f64,
    /// Root seed for every randomised step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Cap on group orders and block dimensions.
    #[arg(long, global = true, default_value_t = coarse_core::config::DEFAULT_ORDER_CAP)]
    pub cap: usize,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Chebyshev centre of a point set, or a check on two sets.
    Centres(CentresArgs),
    /// Spectral gaps and expander verdict for a group family.
    Spectra(SpectraArgs),
    /// Bounded-product demonstrations.
    Product(ProductArgs),
    /// Affine isometric actions given by a JSON file.
    Actions(ActionsArgs),
    /// Exact circle-lift certificate and boundedness checks.
    Homeo(HomeoArgs),
}

#[derive(Args, Debug)]
pub struct CentresArgs {
    /// Point-set files (CSV or JSON); two for `--check`.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// `hilbert` or `lp:P`.
    #[arg(long, default_value = "hilbert")]
    pub space: String,
    /// Compare two sets.
    #[arg(long, value_enum)]
    pub check: Option<CentreCheck>,
    /// The ε of the stability bound.
    #[arg(long, default_value_t = 0.5)]
    pub eps: f64,
    /// Also compute a shopping centre with this subspace budget (Hilbert).
    #[arg(long)]
    pub shopping: Option<usize>,
    /// Initial ε of the shopping schedule.
    #[arg(long, default_value_t = 0.2)]
    pub eps0: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum CentreCheck {
    /// Second set is a subset of the first: nested-centre bounds.
    Nested,
}

#[derive(Args, Debug)]
pub struct SpectraArgs {
    /// Family spec such as `cyclic:10..100:10` or `sl2:3,5,7`, or a group
    /// JSON file.
    pub family: String,
    /// Write `label,eigenvalue` rows here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Demo {
    UnboundedCocycle,
    Iteration,
    Kazhdan,
}

#[derive(Args, Debug)]
pub struct ProductArgs {
    #[arg(long, value_enum)]
    pub demo: Demo,
    /// Family for `iteration` and `kazhdan`.
    #[arg(long, default_value = "cyclic:3;cyclic:3")]
    pub family: String,
    /// Number of dyadic levels for `unbounded-cocycle`.
    #[arg(long, default_value_t = 6)]
    pub levels: usize,
    /// Iteration step budget.
    #[arg(long, default_value_t = 100_000)]
    pub steps: usize,
    /// Random words for `kazhdan`.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    /// Longest random word for `kazhdan`.
    #[arg(long, default_value_t = 20)]
    pub max_len: usize,
    /// Write the growth table or iteration trace here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ActionTask {
    Descend,
    Cocycle,
    Coboundary,
    /// Gaussian kernel embedding of a point set (the file is a point set).
    Gaussian,
}

#[derive(Args, Debug)]
pub struct ActionsArgs {
    #[arg(value_enum)]
    pub task: ActionTask,
    /// Action JSON file, or a point set for `gaussian`.
    pub file: PathBuf,
    /// Start point, comma separated (defaults to the origin).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub start: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iters: usize,
    /// Kernel parameter for `gaussian`.
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    /// Write the descent trace here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct HomeoArgs {
    /// Lift files to test for boundedness; without them the commutator
    /// certificate runs.
    pub lifts: Vec<PathBuf>,
    /// Bound on `|f(0)|`, a rational such as `1/2`.
    #[arg(long, default_value = "1")]
    pub bound: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e
                .downcast_ref::<coarse_core::Error>()
                .map_or(1, coarse_core::Error::exit_code);
            ExitCode::from(code as u8)
        }
    }
}

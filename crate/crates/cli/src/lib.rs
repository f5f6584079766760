//! Command-line front end: parses matrix, shape and map JSON, dispatches to
//! `cpspectra` and prints a JSON report.

mod check;
mod commands;
mod report;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cpspectra::algebra::AlgebraShape;
use cpspectra::Tolerance;

pub use report::{CliError, ErrorBody, ErrorReport, InputDigest, Report};

#[derive(Debug, Parser)]
#[command(
    name = "cpspectra",
    version,
    about = "Spectral invariants of completely positive maps"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand. Environment variables apply when the flag
/// is absent.
#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Relative singular-value threshold for numerical rank.
    #[arg(long, global = true, env = "CPSPECTRA_TOL_RANK")]
    pub tol_rank: Option<f64>,
    /// Eigenvalue floor for positive semidefiniteness.
    #[arg(long, global = true, env = "CPSPECTRA_TOL_PSD")]
    pub tol_psd: Option<f64>,
    /// Convergence threshold for iterations.
    #[arg(long, global = true, env = "CPSPECTRA_TOL_CONV")]
    pub tol_conv: Option<f64>,
    /// Work budget: words for `jsr --method brute`, superoperator side for
    /// `jsr --method tensor`.
    #[arg(long, global = true, env = "CPSPECTRA_BUDGET")]
    pub budget: Option<u64>,
    /// Seed for randomized corroboration.
    #[arg(long, global = true, env = "CPSPECTRA_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Include wall-clock time in the report.
    #[arg(long, global = true, env = "CPSPECTRA_TIMING")]
    pub timing: bool,
}

impl GlobalArgs {
    pub fn tolerance(&self) -> Tolerance {
        let mut tol = Tolerance::default();
        if let Some(x) = self.tol_rank {
            tol.rank_tol = x;
        }
        if let Some(x) = self.tol_psd {
            tol.psd_tol = x;
        }
        if let Some(x) = self.tol_conv {
            tol.conv_tol = x;
        }
        tol
    }
}

#[derive(Debug, Args)]
pub struct MapArgs {
    /// CP map JSON: {"shape": {"blocks": [...]}, "kraus": [matrix, ...]}.
    #[arg(long)]
    pub map: PathBuf,
    /// Block sizes such as "2,1"; overrides the shape in the map file.
    #[arg(long)]
    pub shape: Option<AlgebraShape>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum JsrMethodArg {
    Brute,
    Tensor,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Outer spectral radius of a tuple.
    OuterRadius {
        /// JSON array of matrices.
        #[arg(long)]
        tuple: PathBuf,
        /// Also report the power-iteration estimate at this power.
        #[arg(long)]
        gelfand: Option<usize>,
    },
    /// Bounds on the joint spectral radius of a tuple.
    Jsr {
        #[arg(long)]
        tuple: PathBuf,
        #[arg(long, value_enum, default_value = "brute")]
        method: JsrMethodArg,
        /// Maximal word length for the brute-force bounds.
        #[arg(long, default_value_t = 10)]
        n: usize,
        /// Tensor power for the tensor bounds.
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
    /// `r(w⁻¹ φ(w))`, an upper bound on the spectral radius.
    Friedland {
        #[command(flatten)]
        map: MapArgs,
        /// Strictly positive matrix JSON in the algebra.
        #[arg(long)]
        w: PathBuf,
    },
    /// Neumann-series witness `w` with `φ(w) = s(w − 1)`.
    Witness {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        s: f64,
    },
    /// Similarity `P` with `‖PAP⁻¹‖` close to `r(A)`.
    Balance {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 256)]
        horizon: usize,
        #[arg(long, default_value_t = 1e3)]
        threshold: f64,
    },
    /// Choi matrix, rank and positivity.
    Choi {
        #[command(flatten)]
        map: MapArgs,
    },
    /// A Kraus list recovered from the Choi matrix.
    Kraus {
        #[command(flatten)]
        map: MapArgs,
    },
    /// Orthonormal basis of the span of the Kraus operators.
    CoeffSpace {
        #[command(flatten)]
        map: MapArgs,
    },
    /// Whether a matrix lies in the coefficient space, with a domination constant.
    Member {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Maximal part of the map on its algebra.
    MaximalPart {
        #[command(flatten)]
        map: MapArgs,
    },
    /// Positive eigenvector `φ̂(1)` for the spectral radius.
    Perron {
        #[command(flatten)]
        map: MapArgs,
    },
    /// Irreducibility through the algebra generated by Kraus operators.
    Irreducible {
        #[command(flatten)]
        map: MapArgs,
        /// Random probes for the strict-positivity corroboration.
        #[arg(long, default_value_t = 64)]
        probes: usize,
    },
    /// Dimension of the algebra generated by a tuple.
    AlgebraDim {
        #[arg(long)]
        tuple: PathBuf,
        #[arg(long, conflicts_with = "non_unital", required_unless_present = "non_unital")]
        unital: bool,
        #[arg(long)]
        non_unital: bool,
    },
    /// Rank-one factorization `φ̂(X) = trace(RX) L` of an irreducible map.
    Factorize {
        #[command(flatten)]
        map: MapArgs,
    },
    /// Runs the invariant suite on the bundled example maps.
    Check,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::OuterRadius { .. } => "outer-radius",
            Command::Jsr { .. } => "jsr",
            Command::Friedland { .. } => "friedland",
            Command::Witness { .. } => "witness",
            Command::Balance { .. } => "balance",
            Command::Choi { .. } => "choi",
            Command::Kraus { .. } => "kraus",
            Command::CoeffSpace { .. } => "coeff-space",
            Command::Member { .. } => "member",
            Command::MaximalPart { .. } => "maximal-part",
            Command::Perron { .. } => "perron",
            Command::Irreducible { .. } => "irreducible",
            Command::AlgebraDim { .. } => "algebra-dim",
            Command::Factorize { .. } => "factorize",
            Command::Check => "check",
        }
    }
}

/// Parses `argv`, runs the command and returns the exit code together with the
/// JSON document to print. Argument errors are left to clap.
pub fn run<I, T>(argv: I) -> Result<(i32, String), clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    Ok(execute(&cli))
}

pub fn execute(cli: &Cli) -> (i32, String) {
    let start = Instant::now();
    let mut digest = InputDigest::default();
    digest.add("command", format!("{:?}", cli.command).as_bytes());
    let tol = cli.global.tolerance();
    digest.add(
        "settings",
        format!("{:?} {:?} {}", tol, cli.global.budget, cli.global.seed).as_bytes(),
    );
    let mut ctx = commands::Context {
        tol,
        budget: cli.global.budget,
        seed: cli.global.seed,
        digest,
    };
    let outcome = commands::dispatch(&cli.command, &mut ctx);
    let inputs_digest = ctx.digest.finish();
    match outcome {
        Ok(mut report) => {
            report.inputs_digest = inputs_digest;
            if cli.global.timing {
                report.elapsed = Some(start.elapsed().as_secs_f64());
            }
            (report.exit_code, to_json(&report))
        }
        Err(e) => {
            let code = e.exit_code();
            let err = ErrorReport {
                command: cli.command.name().to_string(),
                inputs_digest,
                error: ErrorBody {
                    kind: e.kind().to_string(),
                    message: e.message(),
                    exit_code: code,
                },
            };
            (code, to_json(&err))
        }
    }
}

fn to_json(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize")
}

//! `parallelotope`: build, sample, verify and tabulate from the command line.
//!
//! Exit codes: 0 when every certification passes, 1 when a check fails,
//! 2 for usage errors and results that cannot be verified.

mod commands;
mod config;

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use config::FileConfig;

#[derive(Parser, Debug)]
#[command(
    name = "parallelotope",
    version,
    about = "Exact integer parallelotopes with small surface area"
)]
struct Cli {
    /// TOML file supplying defaults for any flag below; explicit flags win.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output format [default: json]. `hrep` applies to `construct` only.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write the main output here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Directory for output files when --out is absent [default: stdout].
    #[arg(long, global = true, env = "PARALLELOTOPE_REPORT_DIR", value_name = "DIR")]
    report_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Hrep,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a parallelotope for Z^n and write its construction report.
    Construct(ConstructArgs),
    /// Draw a sparse {0,1} matrix with random-walk columns.
    SampleMatrix(SampleArgs),
    /// Check that a stored body tiles by its lattice and re-check its report.
    Verify(VerifyArgs),
    /// Tabulate hypercube-walk return probabilities.
    WalkStats(WalkArgs),
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    /// Dimension.
    #[arg(long)]
    pub n: usize,
    /// Base seed; depth k samples with seed + k [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Schedule parameter, at least 4 [default: 4].
    #[arg(long)]
    pub kappa: Option<String>,
    /// Walk-length parameter in (0, 2] [default: 1].
    #[arg(long)]
    pub epsilon: Option<String>,
    /// Sampler redraws per level [default: 1000].
    #[arg(long)]
    pub max_tries: Option<u64>,
    /// Largest dimension with a materialized body [default: 8].
    #[arg(long)]
    pub dim_cap: Option<usize>,
    /// Deepest recursion level [default: 8].
    #[arg(long)]
    pub max_depth: Option<usize>,
    /// Node budget for lattice enumeration [default: 10000000].
    #[arg(long)]
    pub svp_budget: Option<u64>,
    /// JSON matrix (or list of per-depth matrices) replacing the sampler.
    #[arg(long, value_name = "PATH")]
    pub matrix_override: Option<PathBuf>,
    /// Skip geometry; report the schedule and bounds only.
    #[arg(long)]
    pub bound_only: bool,
    /// Points in the induction-inequality scan [default: 1000].
    #[arg(long)]
    pub scan_points: Option<usize>,
    /// Also run the sampled tiling check with this many points.
    #[arg(long)]
    pub samples: Option<u64>,
    /// Write lattice, body and report as a verify fixture.
    #[arg(long, value_name = "PATH")]
    pub polytope_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    /// Rows.
    #[arg(long)]
    pub m: usize,
    /// Columns.
    #[arg(long)]
    pub n: usize,
    /// Walk length per column, at least 3.
    #[arg(long)]
    pub d: usize,
    /// Required column independence [default: largest admissible for c].
    #[arg(long)]
    pub s: Option<usize>,
    /// Constant in the admissibility condition [default: (1/(7 e d))^(2/(d-2)) rounded down].
    #[arg(long)]
    pub c: Option<String>,
    /// [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// [default: 1000]
    #[arg(long)]
    pub max_tries: Option<u64>,
    /// Exhaustively check that every this many columns are independent over GF(2).
    #[arg(long)]
    pub verify_s: Option<usize>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Fixture JSON with `lattice`, `body` and optionally `report`.
    #[arg(long, value_name = "PATH")]
    pub input: PathBuf,
    /// Report JSON to check instead of the fixture's own.
    #[arg(long, value_name = "PATH")]
    pub report: Option<PathBuf>,
    /// Sample points for the tiling check [default: 10000].
    #[arg(long)]
    pub samples: Option<u64>,
    /// [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct WalkArgs {
    /// Cube dimensions, comma separated [default: 2,3,4].
    #[arg(long, value_delimiter = ',')]
    pub m: Vec<usize>,
    /// Walk lengths, comma separated [default: 1,2,3,4,5,6].
    #[arg(long, value_delimiter = ',')]
    pub t: Vec<u64>,
    /// Monte Carlo walks per row [default: 10000].
    #[arg(long)]
    pub samples: Option<u64>,
    /// [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug)]
pub enum Failure {
    Core(parallelotope::Error),
    Usage(String),
    Io(String),
}

impl Failure {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Failure::Io(format!("{}: {e}", path.display()))
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Core(parallelotope::Error::Verification(_)) => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Usage(m) | Failure::Io(m) => write!(f, "{m}"),
        }
    }
}

impl From<parallelotope::Error> for Failure {
    fn from(e: parallelotope::Error) -> Self {
        Failure::Core(e)
    }
}

/// Where the main output goes.
pub struct Sink {
    out: Option<PathBuf>,
    dir: Option<PathBuf>,
}

impl Sink {
    pub fn write(&self, default_name: &str, text: &str) -> Result<(), Failure> {
        let path = match (&self.out, &self.dir) {
            (Some(p), _) => Some(p.clone()),
            (None, Some(d)) => {
                std::fs::create_dir_all(d).map_err(|e| Failure::io(d, e))?;
                Some(d.join(default_name))
            }
            (None, None) => None,
        };
        match path {
            Some(p) => {
                std::fs::write(&p, text).map_err(|e| Failure::io(&p, e))?;
                eprintln!("wrote {}", p.display());
            }
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes()).map_err(|e| Failure::Io(e.to_string()))?;
                if !text.ends_with('\n') {
                    out.write_all(b"\n").map_err(|e| Failure::Io(e.to_string()))?;
                }
            }
        }
        Ok(())
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let file = FileConfig::load(cli.config.as_deref())?;
    let format = cli.format.or(file.format).unwrap_or(Format::Json);
    let sink = Sink {
        out: cli.out,
        dir: cli.report_dir.or_else(|| file.report_dir.clone()),
    };
    match cli.command {
        Command::Construct(a) => commands::construct(&a, &file, format, &sink),
        Command::SampleMatrix(a) => commands::sample_matrix(&a, &file, format, &sink),
        Command::Verify(a) => commands::verify(&a, &file, format, &sink),
        Command::WalkStats(a) => commands::walk_stats(&a, &file, format, &sink),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

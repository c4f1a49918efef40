//! `flatsurf`: build surfaces, run censuses and counting experiments.
//!
//! Data goes to stdout (or `--out`); progress and errors go to stderr.
//! Exit codes: 0 success, 1 failed validation or verification (or a runtime
//! error), 2 usage error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use flatsurf_core::Error;

#[derive(Parser, Debug)]
#[command(
    name = "flatsurf",
    version,
    about = "Translation surfaces from rational billiards"
)]
struct Cli {
    /// Worker threads for census-heavy commands (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Progress on stderr (repeat for more).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a named surface or unfold a polygon and write it as JSON.
    Build(BuildArgs),
    /// Validate a surface file and print its invariants.
    Validate { file: PathBuf },
    /// Saddle connections up to a length, as CSV.
    Saddles {
        file: PathBuf,
        #[arg(long)]
        length: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cylinders up to a circumference, as CSV (both signs of each holonomy).
    Cylinders {
        file: PathBuf,
        #[arg(long)]
        length: f64,
        /// Separatrix budget as a multiple of the length.
        #[arg(long, default_value_t = flatsurf_core::census::DEFAULT_BUDGET_FACTOR)]
        budget_factor: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Counting series N(T) and N(T)/T^2.
    Count(CountArgs),
    /// Cylinder decomposition in one direction, as JSON.
    Decompose {
        file: PathBuf,
        /// Direction `x,y`.
        #[arg(long, value_parser = parse_pair)]
        dir: (f64, f64),
        #[arg(long)]
        budget: f64,
    },
    /// Numerical checks of the structural statements.
    Verify(VerifyArgs),
    /// Orbit of a vector under a Fuchsian group, counted in a ball.
    OrbitCount(OrbitArgs),
}

#[derive(Args, Debug)]
struct BuildArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long, default_value_t = 0)]
    n: u32,
    /// Polygon JSON for `--family unfold`:
    /// `{"vertices": [[x,y],...], "angles": [[num,den],...]}` (angles optional).
    #[arg(long)]
    polygon: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum FamilyArg {
    Pn,
    Qn,
    Xn,
    Sn,
    Square,
    Unfold,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum What {
    Cyl,
    Sc,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SignsArg {
    Both,
    Once,
}

#[derive(Args, Debug)]
struct CountArgs {
    file: PathBuf,
    /// Radii `T1,T2,...`, increasing.
    #[arg(long, value_delimiter = ',', required = true)]
    lengths: Vec<f64>,
    #[arg(long, value_enum, default_value_t = What::Cyl)]
    what: What,
    /// Closed-form constant to compare against: `xn:5`, `sn:5`, `pn:5`, `torus:AREA`.
    #[arg(long)]
    predict: Option<String>,
    /// Counting convention; defaults to the prediction's own, else `both`.
    #[arg(long, value_enum)]
    signs: Option<SignsArg>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Check {
    Veech,
    Identity,
    Trapezoid,
    Decomp,
    Circle,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    check: Check,
    #[arg(long, default_value_t = 5)]
    n: u32,
    /// Radius T for `circle`; `t` for `trapezoid`.
    #[arg(long)]
    t: Option<f64>,
    /// Angular grid size.
    #[arg(long)]
    grid: Option<usize>,
    /// Random sample count for `trapezoid`.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Use the square torus instead of the double n-gon for `circle`.
    #[arg(long)]
    torus: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum GroupArg {
    Gamma,
    Sl2z,
}

#[derive(Args, Debug)]
struct OrbitArgs {
    #[arg(long, default_value_t = 5)]
    n: u32,
    #[arg(long, value_enum, default_value_t = GroupArg::Gamma)]
    group: GroupArg,
    #[arg(long, value_parser = parse_pair)]
    vector: (f64, f64),
    #[arg(long)]
    radius: f64,
    /// Only vectors of norm at most `prune * radius` are expanded.
    #[arg(long, default_value_t = 4.0)]
    prune: f64,
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected x,y, got '{s}'"))?;
    let x: f64 = a.trim().parse().map_err(|e| format!("{a}: {e}"))?;
    let y: f64 = b.trim().parse().map_err(|e| format!("{b}: {e}"))?;
    Ok((x, y))
}

/// What went wrong, and which exit code it maps to.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Check(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(m) => Failure::Usage(m),
            other => Failure::Core(other),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Core(Error::Io(e))
    }
}

impl Failure {
    fn report(&self) -> (u8, serde_json::Value) {
        match self {
            Failure::Usage(m) => (2, serde_json::json!({"error": "usage", "message": m})),
            Failure::Check(m) => (1, serde_json::json!({"error": "check_failed", "message": m})),
            Failure::Core(e) => {
                let mut v = serde_json::json!({"error": e.kind(), "message": e.to_string()});
                if let Error::InvalidSurface(r) = e {
                    v["violations"] = serde_json::to_value(r).unwrap_or_default();
                }
                (1, v)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let msg = e.to_string();
            eprintln!("{}", serde_json::json!({"error": "usage", "message": msg.trim()}));
            return ExitCode::from(2);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .target(env_logger::Target::Stderr)
        .init();
    if let Some(j) = cli.jobs {
        if j == 0 {
            eprintln!(
                "{}",
                serde_json::json!({"error": "usage", "message": "--jobs must be positive"})
            );
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j).build_global() {
            log::warn!("could not size the thread pool: {e}");
        }
    }
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (code, v) = f.report();
            eprintln!("{v}");
            ExitCode::from(code)
        }
    }
}

//! `hdg`: analyses of quaternion-valued expressions over parameter grids.

use clap::{Args, Parser, Subcommand};
use hdg_cli::config::{self, Kind, Overrides};
use hdg_cli::run::{self, AppError};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "hdg",
    version,
    about = "Quaternionic differential geometry: Frenet frames, regularity checks, \
             gradient residuals, and structural-equation residuals over parameter grids"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Frenet data (curvature, torsion, radii) of a constraint over a grid
    Frame(JobArgs),
    /// Regularity-condition residual rows of a Cartesian field
    CrCheck(JobArgs),
    /// Regularity-condition residual rows of a polar field
    CrCheckPolar(JobArgs),
    /// Connection and structural-equation residuals of a unit frame field
    Forms(JobArgs),
    /// Tangent-map regularity report of a constraint over a grid
    Regular(JobArgs),
    /// Evaluate a closed expression to a single quaternion
    Eval(JobArgs),
}

#[derive(Args)]
struct JobArgs {
    /// JSON job description; inline flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// Expression text (overrides the config `expr`)
    #[arg(long)]
    expr: Option<String>,
    /// Grid axis var=min:max:count (repeatable; endpoints inclusive)
    #[arg(long)]
    grid: Vec<String>,
    /// Output path (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv or json (default csv; eval defaults to json)
    #[arg(long)]
    format: Option<String>,
    /// Worker threads (default: HDG_THREADS, then 1)
    #[arg(long)]
    threads: Option<usize>,
    /// First-derivative step scale
    #[arg(long)]
    step: Option<f64>,
    /// Exact forward-mode differentiation instead of central differences
    #[arg(long)]
    exact: bool,
}

fn dispatch(kind: Kind, args: JobArgs) -> Result<(), AppError> {
    let file = match &args.config {
        Some(path) => Some(config::load_config_file(path).map_err(AppError::Config)?),
        None => None,
    };
    let overrides = Overrides {
        expr: args.expr,
        grid: args.grid,
        out: args.out,
        format: args.format,
        threads: args.threads,
        step: args.step,
        exact: args.exact,
    };
    let job = config::resolve(kind, file, overrides).map_err(AppError::Config)?;
    let artifact = run::run_job(&job)?;
    match &job.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, artifact) {
                // never leave partial artifacts behind
                let _ = std::fs::remove_file(path);
                return Err(AppError::Io(format!("writing {}: {e}", path.display())));
            }
        }
        None => print!("{artifact}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Frame(a) => dispatch(Kind::Frame, a),
        Cmd::CrCheck(a) => dispatch(Kind::CrCheck, a),
        Cmd::CrCheckPolar(a) => dispatch(Kind::CrCheckPolar, a),
        Cmd::Forms(a) => dispatch(Kind::Forms, a),
        Cmd::Regular(a) => dispatch(Kind::Regular, a),
        Cmd::Eval(a) => dispatch(Kind::Eval, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Config(msg)) | Err(AppError::Io(msg)) => {
            eprintln!("hdg: config error: {msg}");
            ExitCode::from(2)
        }
        Err(AppError::Numeric(msg)) => {
            eprintln!("hdg: numeric failure: {msg}");
            ExitCode::from(3)
        }
    }
}

mod commands;
mod config;
mod error;
mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use funklib::UnitVector3;

use commands::{Method, Report, Which};
use config::{ConfigArgs, RunConfig};
use error::{CliError, CliResult};
use input::{parse_list, parse_point, FunctionSpec};

/// Funk transform, its inversions and the width/circumference relation.
#[derive(Debug, Parser)]
#[command(name = "funklib", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Apply a transform to a function on the grid.
    Transform {
        /// `const:<v>`, `ylm:<l>,<m>` (joined with `+`, optional `<c>*`) or `@file.json`.
        #[arg(long = "f")]
        f: String,
        /// `funk`, `dual`, `mean:<t>`, `gen:<theta>` or `cosine:<alpha>`.
        #[arg(long, default_value = "funk")]
        which: Which,
    },
    /// Recover a function from its transform.
    Invert {
        /// Transform data, in the same spec syntax as `transform --f`.
        #[arg(long = "g")]
        g: String,
        #[arg(long, value_enum, default_value = "harmonic")]
        method: Method,
        /// Reconstruction point `x,y,z` for the abel method; repeatable.
        #[arg(long = "point")]
        points: Vec<String>,
    },
    /// Tabulate both sides of the mean-value identity over a list of angles.
    VerifyIdentity {
        #[arg(long = "f")]
        f: String,
        /// Comma-separated angles in radians, each in (0, π/2).
        #[arg(long, default_value = "0.2,0.5,0.7853981633974483,1.0,1.3")]
        theta: String,
        #[arg(long, default_value = "0,0,1")]
        point: String,
        /// Largest accepted relative error; defaults to the configured identity tolerance.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Width and circumference tables for a convex body.
    Convex {
        /// `ball:<R>`, `ellipsoid:<a>,<b>,<c>` or `harmonic:<function spec>`.
        #[arg(long)]
        body: String,
        #[arg(long, value_enum, default_value = "minkowski")]
        report: Report,
        /// A single direction `x,y,z` instead of the grid nodes.
        #[arg(long)]
        direction: Option<String>,
        /// Where to write the summary JSON; stderr when omitted.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Measured cosine-transform multiplier ratios next to the Funk ratios.
    Multipliers {
        #[arg(long, default_value = "0.2,0.1,0.05,0.01")]
        alpha: String,
        #[arg(long, default_value = "0,2,4")]
        degrees: String,
    },
}

fn init_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("FUNKLIB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::parse(format!("FUNKLIB_THREADS = '{v}' is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Io(e.to_string()))
}

fn parse_points(raw: &[String]) -> CliResult<Vec<UnitVector3>> {
    if raw.is_empty() {
        return Ok(vec![UnitVector3::E3]);
    }
    raw.iter().map(|s| parse_point(s)).collect()
}

fn parse_degrees(s: &str) -> CliResult<Vec<usize>> {
    s.split(',').map(|d| d.trim().parse().map_err(|_| CliError::parse(format!("'{d}' is not a degree")))).collect()
}

fn run(cli: Cli) -> CliResult<()> {
    init_threads()?;
    let cfg = RunConfig::load(&cli.config)?;
    match cli.cmd {
        Command::Transform { f, which } => commands::transform(&cfg, &FunctionSpec::parse(&f)?, which),
        Command::Invert { g, method, points } => {
            commands::invert(&cfg, &FunctionSpec::parse(&g)?, method, &parse_points(&points)?)
        }
        Command::VerifyIdentity { f, theta, point, tol } => commands::verify_identity(
            &cfg,
            &FunctionSpec::parse(&f)?,
            &parse_list(&theta)?,
            parse_point(&point)?,
            tol.unwrap_or(cfg.identity_tol),
        ),
        Command::Convex { body, report, direction, summary } => {
            let direction = direction.as_deref().map(parse_point).transpose()?;
            commands::convex(&cfg, &body, report, direction, summary.as_deref())
        }
        Command::Multipliers { alpha, degrees } => {
            let alphas = parse_list(&alpha)?;
            if let Some(a) = alphas.iter().find(|&&a| a <= 0.0) {
                return Err(CliError::Precondition(format!("alpha = {a} must be positive")));
            }
            commands::multipliers(&cfg, &alphas, &parse_degrees(&degrees)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

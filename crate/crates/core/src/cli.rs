//! Command-line front end: `epilab divergence | dgap | verify`.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::experiment::{
    emit, gaussian_control, overall_status, run_grid, slope_summary, verify_suite, DGapRow, Format,
    Tabular, DEFAULT_T_GRID,
};
use crate::inequalities::{InequalityVerdict, Status};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "epilab", version, about = "Entropy power inequality experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Growth of H(X_b ± Y_b)/H(X_b) along a grid of t = ln b.
    Divergence(Common),
    /// Distances to normality D(X_b), D(X_b ± Y_b) and their gaps.
    Dgap(Common),
    /// The full inequality suite.
    Verify(Common),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Comma-separated values of t = ln b, each >= 2.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_T_GRID.to_vec())]
    pub t_grid: Vec<f64>,
    /// Absolute tolerance for entropy quadrature.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Seed for the Monte Carlo cross-checks.
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Csv => Format::Csv,
            OutputFormat::Json => Format::Json,
        }
    }
}

impl Tabular for InequalityVerdict {
    fn header() -> Vec<&'static str> {
        vec!["name", "lhs", "rhs", "margin", "slack", "status"]
    }

    fn cells(&self) -> Vec<String> {
        let status = serde_json::to_value(self.status)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default();
        let f = crate::experiment::format_g12;
        vec![
            self.name.clone(),
            f(self.lhs),
            f(self.rhs),
            f(self.margin),
            f(self.numeric_slack),
            status,
        ]
    }
}

/// Maps an overall status to the process exit code.
pub fn exit_code(status: Status) -> i32 {
    match status {
        Status::Holds => EXIT_OK,
        Status::Violated => EXIT_VIOLATED,
        Status::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn error_code(e: &Error) -> i32 {
    match e {
        Error::Inconclusive(_) | Error::NonFiniteIntegrand { .. } => EXIT_INCONCLUSIVE,
        Error::Consistency(_) => EXIT_VIOLATED,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (including the program name) and runs the command, returning
/// the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli.command) {
        Ok(status) => exit_code(status),
        Err(e) => {
            eprintln!("epilab: {e}");
            error_code(&e)
        }
    }
}

/// Runs one command and returns the combined status of its checks.
pub fn execute(command: &Command) -> crate::Result<Status> {
    match command {
        Command::Divergence(c) => {
            let points = run_grid(&c.t_grid, c.tol)?;
            let rows: Vec<_> = points.iter().map(|p| p.row).collect();
            emit(&rows, c.format.into(), c.out.as_deref())?;
            Ok(overall_status(points.iter().map(|p| &p.status)))
        }
        Command::Dgap(c) => {
            let points = run_grid(&c.t_grid, c.tol)?;
            let rows: Vec<DGapRow> = points.iter().map(|p| p.row.into()).collect();
            emit(&rows, c.format.into(), c.out.as_deref())?;
            let control = gaussian_control(c.tol)?;
            eprintln!(
                "gaussian control: D_X = {:e}, D_sum = {:e}",
                control.row.D_X, control.row.D_sum
            );
            if let Some(s) = slope_summary(&rows) {
                eprintln!("{s}");
            }
            let control_status = if control.row.all_bounds_hold {
                Status::Holds
            } else {
                Status::Violated
            };
            let statuses: Vec<Status> = points.iter().map(|p| p.status).chain([control_status]).collect();
            Ok(overall_status(&statuses))
        }
        Command::Verify(c) => {
            let entries = verify_suite(c.tol, c.seed)?;
            let verdicts: Vec<InequalityVerdict> = entries.iter().map(|e| e.verdict.clone()).collect();
            emit(&verdicts, c.format.into(), c.out.as_deref())?;
            let mut status = Status::Holds;
            for e in entries.iter().filter(|e| !e.as_expected()) {
                eprintln!(
                    "{}: {:?} (expected {:?}), margin {:e}",
                    e.verdict.name, e.verdict.status, e.expected, e.verdict.margin
                );
                let s = if e.verdict.status == Status::Inconclusive {
                    Status::Inconclusive
                } else {
                    Status::Violated
                };
                status = overall_status(&[status, s]);
            }
            eprintln!(
                "{} checks, {} as expected",
                entries.len(),
                entries.iter().filter(|e| e.as_expected()).count()
            );
            Ok(status)
        }
    }
}

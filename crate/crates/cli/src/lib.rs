//! `qrw` command-line front end.

pub mod coin_spec;
pub mod commands;
pub mod error;
pub mod report;
pub mod state_file;
pub mod svg;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qrw_core::cmv::Lattice;
use qrw_core::kmcg::QuadratureSpec;

use crate::coin_spec::load_coin_arg;
use crate::commands::{MethodChoice, Walk};
use crate::error::CliError;
use crate::report::Report;

#[derive(Parser, Debug)]
#[command(
    name = "qrw",
    version,
    about = "Coined quantum walks through CMV matrices"
)]
struct Cli {
    /// Report format written to stdout.
    #[arg(long, value_enum, default_value_t = OutFormat::Csv, global = true)]
    out: OutFormat,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum LatticeArg {
    Half,
    Line,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Direct,
    Kmcg,
    Both,
}

#[derive(Args, Debug)]
struct WalkArgs {
    #[arg(long, value_enum)]
    lattice: LatticeArg,

    /// Preset name, inline matrix, JSON document, or a path to one.
    #[arg(long)]
    coin: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Amplitudes of ψU^n by KMcG integrals and/or direct evolution.
    Simulate {
        #[command(flatten)]
        walk: WalkArgs,
        /// JSON state file; defaults to |0↑⟩.
        #[arg(long)]
        initial: Option<PathBuf>,
        #[arg(long)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::Both)]
        method: MethodArg,
        /// Write the final site profile as SVG.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Moments μ_0..μ_N of the spectral measure.
    Moments {
        #[command(flatten)]
        walk: WalkArgs,
        #[arg(long)]
        n: usize,
    },
    /// Weight samples and mass points of the spectral measure.
    Measure {
        #[command(flatten)]
        walk: WalkArgs,
        #[arg(long, default_value_t = 256)]
        grid: usize,
        /// Write the weight curve as SVG.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Singularities, transient subspace, and optionally a state verdict.
    Recurrence {
        #[command(flatten)]
        walk: WalkArgs,
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        max_index: usize,
    },
    /// Weak limit of U^n and the asymptotic projector.
    Asymptotics {
        #[command(flatten)]
        walk: WalkArgs,
        #[arg(long, default_value_t = 6)]
        max_index: usize,
    },
    /// KMcG against direct evolution; exit status 3 on disagreement.
    Compare {
        #[command(flatten)]
        walk: WalkArgs,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        tol: f64,
        #[arg(long, default_value_t = 10)]
        max_index: usize,
    },
}

fn walk(args: &WalkArgs) -> Result<Walk, CliError> {
    let lattice = match args.lattice {
        LatticeArg::Half => Lattice::HalfLine,
        LatticeArg::Line => Lattice::Line,
    };
    Walk::build(lattice, load_coin_arg(&args.coin)?)
}

fn execute(cmd: &Command) -> Result<(Report, bool), CliError> {
    let spec = QuadratureSpec::from_env()?;
    let single = |r: Result<Report, CliError>| r.map(|r| (r, true));
    match cmd {
        Command::Simulate {
            walk: w,
            initial,
            steps,
            method,
            svg,
        } => {
            let m = match method {
                MethodArg::Direct => MethodChoice::Direct,
                MethodArg::Kmcg => MethodChoice::Kmcg,
                MethodArg::Both => MethodChoice::Both,
            };
            single(commands::simulate(
                &walk(w)?,
                initial.as_deref(),
                *steps,
                m,
                &spec,
                svg.as_deref(),
            ))
        }
        Command::Moments { walk: w, n } => single(commands::moments_report(&walk(w)?, *n, &spec)),
        Command::Measure { walk: w, grid, svg } => {
            single(commands::measure_report(&walk(w)?, *grid, svg.as_deref()))
        }
        Command::Recurrence {
            walk: w,
            state,
            max_index,
        } => single(commands::recurrence_report(
            &walk(w)?,
            state.as_deref(),
            *max_index,
        )),
        Command::Asymptotics { walk: w, max_index } => {
            single(commands::asymptotics_report(&walk(w)?, *max_index))
        }
        Command::Compare {
            walk: w,
            steps,
            tol,
            max_index,
        } => commands::compare_report(&walk(w)?, *steps, *tol, *max_index, &spec),
    }
}

/// Runs one invocation, writing the report to `out` and diagnostics to
/// `err`. Returns the process exit status.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = execute(&cli.command).and_then(|(report, ok)| {
        let text = match cli.out {
            OutFormat::Csv => report.to_csv()?,
            OutFormat::Json => report.to_json(),
        };
        out.write_all(text.as_bytes()).map_err(|e| CliError::Io {
            path: "<stdout>".into(),
            message: e.to_string(),
        })?;
        if ok {
            Ok(())
        } else {
            Err(CliError::Disagreement(format!(
                "KMcG and direct amplitudes differ by {} (see max_diff)",
                report
                    .metadata
                    .get("max_diff")
                    .map(String::as_str)
                    .unwrap_or("?")
            )))
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "qrw: {e}");
            e.exit_code()
        }
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

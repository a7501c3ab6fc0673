//! Scenario-driven front end for the `lw6` library: verification suites,
//! tube fluxes, radius sweeps, motion integration and field sampling, each
//! emitted as a deterministic report.

pub mod config;
pub mod report;
pub mod tasks;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::Task;
use report::{Format, EXIT_CONFIG};

#[derive(Parser, Debug)]
#[command(name = "lw6", version, about = "Six-dimensional point-charge electrodynamics: verification and reports")]
struct Cli {
    /// Print the documented configuration format and exit.
    #[arg(long)]
    help_config: bool,
    /// Print the report table columns and exit.
    #[arg(long)]
    help_columns: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every invariant suite on the scenario worldline.
    Verify(TaskArgs),
    /// Compare tube fluxes with their closed forms at each radius.
    Flux(TaskArgs),
    /// Fit the bound fluxes in inverse powers of the tube radius.
    Sweep(TaskArgs),
    /// Integrate the equation of motion.
    Simulate(TaskArgs),
    /// Sample potentials and fields.
    Fields(TaskArgs),
}

#[derive(Args, Debug)]
struct TaskArgs {
    /// Scenario file; defaults apply when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set numeric.tau=[0.0,2.0]`.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    set: Vec<String>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Reduced sample counts and looser quadrature tolerances (see --help-config).
    #[arg(long)]
    quick: bool,
    /// Include wall-clock timings in the report metadata.
    #[arg(long)]
    timings: bool,
}

/// Parses `args`, runs the task and writes the report; returns the exit code.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    if cli.help_config {
        print!("{}", config::CONFIG_HELP);
        return 0;
    }
    if cli.help_columns {
        print!("{}", tasks::COLUMNS_HELP);
        return 0;
    }
    let (task, args) = match cli.command {
        Some(Command::Verify(a)) => (Task::Verify, a),
        Some(Command::Flux(a)) => (Task::Flux, a),
        Some(Command::Sweep(a)) => (Task::Sweep, a),
        Some(Command::Simulate(a)) => (Task::Simulate, a),
        Some(Command::Fields(a)) => (Task::Fields, a),
        None => {
            eprintln!("error: a subcommand is required (verify, flux, sweep, simulate, fields); see --help");
            return EXIT_CONFIG;
        }
    };
    let mut scenario = match config::load_file(args.config.as_deref(), &args.set, task, args.quick) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    scenario.output.timings |= args.timings;
    let report = tasks::run(task, &scenario, args.quick);
    let format = args.format.or(scenario.output.format).unwrap_or(Format::Human);
    let bytes = report.emit(format);
    let out = args.out.or(scenario.output.path.as_ref().map(PathBuf::from));
    let written = match &out {
        Some(path) => std::fs::write(path, &bytes).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().write_all(&bytes).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return EXIT_CONFIG;
    }
    for c in report.checks.iter().filter(|c| !c.pass) {
        eprintln!("check failed: {}{}", c.name, c.detail.as_ref().map(|d| format!(" ({d})")).unwrap_or_default());
    }
    report.exit_code()
}

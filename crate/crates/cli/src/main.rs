use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use entmeter::{LogBase, NormMode, NormOptions};
use entmeter_cli::report::to_json;
use entmeter_cli::{CliError, Settings, StateSpec, REPRODUCE_TOL};

/// Operator entanglement measure and order index.
///
/// Set ENTMETER_THREADS to cap optimizer parallelism (0 = automatic).
#[derive(Parser)]
#[command(name = "entmeter", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Entanglement measure of a state or operator given as JSON.
    Measure {
        input: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// Order index ln‖A‖ / ln|Tr A|.
    OrderIndex { input: PathBuf },
    /// Recompute the table of worked examples against their closed forms.
    Reproduce {
        #[command(flatten)]
        flags: Flags,
    },
    /// Audit structural properties of the measure on random densities.
    Verify {
        /// Seed range, both ends included ("0..19"), or a comma list.
        #[arg(long, default_value = "0..19")]
        seeds: String,
        #[command(flatten)]
        flags: Flags,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Variational,
    Basis,
}

#[derive(Args)]
struct Flags {
    #[arg(long, value_enum, default_value = "variational")]
    mode: ModeArg,
    #[arg(long, default_value = "2", value_parser = ["2", "e", "10"])]
    base: String,
    #[arg(long, default_value_t = 32)]
    restarts: usize,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 200)]
    sweeps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cross-check the restricted norm against random-sampling refinement.
    #[arg(long)]
    oracle_check: bool,
    /// Treat optimizer non-convergence as an error (exit 4).
    #[arg(long)]
    strict: bool,
}

impl Flags {
    fn settings(&self) -> Result<Settings, CliError> {
        let base: LogBase = self.base.parse()?;
        Ok(Settings {
            mode: match self.mode {
                ModeArg::Variational => NormMode::Variational,
                ModeArg::Basis => NormMode::Basis,
            },
            base,
            opts: NormOptions {
                restarts: self.restarts,
                max_sweeps: self.sweeps,
                tol: self.tol,
                seed: self.seed,
            },
            oracle_check: self.oracle_check,
            strict: self.strict,
        })
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("ENTMETER_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Input(format!("ENTMETER_THREADS must be a non-negative integer, got {raw:?}")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Input(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn read_spec(path: &PathBuf) -> Result<StateSpec, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    StateSpec::from_json(&text)
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Measure { input, flags } => {
            let settings = flags.settings()?;
            let report = entmeter_cli::measure(&read_spec(&input)?, &settings)?;
            print!("{}", to_json(&report));
            if settings.strict && !report.optimizer.converged {
                return Err(CliError::NonConvergence);
            }
        }
        Command::OrderIndex { input } => {
            print!("{}", to_json(&entmeter_cli::order_index(&read_spec(&input)?)?));
        }
        Command::Reproduce { flags } => {
            let rows = entmeter_cli::reproduce(&flags.settings()?)?;
            print!("{}", to_json(&rows));
            let failed: Vec<&str> = rows
                .iter()
                .filter(|r| r.failed(REPRODUCE_TOL))
                .map(|r| r.name.as_str())
                .collect();
            if !failed.is_empty() {
                return Err(CliError::Failed(format!("rows off their closed form: {}", failed.join(", "))));
            }
        }
        Command::Verify { seeds, flags } => {
            let seeds = entmeter_cli::parse_seeds(&seeds)?;
            let summary = entmeter_cli::verify(&seeds, &flags.settings()?)?;
            print!("{}", to_json(&summary));
            if !summary.all_passed {
                let detail: Vec<String> = summary
                    .properties
                    .iter()
                    .filter(|p| p.failed > 0)
                    .map(|p| format!("{} failed on {} seed(s)", p.property, p.failed))
                    .collect();
                return Err(CliError::Failed(detail.join("; ")));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("entmeter: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

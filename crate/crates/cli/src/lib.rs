//! Command implementations behind the `entmeter` binary.
//!
//! Every command returns a serializable report; the binary prints it and
//! maps errors to exit codes with [`CliError::exit_code`].

pub mod commands;
pub mod report;
pub mod spec;

use entmeter::{LogBase, NormMode, NormOptions};

pub use commands::{measure, order_index, parse_seeds, reproduce, verify, REPRODUCE_TOL};
pub use report::{OrderIndexReport, Report, ReproduceRow, VerifySummary};
pub use spec::{StateSpec, Target};

/// Samples used by `--oracle-check`.
pub const ORACLE_SAMPLES: usize = 1000;

/// Largest total dimension `--oracle-check` runs on.
pub const ORACLE_MAX_DIM: usize = 256;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Unreadable or schema-invalid input, or arguments outside the supported domain.
    #[error("invalid input: {0}")]
    Input(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("optimizer did not converge")]
    NonConvergence,
    /// A check ran and failed.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Input(_) => 2,
            CliError::Degenerate(_) => 3,
            CliError::NonConvergence => 4,
        }
    }
}

impl From<entmeter::Error> for CliError {
    fn from(e: entmeter::Error) -> Self {
        use entmeter::Error as E;
        match e {
            E::InvalidArgument(_) | E::Unsupported(_) => CliError::Input(e.to_string()),
            E::DegenerateTrace { .. } | E::ZeroNorm { .. } => CliError::Degenerate(e.to_string()),
            E::NonConvergence { .. } => CliError::NonConvergence,
        }
    }
}

/// Options shared by the computing commands.
#[derive(Clone, Debug, PartialEq)]
pub struct Settings {
    pub mode: NormMode,
    pub base: LogBase,
    pub opts: NormOptions,
    pub oracle_check: bool,
    pub strict: bool,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            mode: NormMode::Variational,
            base: LogBase::TWO,
            opts: NormOptions::default(),
            oracle_check: false,
            strict: false,
        }
    }
}

//! Benchmark harness for the collocation solvers: hyperparameter tuning,
//! sweep execution with timing, and report emission.

pub mod bench;
pub mod emit;
pub mod runspec;
pub mod tune;

pub use bench::{run_benchmark, AnySolution, BenchRow, CurveData};
pub use emit::{emit_curves, emit_report, read_records, Format, Record};
pub use runspec::{FixedHp, RunSpec, Tuning, ValidatedSpec};
pub use tune::{tune_hyperparameters, TunedHp};

/// Harness error classified by the process exit code it maps to:
/// invalid arguments exit 2, numeric failures 3, I/O failures 4.
#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Numeric(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Invalid(m) => write!(f, "invalid arguments: {m}"),
            CliError::Numeric(m) => write!(f, "numeric failure: {m}"),
            CliError::Io(m) => write!(f, "io failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<desolve::Error> for CliError {
    fn from(e: desolve::Error) -> Self {
        use desolve::Error as E;
        match e {
            E::InvalidArgument(_)
            | E::UnsupportedOrder { .. }
            | E::DomainError(_)
            | E::InvalidConstraints(_)
            | E::VariantMismatch(_) => CliError::Invalid(e.to_string()),
            E::Numeric { .. } | E::SingularJacobian | E::TuningFailure(_) => {
                CliError::Numeric(e.to_string())
            }
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

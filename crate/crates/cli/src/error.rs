use std::fmt;
use std::process::ExitCode;

use monopole_core::chern::ChernError;
use monopole_core::classical_dynamics::DynamicsError;
use monopole_core::floquet::FloquetError;
use monopole_core::models::ModelError;
use monopole_core::parameter_space::GeometryError;
use monopole_core::su3_lambda::LambdaError;
use monopole_core::two_level::TwoLevelError;

/// Failure classes, each with its own exit status.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad input: unknown fields, out-of-range parameters. Exit 2.
    Validation(String),
    /// A computation did not converge or produced a non-finite value. Exit 3.
    Numerical(String),
    /// Acceptance criteria failed. Exit 1.
    Failed(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Validation(_) => ExitCode::from(2),
            CliError::Numerical(_) => ExitCode::from(3),
            CliError::Failed(_) | CliError::Io(_) => ExitCode::from(1),
        }
    }
}

impl CliError {
    /// The message without the class prefix.
    pub fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Numerical(m) | CliError::Failed(m) | CliError::Io(m) => m,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Failed(m) => write!(f, "{m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

// Argument errors raised inside the library are validation failures; the
// rest are numerical.

impl From<FloquetError> for CliError {
    fn from(e: FloquetError) -> Self {
        match e {
            FloquetError::BadArgument(_) | FloquetError::CutoffTooSmall { .. } => CliError::Validation(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Floquet(inner) => inner.into(),
            ModelError::BadSpin(_) | ModelError::BadArgument(_) => CliError::Validation(e.to_string()),
        }
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::BadArgument(_) => CliError::Validation(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<ChernError> for CliError {
    fn from(e: ChernError) -> Self {
        match e {
            ChernError::BadGrid { .. } => CliError::Validation(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<TwoLevelError> for CliError {
    fn from(e: TwoLevelError) -> Self {
        match e {
            TwoLevelError::Geometry(g) => g.into(),
            TwoLevelError::Numerics(_) | TwoLevelError::NearDegenerate(_) => CliError::Numerical(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<LambdaError> for CliError {
    fn from(e: LambdaError) -> Self {
        CliError::Validation(e.to_string())
    }
}

use std::fmt;

use junction::Error;

/// Everything that ends a run early, mapped onto the exit-code contract.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    NoConvergence(String),
    Numerical { stage: String, message: String },
    ChecksFailed { failed: usize },
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 1,
            Failure::NoConvergence(_) => 2,
            Failure::Numerical { .. } | Failure::Io(_) => 3,
            Failure::ChecksFailed { .. } => 4,
        }
    }

    /// Classifies a library error raised while running `stage`.
    pub fn from_core(stage: &str, err: Error) -> Self {
        match err {
            Error::NoConvergence { .. } => Failure::NoConvergence(err.to_string()),
            Error::DimensionOverflow { .. }
            | Error::TooLargeForDense { .. }
            | Error::Singular { .. }
            | Error::DegenerateDeformation { .. }
            | Error::DimensionMismatch { .. }
            | Error::NotDivisible { .. } => Failure::Numerical {
                stage: stage.to_string(),
                message: err.to_string(),
            },
            Error::IndexOutOfRange { .. }
            | Error::NonCanonicalSet { .. }
            | Error::ZeroParameter(_)
            | Error::LengthMismatch { .. }
            | Error::InvalidArgument(_)
            | Error::Parse(_) => Failure::Config(format!("{stage}: {err}")),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "configuration error: {m}"),
            Failure::NoConvergence(m) => write!(f, "solver did not converge: {m}"),
            Failure::Numerical { stage, message } => {
                write!(f, "numerical failure in {stage}: {message}")
            }
            Failure::ChecksFailed { failed } => write!(f, "{failed} check(s) failed"),
            Failure::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

pub trait CoreContext<T> {
    fn stage(self, stage: &str) -> Result<T, Failure>;
}

impl<T> CoreContext<T> for junction::Result<T> {
    fn stage(self, stage: &str) -> Result<T, Failure> {
        self.map_err(|e| Failure::from_core(stage, e))
    }
}

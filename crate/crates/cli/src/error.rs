use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error {0}")]
    Config(String),
    #[error("numerical error: {0}")]
    Numeric(String),
    #[error("not converged: {0}")]
    NotConverged(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Numeric(_) => 2,
            CliError::NotConverged(_) => 3,
        }
    }
}

macro_rules! numeric_from {
    ($($t:ty),*) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Numeric(e.to_string())
            }
        })*
    };
}

numeric_from!(
    wavefront_core::charspec::CharError,
    wavefront_core::wavesolve::SolveError,
    wavefront_core::systems::SystemError,
    wavefront_core::io::IoError
);

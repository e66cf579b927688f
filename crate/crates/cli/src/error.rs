use thiserror::Error;

/// Process exit codes.
pub const EXIT_IO: u8 = 1;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_GEOMETRY: u8 = 3;
pub const EXIT_EVALUATION: u8 = 4;
pub const EXIT_INSTABILITY: u8 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("{0}")]
    Config(String),

    #[error("{0}")]
    Io(String),

    #[error(transparent)]
    Core(#[from] dyncut_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use dyncut_core::Error as E;
        match self {
            CliError::Parse { .. } | CliError::Config(_) => EXIT_PARSE,
            CliError::Io(_) => EXIT_IO,
            CliError::Core(e) => match e {
                E::InvalidParameter(_) | E::ParamMismatch { .. } => EXIT_PARSE,
                E::EmptySystem | E::SingularCell { .. } | E::MinimumImageViolation { .. } => {
                    EXIT_GEOMETRY
                }
                E::Domain { .. } | E::Overlap { .. } => EXIT_EVALUATION,
                E::BlowUp { .. } => EXIT_INSTABILITY,
            },
        }
    }
}

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

pub type CliResult<T> = std::result::Result<T, CliError>;

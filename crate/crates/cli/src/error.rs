use std::path::PathBuf;

use thiserror::Error;

/// Exit codes:
///
/// | code | meaning |
/// |------|---------|
/// | 0 | success |
/// | 1 | I/O failure (unreadable input, unwritable output) |
/// | 2 | malformed input: spec, config, flags or environment |
/// | 3 | ambient dimension above the configured cap |
/// | 4 | a hypothesis of the requested construction does not hold |
/// | 5 | a reproduction preset did not meet its expectations |
#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot access {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] frameforge::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("{} expectation(s) failed", .0.len())]
    Expectations(Vec<String>),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use frameforge::Error as E;
        match self {
            CliError::Io { .. } => 1,
            CliError::Usage(_) | CliError::Csv(_) => 2,
            CliError::Core(e) => match e {
                E::DimensionOverflow { .. } => 3,
                E::Precondition(_) | E::CertificateFailed(_) => 4,
                E::Parse(_)
                | E::UnknownFamily(_)
                | E::InvalidParameter(_)
                | E::LengthMismatch { .. }
                | E::DimensionMismatch(_) => 2,
            },
            CliError::Expectations(_) => 5,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            1 => "io",
            2 => "invalid_input",
            3 => "dimension_cap",
            4 => "precondition_refused",
            _ => "expectation_mismatch",
        }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }
}

use std::path::Path;

use ebtk::bargmann::BargmannError;
use ebtk::criteria::CriteriaError;
use ebtk::document::DocumentError;
use thiserror::Error;

/// Failures split by exit code: bad input (2) or an internal anomaly (3).
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Anomaly(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Anomaly(_) => 3,
        }
    }

    pub fn read(path: &Path, e: std::io::Error) -> Self {
        CliError::Input(format!("{}: {e}", path.display()))
    }

    pub fn in_file(self, path: &Path) -> Self {
        match self {
            CliError::Input(m) => CliError::Input(format!("{}: {m}", path.display())),
            CliError::Anomaly(m) => CliError::Anomaly(format!("{}: {m}", path.display())),
        }
    }
}

impl From<DocumentError> for CliError {
    fn from(e: DocumentError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<CriteriaError> for CliError {
    fn from(e: CriteriaError) -> Self {
        match e {
            CriteriaError::DimensionCap { .. } | CriteriaError::DimensionMismatch(_) | CriteriaError::InvalidArgument(_) => {
                CliError::Input(e.to_string())
            }
            // inputs are validated before the criteria run, so anything else
            // is a numerical problem
            _ => CliError::Anomaly(e.to_string()),
        }
    }
}

impl From<BargmannError> for CliError {
    fn from(e: BargmannError) -> Self {
        match e {
            BargmannError::InvalidArgument(_) | BargmannError::DimensionCap { .. } => CliError::Input(e.to_string()),
            BargmannError::Criteria(c) => c.into(),
            _ => CliError::Anomaly(e.to_string()),
        }
    }
}

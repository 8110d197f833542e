//! Experiment driver for `setmap-core`: seeded corpora, batch experiments
//! with JSON, CSV and text reports, and the acceptance suite.

use std::fs;
use std::path::{Path, PathBuf};

use setmap_core::SetMapping;

pub mod acceptance;
pub mod corpus;
pub mod experiments;
pub mod report;

pub use experiments::{output_path, run, write_report};
pub use report::{CaseResult, Experiment, ExperimentSpec, Format, Report, Status};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "SETMAP_LAB_OUT_DIR";

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Input {
        path: PathBuf,
        #[source]
        source: setmap_core::Error,
    },
    #[error(transparent)]
    Core(#[from] setmap_core::Error),
}

impl LabError {
    pub(crate) fn csv(e: csv::Error) -> Self {
        LabError::Io {
            path: PathBuf::from("<csv>"),
            source: std::io::Error::other(e),
        }
    }

    /// 2 for usage and input problems, 1 for anything raised while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Usage(_) | LabError::Io { .. } | LabError::Input { .. } => 2,
            LabError::Core(_) => 1,
        }
    }
}

/// Reads and validates a mapping document.
pub fn parse_mapping(path: &Path) -> Result<SetMapping, LabError> {
    let text = fs::read_to_string(path).map_err(|source| LabError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    SetMapping::from_json(&text).map_err(|source| LabError::Input {
        path: path.to_path_buf(),
        source,
    })
}

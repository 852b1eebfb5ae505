//! Spreadsheet pipeline: link-model sweeps become [`Sheet`]s, which are written
//! to CSV and drawn as radar charts.

pub mod cli;
pub mod config;
pub mod radar;
pub mod sheet;
pub mod table;

use std::path::PathBuf;

use thiserror::Error;

pub use config::LabConfig;
pub use radar::{render_radar_chart, write_radar_chart, RadarChart};
pub use sheet::{build_sheet, LinkRecord, Sheet, SheetMeta};
pub use table::{emit_csv, parse_csv, read_csv, write_csv};

use crate::linkmodel::LinkError;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("config: {0}")]
    Config(String),
    #[error("chart: {0}")]
    Chart(String),
    #[error("sheet: {0}")]
    Sheet(String),
    #[error(transparent)]
    Link(#[from] LinkError),
}

impl AnalysisError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AnalysisError::Io {
            path: path.into(),
            source,
        }
    }
}

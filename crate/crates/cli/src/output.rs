use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::anyhow;
use serde::Serialize;

use crate::Format;

/// An error together with the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub error: anyhow::Error,
}

pub const EXIT_INPUT: u8 = 2;
pub const EXIT_SHAPE: u8 = 3;
pub const EXIT_FALSIFIED: u8 = 4;

impl CliError {
    pub fn input(error: impl Into<anyhow::Error>) -> Self {
        Self {
            code: EXIT_INPUT,
            error: error.into(),
        }
    }

    pub fn falsified(msg: impl Into<String>) -> Self {
        Self {
            code: EXIT_FALSIFIED,
            error: anyhow!(msg.into()),
        }
    }
}

impl From<germ_seminorms::Error> for CliError {
    fn from(e: germ_seminorms::Error) -> Self {
        let code = if e.is_shape_violation() {
            EXIT_SHAPE
        } else {
            EXIT_INPUT
        };
        Self {
            code,
            error: e.into(),
        }
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;

/// Destination and format of the report.
pub struct Sink {
    path: Option<PathBuf>,
    pub format: Format,
}

impl Sink {
    pub fn new(path: Option<PathBuf>, format: Format) -> Self {
        Self { path, format }
    }

    pub fn json<T: Serialize>(&self, value: &T) -> CliResult {
        let mut text = serde_json::to_string_pretty(value).map_err(CliError::input)?;
        text.push('\n');
        self.write(text.as_bytes())
    }

    pub fn csv<R: Serialize>(&self, rows: impl IntoIterator<Item = R>) -> CliResult {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in rows {
            w.serialize(row).map_err(CliError::input)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| CliError::input(anyhow!("{e}")))?;
        self.write(&bytes)
    }

    /// Emit `value` as JSON or `rows` as CSV depending on `--format`.
    pub fn emit<T: Serialize, R: Serialize>(
        &self,
        value: &T,
        rows: impl FnOnce() -> Vec<R>,
    ) -> CliResult {
        match self.format {
            Format::Json => self.json(value),
            Format::Csv => self.csv(rows()),
        }
    }

    fn write(&self, bytes: &[u8]) -> CliResult {
        match &self.path {
            Some(path) => fs::write(path, bytes)
                .map_err(|e| CliError::input(anyhow!("writing {}: {e}", path.display()))),
            None => std::io::stdout()
                .lock()
                .write_all(bytes)
                .map_err(CliError::input),
        }
    }
}

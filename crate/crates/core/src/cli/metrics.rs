//! Line-delimited JSON metrics records.

use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};

use super::CliError;

pub type Metrics = Map<String, Value>;

/// `{"command", "record", "seed", "metrics"}`, the same keys for every command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub command: &'static str,
    pub record: &'static str,
    pub seed: u64,
    pub metrics: Metrics,
}

pub(crate) enum Sink {
    Stdout,
    File { path: PathBuf, file: BufWriter<File> },
}

impl Sink {
    pub fn open(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(Sink::Stdout),
            Some(p) => {
                let file = OpenOptions::new()
                    .create(true)
                    .append(true)
                    .open(p)
                    .map_err(|source| CliError::Io { path: p.to_path_buf(), source })?;
                Ok(Sink::File { path: p.to_path_buf(), file: BufWriter::new(file) })
            }
        }
    }

    pub fn emit(&mut self, record: &Record) -> Result<(), CliError> {
        let line = serde_json::to_string(record).expect("metrics serialize");
        match self {
            Sink::Stdout => {
                println!("{line}");
                Ok(())
            }
            Sink::File { path, file } => writeln!(file, "{line}")
                .and_then(|_| file.flush())
                .map_err(|source| CliError::Io { path: path.clone(), source }),
        }
    }
}

/// Builds a metrics map from `key => value` pairs.
macro_rules! metrics {
    ($($k:expr => $v:expr),* $(,)?) => {{
        let mut m = $crate::cli::Metrics::new();
        $(m.insert($k.to_string(), serde_json::json!($v));)*
        m
    }};
}
pub(crate) use metrics;

//! On-disk formats: edge lists, feature matrices, id maps, citation datasets,
//! model files and the TSV tables exchanged between subcommands.

mod edges;
mod features;
mod model;
mod planetoid;
mod tables;

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use thiserror::Error;

pub use edges::{
    load_graph, parse_edge_list, write_edge_list, EdgeRecord, GraphFiles, InputFormat, LoadStats, LoadedGraph,
};
pub use features::{parse_features_csv, read_features, write_features_binary, write_features_csv, FEATURE_MAGIC};
pub use model::{read_model, write_model, MODEL_MAGIC};
pub use planetoid::{load_planetoid, Planetoid};
pub use tables::{
    read_id_map, read_keyed_values, read_seeds, resolve_labels, write_id_map, write_scores, write_seeds, KeyedValues,
};

#[derive(Debug, Error)]
pub enum FormatError {
    // The io error is part of the message, not a chained source, so `{:#}`
    // does not print it twice.
    #[error("{}: {err}", path.display())]
    Io { path: PathBuf, err: std::io::Error },
    #[error("{}:{line}: {msg}", path.display())]
    Parse { path: PathBuf, line: usize, msg: String },
    #[error("{}: {msg}", path.display())]
    Invalid { path: PathBuf, msg: String },
    #[error(transparent)]
    Graph(#[from] pine_core::Error),
}

pub type Result<T> = std::result::Result<T, FormatError>;

impl FormatError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        FormatError::Io { path: path.to_path_buf(), err: source }
    }

    pub(crate) fn parse(path: &Path, line: usize, msg: impl Into<String>) -> Self {
        FormatError::Parse { path: path.to_path_buf(), line, msg: msg.into() }
    }

    pub(crate) fn invalid(path: &Path, msg: impl Into<String>) -> Self {
        FormatError::Invalid { path: path.to_path_buf(), msg: msg.into() }
    }
}

pub(crate) fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| FormatError::io(path, e))
}

pub(crate) fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| FormatError::io(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| FormatError::io(path, e))
}

/// Content lines of a text file: 1-based line number and trimmed text, with
/// blank and `#` lines skipped.
pub(crate) fn content_lines<'a, R: std::io::BufRead + 'a>(
    reader: R,
    path: &'a Path,
) -> impl Iterator<Item = Result<(usize, String)>> + 'a {
    reader
        .lines()
        .enumerate()
        .map(move |(k, line)| line.map(|l| (k + 1, l)).map_err(|e| FormatError::io(path, e)))
        .filter(|r| match r {
            Ok((_, l)) => {
                let t = l.trim();
                !t.is_empty() && !t.starts_with('#')
            }
            Err(_) => true,
        })
        .map(|r| r.map(|(n, l)| (n, l.trim().to_string())))
}

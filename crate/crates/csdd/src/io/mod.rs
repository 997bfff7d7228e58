//! Text formats for vtrees, circuits, parameters and datasets.
//!
//! Circuit files follow the usual SDD layout: a `<magic> <count>` header,
//! one line per node with children before parents, and the root last.
//! Lines starting with `c` are comments. Parameters are written in linear
//! space with 17 significant digits, so every `f64` survives a round trip.

mod circuit;
mod dataset;
mod formula;
mod vtree;

pub use circuit::{
    read_csdd, read_psdd, read_sdd, sniff_model, write_csdd, write_psdd, write_sdd, ModelKind,
};
pub use dataset::{read_dataset, write_dataset};
pub use formula::{parse_formula, write_formula};
pub use vtree::{read_vtree, write_vtree, VarTable, VtreeFile};

use csdd_core::error::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Model(#[from] CoreError),
    #[error(transparent)]
    Os(#[from] std::io::Error),
}

pub type IoResult<T> = std::result::Result<T, IoError>;

pub(crate) fn parse_err(line: usize, message: impl Into<String>) -> IoError {
    IoError::Parse {
        line,
        message: message.into(),
    }
}

/// 17 significant digits: enough for the value to parse back unchanged.
pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Non-comment, non-blank lines with their 1-based numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks.first() {
            None => None,
            Some(&"c") => None,
            Some(_) => Some((i + 1, toks)),
        }
    })
}

pub(crate) fn num<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> IoResult<T> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("bad {what} `{tok}`")))
}

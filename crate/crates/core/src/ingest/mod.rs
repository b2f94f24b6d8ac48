//! Text formats crossing the tool boundary: electrical netlists, thermal
//! tile maps, `key = value` device configs, and the JSON routing report.
//!
//! Every parser rejects malformed input with a line/column locus instead of
//! guessing, and `parse(write(x)) == x` holds for the formats that have a
//! writer (netlists and reports).

mod config;
mod netlist;
mod report;
mod thermal;

pub use config::{parse_config, Config};
pub use netlist::{parse_netlist, write_netlist, Net, Netlist};
pub use report::{parse_report, write_report};
pub use thermal::{parse_thermal, write_thermal, ThermalProfile};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
#[error("line {line}, col {col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl ParseError {
    pub fn new(line: usize, col: usize, msg: impl Into<String>) -> Self {
        ParseError { line, col, msg: msg.into() }
    }
}

/// Tokens of one line with their 1-based starting columns. `#` starts a
/// comment running to the end of the line.
pub(crate) fn tokenize(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, c) in line.char_indices() {
        if c == '#' {
            if let Some(s) = start {
                out.push((s + 1, &line[s..i]));
            }
            return out;
        }
        if c.is_whitespace() {
            if let Some(s) = start {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

pub(crate) fn parse_num<T: std::str::FromStr>(
    line: usize,
    col: usize,
    tok: &str,
    what: &str,
) -> Result<T, ParseError> {
    tok.parse::<T>()
        .map_err(|_| ParseError::new(line, col, format!("expected {what}, got `{tok}`")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenizer_strips_comments_and_tracks_columns() {
        assert_eq!(tokenize("a bb  c"), vec![(1, "a"), (3, "bb"), (7, "c")]);
        assert_eq!(tokenize("  x # y z"), vec![(3, "x")]);
        assert_eq!(tokenize("# all comment"), vec![]);
        assert_eq!(tokenize(""), vec![]);
    }
}

//! Flat `key = value` settings text shared by module and schedule files.
//!
//! `#` starts a comment line, blank lines separate blocks, and set-valued keys
//! hold comma-separated lists.

use std::collections::BTreeSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub message: String,
}

/// Parse settings text into blocks of entries. A block ends at a blank line.
pub fn parse_blocks(text: &str) -> Result<Vec<Vec<Entry>>, SyntaxError> {
    let mut blocks = Vec::new();
    let mut current: Vec<Entry> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            if !current.is_empty() {
                blocks.push(std::mem::take(&mut current));
            }
            continue;
        }
        if trimmed.starts_with('#') {
            continue;
        }
        let Some((key, value)) = trimmed.split_once('=') else {
            return Err(SyntaxError {
                line,
                message: format!("expected `key = value`, found `{trimmed}`"),
            });
        };
        let key = key.trim();
        if key.is_empty() {
            return Err(SyntaxError {
                line,
                message: "empty key".into(),
            });
        }
        if current.iter().any(|e| e.key == key) {
            return Err(SyntaxError {
                line,
                message: format!("key `{key}` given twice"),
            });
        }
        current.push(Entry {
            line,
            key: key.to_string(),
            value: value.trim().to_string(),
        });
    }
    if !current.is_empty() {
        blocks.push(current);
    }
    Ok(blocks)
}

/// Parse settings text that must form a single block (blank lines allowed).
pub fn parse_single(text: &str) -> Result<Vec<Entry>, SyntaxError> {
    let blocks = parse_blocks(text)?;
    let mut all: Vec<Entry> = Vec::new();
    for entry in blocks.into_iter().flatten() {
        if all.iter().any(|e| e.key == entry.key) {
            return Err(SyntaxError {
                line: entry.line,
                message: format!("key `{}` given twice", entry.key),
            });
        }
        all.push(entry);
    }
    Ok(all)
}

pub fn split_list(value: &str) -> BTreeSet<String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

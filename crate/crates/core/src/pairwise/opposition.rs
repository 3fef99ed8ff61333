use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const BUILTIN: &str = include_str!("../../resources/opposites.tsv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Opposition {
    Consistent,
    Inconsistent,
    Unrelated,
}

/// Unordered pairs of predicates that contradict each other on the same endpoints.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OppositionTable {
    pairs: BTreeSet<(String, String)>,
}

impl OppositionTable {
    /// The table shipped in `resources/opposites.tsv`.
    pub fn builtin() -> Self {
        Self::parse(BUILTIN).expect("bundled opposition table parses")
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Two tab-separated predicates per line; `#` comments and blank lines skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut table = OppositionTable::default();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
            match fields.as_slice() {
                [a, b, ..] if !a.is_empty() && !b.is_empty() => table.insert(a, b),
                _ => {
                    return Err(Error::Format {
                        line: no + 1,
                        message: "expected two tab-separated predicates".into(),
                    })
                }
            }
        }
        Ok(table)
    }

    pub fn insert(&mut self, a: &str, b: &str) {
        let (x, y) = if a <= b { (a, b) } else { (b, a) };
        self.pairs.insert((x.to_owned(), y.to_owned()));
    }

    pub fn are_opposite(&self, a: &str, b: &str) -> bool {
        let (x, y) = if a <= b { (a, b) } else { (b, a) };
        self.pairs.contains(&(x.to_owned(), y.to_owned()))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn check(&self, p1: &str, p2: &str) -> Opposition {
        if p1 == p2 {
            Opposition::Consistent
        } else if self.are_opposite(p1, p2) {
            Opposition::Inconsistent
        } else {
            Opposition::Unrelated
        }
    }
}

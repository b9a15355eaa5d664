//! Dense row-major embedding matrices and their `node v1 ... vd` text format.

use std::io::{BufRead, Write};

use super::EmbedError;

/// One `dim`-long row of finite values per node.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    rows: usize,
    dim: usize,
    values: Vec<f64>,
}

impl EmbeddingMatrix {
    pub fn new(rows: usize, dim: usize, values: Vec<f64>) -> Result<Self, EmbedError> {
        if dim == 0 {
            return Err(EmbedError::InvalidDim(0));
        }
        if values.len() != rows * dim {
            return Err(EmbedError::Incomplete {
                expected: rows * dim,
                found: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|x| !x.is_finite()) {
            return Err(EmbedError::NonFinite { node: i / dim });
        }
        Ok(Self { rows, dim, values })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, node: usize) -> &[f64] {
        &self.values[node * self.dim..(node + 1) * self.dim]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Writes one `node v1 ... vd` line per row using shortest round-trip
    /// float formatting, so reading the output back is bit-exact.
    pub fn write_text<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for node in 0..self.rows {
            write!(out, "{node}")?;
            for x in self.row(node) {
                write!(out, " {x}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    /// Parses the text format. Every node in `0..expected_rows` must appear
    /// exactly once; rows may come in any order. Blank lines and `#` lines
    /// are skipped.
    pub fn read_text<R: BufRead>(source: R, expected_rows: usize) -> Result<Self, EmbedError> {
        let mut dim = None;
        let mut values: Vec<Option<Vec<f64>>> = vec![None; expected_rows];
        let mut found = 0;
        for (i, line) in source.lines().enumerate() {
            let line = line?;
            let lineno = i + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut fields = trimmed.split_whitespace();
            let node: usize = fields
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| EmbedError::Malformed {
                    line: lineno,
                    reason: "node id is not a non-negative integer".into(),
                })?;
            let row = fields
                .map(|t| t.parse::<f64>())
                .collect::<Result<Vec<f64>, _>>()
                .map_err(|e| EmbedError::Malformed {
                    line: lineno,
                    reason: e.to_string(),
                })?;
            if row.is_empty() {
                return Err(EmbedError::Malformed {
                    line: lineno,
                    reason: "row has no values".into(),
                });
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(EmbedError::NonFinite { node });
            }
            match dim {
                None => dim = Some(row.len()),
                Some(d) if d != row.len() => {
                    return Err(EmbedError::Malformed {
                        line: lineno,
                        reason: format!("expected {d} values, found {}", row.len()),
                    })
                }
                _ => {}
            }
            let slot = values.get_mut(node).ok_or_else(|| EmbedError::Malformed {
                line: lineno,
                reason: format!("node {node} out of range for {expected_rows} rows"),
            })?;
            if slot.is_some() {
                return Err(EmbedError::Malformed {
                    line: lineno,
                    reason: format!("duplicate row for node {node}"),
                });
            }
            *slot = Some(row);
            found += 1;
        }
        if found != expected_rows {
            return Err(EmbedError::Incomplete {
                expected: expected_rows,
                found,
            });
        }
        let dim = dim.ok_or(EmbedError::Incomplete {
            expected: expected_rows,
            found: 0,
        })?;
        let flat = values.into_iter().flatten().flatten().collect();
        Self::new(expected_rows, dim, flat)
    }
}

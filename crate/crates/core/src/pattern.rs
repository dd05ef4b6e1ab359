//! Binary sparsity patterns of factor loading matrices.
//!
//! Rows index observed variables, columns index factors. A pattern is
//! stored row-major as plain booleans.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("line {line}, column {column}: unexpected character {found:?}")]
    Parse {
        line: usize,
        column: usize,
        found: char,
    },
    #[error("line {line}: expected {expected} entries, found {found}")]
    Dimension {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("input contains no pattern rows")]
    EmptyInput,
    #[error("index {index} out of range (bound {bound})")]
    Index { index: usize, bound: usize },
    #[error("invalid record: {0}")]
    Record(String),
}

/// Input encodings accepted by [`parse_pattern`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternFormat {
    /// Whitespace-separated `0`/`1` entries, one row per line.
    DenseText,
    /// A single JSON object with a `delta` array of 0/1 rows.
    JsonlRecord,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SparsityPattern {
    m: usize,
    r: usize,
    entries: Vec<bool>,
}

impl SparsityPattern {
    /// Builds a pattern from explicit rows. At least one row is required.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self, PatternError> {
        let first = rows.first().ok_or(PatternError::EmptyInput)?;
        let r = first.as_ref().len();
        let mut entries = Vec::with_capacity(rows.len() * r);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != r {
                return Err(PatternError::Dimension {
                    line: i + 1,
                    expected: r,
                    found: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                match v {
                    0 => entries.push(false),
                    1 => entries.push(true),
                    _ => {
                        return Err(PatternError::Parse {
                            line: i + 1,
                            column: j + 1,
                            found: char::from_digit(u32::from(v % 10), 10).unwrap_or('?'),
                        })
                    }
                }
            }
        }
        Ok(Self {
            m: rows.len(),
            r,
            entries,
        })
    }

    /// An `m x r` pattern with every entry set to `value`.
    pub fn filled(m: usize, r: usize, value: bool) -> Self {
        Self {
            m,
            r,
            entries: vec![value; m * r],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut p = Self::filled(n, n, false);
        for i in 0..n {
            p.set(i, i, true);
        }
        p
    }

    /// Builds a pattern from a closure over `(row, column)`.
    pub fn from_fn(m: usize, r: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut entries = Vec::with_capacity(m * r);
        for i in 0..m {
            for j in 0..r {
                entries.push(f(i, j));
            }
        }
        Self { m, r, entries }
    }

    /// Each entry is set independently with probability `density`.
    pub fn random<G: Rng + ?Sized>(m: usize, r: usize, density: f64, rng: &mut G) -> Self {
        let density = density.clamp(0.0, 1.0);
        Self::from_fn(m, r, |_, _| rng.random_bool(density))
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn r(&self) -> usize {
        self.r
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        assert!(
            row < self.m && col < self.r,
            "entry ({row}, {col}) out of range"
        );
        self.entries[row * self.r + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        assert!(
            row < self.m && col < self.r,
            "entry ({row}, {col}) out of range"
        );
        self.entries[row * self.r + col] = value;
    }

    pub fn row(&self, row: usize) -> &[bool] {
        &self.entries[row * self.r..(row + 1) * self.r]
    }

    pub fn ones(&self) -> usize {
        self.entries.iter().filter(|&&v| v).count()
    }

    pub fn is_zero_row(&self, row: usize) -> bool {
        !self.row(row).iter().any(|&v| v)
    }

    pub fn is_zero_column(&self, col: usize) -> bool {
        (0..self.m).all(|i| !self.get(i, col))
    }

    /// True when no row and no column is entirely zero.
    pub fn is_trimmed(&self) -> bool {
        (0..self.m).all(|i| !self.is_zero_row(i)) && (0..self.r).all(|j| !self.is_zero_column(j))
    }

    /// Rows as `0`/`1` vectors.
    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.m)
            .map(|i| self.row(i).iter().map(|&v| u8::from(v)).collect())
            .collect()
    }

    /// The submatrix formed by `rows` (in the given order) and all columns.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self, PatternError> {
        let mut entries = Vec::with_capacity(rows.len() * self.r);
        for &i in rows {
            if i >= self.m {
                return Err(PatternError::Index {
                    index: i,
                    bound: self.m,
                });
            }
            entries.extend_from_slice(self.row(i));
        }
        Ok(Self {
            m: rows.len(),
            r: self.r,
            entries,
        })
    }

    /// The submatrix formed by `cols` (in the given order) and all rows.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Self, PatternError> {
        if let Some(&j) = cols.iter().find(|&&j| j >= self.r) {
            return Err(PatternError::Index {
                index: j,
                bound: self.r,
            });
        }
        Ok(Self::from_fn(self.m, cols.len(), |i, k| {
            self.get(i, cols[k])
        }))
    }

    /// Renders the pattern in the dense text format.
    pub fn to_dense_text(&self) -> String {
        let mut out = String::with_capacity(self.m * (2 * self.r + 1));
        for i in 0..self.m {
            let line: Vec<&str> = self
                .row(i)
                .iter()
                .map(|&v| if v { "1" } else { "0" })
                .collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

impl fmt::Debug for SparsityPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SparsityPattern({}x{}) [", self.m, self.r)?;
        for i in 0..self.m {
            if i > 0 {
                f.write_str(", ")?;
            }
            for &v in self.row(i) {
                f.write_str(if v { "1" } else { "0" })?;
            }
        }
        f.write_str("]")
    }
}

/// Identifier carried by a JSONL draw record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RecordId {
    Int(i64),
    Str(String),
}

impl fmt::Display for RecordId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RecordId::Int(v) => write!(f, "{v}"),
            RecordId::Str(s) => f.write_str(s),
        }
    }
}

pub fn parse_pattern(text: &[u8], format: PatternFormat) -> Result<SparsityPattern, PatternError> {
    match format {
        PatternFormat::DenseText => parse_dense_text(text),
        PatternFormat::JsonlRecord => parse_record(text).map(|(_, p)| p),
    }
}

fn parse_dense_text(text: &[u8]) -> Result<SparsityPattern, PatternError> {
    let mut rows: Vec<Vec<u8>> = Vec::new();
    for (line_idx, raw) in text.split(|&b| b == b'\n').enumerate() {
        let line_no = line_idx + 1;
        let line = raw.strip_suffix(b"\r").unwrap_or(raw);
        let first = line.iter().position(|&b| b != b' ' && b != b'\t');
        let Some(first) = first else { continue };
        if line[first] == b'#' {
            continue;
        }

        let mut row = Vec::new();
        let mut prev_was_entry = false;
        for (col_idx, &b) in line.iter().enumerate() {
            match b {
                b'0' | b'1' if !prev_was_entry => {
                    row.push(b - b'0');
                    prev_was_entry = true;
                }
                b' ' | b'\t' => prev_was_entry = false,
                _ => {
                    return Err(PatternError::Parse {
                        line: line_no,
                        column: col_idx + 1,
                        found: decode_char(&line[col_idx..]),
                    })
                }
            }
        }

        if let Some(expected) = rows.first().map(Vec::len) {
            if row.len() != expected {
                return Err(PatternError::Dimension {
                    line: line_no,
                    expected,
                    found: row.len(),
                });
            }
        }
        rows.push(row);
    }
    SparsityPattern::from_rows(&rows)
}

fn decode_char(bytes: &[u8]) -> char {
    let end = bytes.len().min(4);
    (1..=end)
        .find_map(|n| std::str::from_utf8(&bytes[..n]).ok())
        .and_then(|s| s.chars().next())
        .unwrap_or(char::REPLACEMENT_CHARACTER)
}

/// Parses one JSONL draw record: `{"id": .., "delta": [[0,1,..],..], "m"?: .., "r"?: ..}`.
pub fn parse_record(text: &[u8]) -> Result<(RecordId, SparsityPattern), PatternError> {
    let value: Value = serde_json::from_slice(text)
        .map_err(|e| PatternError::Record(format!("invalid JSON: {e}")))?;
    parse_record_value(&value)
}

pub fn parse_record_value(value: &Value) -> Result<(RecordId, SparsityPattern), PatternError> {
    let obj = value
        .as_object()
        .ok_or_else(|| PatternError::Record("record must be a JSON object".into()))?;

    let id = match obj.get("id") {
        Some(Value::String(s)) => RecordId::Str(s.clone()),
        Some(Value::Number(n)) => RecordId::Int(
            n.as_i64()
                .ok_or_else(|| PatternError::Record("field 'id' must be an integer".into()))?,
        ),
        Some(_) => {
            return Err(PatternError::Record(
                "field 'id' must be a string or integer".into(),
            ))
        }
        None => return Err(PatternError::Record("missing field 'id'".into())),
    };

    let delta = obj
        .get("delta")
        .ok_or_else(|| PatternError::Record("missing field 'delta'".into()))?
        .as_array()
        .ok_or_else(|| PatternError::Record("field 'delta' must be an array".into()))?;

    let mut rows = Vec::with_capacity(delta.len());
    for (i, row) in delta.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| PatternError::Record(format!("delta row {} must be an array", i + 1)))?;
        let mut bits = Vec::with_capacity(row.len());
        for (j, v) in row.iter().enumerate() {
            match v.as_u64() {
                Some(0) => bits.push(0u8),
                Some(1) => bits.push(1u8),
                _ => {
                    return Err(PatternError::Record(format!(
                        "delta[{}][{}] must be 0 or 1, found {v}",
                        i + 1,
                        j + 1
                    )))
                }
            }
        }
        rows.push(bits);
    }
    let pattern = SparsityPattern::from_rows(&rows)?;

    for (field, actual) in [("m", pattern.m()), ("r", pattern.r())] {
        if let Some(v) = obj.get(field) {
            let declared = v.as_u64().ok_or_else(|| {
                PatternError::Record(format!("field '{field}' must be a non-negative integer"))
            })?;
            if declared != actual as u64 {
                return Err(PatternError::Record(format!(
                    "declared {field}={declared} but delta has {field}={actual}"
                )));
            }
        }
    }

    Ok((id, pattern))
}

/// What [`trim`] removed, in original coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrimReport {
    pub removed_zero_columns: Vec<usize>,
    pub removed_zero_rows: Vec<usize>,
    pub original_m: usize,
    pub original_r: usize,
    pub effective_m: usize,
    pub effective_r: usize,
}

impl TrimReport {
    /// Original indices of the rows that survived, in order.
    pub fn kept_rows(&self) -> Vec<usize> {
        complement(&self.removed_zero_rows, self.original_m)
    }

    /// Original indices of the columns that survived, in order.
    pub fn kept_columns(&self) -> Vec<usize> {
        complement(&self.removed_zero_columns, self.original_r)
    }

    /// Re-inserts the removed zero rows and columns around `trimmed`.
    pub fn reconstruct(&self, trimmed: &SparsityPattern) -> SparsityPattern {
        assert_eq!(trimmed.m(), self.effective_m, "row count mismatch");
        assert_eq!(trimmed.r(), self.effective_r, "column count mismatch");
        let rows = self.kept_rows();
        let cols = self.kept_columns();
        let mut out = SparsityPattern::filled(self.original_m, self.original_r, false);
        for (ti, &oi) in rows.iter().enumerate() {
            for (tj, &oj) in cols.iter().enumerate() {
                out.set(oi, oj, trimmed.get(ti, tj));
            }
        }
        out
    }
}

fn complement(sorted_removed: &[usize], n: usize) -> Vec<usize> {
    let mut removed = sorted_removed.iter().peekable();
    (0..n)
        .filter(|i| {
            if removed.peek() == Some(&i) {
                removed.next();
                false
            } else {
                true
            }
        })
        .collect()
}

/// Removes all-zero columns, then all-zero rows.
pub fn trim(p: &SparsityPattern) -> (SparsityPattern, TrimReport) {
    let removed_zero_columns: Vec<usize> = (0..p.r()).filter(|&j| p.is_zero_column(j)).collect();
    let removed_zero_rows: Vec<usize> = (0..p.m()).filter(|&i| p.is_zero_row(i)).collect();
    let report = TrimReport {
        effective_m: p.m() - removed_zero_rows.len(),
        effective_r: p.r() - removed_zero_columns.len(),
        removed_zero_columns,
        removed_zero_rows,
        original_m: p.m(),
        original_r: p.r(),
    };
    let rows = report.kept_rows();
    let cols = report.kept_columns();
    let trimmed = SparsityPattern::from_fn(rows.len(), cols.len(), |i, j| p.get(rows[i], cols[j]));
    (trimmed, report)
}

/// Number of rows with at least one nonzero entry among `cols`.
///
/// An empty column set selects no entries and counts zero rows.
pub fn nonzero_row_count(p: &SparsityPattern, cols: &[usize]) -> Result<usize, PatternError> {
    if let Some(&j) = cols.iter().find(|&&j| j >= p.r()) {
        return Err(PatternError::Index {
            index: j,
            bound: p.r(),
        });
    }
    Ok((0..p.m())
        .filter(|&i| cols.iter().any(|&j| p.get(i, j)))
        .count())
}

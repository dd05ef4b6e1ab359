//! Post-processing of posterior draw streams: keep only draws whose
//! indicator matrix satisfies `CR(r̃, 1)` on its nonzero columns.
//!
//! Input and output are JSONL, one draw per line. Lines are processed in
//! batches, optionally in parallel, and written back in input order.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use factorid_core::pattern::parse_record_value;
use factorid_core::variance_identified;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::{io_err, CliError};

const BATCH_LINES: usize = 4096;

/// One output line. Field order is part of the output format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DrawVerdict {
    pub id: Value,
    pub effective_r: Option<usize>,
    pub identified: Option<bool>,
    pub mwvc_weight: Option<u64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct FilterSummary {
    pub total: u64,
    pub accepted: u64,
    pub acceptance_fraction: f64,
    pub histogram_effective_r: BTreeMap<usize, u64>,
    pub histogram_effective_r_accepted: BTreeMap<usize, u64>,
    /// Malformed lines; not part of `total`.
    pub errors: u64,
}

impl FilterSummary {
    fn record(&mut self, v: &DrawVerdict) {
        match (v.effective_r, v.identified) {
            (Some(r), Some(ok)) => {
                self.total += 1;
                *self.histogram_effective_r.entry(r).or_default() += 1;
                if ok {
                    self.accepted += 1;
                    *self.histogram_effective_r_accepted.entry(r).or_default() += 1;
                }
            }
            _ => self.errors += 1,
        }
    }

    fn finish(&mut self) {
        self.acceptance_fraction = if self.total == 0 {
            0.0
        } else {
            self.accepted as f64 / self.total as f64
        };
    }
}

/// Verdict for one input line. Never fails: problems become error records.
pub fn process_line(line: &str) -> DrawVerdict {
    let error = |id: Value, msg: String| DrawVerdict {
        id,
        effective_r: None,
        identified: None,
        mwvc_weight: None,
        error: Some(msg),
    };
    if line.trim().is_empty() {
        return error(Value::Null, "empty line".into());
    }
    let value: Value = match serde_json::from_str(line) {
        Ok(v) => v,
        Err(e) => return error(Value::Null, format!("invalid JSON: {e}")),
    };
    let id = value.get("id").cloned().unwrap_or(Value::Null);
    match parse_record_value(&value) {
        Ok((_, pattern)) => {
            let verdict = variance_identified(&pattern);
            DrawVerdict {
                id,
                effective_r: Some(verdict.effective_r),
                identified: Some(verdict.identified),
                mwvc_weight: verdict.mwvc_weight(),
                error: None,
            }
        }
        Err(e) => error(id, e.to_string()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FilterOptions {
    /// Worker threads; `1` processes lines on the calling thread.
    pub parallel: usize,
}

impl Default for FilterOptions {
    fn default() -> Self {
        Self { parallel: 1 }
    }
}

/// Streams verdicts for every line of `input` into `output`.
pub fn run_filter(
    input: &mut dyn BufRead,
    output: &mut dyn Write,
    opts: FilterOptions,
) -> Result<FilterSummary, CliError> {
    let pool = if opts.parallel > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(opts.parallel)
                .build()
                .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?,
        )
    } else {
        None
    };

    let mut summary = FilterSummary::default();
    let mut batch: Vec<String> = Vec::with_capacity(BATCH_LINES);
    let mut eof = false;
    while !eof {
        batch.clear();
        while batch.len() < BATCH_LINES {
            let mut line = String::new();
            let n = input
                .read_line(&mut line)
                .map_err(io_err("cannot read input"))?;
            if n == 0 {
                eof = true;
                break;
            }
            if line.ends_with('\n') {
                line.pop();
                if line.ends_with('\r') {
                    line.pop();
                }
            }
            batch.push(line);
        }

        let verdicts: Vec<DrawVerdict> = match &pool {
            Some(pool) => pool.install(|| batch.par_iter().map(|l| process_line(l)).collect()),
            None => batch.iter().map(|l| process_line(l)).collect(),
        };
        for v in &verdicts {
            summary.record(v);
            let mut text = serde_json::to_string(v).expect("verdict serializes");
            text.push('\n');
            output
                .write_all(text.as_bytes())
                .map_err(io_err("cannot write output"))?;
        }
    }
    output.flush().map_err(io_err("cannot write output"))?;
    summary.finish();
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(input: &str, parallel: usize) -> (String, FilterSummary) {
        let mut out = Vec::new();
        let summary =
            run_filter(&mut input.as_bytes(), &mut out, FilterOptions { parallel }).unwrap();
        (String::from_utf8(out).unwrap(), summary)
    }

    #[test]
    fn three_reference_draws() {
        let input = concat!(
            r#"{"id": "fig4", "delta": [[1,0,0],[0,1,0],[1,1,0],[1,0,1],[1,1,1],[0,0,1],[0,1,1],[0,1,0]]}"#,
            "\n",
            r#"{"id": 2, "delta": [[1,0,0],[1,1,0],[0,1,1],[1,0,1],[0,1,0],[0,0,1]]}"#,
            "\n",
            r#"{"id": "zero", "delta": [[0,0],[0,0]]}"#,
            "\n"
        );
        let (out, summary) = run(input, 1);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(
            lines,
            vec![
                r#"{"id":"fig4","effective_r":3,"identified":true,"mwvc_weight":21,"error":null}"#,
                r#"{"id":2,"effective_r":3,"identified":false,"mwvc_weight":18,"error":null}"#,
                r#"{"id":"zero","effective_r":0,"identified":true,"mwvc_weight":null,"error":null}"#,
            ]
        );
        assert_eq!((summary.total, summary.accepted), (3, 2));
        assert!((summary.acceptance_fraction - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(
            summary.histogram_effective_r,
            BTreeMap::from([(0, 1), (3, 2)])
        );
        assert_eq!(
            summary.histogram_effective_r_accepted,
            BTreeMap::from([(0, 1), (3, 1)])
        );
        let json = serde_json::to_string(&summary).unwrap();
        assert!(
            json.contains(r#""histogram_effective_r":{"0":1,"3":2}"#),
            "{json}"
        );
    }

    #[test]
    fn empty_input() {
        let (out, summary) = run("", 1);
        assert!(out.is_empty());
        assert_eq!(summary.total, 0);
        assert_eq!(summary.acceptance_fraction, 0.0);
    }

    #[test]
    fn malformed_line_keeps_position() {
        let mut input = String::new();
        for k in 0..10 {
            if k == 4 {
                input.push_str("{\"id\": 4, \"delta\": [[1, 0], [1]]}\n");
            } else {
                input.push_str(&format!("{{\"id\": {k}, \"delta\": [[1],[1],[1]]}}\n"));
            }
        }
        let (out, summary) = run(&input, 1);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 10);
        assert!(lines[4].starts_with(
            r#"{"id":4,"effective_r":null,"identified":null,"mwvc_weight":null,"error":""#
        ));
        assert_eq!((summary.total, summary.errors), (9, 1));
        assert_eq!(run(&input, 4).0, out);
    }

    #[test]
    fn garbage_and_blank_lines_become_error_records() {
        let v = process_line("not json");
        assert_eq!(v.id, Value::Null);
        assert!(v.error.unwrap().starts_with("invalid JSON"));
        assert_eq!(process_line("   ").error.as_deref(), Some("empty line"));
    }
}

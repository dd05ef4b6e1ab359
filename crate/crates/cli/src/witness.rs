use std::io::Write;
use std::path::Path;

use factorid_core::{rcm_decomposition, PatternFormat, RcmDecomposition};
use serde::Serialize;

use crate::check::read_pattern;
use crate::labels::{col_label, dup_col_label, parse_row_list, row_label, row_labels};
use crate::{io_err, CliError, EXIT_OK, EXIT_RULE_FAILS};

#[derive(Debug, Serialize)]
struct WitnessJson {
    deleted_rows: Vec<String>,
    found: bool,
    rows_a: Option<Vec<String>>,
    rows_b: Option<Vec<String>>,
    matching: Option<Vec<(String, String)>>,
}

fn matching_labels(d: &RcmDecomposition, r: usize) -> Vec<(String, String)> {
    d.matching
        .pairs
        .iter()
        .map(|&(c, i)| {
            let col = if c < r {
                col_label(c)
            } else {
                dup_col_label(c - r)
            };
            (col, row_label(i))
        })
        .collect()
}

/// Prints the two RCM row blocks left after deleting `delete` (a row list
/// like `v1,v6`), or reports that none exist.
pub fn run(
    input: &Path,
    delete: &str,
    format: PatternFormat,
    json: bool,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let p = read_pattern(input, format)?;
    let deleted = parse_row_list(delete, p.m())?;
    let found = rcm_decomposition(&p, &deleted)?;
    let r = p.r();

    let mut deleted_sorted = deleted.clone();
    deleted_sorted.sort_unstable();
    let text = if json {
        let body = WitnessJson {
            deleted_rows: row_labels(&deleted_sorted),
            found: found.is_some(),
            rows_a: found.as_ref().map(|d| row_labels(&d.rows_a)),
            rows_b: found.as_ref().map(|d| row_labels(&d.rows_b)),
            matching: found.as_ref().map(|d| matching_labels(d, r)),
        };
        serde_json::to_string(&body).expect("witness serializes") + "\n"
    } else {
        let mut s = String::new();
        let shown = if deleted_sorted.is_empty() {
            "none".to_string()
        } else {
            row_labels(&deleted_sorted).join(", ")
        };
        s.push_str(&format!("deleted rows: {shown}\n"));
        match &found {
            Some(d) => {
                s.push_str(&format!(
                    "block A: ({})\n",
                    row_labels(&d.rows_a).join(", ")
                ));
                s.push_str(&format!(
                    "block B: ({})\n",
                    row_labels(&d.rows_b).join(", ")
                ));
                let pairs: Vec<String> = matching_labels(d, r)
                    .into_iter()
                    .map(|(c, v)| format!("{c}-{v}"))
                    .collect();
                s.push_str(&format!("matching: {}\n", pairs.join(", ")));
            }
            None => s.push_str("no decomposition\n"),
        }
        s
    };
    out.write_all(text.as_bytes())
        .map_err(io_err("cannot write output"))?;
    Ok(if found.is_some() {
        EXIT_OK
    } else {
        EXIT_RULE_FAILS
    })
}

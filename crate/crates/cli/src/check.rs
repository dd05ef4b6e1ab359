use std::fs;
use std::io::Write;
use std::path::Path;

use factorid_core::identify::{counting_rule, PassWitness};
use factorid_core::{
    parse_pattern, trim, IdentifyError, PatternFormat, SparsityPattern, TrimReport,
};
use serde::Serialize;

use crate::labels::{col_labels, row_labels};
use crate::{io_err, CliError, EXIT_OK, EXIT_RULE_FAILS};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessReport {
    pub columns: Vec<String>,
    pub q: usize,
    pub nonzero_rows: usize,
    pub required: usize,
    pub deleted_rows: Vec<String>,
}

/// Machine form of `check --json`. Labels are in the input's coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub holds: bool,
    pub s: usize,
    pub original_m: usize,
    pub original_r: usize,
    pub effective_m: usize,
    pub effective_r: usize,
    pub removed_zero_rows: Vec<String>,
    pub removed_zero_columns: Vec<String>,
    pub degenerate: bool,
    pub method: Option<String>,
    pub mwvc_weight: Option<u64>,
    pub threshold: Option<u64>,
    pub matching_size: Option<usize>,
    pub deletions_checked: Option<u64>,
    pub witness: Option<WitnessReport>,
    pub sufficient_only: bool,
}

fn method_name(v: &factorid_core::CountingRuleVerdict) -> String {
    serde_json::to_value(v.method)
        .ok()
        .and_then(|x| x.as_str().map(str::to_owned))
        .unwrap_or_default()
}

/// Trims `p` and decides `CR(r, s)` on what remains.
pub fn check_pattern(p: &SparsityPattern, s: usize) -> Result<CheckReport, CliError> {
    let (trimmed, report) = trim(p);
    let mut out = CheckReport {
        holds: true,
        s,
        original_m: report.original_m,
        original_r: report.original_r,
        effective_m: report.effective_m,
        effective_r: report.effective_r,
        removed_zero_rows: row_labels(&report.removed_zero_rows),
        removed_zero_columns: col_labels(&report.removed_zero_columns),
        degenerate: report.effective_r == 0,
        method: None,
        mwvc_weight: None,
        threshold: None,
        matching_size: None,
        deletions_checked: None,
        witness: None,
        sufficient_only: true,
    };
    if out.degenerate {
        return Ok(out);
    }
    let r = trimmed.r();
    if s == 1 {
        out.threshold = Some(r as u64 * (2 * r as u64 + 1));
    }

    let verdict = match counting_rule(&trimmed, s) {
        Ok(v) => v,
        Err(IdentifyError::InfeasibleDimensions { m, .. }) => {
            // Too few rows: the full column set is already a violation.
            out.holds = false;
            out.method = Some("dimension_bound".into());
            out.witness = Some(WitnessReport {
                columns: col_labels(&report.kept_columns()),
                q: r,
                nonzero_rows: m,
                required: 2 * r + s,
                deleted_rows: Vec::new(),
            });
            if s == 1 {
                out.mwvc_weight = factorid_core::counting_rule_s1(&trimmed)?.mwvc_weight;
            }
            return Ok(out);
        }
        Err(e) => return Err(e.into()),
    };

    out.holds = verdict.holds;
    out.method = Some(method_name(&verdict));
    out.mwvc_weight = verdict.mwvc_weight;
    match &verdict.witness_pass {
        Some(PassWitness::Matching { matching }) => out.matching_size = Some(matching.len()),
        Some(PassWitness::AllDeletionsPassed { deletions }) => {
            out.deletions_checked = Some(*deletions)
        }
        _ => {}
    }
    if let Some(w) = &verdict.witness_fail {
        out.witness = Some(map_witness(w, &report, s));
    }
    Ok(out)
}

fn map_witness(
    w: &factorid_core::identify::ViolatingSubset,
    report: &TrimReport,
    s: usize,
) -> WitnessReport {
    let cols = report.kept_columns();
    let rows = report.kept_rows();
    WitnessReport {
        columns: w
            .columns
            .iter()
            .map(|&j| crate::labels::col_label(cols[j]))
            .collect(),
        q: w.q(),
        nonzero_rows: w.nonzero_rows,
        required: 2 * w.q() + s,
        deleted_rows: w
            .deleted_rows
            .iter()
            .map(|&i| crate::labels::row_label(rows[i]))
            .collect(),
    }
}

pub fn render_human(rep: &CheckReport) -> String {
    let mut s = String::new();
    s.push_str(&format!(
        "pattern: {}x{}, effective {}x{}\n",
        rep.original_m, rep.original_r, rep.effective_m, rep.effective_r
    ));
    if !rep.removed_zero_rows.is_empty() {
        s.push_str(&format!(
            "removed zero rows: {}\n",
            rep.removed_zero_rows.join(", ")
        ));
    }
    if !rep.removed_zero_columns.is_empty() {
        s.push_str(&format!(
            "removed zero columns: {}\n",
            rep.removed_zero_columns.join(", ")
        ));
    }
    if rep.degenerate {
        s.push_str("no nonzero columns: degenerate model, trivially identified\n");
        return s;
    }
    s.push_str(&format!(
        "CR({},{}): {}\n",
        rep.effective_r,
        rep.s,
        if rep.holds { "holds" } else { "fails" }
    ));
    if let (Some(w), Some(t)) = (rep.mwvc_weight, rep.threshold) {
        s.push_str(&format!("M* = {w} (threshold r(2r+1) = {t})\n"));
    }
    if let Some(n) = rep.matching_size {
        s.push_str(&format!("duplicated-graph matching of size {n}\n"));
    }
    if let Some(n) = rep.deletions_checked {
        s.push_str(&format!("{n} row deletions checked\n"));
    }
    if let Some(w) = &rep.witness {
        s.push_str(&format!(
            "violating columns {{{}}} (q = {}): {} nonzero rows < {}",
            w.columns.join(", "),
            w.q,
            w.nonzero_rows,
            w.required
        ));
        if !w.deleted_rows.is_empty() {
            s.push_str(&format!(" after deleting {}", w.deleted_rows.join(", ")));
        }
        s.push('\n');
    }
    if rep.s == 1 {
        s.push_str(if rep.holds {
            "generic global variance identification is guaranteed\n"
        } else {
            "sufficient condition not met; identification is not guaranteed by this rule\n"
        });
    }
    s
}

pub(crate) fn read_pattern(
    input: &Path,
    format: PatternFormat,
) -> Result<SparsityPattern, CliError> {
    let bytes = fs::read(input).map_err(io_err(format!("cannot read {}", input.display())))?;
    Ok(parse_pattern(&bytes, format)?)
}

pub fn run(
    input: &Path,
    s: usize,
    format: PatternFormat,
    json: bool,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let p = read_pattern(input, format)?;
    let rep = check_pattern(&p, s)?;
    let text = if json {
        let mut t = serde_json::to_string(&rep).expect("report serializes");
        t.push('\n');
        t
    } else {
        render_human(&rep)
    };
    out.write_all(text.as_bytes())
        .map_err(io_err("cannot write output"))?;
    Ok(if rep.holds { EXIT_OK } else { EXIT_RULE_FAILS })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig3() -> SparsityPattern {
        SparsityPattern::from_rows(&[
            [1, 1, 1],
            [1, 1, 0],
            [1, 0, 1],
            [0, 0, 1],
            [1, 0, 0],
            [0, 1, 0],
            [1, 1, 0],
            [1, 0, 0],
        ])
        .unwrap()
    }

    #[test]
    fn witness_labels_use_original_coordinates() {
        // Column 1 is zero and row 0 is zero; the violation sits in original column u3.
        let p = SparsityPattern::from_rows(&[
            [0, 0, 0],
            [1, 0, 1],
            [1, 0, 0],
            [1, 0, 0],
            [1, 0, 1],
            [1, 0, 0],
            [1, 0, 0],
        ])
        .unwrap();
        let rep = check_pattern(&p, 1).unwrap();
        assert!(!rep.holds);
        assert_eq!(rep.removed_zero_columns, vec!["u2"]);
        assert_eq!(rep.removed_zero_rows, vec!["v1"]);
        assert_eq!(rep.witness.unwrap().columns, vec!["u3"]);
    }

    #[test]
    fn figure_three_fails_cr32() {
        let rep = check_pattern(&fig3(), 2).unwrap();
        assert!(!rep.holds);
        let w = rep.witness.unwrap();
        assert_eq!(w.columns, vec!["u3"]);
        assert_eq!(w.deleted_rows, vec!["v1"]);
    }

    #[test]
    fn too_few_rows_is_a_failure_not_an_error() {
        let p = SparsityPattern::from_fn(6, 3, |i, j| i % 3 == j);
        let rep = check_pattern(&p, 1).unwrap();
        assert!(!rep.holds);
        assert_eq!(rep.method.as_deref(), Some("dimension_bound"));
        assert_eq!(rep.witness.as_ref().unwrap().q, 3);
        assert_eq!(rep.mwvc_weight, Some(18));
    }

    #[test]
    fn degenerate_pattern_holds() {
        let rep = check_pattern(&SparsityPattern::filled(3, 2, false), 1).unwrap();
        assert!(rep.holds && rep.degenerate);
        assert!(render_human(&rep).contains("degenerate"));
    }
}

//! Counting-rule verdicts, RCM decompositions and the top-level variance
//! identification decision.

mod counting;
mod generic;
mod rcm;

use serde::Serialize;
use thiserror::Error;

pub use counting::{
    binomial, counting_rule, counting_rule_bruteforce, counting_rule_bruteforce_with,
    counting_rule_s0, counting_rule_s1, counting_rule_with, CountingOptions, CountingRuleVerdict,
    Method, PassWitness, ViolatingSubset, DEFAULT_MAX_BRUTEFORCE_COLUMNS, DEFAULT_MAX_DELETIONS,
};
pub use generic::{
    gaussian_fill, generic_rank_check, numerical_rank, GenericCheckOptions, GenericCheckReport,
    Group, RankFailure, TrialFailure, DEFAULT_MAX_DELETIONS_PER_TRIAL, DEFAULT_TOLERANCE,
};
pub use rcm::{rcm_decomposition, RcmDecomposition};

use crate::bipartite::BipartiteError;
use crate::flow::FlowError;
use crate::pattern::{trim, PatternError, SparsityPattern, TrimReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdentifyError {
    #[error("pattern has a zero row or zero column; trim it first")]
    UntrimmedPattern,
    #[error("pattern has no columns")]
    EmptyPattern,
    #[error("brute force refuses r = {r} columns (cap {cap})")]
    TooManyColumns { r: usize, cap: usize },
    #[error("m = {m} rows cannot satisfy CR({r},{s}), which needs at least {} rows", 2 * r + s)]
    InfeasibleDimensions { m: usize, r: usize, s: usize },
    #[error("{deletions} row deletions exceed the budget of {cap}")]
    DeletionBudgetExceeded { deletions: u64, cap: u64 },
    #[error("row index {index} out of range for {m} rows")]
    RowIndex { index: usize, m: usize },
    #[error("row {index} listed twice")]
    DuplicateRow { index: usize },
    #[error("no RCM decomposition after deleting rows {deleted_rows:?}")]
    NoDecomposition { deleted_rows: Vec<usize> },
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error(transparent)]
    Bipartite(#[from] BipartiteError),
    #[error(transparent)]
    Flow(#[from] FlowError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum VerdictDetail {
    /// Every column was zero: no factors, nothing to identify.
    Degenerate,
    CountingRule(CountingRuleVerdict),
}

/// Outcome of [`variance_identified`]. Witness indices in `detail` refer
/// to the trimmed pattern; map them back with `trim.kept_rows()` and
/// `trim.kept_columns()`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentificationVerdict {
    pub identified: bool,
    pub effective_r: usize,
    pub trim: TrimReport,
    pub detail: VerdictDetail,
    /// Always true: `identified = false` means the sufficient condition
    /// `CR(r, 1)` fails, not that the model is unidentified.
    pub sufficient_only: bool,
}

impl IdentificationVerdict {
    /// Minimum weighted cover value `M*` of the trimmed pattern, if any.
    pub fn mwvc_weight(&self) -> Option<u64> {
        match &self.detail {
            VerdictDetail::Degenerate => None,
            VerdictDetail::CountingRule(v) => v.mwvc_weight,
        }
    }
}

/// Generic global variance identification is guaranteed when the trimmed
/// pattern satisfies `CR(r, 1)`. An all-zero pattern is trivially
/// identified.
pub fn variance_identified(p_raw: &SparsityPattern) -> IdentificationVerdict {
    let (trimmed, report) = trim(p_raw);
    let effective_r = report.effective_r;
    if effective_r == 0 {
        return IdentificationVerdict {
            identified: true,
            effective_r,
            trim: report,
            detail: VerdictDetail::Degenerate,
            sufficient_only: true,
        };
    }
    let verdict =
        counting_rule_s1(&trimmed).expect("trimmed pattern with columns is a valid network input");
    IdentificationVerdict {
        identified: verdict.holds,
        effective_r,
        trim: report,
        detail: VerdictDetail::CountingRule(verdict),
        sufficient_only: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lone_loading_is_not_guaranteed() {
        let p = SparsityPattern::from_rows(&[[0], [1], [0]]).unwrap();
        let v = variance_identified(&p);
        assert!(!v.identified);
        assert!(v.sufficient_only);
        assert_eq!(v.effective_r, 1);
        assert_eq!(v.trim.removed_zero_rows, vec![0, 2]);
    }

    #[test]
    fn remark_counterexample_is_not_guaranteed() {
        let p = SparsityPattern::from_rows(&[
            [1, 0, 0],
            [1, 1, 0],
            [0, 1, 1],
            [1, 0, 1],
            [0, 1, 0],
            [0, 0, 1],
        ])
        .unwrap();
        let v = variance_identified(&p);
        assert!(!v.identified);
        assert!(v.sufficient_only);
        assert_eq!(v.mwvc_weight(), Some(18));
    }

    #[test]
    fn all_zero_is_degenerate() {
        let v = variance_identified(&SparsityPattern::filled(4, 3, false));
        assert!(v.identified);
        assert_eq!(v.effective_r, 0);
        assert_eq!(v.detail, VerdictDetail::Degenerate);
        assert_eq!(v.mwvc_weight(), None);
    }

    #[test]
    fn zero_columns_shrink_r() {
        let p = SparsityPattern::from_fn(5, 3, |_, j| j != 1);
        let v = variance_identified(&p);
        assert_eq!(v.effective_r, 2);
        assert!(v.identified);
        assert_eq!(v.mwvc_weight(), Some(10));
    }
}

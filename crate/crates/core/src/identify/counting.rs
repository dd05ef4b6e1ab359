//! The 3-5-7-9 counting rule `CR(r, s)`: every set of `q` columns must
//! touch at least `2q + s` nonzero rows.

use rayon::prelude::*;
use serde::Serialize;

use super::IdentifyError;
use crate::bipartite::{
    duplicate_columns, generate_bipartite, maximum_matching, minimum_vertex_cover, Matching,
};
use crate::flow::{build_identification_network, max_flow_min_cut, mwvc_from_cut, Capacity};
use crate::pattern::{nonzero_row_count, SparsityPattern};

pub const DEFAULT_MAX_BRUTEFORCE_COLUMNS: usize = 24;
pub const DEFAULT_MAX_DELETIONS: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountingOptions {
    /// Brute force refuses patterns with more columns than this.
    pub max_bruteforce_columns: usize,
    /// The `s >= 2` wrapper refuses more than this many row deletions.
    pub max_deletions: u64,
}

impl Default for CountingOptions {
    fn default() -> Self {
        Self {
            max_bruteforce_columns: DEFAULT_MAX_BRUTEFORCE_COLUMNS,
            max_deletions: DEFAULT_MAX_DELETIONS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Bruteforce,
    Mincut,
    Dupmatching,
    DeletionWrapper,
}

/// Columns that violate the rule, with their nonzero-row count in the
/// pattern the verdict was computed on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ViolatingSubset {
    pub columns: Vec<usize>,
    pub nonzero_rows: usize,
    /// Rows removed before the violation showed up (deletion wrapper only).
    pub deleted_rows: Vec<usize>,
}

impl ViolatingSubset {
    pub fn q(&self) -> usize {
        self.columns.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PassWitness {
    /// Every nonempty column subset was counted.
    AllSubsets { subsets: u64 },
    /// Minimum cut value of the identification network.
    MinCut { value: Capacity },
    /// Size-`2r` matching in the column-duplicated graph.
    Matching { matching: Matching },
    /// Every `(s-1)`-row deletion left a `CR(r, 1)` remainder.
    AllDeletionsPassed { deletions: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountingRuleVerdict {
    pub r: usize,
    pub s: usize,
    pub holds: bool,
    pub witness_fail: Option<ViolatingSubset>,
    pub witness_pass: Option<PassWitness>,
    pub method: Method,
    /// Minimum weighted cover value, when the min-cut route computed one.
    pub mwvc_weight: Option<Capacity>,
}

fn require_columns(p: &SparsityPattern) -> Result<(), IdentifyError> {
    if p.r() == 0 {
        Err(IdentifyError::EmptyPattern)
    } else {
        Ok(())
    }
}

fn require_trimmed(p: &SparsityPattern) -> Result<(), IdentifyError> {
    require_columns(p)?;
    if p.is_trimmed() {
        Ok(())
    } else {
        Err(IdentifyError::UntrimmedPattern)
    }
}

/// Visits all `2^r - 1` column subsets, by size and then lexicographically,
/// and reports the first violating one.
pub fn counting_rule_bruteforce(
    p: &SparsityPattern,
    s: usize,
) -> Result<CountingRuleVerdict, IdentifyError> {
    counting_rule_bruteforce_with(p, s, &CountingOptions::default())
}

pub fn counting_rule_bruteforce_with(
    p: &SparsityPattern,
    s: usize,
    opts: &CountingOptions,
) -> Result<CountingRuleVerdict, IdentifyError> {
    require_columns(p)?;
    let r = p.r();
    let cap = opts.max_bruteforce_columns.min(63);
    if r > cap {
        return Err(IdentifyError::TooManyColumns { r, cap });
    }
    let row_masks: Vec<u64> = (0..p.m())
        .map(|i| {
            p.row(i)
                .iter()
                .enumerate()
                .fold(0u64, |acc, (j, &v)| acc | (u64::from(v) << j))
        })
        .filter(|&mask| mask != 0)
        .collect();

    let mut subset = Vec::with_capacity(r);
    for q in 1..=r {
        subset.clear();
        subset.extend(0..q);
        loop {
            let mask = subset.iter().fold(0u64, |acc, &j| acc | 1 << j);
            let count = row_masks.iter().filter(|&&rm| rm & mask != 0).count();
            if count < 2 * q + s {
                return Ok(CountingRuleVerdict {
                    r,
                    s,
                    holds: false,
                    witness_fail: Some(ViolatingSubset {
                        columns: subset.clone(),
                        nonzero_rows: count,
                        deleted_rows: Vec::new(),
                    }),
                    witness_pass: None,
                    method: Method::Bruteforce,
                    mwvc_weight: None,
                });
            }
            if !next_combination(&mut subset, r) {
                break;
            }
        }
    }
    Ok(CountingRuleVerdict {
        r,
        s,
        holds: true,
        witness_fail: None,
        witness_pass: Some(PassWitness::AllSubsets {
            subsets: (1u64 << r) - 1,
        }),
        method: Method::Bruteforce,
        mwvc_weight: None,
    })
}

/// Advances a sorted `k`-combination of `0..n` in lexicographic order.
pub(crate) fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let Some(i) = (0..k).rev().find(|&i| c[i] < n - k + i) else {
        return false;
    };
    c[i] += 1;
    for t in i + 1..k {
        c[t] = c[t - 1] + 1;
    }
    true
}

/// `CR(r, 1)` via the minimum weighted vertex cover of the pattern's
/// bipartite graph (columns weighted `2r+1`, rows `r`), computed as a
/// minimum s–t cut. The rule holds iff the cover weight reaches `r(2r+1)`.
///
/// On failure the columns left out of the cover are the witness: if `k`
/// columns and `l` rows are in a cover lighter than `r(2r+1)`, the other
/// `q = r - k` columns only touch covered rows and `l <= 2q`.
pub fn counting_rule_s1(p: &SparsityPattern) -> Result<CountingRuleVerdict, IdentifyError> {
    require_trimmed(p)?;
    let network = build_identification_network(p)?;
    let cut = max_flow_min_cut(&network);
    let r = p.r();
    let threshold = network.threshold();

    if cut.value >= threshold {
        return Ok(CountingRuleVerdict {
            r,
            s: 1,
            holds: true,
            witness_fail: None,
            witness_pass: Some(PassWitness::MinCut { value: cut.value }),
            method: Method::Mincut,
            mwvc_weight: Some(cut.value),
        });
    }

    let cover = mwvc_from_cut(&network, &cut)?;
    let excluded = complement_sorted(&cover.cols, r);
    let nonzero_rows = nonzero_row_count(p, &excluded)?;
    Ok(CountingRuleVerdict {
        r,
        s: 1,
        holds: false,
        witness_fail: Some(ViolatingSubset {
            columns: excluded,
            nonzero_rows,
            deleted_rows: Vec::new(),
        }),
        witness_pass: None,
        method: Method::Mincut,
        mwvc_weight: Some(cut.value),
    })
}

fn complement_sorted(sorted: &[usize], n: usize) -> Vec<usize> {
    (0..n)
        .filter(|j| sorted.binary_search(j).is_err())
        .collect()
}

/// `CR(r, 0)` via a maximum matching in the graph with every column
/// duplicated: the rule holds iff that matching has size `2r`.
///
/// On failure the König cover leaves out `l` column vertices whose
/// neighbourhood has fewer than `l` rows; their original columns form a
/// violating set of `q >= l/2` columns.
pub fn counting_rule_s0(p: &SparsityPattern) -> Result<CountingRuleVerdict, IdentifyError> {
    require_trimmed(p)?;
    let r = p.r();
    let doubled = duplicate_columns(&generate_bipartite(p));
    let mm = maximum_matching(&doubled);

    if mm.len() == 2 * r {
        return Ok(CountingRuleVerdict {
            r,
            s: 0,
            holds: true,
            witness_fail: None,
            witness_pass: Some(PassWitness::Matching { matching: mm }),
            method: Method::Dupmatching,
            mwvc_weight: None,
        });
    }

    let cover = minimum_vertex_cover(&doubled, &mm)?;
    let mut in_cover = vec![false; 2 * r];
    for &c in &cover.cols {
        in_cover[c] = true;
    }
    let columns: Vec<usize> = (0..r)
        .filter(|&j| !in_cover[j] || !in_cover[j + r])
        .collect();
    let nonzero_rows = nonzero_row_count(p, &columns)?;
    Ok(CountingRuleVerdict {
        r,
        s: 0,
        holds: false,
        witness_fail: Some(ViolatingSubset {
            columns,
            nonzero_rows,
            deleted_rows: Vec::new(),
        }),
        witness_pass: None,
        method: Method::Dupmatching,
        mwvc_weight: None,
    })
}

/// Binomial coefficient, saturating at `u64::MAX`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// `CR(r, s)` for any `s`. Uses the duplicated-graph matching for `s = 0`,
/// the min cut for `s = 1`, and for `s >= 2` checks `CR(r, 1)` on every
/// remainder left after deleting `s - 1` rows.
pub fn counting_rule(p: &SparsityPattern, s: usize) -> Result<CountingRuleVerdict, IdentifyError> {
    counting_rule_with(p, s, &CountingOptions::default())
}

pub fn counting_rule_with(
    p: &SparsityPattern,
    s: usize,
    opts: &CountingOptions,
) -> Result<CountingRuleVerdict, IdentifyError> {
    require_trimmed(p)?;
    let (m, r) = (p.m(), p.r());
    if m < 2 * r + s {
        return Err(IdentifyError::InfeasibleDimensions { m, r, s });
    }
    match s {
        0 => counting_rule_s0(p),
        1 => counting_rule_s1(p),
        _ => deletion_wrapper(p, s, opts),
    }
}

fn deletion_wrapper(
    p: &SparsityPattern,
    s: usize,
    opts: &CountingOptions,
) -> Result<CountingRuleVerdict, IdentifyError> {
    let (m, r) = (p.m(), p.r());
    let k = s - 1;
    let deletions = binomial(m, k);
    if deletions > opts.max_deletions {
        return Err(IdentifyError::DeletionBudgetExceeded {
            deletions,
            cap: opts.max_deletions,
        });
    }

    let all: Vec<Vec<usize>> = combinations(m, k).collect();
    let first_failure = all
        .into_par_iter()
        .find_map_first(|deleted| check_remainder(p, &deleted).transpose());

    match first_failure {
        Some(Err(e)) => Err(e),
        Some(Ok(witness)) => Ok(CountingRuleVerdict {
            r,
            s,
            holds: false,
            witness_fail: Some(witness),
            witness_pass: None,
            method: Method::DeletionWrapper,
            mwvc_weight: None,
        }),
        None => Ok(CountingRuleVerdict {
            r,
            s,
            holds: true,
            witness_fail: None,
            witness_pass: Some(PassWitness::AllDeletionsPassed { deletions }),
            method: Method::DeletionWrapper,
            mwvc_weight: None,
        }),
    }
}

/// `CR(r, 1)` on `p` without `deleted`. Columns emptied by the deletion
/// fail at once; rows that became zero are dropped since they never count.
/// Returns the violating subset in `p`'s coordinates.
fn check_remainder(
    p: &SparsityPattern,
    deleted: &[usize],
) -> Result<Option<ViolatingSubset>, IdentifyError> {
    let kept: Vec<usize> = (0..p.m())
        .filter(|i| deleted.binary_search(i).is_err())
        .collect();
    let rest = p.select_rows(&kept)?;

    if let Some(j) = (0..rest.r()).find(|&j| rest.is_zero_column(j)) {
        return Ok(Some(ViolatingSubset {
            columns: vec![j],
            nonzero_rows: nonzero_row_count(p, &[j])?,
            deleted_rows: deleted.to_vec(),
        }));
    }
    let nonzero: Vec<usize> = (0..rest.m()).filter(|&i| !rest.is_zero_row(i)).collect();
    let rest = rest.select_rows(&nonzero)?;
    let verdict = counting_rule_s1(&rest)?;
    Ok(verdict.witness_fail.map(|w| ViolatingSubset {
        nonzero_rows: nonzero_row_count(p, &w.columns).expect("columns in range"),
        columns: w.columns,
        deleted_rows: deleted.to_vec(),
    }))
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut current: Option<Vec<usize>> = (k <= n).then(|| (0..k).collect());
    std::iter::from_fn(move || {
        let out = current.clone()?;
        let mut next = out.clone();
        current = next_combination(&mut next, n).then_some(next);
        Some(out)
    })
}

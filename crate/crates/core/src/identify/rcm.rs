//! Splitting the rows left after a deletion into two RCM blocks.

use serde::Serialize;

use super::IdentifyError;
use crate::bipartite::{duplicate_columns, generate_bipartite, is_rcm, maximum_matching, Matching};
use crate::pattern::SparsityPattern;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RcmDecomposition {
    pub deleted_rows: Vec<usize>,
    /// `rows_a[j]` is the row paired with column `j`.
    pub rows_a: Vec<usize>,
    /// `rows_b[j]` is the row paired with the copy of column `j`.
    pub rows_b: Vec<usize>,
    /// Size-`2r` matching of the duplicated graph, rows in `p`'s coordinates.
    /// Column `j + r` is the copy of column `j`.
    pub matching: Matching,
}

impl RcmDecomposition {
    /// Checks disjointness and that both square blocks are RCM.
    pub fn verify(&self, p: &SparsityPattern) -> bool {
        let r = p.r();
        if self.rows_a.len() != r || self.rows_b.len() != r {
            return false;
        }
        let mut used = vec![false; p.m()];
        for &i in self
            .rows_a
            .iter()
            .chain(&self.rows_b)
            .chain(&self.deleted_rows)
        {
            if i >= p.m() || used[i] {
                return false;
            }
            used[i] = true;
        }
        [&self.rows_a, &self.rows_b].into_iter().all(|rows| {
            p.select_rows(rows)
                .ok()
                .and_then(|block| is_rcm(&block).ok().flatten())
                .is_some()
        })
    }
}

/// Removes `deleted_rows` from `p` and looks for a matching of size `2r` in
/// the remainder's column-duplicated graph. Rows matched to original columns
/// form block A (ordered by column), rows matched to copies form block B.
pub fn rcm_decomposition(
    p: &SparsityPattern,
    deleted_rows: &[usize],
) -> Result<Option<RcmDecomposition>, IdentifyError> {
    let mut deleted = deleted_rows.to_vec();
    deleted.sort_unstable();
    if let Some(&i) = deleted.iter().find(|&&i| i >= p.m()) {
        return Err(IdentifyError::RowIndex { index: i, m: p.m() });
    }
    if let Some(w) = deleted.windows(2).find(|w| w[0] == w[1]) {
        return Err(IdentifyError::DuplicateRow { index: w[0] });
    }

    let r = p.r();
    let kept: Vec<usize> = (0..p.m())
        .filter(|i| deleted.binary_search(i).is_err())
        .collect();
    if r == 0 || kept.len() < 2 * r {
        return Ok(None);
    }

    let rest = p.select_rows(&kept)?;
    let doubled = duplicate_columns(&generate_bipartite(&rest));
    let mm = maximum_matching(&doubled);
    if mm.len() < 2 * r {
        return Ok(None);
    }

    let mut rows_a = vec![0; r];
    let mut rows_b = vec![0; r];
    let mut pairs = Vec::with_capacity(2 * r);
    for &(col, row) in &mm.pairs {
        let original = kept[row];
        if col < r {
            rows_a[col] = original;
        } else {
            rows_b[col - r] = original;
        }
        pairs.push((col, original));
    }
    Ok(Some(RcmDecomposition {
        deleted_rows: deleted,
        rows_a,
        rows_b,
        matching: Matching { pairs },
    }))
}

//! Bipartite graphs generated from sparsity patterns, Hopcroft–Karp
//! matching, König covers and Hall saturation checks.
//!
//! Column vertices form the left side and row vertices the right side.
//! Edge `(j, i)` joins column `j` to row `i`.

use std::collections::VecDeque;

use serde::Serialize;
use thiserror::Error;

use crate::pattern::SparsityPattern;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BipartiteError {
    #[error("edge (column {col}, row {row}) outside a {n_col}x{n_row} graph")]
    EdgeOutOfRange {
        col: usize,
        row: usize,
        n_col: usize,
        n_row: usize,
    },
    #[error("duplicate edge (column {col}, row {row})")]
    DuplicateEdge { col: usize, row: usize },
    #[error("label list has {found} entries, expected {expected}")]
    LabelCount { expected: usize, found: usize },
    #[error("matching pair (column {col}, row {row}) is not a graph edge or reuses a vertex")]
    InvalidMatching { col: usize, row: usize },
    #[error("matching is not maximum: an augmenting path starts at column {col}")]
    MatchingNotMaximum { col: usize },
    #[error("pattern is {m}x{r}, expected a square pattern")]
    NotSquare { m: usize, r: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    n_col: usize,
    n_row: usize,
    /// Sorted row neighbours of every column.
    adj: Vec<Vec<usize>>,
    col_labels: Option<Vec<usize>>,
    row_labels: Option<Vec<usize>>,
}

impl BipartiteGraph {
    pub fn from_edges(
        n_col: usize,
        n_row: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, BipartiteError> {
        let mut adj = vec![Vec::new(); n_col];
        for (col, row) in edges {
            if col >= n_col || row >= n_row {
                return Err(BipartiteError::EdgeOutOfRange {
                    col,
                    row,
                    n_col,
                    n_row,
                });
            }
            adj[col].push(row);
        }
        for (col, rows) in adj.iter_mut().enumerate() {
            rows.sort_unstable();
            if let Some(w) = rows.windows(2).find(|w| w[0] == w[1]) {
                return Err(BipartiteError::DuplicateEdge { col, row: w[0] });
            }
        }
        Ok(Self {
            n_col,
            n_row,
            adj,
            col_labels: None,
            row_labels: None,
        })
    }

    /// Attaches original-coordinate labels to the vertices.
    pub fn with_labels(
        mut self,
        col_labels: Vec<usize>,
        row_labels: Vec<usize>,
    ) -> Result<Self, BipartiteError> {
        for (expected, found) in [
            (self.n_col, col_labels.len()),
            (self.n_row, row_labels.len()),
        ] {
            if expected != found {
                return Err(BipartiteError::LabelCount { expected, found });
            }
        }
        self.col_labels = Some(col_labels);
        self.row_labels = Some(row_labels);
        Ok(self)
    }

    pub fn n_col(&self) -> usize {
        self.n_col
    }

    pub fn n_row(&self) -> usize {
        self.n_row
    }

    pub fn neighbors(&self, col: usize) -> &[usize] {
        &self.adj[col]
    }

    pub fn degree(&self, col: usize) -> usize {
        self.adj[col].len()
    }

    pub fn has_edge(&self, col: usize, row: usize) -> bool {
        col < self.n_col && self.adj[col].binary_search(&row).is_ok()
    }

    /// Edges in ascending `(col, row)` order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(c, rows)| rows.iter().map(move |&r| (c, r)))
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    pub fn col_label(&self, col: usize) -> usize {
        self.col_labels.as_ref().map_or(col, |l| l[col])
    }

    pub fn row_label(&self, row: usize) -> usize {
        self.row_labels.as_ref().map_or(row, |l| l[row])
    }

    /// Removes one edge. Used to build counterfactual examples.
    pub fn without_edge(&self, col: usize, row: usize) -> Self {
        let mut g = self.clone();
        if let Some(rows) = g.adj.get_mut(col) {
            rows.retain(|&r| r != row);
        }
        g
    }
}

/// Column `j` is joined to row `i` exactly when `delta[i][j] = 1`.
pub fn generate_bipartite(p: &SparsityPattern) -> BipartiteGraph {
    let mut adj = vec![Vec::new(); p.r()];
    for i in 0..p.m() {
        for (j, &v) in p.row(i).iter().enumerate() {
            if v {
                adj[j].push(i);
            }
        }
    }
    BipartiteGraph {
        n_col: p.r(),
        n_row: p.m(),
        adj,
        col_labels: None,
        row_labels: None,
    }
}

/// Appends a copy `j + n_col` of every column vertex `j` carrying the same
/// edges. Labels of copies repeat the label of their original.
pub fn duplicate_columns(g: &BipartiteGraph) -> BipartiteGraph {
    let mut adj = g.adj.clone();
    adj.extend(g.adj.iter().cloned());
    BipartiteGraph {
        n_col: 2 * g.n_col,
        n_row: g.n_row,
        adj,
        col_labels: g
            .col_labels
            .as_ref()
            .map(|l| l.iter().chain(l).copied().collect()),
        row_labels: g.row_labels.clone(),
    }
}

/// Partner of each vertex on one side, if matched.
type Mates = Vec<Option<usize>>;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Matching {
    /// `(col, row)` pairs sorted by column.
    pub pairs: Vec<(usize, usize)>,
}

impl Matching {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// True when all pairs are edges of `g` and no endpoint repeats.
    pub fn is_valid_in(&self, g: &BipartiteGraph) -> bool {
        self.endpoint_maps(g).is_ok()
    }

    fn endpoint_maps(&self, g: &BipartiteGraph) -> Result<(Mates, Mates), BipartiteError> {
        let mut col_match = vec![None; g.n_col];
        let mut row_match = vec![None; g.n_row];
        for &(col, row) in &self.pairs {
            if !g.has_edge(col, row) || col_match[col].is_some() || row_match[row].is_some() {
                return Err(BipartiteError::InvalidMatching { col, row });
            }
            col_match[col] = Some(row);
            row_match[row] = Some(col);
        }
        Ok((col_match, row_match))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct VertexCover {
    pub cols: Vec<usize>,
    pub rows: Vec<usize>,
    pub weight: u64,
}

impl VertexCover {
    pub fn size(&self) -> usize {
        self.cols.len() + self.rows.len()
    }

    pub fn covers(&self, g: &BipartiteGraph) -> bool {
        let mut col_in = vec![false; g.n_col];
        let mut row_in = vec![false; g.n_row];
        for &c in &self.cols {
            col_in[c] = true;
        }
        for &r in &self.rows {
            row_in[r] = true;
        }
        g.edges().all(|(c, r)| col_in[c] || row_in[r])
    }

    /// Cover vertices mapped through the graph's labels.
    pub fn labeled(&self, g: &BipartiteGraph) -> (Vec<usize>, Vec<usize>) {
        (
            self.cols.iter().map(|&c| g.col_label(c)).collect(),
            self.rows.iter().map(|&r| g.row_label(r)).collect(),
        )
    }
}

const UNMATCHED: usize = usize::MAX;
const UNREACHED: usize = usize::MAX;

/// Maximum-cardinality matching by Hopcroft–Karp, `O(E sqrt(V))`.
///
/// Free columns are processed in ascending order and neighbours are scanned
/// in ascending row order, so the result is a function of the graph alone.
pub fn maximum_matching(g: &BipartiteGraph) -> Matching {
    let n = g.n_col;
    let mut col_match = vec![UNMATCHED; n];
    let mut row_match = vec![UNMATCHED; g.n_row];
    let mut dist = vec![UNREACHED; n];
    let mut next_edge = vec![0usize; n];
    let mut queue = VecDeque::with_capacity(n);
    let mut stack = Vec::new();

    loop {
        // Layer the columns by alternating BFS from the free ones.
        queue.clear();
        for c in 0..n {
            if col_match[c] == UNMATCHED {
                dist[c] = 0;
                queue.push_back(c);
            } else {
                dist[c] = UNREACHED;
            }
        }
        let mut limit = UNREACHED;
        while let Some(c) = queue.pop_front() {
            if dist[c] >= limit {
                continue;
            }
            for &row in &g.adj[c] {
                let owner = row_match[row];
                if owner == UNMATCHED {
                    limit = limit.min(dist[c]);
                } else if dist[owner] == UNREACHED {
                    dist[owner] = dist[c] + 1;
                    queue.push_back(owner);
                }
            }
        }
        if limit == UNREACHED {
            break;
        }

        // Vertex-disjoint shortest augmenting paths along the layers.
        next_edge.iter_mut().for_each(|e| *e = 0);
        for start in 0..n {
            if col_match[start] != UNMATCHED {
                continue;
            }
            stack.clear();
            stack.push(start);
            while let Some(&c) = stack.last() {
                let Some(&row) = g.adj[c].get(next_edge[c]) else {
                    dist[c] = UNREACHED;
                    stack.pop();
                    continue;
                };
                let owner = row_match[row];
                if owner == UNMATCHED {
                    if dist[c] == limit {
                        for &col in &stack {
                            let r = g.adj[col][next_edge[col]];
                            col_match[col] = r;
                            row_match[r] = col;
                        }
                        break;
                    }
                    next_edge[c] += 1;
                } else if dist[c] < limit && dist[owner] == dist[c] + 1 {
                    stack.push(owner);
                } else {
                    next_edge[c] += 1;
                }
            }
        }
    }

    Matching {
        pairs: col_match
            .iter()
            .enumerate()
            .filter(|&(_, &r)| r != UNMATCHED)
            .map(|(c, &r)| (c, r))
            .collect(),
    }
}

/// König cover from a maximum matching.
///
/// Let `Z` be every vertex reachable from an unmatched column along
/// alternating paths. The cover is `(columns \ Z) ∪ (rows ∩ Z)`; reaching
/// an unmatched row means `mm` was not maximum.
pub fn minimum_vertex_cover(
    g: &BipartiteGraph,
    mm: &Matching,
) -> Result<VertexCover, BipartiteError> {
    let (col_match, row_match) = mm.endpoint_maps(g)?;
    let mut col_seen = vec![false; g.n_col];
    let mut row_seen = vec![false; g.n_row];
    let mut queue = VecDeque::new();
    for c in 0..g.n_col {
        if col_match[c].is_none() {
            col_seen[c] = true;
            queue.push_back((c, c));
        }
    }
    while let Some((c, origin)) = queue.pop_front() {
        for &row in &g.adj[c] {
            if row_seen[row] || col_match[c] == Some(row) {
                continue;
            }
            row_seen[row] = true;
            match row_match[row] {
                None => return Err(BipartiteError::MatchingNotMaximum { col: origin }),
                Some(next) if !col_seen[next] => {
                    col_seen[next] = true;
                    queue.push_back((next, origin));
                }
                Some(_) => {}
            }
        }
    }
    let cols: Vec<usize> = (0..g.n_col).filter(|&c| !col_seen[c]).collect();
    let rows: Vec<usize> = (0..g.n_row).filter(|&r| row_seen[r]).collect();
    let weight = (cols.len() + rows.len()) as u64;
    Ok(VertexCover { cols, rows, weight })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Columns,
    Rows,
}

/// Hall's condition via matching size: a side is saturated exactly when a
/// maximum matching has as many pairs as that side has vertices.
pub fn has_saturating_matching(g: &BipartiteGraph, side: Side) -> bool {
    let size = match side {
        Side::Columns => g.n_col,
        Side::Rows => g.n_row,
    };
    maximum_matching(g).len() == size
}

/// A square pattern is RCM when its columns can be saturated, i.e. some
/// row permutation puts ones on the whole diagonal. Returns that perfect
/// matching when it exists.
pub fn is_rcm(p: &SparsityPattern) -> Result<Option<Matching>, BipartiteError> {
    if p.m() != p.r() {
        return Err(BipartiteError::NotSquare { m: p.m(), r: p.r() });
    }
    let mm = maximum_matching(&generate_bipartite(p));
    Ok((mm.len() == p.r()).then_some(mm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fig1() -> SparsityPattern {
        SparsityPattern::from_rows(&[[1, 0, 0, 0], [1, 1, 0, 0], [0, 1, 1, 0], [1, 0, 0, 1]])
            .unwrap()
    }

    fn fig2() -> SparsityPattern {
        SparsityPattern::from_rows(&[[0, 0, 1, 1], [1, 1, 0, 0], [1, 0, 1, 1], [1, 0, 1, 0]])
            .unwrap()
    }

    /// Minimum cover size by trying every vertex subset.
    fn brute_force_cover(g: &BipartiteGraph) -> usize {
        let n = g.n_col() + g.n_row();
        (0u32..1 << n)
            .filter(|&mask| {
                g.edges()
                    .all(|(c, r)| mask >> c & 1 == 1 || mask >> (g.n_col() + r) & 1 == 1)
            })
            .map(|mask| mask.count_ones() as usize)
            .min()
            .unwrap()
    }

    /// Hall's condition checked over every column subset.
    fn hall_holds(g: &BipartiteGraph) -> bool {
        (1u32..1 << g.n_col()).all(|w| {
            let mut nbrs = vec![false; g.n_row()];
            for c in (0..g.n_col()).filter(|c| w >> c & 1 == 1) {
                for &r in g.neighbors(c) {
                    nbrs[r] = true;
                }
            }
            nbrs.iter().filter(|&&x| x).count() >= w.count_ones() as usize
        })
    }

    #[test]
    fn figure_one_edges() {
        let g = generate_bipartite(&fig1());
        let edges: Vec<_> = g.edges().collect();
        assert_eq!(
            edges,
            vec![(0, 0), (0, 1), (0, 3), (1, 1), (1, 2), (2, 2), (3, 3)]
        );
    }

    #[test]
    fn identity_and_empty_graphs() {
        let g = generate_bipartite(&SparsityPattern::identity(3));
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 0), (1, 1), (2, 2)]);
        assert!(has_saturating_matching(&g, Side::Rows));
        let empty = generate_bipartite(&SparsityPattern::filled(2, 2, false));
        assert_eq!(empty.edge_count(), 0);
        let mm = maximum_matching(&empty);
        assert!(mm.is_empty());
        assert_eq!(minimum_vertex_cover(&empty, &mm).unwrap().size(), 0);
    }

    #[test]
    fn figure_one_matching_and_cover() {
        let g = generate_bipartite(&fig1());
        let mm = maximum_matching(&g);
        assert_eq!(mm.pairs, vec![(0, 0), (1, 1), (2, 2), (3, 3)]);
        let cover = minimum_vertex_cover(&g, &mm).unwrap();
        assert_eq!(cover.size(), 4);
        assert!(cover.covers(&g));
        assert!(has_saturating_matching(&g, Side::Columns));
    }

    #[test]
    fn figure_one_without_u2_v2() {
        let g = generate_bipartite(&fig1()).without_edge(1, 1);
        let mm = maximum_matching(&g);
        assert_eq!(mm.len(), 3);
        let cover = minimum_vertex_cover(&g, &mm).unwrap();
        assert_eq!(cover.size(), 3);
        assert!(cover.covers(&g));
        assert!(!has_saturating_matching(&g, Side::Columns));
    }

    #[test]
    fn non_maximum_matching_is_rejected() {
        let g = generate_bipartite(&fig1());
        let partial = Matching {
            pairs: vec![(0, 3), (1, 2)],
        };
        assert!(matches!(
            minimum_vertex_cover(&g, &partial),
            Err(BipartiteError::MatchingNotMaximum { .. })
        ));
        let bogus = Matching {
            pairs: vec![(2, 0)],
        };
        assert!(matches!(
            minimum_vertex_cover(&g, &bogus),
            Err(BipartiteError::InvalidMatching { col: 2, row: 0 })
        ));
    }

    #[test]
    fn duplicate_single_edge() {
        let g = BipartiteGraph::from_edges(1, 1, [(0, 0)]).unwrap();
        let d = duplicate_columns(&g);
        assert_eq!(d.n_col(), 2);
        assert_eq!(d.edges().collect::<Vec<_>>(), vec![(0, 0), (1, 0)]);
        let empty = BipartiteGraph::from_edges(2, 3, []).unwrap();
        let d = duplicate_columns(&empty);
        assert_eq!((d.n_col(), d.n_row(), d.edge_count()), (4, 3, 0));
    }

    #[test]
    fn duplicate_keeps_labels() {
        let g = BipartiteGraph::from_edges(2, 2, [(0, 0), (1, 1)])
            .unwrap()
            .with_labels(vec![4, 7], vec![1, 5])
            .unwrap();
        let d = duplicate_columns(&g);
        assert_eq!(
            (0..4).map(|c| d.col_label(c)).collect::<Vec<_>>(),
            vec![4, 7, 4, 7]
        );
        assert_eq!(d.row_label(1), 5);
    }

    #[test]
    fn from_edges_validation() {
        assert!(matches!(
            BipartiteGraph::from_edges(1, 1, [(0, 1)]),
            Err(BipartiteError::EdgeOutOfRange { .. })
        ));
        assert_eq!(
            BipartiteGraph::from_edges(1, 2, [(0, 1), (0, 1)]),
            Err(BipartiteError::DuplicateEdge { col: 0, row: 1 })
        );
    }

    #[test]
    fn figure_two_is_rcm() {
        let p = fig2();
        let mm = is_rcm(&p).unwrap().expect("figure 2 pattern is RCM");
        assert_eq!(mm.len(), 4);
        assert!(mm.pairs.iter().all(|&(c, r)| p.get(r, c)));
        let printed = Matching {
            pairs: vec![(0, 3), (1, 1), (2, 0), (3, 2)],
        };
        assert!(printed.is_valid_in(&generate_bipartite(&p)));
    }

    #[test]
    fn rcm_edge_cases() {
        let mm = is_rcm(&SparsityPattern::identity(5)).unwrap().unwrap();
        assert_eq!(mm.pairs, (0..5).map(|i| (i, i)).collect::<Vec<_>>());
        let p = SparsityPattern::from_rows(&[[1, 1], [0, 0]]).unwrap();
        assert_eq!(is_rcm(&p).unwrap(), None);
        assert_eq!(
            is_rcm(&SparsityPattern::filled(3, 2, true)),
            Err(BipartiteError::NotSquare { m: 3, r: 2 })
        );
    }

    #[test]
    fn deterministic_matching() {
        let p = SparsityPattern::filled(5, 4, true);
        let g = generate_bipartite(&p);
        assert_eq!(maximum_matching(&g), maximum_matching(&g.clone()));
    }

    fn arb_graph(max_col: usize, max_row: usize) -> impl Strategy<Value = BipartiteGraph> {
        (0..=max_col, 0..=max_row).prop_flat_map(|(nc, nr)| {
            proptest::collection::vec(proptest::bool::weighted(0.4), nc * nr).prop_map(
                move |bits| {
                    let edges = (0..nc * nr)
                        .filter(|&k| bits[k])
                        .map(|k| (k / nr.max(1), k % nr.max(1)));
                    BipartiteGraph::from_edges(nc, nr, edges).unwrap()
                },
            )
        })
    }

    proptest! {
        #[test]
        fn konig_equality(g in arb_graph(6, 6)) {
            let mm = maximum_matching(&g);
            prop_assert!(mm.is_valid_in(&g));
            let cover = minimum_vertex_cover(&g, &mm).unwrap();
            prop_assert!(cover.covers(&g));
            prop_assert_eq!(cover.size(), mm.len());
            prop_assert_eq!(brute_force_cover(&g), mm.len());
        }

        #[test]
        fn hall_consistency(g in arb_graph(8, 8)) {
            prop_assert_eq!(has_saturating_matching(&g, Side::Columns), hall_holds(&g));
        }

        #[test]
        fn duplicated_degrees_match(g in arb_graph(6, 6)) {
            let d = duplicate_columns(&g);
            for c in 0..g.n_col() {
                prop_assert_eq!(d.degree(c), d.degree(c + g.n_col()));
                prop_assert_eq!(d.neighbors(c), g.neighbors(c));
            }
        }

        #[test]
        fn rcm_witness_uses_ones(bits in proptest::collection::vec(proptest::bool::weighted(0.5), 25)) {
            let p = SparsityPattern::from_fn(5, 5, |i, j| bits[i * 5 + j]);
            if let Some(mm) = is_rcm(&p).unwrap() {
                prop_assert_eq!(mm.len(), 5);
                prop_assert!(mm.pairs.iter().all(|&(c, r)| p.get(r, c)));
            }
        }
    }
}

//! The identification network of a pattern and its minimum s–t cut.
//!
//! Node layout: source `0`, columns `1..=r`, rows `r+1..=r+m`, sink
//! `r+m+1`. Source arcs carry the column weight `2r+1`, sink arcs the row
//! weight `r`, and every 1-entry yields a column→row arc of "infinite"
//! capacity, represented by the finite sentinel `r(2r+1)+1`. Any cut that
//! uses a sentinel arc is worse than the all-columns cut, so the sentinel
//! behaves exactly like infinity here.

use std::collections::VecDeque;

use serde::Serialize;
use thiserror::Error;

use crate::bipartite::VertexCover;
use crate::pattern::SparsityPattern;

pub type Capacity = u64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlowError {
    #[error("pattern has a zero row or zero column; trim it first")]
    UntrimmedPattern,
    #[error("pattern has no columns")]
    EmptyPattern,
    #[error("cut value {value} reaches the sentinel capacity {sentinel}")]
    SentinelCut { value: Capacity, sentinel: Capacity },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub capacity: Capacity,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowNetwork {
    m: usize,
    r: usize,
    arcs: Vec<Arc>,
}

impl FlowNetwork {
    pub const SOURCE: usize = 0;

    pub fn sink(&self) -> usize {
        self.m + self.r + 1
    }

    pub fn node_count(&self) -> usize {
        self.m + self.r + 2
    }

    pub fn column_node(&self, col: usize) -> usize {
        1 + col
    }

    pub fn row_node(&self, row: usize) -> usize {
        1 + self.r + row
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Source arcs (columns ascending), then column→row arcs, then sink arcs
    /// (rows ascending).
    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn column_weight(&self) -> Capacity {
        column_weight(self.r)
    }

    pub fn row_weight(&self) -> Capacity {
        self.r as Capacity
    }

    /// Threshold `r(2r+1)`, also the weight of the all-columns cover.
    pub fn threshold(&self) -> Capacity {
        threshold(self.r)
    }

    pub fn sentinel(&self) -> Capacity {
        self.threshold() + 1
    }
}

pub(crate) fn column_weight(r: usize) -> Capacity {
    2 * r as Capacity + 1
}

pub(crate) fn threshold(r: usize) -> Capacity {
    r as Capacity * column_weight(r)
}

pub fn build_identification_network(p: &SparsityPattern) -> Result<FlowNetwork, FlowError> {
    if p.r() == 0 {
        return Err(FlowError::EmptyPattern);
    }
    if !p.is_trimmed() {
        return Err(FlowError::UntrimmedPattern);
    }
    let (m, r) = (p.m(), p.r());
    let sentinel = threshold(r) + 1;
    let mut arcs = Vec::with_capacity(m + r + p.ones());
    for j in 0..r {
        arcs.push(Arc {
            from: FlowNetwork::SOURCE,
            to: 1 + j,
            capacity: column_weight(r),
        });
    }
    for j in 0..r {
        for i in 0..m {
            if p.get(i, j) {
                arcs.push(Arc {
                    from: 1 + j,
                    to: 1 + r + i,
                    capacity: sentinel,
                });
            }
        }
    }
    for i in 0..m {
        arcs.push(Arc {
            from: 1 + r + i,
            to: m + r + 1,
            capacity: r as Capacity,
        });
    }
    Ok(FlowNetwork { m, r, arcs })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CutResult {
    /// Minimum cut value, equal to the maximum flow.
    pub value: Capacity,
    /// Nodes reachable from the source in the final residual network.
    pub source_side: Vec<usize>,
    /// Indices into [`FlowNetwork::arcs`] of arcs leaving the source side.
    pub cut_arcs: Vec<usize>,
    /// Flow on every arc of a maximum flow, parallel to `arcs()`.
    pub arc_flow: Vec<Capacity>,
}

/// Residual graph for Dinic's algorithm. Arc `2k` is forward arc `k`,
/// arc `2k+1` its reverse.
struct Dinic {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    residual: Vec<Capacity>,
    level: Vec<usize>,
    next: Vec<usize>,
}

impl Dinic {
    fn new(n: usize, arcs: &[Arc]) -> Self {
        let mut head = vec![Vec::new(); n];
        let mut to = Vec::with_capacity(2 * arcs.len());
        let mut residual = Vec::with_capacity(2 * arcs.len());
        for a in arcs {
            head[a.from].push(to.len());
            to.push(a.to);
            residual.push(a.capacity);
            head[a.to].push(to.len());
            to.push(a.from);
            residual.push(0);
        }
        Self {
            head,
            to,
            residual,
            level: vec![usize::MAX; n],
            next: vec![0; n],
        }
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = usize::MAX);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.head[u] {
                let v = self.to[e];
                if self.residual[e] > 0 && self.level[v] == usize::MAX {
                    self.level[v] = self.level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        self.level[t] != usize::MAX
    }

    fn dfs(&mut self, u: usize, t: usize, limit: Capacity) -> Capacity {
        if u == t {
            return limit;
        }
        while self.next[u] < self.head[u].len() {
            let e = self.head[u][self.next[u]];
            let v = self.to[e];
            if self.residual[e] > 0 && self.level[v] == self.level[u] + 1 {
                let pushed = self.dfs(v, t, limit.min(self.residual[e]));
                if pushed > 0 {
                    self.residual[e] -= pushed;
                    self.residual[e ^ 1] += pushed;
                    return pushed;
                }
            }
            self.next[u] += 1;
        }
        0
    }

    fn max_flow(&mut self, s: usize, t: usize) -> Capacity {
        let mut total = 0;
        while self.bfs(s, t) {
            self.next.iter_mut().for_each(|x| *x = 0);
            loop {
                let pushed = self.dfs(s, t, Capacity::MAX);
                if pushed == 0 {
                    break;
                }
                total += pushed;
            }
        }
        total
    }
}

/// Maximum flow by Dinic's algorithm (level graph plus blocking flow), and
/// the minimum cut whose source side is everything still reachable from the
/// source in the residual network.
pub fn max_flow_min_cut(n: &FlowNetwork) -> CutResult {
    let sink = n.sink();
    let mut dinic = Dinic::new(n.node_count(), &n.arcs);
    let value = dinic.max_flow(FlowNetwork::SOURCE, sink);

    // After the final BFS, `level` marks exactly the residual-reachable set.
    let reachable: Vec<bool> = dinic.level.iter().map(|&l| l != usize::MAX).collect();
    let source_side = (0..n.node_count()).filter(|&v| reachable[v]).collect();
    let cut_arcs: Vec<usize> = n
        .arcs
        .iter()
        .enumerate()
        .filter(|(_, a)| reachable[a.from] && !reachable[a.to])
        .map(|(k, _)| k)
        .collect();
    let arc_flow = n
        .arcs
        .iter()
        .enumerate()
        .map(|(k, _)| dinic.residual[2 * k + 1])
        .collect();

    debug_assert_eq!(
        value,
        cut_arcs
            .iter()
            .map(|&k| n.arcs[k].capacity)
            .sum::<Capacity>()
    );
    CutResult {
        value,
        source_side,
        cut_arcs,
        arc_flow,
    }
}

/// Reads the weighted vertex cover off a minimum cut: column `j` is in the
/// cover when `s→u_j` is cut, row `i` when `v_i→t` is cut.
pub fn mwvc_from_cut(n: &FlowNetwork, c: &CutResult) -> Result<VertexCover, FlowError> {
    if c.value >= n.sentinel() {
        return Err(FlowError::SentinelCut {
            value: c.value,
            sentinel: n.sentinel(),
        });
    }
    let mut cols = Vec::new();
    let mut rows = Vec::new();
    for &k in &c.cut_arcs {
        let a = n.arcs[k];
        if a.from == FlowNetwork::SOURCE {
            cols.push(a.to - 1);
        } else if a.to == n.sink() {
            rows.push(a.from - 1 - n.r);
        } else {
            return Err(FlowError::SentinelCut {
                value: c.value,
                sentinel: n.sentinel(),
            });
        }
    }
    cols.sort_unstable();
    rows.sort_unstable();
    let weight =
        cols.len() as Capacity * n.column_weight() + rows.len() as Capacity * n.row_weight();
    Ok(VertexCover { cols, rows, weight })
}

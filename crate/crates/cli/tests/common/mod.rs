//! Exhaustive oracles, independent of the library's matching and flow code.
#![allow(dead_code)]

use factorid_core::{BipartiteGraph, SparsityPattern};

/// Minimum vertex cover size by trying every subset of vertices.
pub fn min_cover_bruteforce(g: &BipartiteGraph) -> usize {
    let (nc, nr) = (g.n_col(), g.n_row());
    let edges: Vec<(usize, usize)> = g.edges().collect();
    (0u32..1 << (nc + nr))
        .filter(|&mask| {
            edges
                .iter()
                .all(|&(c, r)| mask >> c & 1 == 1 || mask >> (nc + r) & 1 == 1)
        })
        .map(u32::count_ones)
        .min()
        .unwrap_or(0) as usize
}

/// Minimum weighted cover of the pattern's bipartite graph with column
/// weight `2r+1` and row weight `r`. Every column subset is tried; given
/// the columns, the cheapest completion must take exactly the rows that
/// still have an uncovered 1-entry.
pub fn mwvc_bruteforce(p: &SparsityPattern) -> u64 {
    let (m, r) = (p.m(), p.r());
    let (wc, wr) = (2 * r as u64 + 1, r as u64);
    (0u32..1 << r)
        .map(|cols| {
            let rows = (0..m)
                .filter(|&i| (0..r).any(|j| p.get(i, j) && cols >> j & 1 == 0))
                .count() as u64;
            cols.count_ones() as u64 * wc + rows * wr
        })
        .min()
        .unwrap()
}

/// Counting rule straight from the definition, over column bitmasks.
pub fn counting_rule_oracle(p: &SparsityPattern, s: usize) -> bool {
    let r = p.r();
    (1u32..1 << r).all(|cols| {
        let q = cols.count_ones() as usize;
        let rows = (0..p.m())
            .filter(|&i| (0..r).any(|j| cols >> j & 1 == 1 && p.get(i, j)))
            .count();
        rows >= 2 * q + s
    })
}

pub fn count_rows(p: &SparsityPattern, cols: &[usize]) -> usize {
    (0..p.m())
        .filter(|&i| cols.iter().any(|&j| p.get(i, j)))
        .count()
}

/// Calls `f` with every permutation of `0..n` (Heap's algorithm).
pub fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize], bool)) {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    let mut even = true;
    f(&perm, even);
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            even = !even;
            f(&perm, even);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// True when every generalized diagonal of the square pattern hits a zero.
pub fn structurally_singular(p: &SparsityPattern) -> bool {
    let mut all_hit_zero = true;
    for_each_permutation(p.m(), |perm, _| {
        if perm.iter().enumerate().all(|(i, &j)| p.get(i, j)) {
            all_hit_zero = false;
        }
    });
    all_hit_zero
}

/// Determinant by the Leibniz expansion over all permutations.
pub fn leibniz_det(a: &[Vec<f64>]) -> f64 {
    let mut det = 0.0;
    for_each_permutation(a.len(), |perm, even| {
        let term: f64 = perm.iter().enumerate().map(|(i, &j)| a[i][j]).product();
        det += if even { term } else { -term };
    });
    det
}

//! Decides whether a zero–nonzero pattern of factor loadings guarantees
//! generic variance identification of a sparse factor model.
//!
//! The check is the 3-5-7-9 counting rule `CR(r, 1)`: every set of `q`
//! columns must have at least `2q + 1` nonzero rows. Instead of visiting all
//! `2^r - 1` column subsets, [`identify::counting_rule_s1`] solves a minimum
//! weighted vertex cover on the pattern's bipartite graph as a network
//! min cut, which takes polynomial time in `m` and `r`.
//!
//! ```
//! use factorid_core::{parse_pattern, variance_identified, PatternFormat};
//!
//! let p = parse_pattern(b"1 0\n1 0\n1 1\n0 1\n0 1\n", PatternFormat::DenseText).unwrap();
//! let verdict = variance_identified(&p);
//! assert!(verdict.identified);
//! assert_eq!(verdict.mwvc_weight(), Some(10));
//! ```

pub mod bipartite;
pub mod flow;
pub mod identify;
pub mod pattern;

pub use bipartite::{BipartiteGraph, Matching, VertexCover};
pub use flow::{CutResult, FlowNetwork};
pub use identify::{
    counting_rule, counting_rule_bruteforce, counting_rule_s0, counting_rule_s1, rcm_decomposition,
    variance_identified, CountingRuleVerdict, IdentificationVerdict, IdentifyError,
    RcmDecomposition,
};
pub use pattern::{
    nonzero_row_count, parse_pattern, trim, PatternError, PatternFormat, SparsityPattern,
    TrimReport,
};

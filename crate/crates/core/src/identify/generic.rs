//! Numerical spot-check of the row deletion property on random loadings.
//!
//! Every 1-cell of the pattern is filled with an independent N(0,1) draw.
//! For each tested deletion the two RCM blocks must both have full
//! numerical rank.

use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use super::counting::{binomial, combinations};
use super::rcm::rcm_decomposition;
use super::IdentifyError;
use crate::pattern::SparsityPattern;

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_MAX_DELETIONS_PER_TRIAL: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct GenericCheckOptions {
    pub trials: usize,
    /// Relative singular value threshold.
    pub tolerance: f64,
    pub seed: u64,
    /// When `C(m, s)` exceeds this, each trial samples this many deletions.
    pub max_deletions_per_trial: usize,
    /// Record missing decompositions as failures instead of returning
    /// [`IdentifyError::NoDecomposition`].
    pub diagnose: bool,
}

impl Default for GenericCheckOptions {
    fn default() -> Self {
        Self {
            trials: 100,
            tolerance: DEFAULT_TOLERANCE,
            seed: 0,
            max_deletions_per_trial: DEFAULT_MAX_DELETIONS_PER_TRIAL,
            diagnose: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum RankFailure {
    NoDecomposition,
    RankDeficient { group: Group, rank: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialFailure {
    pub trial: usize,
    pub deleted_rows: Vec<usize>,
    pub failure: RankFailure,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenericCheckReport {
    pub trials: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub deletions_tested: usize,
    pub failures: Vec<TrialFailure>,
}

impl GenericCheckReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Loadings with N(0,1) entries on the 1-cells of `p` and zeros elsewhere.
pub fn gaussian_fill<G: rand::Rng + ?Sized>(p: &SparsityPattern, rng: &mut G) -> DMatrix<f64> {
    DMatrix::from_fn(p.m(), p.r(), |i, j| {
        if p.get(i, j) {
            StandardNormal.sample(rng)
        } else {
            0.0
        }
    })
}

/// Number of singular values above `tolerance` times the largest one.
pub fn numerical_rank(a: &DMatrix<f64>, tolerance: f64) -> usize {
    if a.is_empty() {
        return 0;
    }
    let sv = a.singular_values();
    let largest = sv.max();
    if largest <= 0.0 {
        return 0;
    }
    sv.iter().filter(|&&x| x > tolerance * largest).count()
}

/// Trial `t` draws from stream `t` of a ChaCha generator keyed by `seed`,
/// so serial and parallel runs agree.
fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

pub fn generic_rank_check(
    p: &SparsityPattern,
    s: usize,
    opts: &GenericCheckOptions,
) -> Result<GenericCheckReport, IdentifyError> {
    let m = p.m();
    let exhaustive = binomial(m, s) <= opts.max_deletions_per_trial as u64;
    let all_deletions: Vec<Vec<usize>> = if exhaustive {
        combinations(m, s).collect()
    } else {
        Vec::new()
    };

    let per_trial: Vec<Result<(usize, Vec<TrialFailure>), IdentifyError>> = (0..opts.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(opts.seed, trial);
            let beta = gaussian_fill(p, &mut rng);
            let sampled;
            let deletions: &[Vec<usize>] = if exhaustive {
                &all_deletions
            } else {
                sampled = (0..opts.max_deletions_per_trial)
                    .map(|_| {
                        let mut d = sample(&mut rng, m, s).into_vec();
                        d.sort_unstable();
                        d
                    })
                    .collect::<Vec<_>>();
                &sampled
            };

            let mut failures = Vec::new();
            for deleted in deletions {
                let Some(dec) = rcm_decomposition(p, deleted)? else {
                    if !opts.diagnose {
                        return Err(IdentifyError::NoDecomposition {
                            deleted_rows: deleted.clone(),
                        });
                    }
                    failures.push(TrialFailure {
                        trial,
                        deleted_rows: deleted.clone(),
                        failure: RankFailure::NoDecomposition,
                    });
                    continue;
                };
                for (group, rows) in [(Group::A, &dec.rows_a), (Group::B, &dec.rows_b)] {
                    let block = beta.select_rows(rows.iter());
                    let rank = numerical_rank(&block, opts.tolerance);
                    if rank < p.r() {
                        failures.push(TrialFailure {
                            trial,
                            deleted_rows: deleted.clone(),
                            failure: RankFailure::RankDeficient { group, rank },
                        });
                    }
                }
            }
            Ok((deletions.len(), failures))
        })
        .collect();

    let mut deletions_tested = 0;
    let mut failures = Vec::new();
    for result in per_trial {
        let (n, f) = result?;
        deletions_tested += n;
        failures.extend(f);
    }
    Ok(GenericCheckReport {
        trials: opts.trials,
        seed: opts.seed,
        tolerance: opts.tolerance,
        deletions_tested,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig4() -> SparsityPattern {
        SparsityPattern::from_rows(&[
            [1, 0, 0],
            [0, 1, 0],
            [1, 1, 0],
            [1, 0, 1],
            [1, 1, 1],
            [0, 0, 1],
            [0, 1, 1],
            [0, 1, 0],
        ])
        .unwrap()
    }

    #[test]
    fn figure_four_passes() {
        let opts = GenericCheckOptions {
            trials: 100,
            seed: 7,
            ..Default::default()
        };
        let report = generic_rank_check(&fig4(), 1, &opts).unwrap();
        assert!(report.passed(), "{:?}", report.failures);
        assert_eq!(report.deletions_tested, 100 * 8);
    }

    #[test]
    fn identity_has_no_decomposition() {
        let opts = GenericCheckOptions {
            trials: 3,
            ..Default::default()
        };
        assert_eq!(
            generic_rank_check(&SparsityPattern::identity(3), 0, &opts),
            Err(IdentifyError::NoDecomposition {
                deleted_rows: vec![]
            })
        );
        let diag = GenericCheckOptions {
            diagnose: true,
            ..opts
        };
        let report = generic_rank_check(&SparsityPattern::identity(3), 0, &diag).unwrap();
        assert_eq!(report.failures.len(), 3);
        assert!(report
            .failures
            .iter()
            .all(|f| f.failure == RankFailure::NoDecomposition));
    }

    #[test]
    fn single_column_of_three_ones() {
        let p = SparsityPattern::filled(3, 1, true);
        let opts = GenericCheckOptions {
            trials: 10,
            seed: 1,
            ..Default::default()
        };
        let report = generic_rank_check(&p, 1, &opts).unwrap();
        assert!(report.passed());
        assert_eq!(report.deletions_tested, 30);
    }

    #[test]
    fn sampled_deletions_are_reproducible() {
        let p = SparsityPattern::filled(30, 2, true);
        let opts = GenericCheckOptions {
            trials: 4,
            seed: 99,
            max_deletions_per_trial: 20,
            ..Default::default()
        };
        let a = generic_rank_check(&p, 3, &opts).unwrap();
        let b = generic_rank_check(&p, 3, &opts).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.deletions_tested, 80);
        assert!(a.passed());
    }

    #[test]
    fn rank_of_singular_block() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert_eq!(numerical_rank(&a, 1e-8), 1);
        assert_eq!(numerical_rank(&DMatrix::zeros(2, 2), 1e-8), 0);
        assert_eq!(numerical_rank(&DMatrix::identity(3, 3), 1e-8), 3);
    }
}

//! Timing of the min-cut verification against subset enumeration on
//! seeded random patterns.

use std::io::Write;
use std::time::Instant;

use factorid_core::identify::counting_rule_bruteforce;
use factorid_core::{trim, variance_identified, SparsityPattern};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{io_err, CliError};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub ms: Vec<usize>,
    pub rs: Vec<usize>,
    pub densities: Vec<f64>,
    pub seed: u64,
    pub reps: usize,
    pub bruteforce: bool,
    pub bruteforce_cap: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub m: usize,
    pub r: usize,
    pub density: f64,
    pub method: &'static str,
    /// `None` when the method was skipped.
    pub median_ns: Option<u128>,
    /// `None` when brute force did not run, so nothing was compared.
    pub verdict_agreement: Option<bool>,
}

pub const CSV_HEADER: &str = "m,r,density,method,median_ns,verdict_agreement";

impl BenchRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.m,
            self.r,
            self.density,
            self.method,
            self.median_ns.map(|n| n.to_string()).unwrap_or_default(),
            match self.verdict_agreement {
                Some(a) => a.to_string(),
                None => "skipped".to_string(),
            }
        )
    }
}

fn median(mut xs: Vec<u128>) -> Option<u128> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_unstable();
    Some(xs[xs.len() / 2])
}

/// Brute-force verdict on the trimmed pattern; degenerate patterns hold.
fn bruteforce_verdict(p: &SparsityPattern) -> bool {
    let (t, _) = trim(p);
    if t.r() == 0 {
        return true;
    }
    counting_rule_bruteforce(&t, 1).expect("r within cap").holds
}

pub fn run_bench(cfg: &BenchConfig) -> Vec<BenchRow> {
    let mut rows = Vec::new();
    let mut cell = 0u64;
    for &density in &cfg.densities {
        for &m in &cfg.ms {
            for &r in &cfg.rs {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(cell);
                cell += 1;
                let patterns: Vec<SparsityPattern> = (0..cfg.reps.max(1))
                    .map(|_| SparsityPattern::random(m, r, density, &mut rng))
                    .collect();

                let mut cut_times = Vec::with_capacity(patterns.len());
                let mut cut_verdicts = Vec::with_capacity(patterns.len());
                for p in &patterns {
                    let t0 = Instant::now();
                    let v = variance_identified(p);
                    cut_times.push(t0.elapsed().as_nanos());
                    cut_verdicts.push(v.identified);
                }

                let run_bf = cfg.bruteforce && r <= cfg.bruteforce_cap;
                let (bf_median, agreement) = if run_bf {
                    let mut times = Vec::with_capacity(patterns.len());
                    let mut agree = true;
                    for (p, &cut) in patterns.iter().zip(&cut_verdicts) {
                        let t0 = Instant::now();
                        let bf = bruteforce_verdict(p);
                        times.push(t0.elapsed().as_nanos());
                        agree &= bf == cut;
                    }
                    (median(times), Some(agree))
                } else {
                    (None, None)
                };

                rows.push(BenchRow {
                    m,
                    r,
                    density,
                    method: "mincut",
                    median_ns: median(cut_times),
                    verdict_agreement: agreement,
                });
                if cfg.bruteforce {
                    rows.push(BenchRow {
                        m,
                        r,
                        density,
                        method: "bruteforce",
                        median_ns: bf_median,
                        verdict_agreement: agreement,
                    });
                }
            }
        }
    }
    rows
}

pub fn write_csv(rows: &[BenchRow], out: &mut dyn Write) -> Result<(), CliError> {
    let mut text = String::from(CSV_HEADER);
    text.push('\n');
    for row in rows {
        text.push_str(&row.to_csv());
        text.push('\n');
    }
    out.write_all(text.as_bytes())
        .map_err(io_err("cannot write CSV"))?;
    out.flush().map_err(io_err("cannot write CSV"))
}

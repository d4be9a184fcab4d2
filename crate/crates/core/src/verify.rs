//! Seeded random verification campaigns.
//!
//! Each case draws an array from its own stream of a ChaCha generator keyed
//! by the campaign seed, so case `k` is the same array no matter how many
//! cases run or in what order. Every selected algorithm sorts a copy under a
//! fresh [`Checker`]; contract violations are collected, and the output is
//! also compared against a reference sort.

use std::ops::RangeInclusive;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::contracts::{CheckMode, Checker, Fault, Location, Proviso, Violation};
use crate::order::Snapshot;
use crate::Algorithm;

/// Marks violations found by comparing the output with a reference sort
/// rather than by a contract.
pub const RESULT_OP: &str = "result";

#[derive(Debug, Clone)]
pub struct CampaignConfig {
    pub algos: Vec<Algorithm>,
    pub cases: u64,
    pub seed: u64,
    pub max_len: usize,
    pub values: RangeInclusive<i64>,
    pub mode: CheckMode,
    pub faults: Vec<Fault>,
    /// Stop once this many findings have been collected.
    pub stop_after: Option<usize>,
    /// How many findings get a minimized input.
    pub shrink: usize,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            algos: Algorithm::ALL.to_vec(),
            cases: 100,
            seed: 0,
            max_len: 64,
            values: -5..=5,
            mode: CheckMode::Full,
            faults: Vec::new(),
            stop_after: None,
            shrink: 3,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Finding {
    pub algo: Algorithm,
    pub case: u64,
    pub input: Vec<i64>,
    /// A smaller input that still fails, when shrinking was attempted.
    pub minimized: Option<Vec<i64>>,
    pub violation: Violation<i64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub cases_run: u64,
    pub seed: u64,
    pub violations: Vec<Finding>,
    #[serde(serialize_with = "as_secs")]
    pub elapsed: Duration,
}

fn as_secs<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

impl VerificationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// The array for case `case` of a campaign seeded with `seed`.
pub fn generate_case(seed: u64, case: u64, max_len: usize, values: &RangeInclusive<i64>) -> Vec<i64> {
    let mut rng = stream(seed, case);
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| rng.gen_range(values.clone())).collect()
}

/// A reproducible array of exactly `len` values.
pub fn seeded_array(seed: u64, id: u64, len: usize, values: &RangeInclusive<i64>) -> Vec<i64> {
    let mut rng = stream(seed, id);
    (0..len).map(|_| rng.gen_range(values.clone())).collect()
}

fn checker(cfg: &CampaignConfig) -> Checker {
    cfg.faults
        .iter()
        .fold(Checker::new(cfg.mode), |ctx, &f| ctx.with_fault(f))
}

/// Sorts a copy of `input` and returns the first thing that went wrong.
pub fn check_one(algo: Algorithm, input: &[i64], cfg: &CampaignConfig) -> Option<Violation<i64>> {
    let mut a = input.to_vec();
    let ctx = checker(cfg);
    if let Err(v) = algo.sort(&mut a, &ctx) {
        return Some(v);
    }
    let mut expected = input.to_vec();
    expected.sort_unstable();
    (a != expected).then(|| {
        Violation::new(
            Proviso::Post,
            Location::new(algo.name(), RESULT_OP, 0, a.len(), a.len()),
            "output differs from the reference sort",
            &Snapshot::capture(input),
            &a,
        )
    })
}

/// Greedy minimization: drop elements, then pull values towards zero, while
/// the algorithm still fails.
pub fn shrink(algo: Algorithm, input: &[i64], cfg: &CampaignConfig) -> Vec<i64> {
    let fails = |a: &[i64]| check_one(algo, a, cfg).is_some();
    let mut cur = input.to_vec();
    let mut progress = true;
    while progress {
        progress = false;
        let mut i = 0;
        while i < cur.len() {
            let mut cand = cur.clone();
            cand.remove(i);
            if fails(&cand) {
                cur = cand;
                progress = true;
            } else {
                i += 1;
            }
        }
        for i in 0..cur.len() {
            while cur[i] != 0 {
                let mut cand = cur.clone();
                cand[i] -= cur[i].signum();
                if !fails(&cand) {
                    break;
                }
                cur = cand;
                progress = true;
            }
        }
    }
    cur
}

pub fn run_campaign(cfg: &CampaignConfig) -> VerificationReport {
    let start = Instant::now();
    let mut violations = Vec::new();
    let mut cases_run = 0;
    'cases: for case in 0..cfg.cases {
        let input = generate_case(cfg.seed, case, cfg.max_len, &cfg.values);
        for &algo in &cfg.algos {
            cases_run += 1;
            if let Some(violation) = check_one(algo, &input, cfg) {
                let minimized = (violations.len() < cfg.shrink).then(|| shrink(algo, &input, cfg));
                violations.push(Finding {
                    algo,
                    case,
                    input: input.clone(),
                    minimized,
                    violation,
                });
                if cfg.stop_after.is_some_and(|k| violations.len() >= k) {
                    break 'cases;
                }
            }
        }
    }
    VerificationReport {
        cases_run,
        seed: cfg.seed,
        violations,
        elapsed: start.elapsed(),
    }
}

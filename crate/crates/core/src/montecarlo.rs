//! Seeded parallel Monte Carlo estimation of outage probabilities and throughput.
//!
//! Trials are grouped in fixed-size blocks; block `k` draws from a ChaCha
//! stream keyed by `(seed, k)`, so the estimate depends only on the seed and
//! the trial count, never on how blocks are scheduled across threads. All
//! requested mechanisms are evaluated on the same channel draws.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{invalid, Result};
use crate::num::Real;
use crate::protocol::{analysis_events, run_nadm_trial, Mechanism, PowerAllocation, Thresholds};
use crate::system::SystemModel;

const BLOCK: u64 = 1 << 14;

/// Two-sided confidence matching a 3-sigma normal interval.
pub const THREE_SIGMA: f64 = 0.997_300_203_936_740;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
    /// Worker threads; 0 uses the global rayon pool.
    pub workers: usize,
    /// Two-sided confidence level of the reported intervals.
    pub confidence: f64,
}

impl McConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        Self { trials, seed, workers: 0, confidence: THREE_SIGMA }
    }

    pub fn with_workers(self, workers: usize) -> Self {
        Self { workers, ..self }
    }

    /// Normal quantile for the configured confidence.
    pub fn z(&self) -> f64 {
        let n = Normal::new(0.0, 1.0).expect("standard normal");
        n.inverse_cdf(0.5 + 0.5 * self.confidence)
    }
}

/// Point estimate with its normal-approximation half width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub p: f64,
    pub half_width: f64,
    pub count: u64,
}

impl Estimate {
    pub fn binomial(count: u64, n: u64, z: f64) -> Self {
        let p = count as f64 / n as f64;
        Self { p, half_width: z * (p * (1.0 - p) / n as f64).sqrt(), count }
    }
}

/// Binomial standard deviation used when checking an estimate against a
/// reference probability `p`; floored at `1/n` so that deep-tail references
/// do not collapse the band to zero width.
pub fn reference_sigma(p: f64, n: u64) -> f64 {
    let n = n as f64;
    (p.max(1.0 / n) * (1.0 - p).max(0.0) / n).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MechanismReport {
    pub mechanism: Mechanism,
    pub op_e: Estimate,
    pub op_c1: Estimate,
    pub op_c2: Estimate,
    pub throughput: f64,
    pub throughput_half_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutageReport {
    pub trials: u64,
    pub seed: u64,
    pub z: f64,
    pub mechanisms: Vec<MechanismReport>,
    /// Empirical frequencies of the eight analysis events.
    pub varrho: [Estimate; 8],
}

impl OutageReport {
    pub fn get(&self, m: Mechanism) -> Option<&MechanismReport> {
        self.mechanisms.iter().find(|r| r.mechanism == m)
    }
}

/// Integer tallies; merging is associative and commutative.
#[derive(Debug, Clone, PartialEq)]
struct Tally {
    /// Per mechanism, counts of the 8 success patterns of (xC1, xE, xC2).
    patterns: Vec<[u64; 8]>,
    events: [u64; 8],
}

impl Tally {
    fn new(k: usize) -> Self {
        Self { patterns: vec![[0; 8]; k], events: [0; 8] }
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.patterns.iter_mut().zip(&other.patterns) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        for (x, y) in self.events.iter_mut().zip(&other.events) {
            *x += y;
        }
        self
    }
}

fn run_block<T: Real>(
    model: &SystemModel<T>,
    powers: &PowerAllocation<T>,
    th: &Thresholds<T>,
    mechanisms: &[Mechanism],
    seed: u64,
    block: u64,
    count: u64,
) -> Tally {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    let mut tally = Tally::new(mechanisms.len());
    for _ in 0..count {
        let trial = model.sample_trial(&mut rng);
        for (slot, &m) in tally.patterns.iter_mut().zip(mechanisms) {
            let o = run_nadm_trial(&trial, powers, th, m);
            let idx = o.xc1_ok as usize | (o.xe_ok as usize) << 1 | (o.xc2_ok as usize) << 2;
            slot[idx] += 1;
        }
        for (e, hit) in tally.events.iter_mut().zip(analysis_events(&trial, powers, th)) {
            *e += hit as u64;
        }
    }
    tally
}

/// Estimates outage probabilities and throughput of each mechanism.
pub fn estimate<T: Real>(
    model: &SystemModel<T>,
    powers: &PowerAllocation<T>,
    mechanisms: &[Mechanism],
    config: &McConfig,
) -> Result<OutageReport> {
    let th = crate::analytics::model_thresholds(model, powers)?;
    estimate_with(model, powers, &th, mechanisms, config)
}

/// As [`estimate`] with explicit thresholds.
pub fn estimate_with<T: Real>(
    model: &SystemModel<T>,
    powers: &PowerAllocation<T>,
    th: &Thresholds<T>,
    mechanisms: &[Mechanism],
    config: &McConfig,
) -> Result<OutageReport> {
    if config.trials == 0 {
        return Err(invalid("trials", "need at least one trial"));
    }
    if !(config.confidence > 0.0 && config.confidence < 1.0) {
        return Err(invalid("confidence", "must lie in (0, 1)"));
    }
    let n = config.trials;
    let blocks = n.div_ceil(BLOCK);
    let work = || {
        (0..blocks)
            .into_par_iter()
            .map(|b| {
                let count = BLOCK.min(n - b * BLOCK);
                run_block(model, powers, th, mechanisms, config.seed, b, count)
            })
            .reduce(|| Tally::new(mechanisms.len()), Tally::merge)
    };
    let tally = if config.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| invalid("workers", e.to_string()))?
            .install(work)
    } else {
        work()
    };

    let z = config.z();
    let (rc, re) = (model.params.rate_c.as_f64(), model.params.rate_e.as_f64());
    let reports = mechanisms
        .iter()
        .zip(&tally.patterns)
        .map(|(&mechanism, pat)| {
            let fail = |bit: usize| pat.iter().enumerate().filter(|(i, _)| i & bit == 0).map(|(_, c)| c).sum::<u64>();
            // per-trial throughput takes one of 8 values, so its moments are exact
            let (mut s1, mut s2) = (0.0, 0.0);
            for (i, &c) in pat.iter().enumerate() {
                let r = 0.5 * rc * (i & 1) as f64 + 0.5 * re * (i >> 1 & 1) as f64 + 0.5 * rc * (i >> 2 & 1) as f64;
                s1 += r * c as f64;
                s2 += r * r * c as f64;
            }
            let mean = s1 / n as f64;
            let var = (s2 / n as f64 - mean * mean).max(0.0);
            MechanismReport {
                mechanism,
                op_c1: Estimate::binomial(fail(1), n, z),
                op_e: Estimate::binomial(fail(2), n, z),
                op_c2: Estimate::binomial(fail(4), n, z),
                throughput: mean,
                throughput_half_width: z * (var / n as f64).sqrt(),
            }
        })
        .collect();
    let varrho = tally.events.map(|c| Estimate::binomial(c, n, z));
    Ok(OutageReport { trials: n, seed: config.seed, z, mechanisms: reports, varrho })
}

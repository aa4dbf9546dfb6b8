//! Monte Carlo estimate of the encoded failure rate.
//!
//! Each trial injects noise qubit by qubit, then applies sampled correction
//! attempts (through [`Procedure::sample_attempt`]) until the block is intact
//! or abandoned.
//!
//! Trials are split into shards of at most [`SHARD_TRIALS`]. Shard `k` of a
//! run with seed `s` draws from `ChaCha8Rng::seed_from_u64(s)` on stream `k`,
//! so shards can run in any order or in parallel and still fold to the same
//! estimate.

use alloc::vec::Vec;
use core::fmt;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::arith::{to_f64, Rational};
use crate::circuits::{unit_f64, Procedure, StepChoice};
use crate::erasure::{ErasurePattern, ErrorModel, Site};
use crate::pauli::N_QUBITS;

pub const SHARD_TRIALS: u64 = 1 << 20;

/// Attempts after which a trial is counted as failed. Far beyond anything
/// reachable below threshold.
pub const MAX_ATTEMPTS: u32 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrialOutcome {
    Corrected,
    Failed,
    /// Hit [`MAX_ATTEMPTS`]; tallied as a failure.
    Capped,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ShardTally {
    pub trials: u64,
    pub failures: u64,
    pub capped: u64,
}

impl ShardTally {
    pub fn merge(self, other: Self) -> Self {
        Self {
            trials: self.trials + other.trials,
            failures: self.failures + other.failures,
            capped: self.capped + other.capped,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
    pub failures: u64,
    pub capped: u64,
    pub seed: u64,
}

impl McEstimate {
    pub fn from_tally(seed: u64, tally: ShardTally) -> Self {
        assert!(tally.trials > 0, "estimate needs at least one trial");
        let n = tally.trials as f64;
        let mean = tally.failures as f64 / n;
        let stderr = libm::sqrt(mean * (1.0 - mean) / n);
        Self {
            mean,
            stderr,
            trials: tally.trials,
            failures: tally.failures,
            capped: tally.capped,
            seed,
        }
    }
}

/// `(shard index, trials)` for a run of `trials` trials.
pub fn shard_plan(trials: u64) -> Vec<(u64, u64)> {
    let full = trials / SHARD_TRIALS;
    let rest = trials % SHARD_TRIALS;
    let mut plan: Vec<_> = (0..full).map(|k| (k, SHARD_TRIALS)).collect();
    if rest > 0 {
        plan.push((full, rest));
    }
    plan
}

pub fn shard_rng(seed: u64, shard: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard);
    rng
}

/// Independent per-qubit noise from one transversal encoded gate.
pub fn sample_initial<R: RngCore + ?Sized>(
    model: ErrorModel,
    eps: f64,
    rng: &mut R,
) -> ErasurePattern {
    let mut sites = [Site::Intact; N_QUBITS];
    for s in &mut sites {
        let u = unit_f64(rng);
        *s = match model {
            ErrorModel::Ideal if u < eps => Site::ZMeasured,
            ErrorModel::Lossy if u < 0.5 * eps => Site::FullyErased,
            ErrorModel::Lossy if u < eps => Site::ZErased,
            _ => Site::Intact,
        };
    }
    ErasurePattern::new(sites)
}

pub fn run_trial<R: RngCore + ?Sized>(
    proc: &Procedure,
    eps: f64,
    delta: f64,
    rng: &mut R,
) -> TrialOutcome {
    let mut p = sample_initial(proc.model(), eps, rng);
    for _ in 0..MAX_ATTEMPTS {
        let (choice, next) = proc.sample_attempt(&p, eps, delta, rng);
        match choice {
            StepChoice::Done => return TrialOutcome::Corrected,
            StepChoice::Abort => return TrialOutcome::Failed,
            StepChoice::Correct(_) => p = next,
        }
    }
    TrialOutcome::Capped
}

pub fn simulate_shard(
    proc: &Procedure,
    eps: f64,
    delta: f64,
    seed: u64,
    shard: u64,
    trials: u64,
) -> ShardTally {
    let mut rng = shard_rng(seed, shard);
    let mut tally = ShardTally {
        trials,
        ..Default::default()
    };
    for _ in 0..trials {
        match run_trial(proc, eps, delta, &mut rng) {
            TrialOutcome::Corrected => {}
            TrialOutcome::Failed => tally.failures += 1,
            TrialOutcome::Capped => {
                tally.failures += 1;
                tally.capped += 1;
            }
        }
    }
    tally
}

/// Runs every shard in order on the current thread.
pub fn simulate(proc: &Procedure, eps: f64, delta: f64, trials: u64, seed: u64) -> McEstimate {
    let tally = shard_plan(trials)
        .into_iter()
        .map(|(k, n)| simulate_shard(proc, eps, delta, seed, k, n))
        .fold(ShardTally::default(), ShardTally::merge);
    McEstimate::from_tally(seed, tally)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Comparison {
    pub exact: f64,
    pub z: f64,
    pub pass: bool,
}

pub const Z_LIMIT: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ZeroStderr;

impl fmt::Display for ZeroStderr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Monte Carlo estimate has zero standard error")
    }
}

impl core::error::Error for ZeroStderr {}

/// `z = (mean - exact) / stderr`, passing when `|z| ≤ 3`.
pub fn compare(exact: &Rational, mc: &McEstimate) -> Result<Comparison, ZeroStderr> {
    compare_f64(to_f64(exact), mc)
}

pub fn compare_f64(exact: f64, mc: &McEstimate) -> Result<Comparison, ZeroStderr> {
    if mc.stderr <= 0.0 {
        return Err(ZeroStderr);
    }
    let z = (mc.mean - exact) / mc.stderr;
    Ok(Comparison {
        exact,
        z,
        pass: z.abs() <= Z_LIMIT,
    })
}

//! Seeded Monte Carlo harness.
//!
//! Trials are cut into fixed blocks of [`BLOCK_TRIALS`]; block `i` draws from
//! `Rng::new(seed ⊕ splitmix64(i))`, and per-block tallies are merged in block
//! order. The result is therefore a function of `(seed, trials)` alone, no
//! matter which [`Executor`] runs the blocks or in what order.

use alloc::vec::Vec;

use crate::error::{domain, Result};
use crate::rng::{derive_seed, Rng};

pub const BLOCK_TRIALS: u64 = 4096;
/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.96;

/// Counters and a real-valued accumulator produced by one block.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Tally {
    pub hits: [u64; 4],
    pub sum: f64,
}

impl Tally {
    pub fn merge(&mut self, other: &Tally) {
        for (a, b) in self.hits.iter_mut().zip(other.hits) {
            *a += b;
        }
        self.sum += other.sum;
    }
}

/// Runs independent blocks; implementations may parallelize but must return
/// results indexed by block.
pub trait Executor: Sync {
    fn run(&self, blocks: u64, work: &(dyn Fn(u64) -> Result<Tally> + Sync)) -> Vec<Result<Tally>>;
}

/// Runs blocks one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn run(&self, blocks: u64, work: &(dyn Fn(u64) -> Result<Tally> + Sync)) -> Vec<Result<Tally>> {
        (0..blocks).map(work).collect()
    }
}

/// Trial count, seed, and where to run.
#[derive(Clone, Copy)]
pub struct Mc<'a> {
    pub trials: u64,
    pub seed: u64,
    exec: &'a dyn Executor,
}

impl core::fmt::Debug for Mc<'_> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Mc").field("trials", &self.trials).field("seed", &self.seed).finish()
    }
}

impl Mc<'static> {
    pub fn new(trials: u64, seed: u64) -> Self {
        Mc { trials, seed, exec: &Sequential }
    }
}

impl<'a> Mc<'a> {
    pub fn with_executor<'b>(self, exec: &'b dyn Executor) -> Mc<'b> {
        Mc { trials: self.trials, seed: self.seed, exec }
    }

    /// Same trial count and executor, different seed.
    pub fn reseed(self, seed: u64) -> Self {
        Mc { seed, ..self }
    }

    /// Runs `body(rng, count)` for every block and merges the tallies.
    pub fn run(&self, body: impl Fn(&mut Rng, u64) -> Result<Tally> + Sync) -> Result<Tally> {
        if self.trials == 0 {
            return Err(domain("trials", "must be at least 1"));
        }
        let (trials, seed) = (self.trials, self.seed);
        let blocks = trials.div_ceil(BLOCK_TRIALS);
        let work = |i: u64| {
            let count = BLOCK_TRIALS.min(trials - i * BLOCK_TRIALS);
            body(&mut Rng::new(derive_seed(seed, i)), count)
        };
        let mut total = Tally::default();
        for t in self.exec.run(blocks, &work) {
            total.merge(&t?);
        }
        Ok(total)
    }

    /// Frequency of an event, one Bernoulli draw per trial.
    pub fn frequency(&self, body: impl Fn(&mut Rng, u64) -> Result<u64> + Sync) -> Result<ProbEstimate> {
        let t = self.run(|rng, count| Ok(Tally { hits: [body(rng, count)?, 0, 0, 0], sum: 0.0 }))?;
        Ok(ProbEstimate::from_hits(t.hits[0], self.trials, self.seed))
    }
}

/// Monte Carlo estimate of a probability with a 95% normal-approximation
/// half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbEstimate {
    pub mean: f64,
    pub halfwidth: f64,
    pub trials: u64,
    pub seed: u64,
}

impl ProbEstimate {
    pub fn from_hits(hits: u64, trials: u64, seed: u64) -> Self {
        Self::from_mean(hits as f64 / trials as f64, trials, seed)
    }

    /// For means of `[0, 1]`-valued samples the binomial half-width is a
    /// conservative bound on the sample-variance one.
    pub fn from_mean(mean: f64, trials: u64, seed: u64) -> Self {
        let var = (mean * (1.0 - mean)).max(0.0);
        Self { mean, halfwidth: Z95 * libm::sqrt(var / trials as f64), trials, seed }
    }

    pub fn lower(&self) -> f64 {
        self.mean - self.halfwidth
    }

    pub fn upper(&self) -> f64 {
        self.mean + self.halfwidth
    }

    /// `1 − p` with the same half-width.
    pub fn complement(&self) -> Self {
        Self { mean: 1.0 - self.mean, ..*self }
    }
}

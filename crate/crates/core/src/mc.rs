//! Reproducible Monte Carlo plumbing.
//!
//! Every experiment draws its randomness from a single 64-bit seed through
//! named ChaCha streams: task `t` in context `c` uses stream
//! `mix(c) ^ t`, so batches can run on any number of threads and still
//! merge into byte-identical results (batch outputs are collected in task
//! order before reduction).

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// RNG for one task of one experiment context.
pub fn stream_rng(seed: u64, context: u64, task: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(mix64(context) ^ task);
    rng
}

fn mix64(mut x: u64) -> u64 {
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Runs `tasks` closures in parallel, each with its own stream RNG, and
/// returns results in task order (deterministic regardless of thread count).
pub fn run_tasks<T, F>(seed: u64, context: u64, tasks: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut ChaCha8Rng) -> T + Sync,
{
    (0..tasks)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(seed, context, t as u64);
            f(t, &mut rng)
        })
        .collect()
}

/// Running mean and standard error of a scalar sample.
#[derive(Debug, Clone, Copy, Default)]
pub struct MeanEstimate {
    count: usize,
    sum: f64,
    sum_sq: f64,
}

/// z-score of a two-sided 95% normal confidence interval.
pub const Z_95: f64 = 1.96;

impl MeanEstimate {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(&mut self, other: &MeanEstimate) {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn from_samples(samples: impl IntoIterator<Item = f64>) -> Self {
        let mut est = Self::new();
        for x in samples {
            est.push(x);
        }
        est
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            f64::NAN
        } else {
            self.sum / self.count as f64
        }
    }

    /// Sample variance (unbiased); 0 for fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0)
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            f64::NAN
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }

    /// Half-width of the 95% confidence interval.
    pub fn ci_halfwidth(&self) -> f64 {
        Z_95 * self.std_error()
    }
}

/// Ratio estimator with cluster-robust standard error: each cluster
/// contributes (numerator, denominator); the SE accounts for per-cluster
/// correlation of the two totals.
#[derive(Debug, Clone, Copy, Default)]
pub struct RatioEstimate {
    clusters: usize,
    num_sum: f64,
    den_sum: f64,
    num_sq: f64,
    den_sq: f64,
    cross: f64,
}

impl RatioEstimate {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, num: f64, den: f64) {
        self.clusters += 1;
        self.num_sum += num;
        self.den_sum += den;
        self.num_sq += num * num;
        self.den_sq += den * den;
        self.cross += num * den;
    }

    pub fn merge(&mut self, other: &RatioEstimate) {
        self.clusters += other.clusters;
        self.num_sum += other.num_sum;
        self.den_sum += other.den_sum;
        self.num_sq += other.num_sq;
        self.den_sq += other.den_sq;
        self.cross += other.cross;
    }

    pub fn denominator_total(&self) -> f64 {
        self.den_sum
    }

    pub fn ratio(&self) -> f64 {
        if self.den_sum == 0.0 {
            f64::NAN
        } else {
            self.num_sum / self.den_sum
        }
    }

    /// Linearized (delta-method) standard error of the ratio.
    pub fn std_error(&self) -> f64 {
        if self.clusters < 2 || self.den_sum == 0.0 {
            return f64::NAN;
        }
        let k = self.clusters as f64;
        let r = self.ratio();
        let mean_den = self.den_sum / k;
        // variance of per-cluster residuals num_i - r·den_i
        let resid_sq =
            self.num_sq - 2.0 * r * self.cross + r * r * self.den_sq;
        let mean_resid_sq = (resid_sq / k).max(0.0);
        (mean_resid_sq / k).sqrt() / mean_den
    }
}

use serde::{Deserialize, Serialize};

use crate::coupling::Coupling;
use crate::error::{Error, Result};
use crate::mc::{run_tasks, MeanEstimate, RatioEstimate, Z_95};
use crate::spider::distribution::distribution_series;
use crate::spider::graph::{SpiderGraph, SpiderVertex};
use crate::spider::walk::CoupledWalker;
use crate::spider::drift::l_indicator;
use crate::tree::SeededLabels;

/// Trajectories per parallel task; fixed so that results do not depend on
/// the thread count.
const BATCH: usize = 64;

/// Coupling families the experiment harness can build at any n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingFamily {
    Product,
    Correlated,
    /// ρ-twists under the given number of independently drawn (seeded)
    /// tree automorphisms; each draw is one replicate.
    TreeTwisted { automorphisms: usize },
}

impl CouplingFamily {
    pub fn tag(&self) -> &'static str {
        match self {
            CouplingFamily::Product => "product",
            CouplingFamily::Correlated => "correlated",
            CouplingFamily::TreeTwisted { .. } => "tree_twisted",
        }
    }

    pub fn replicates(&self) -> usize {
        match self {
            CouplingFamily::TreeTwisted { automorphisms } => (*automorphisms).max(1),
            _ => 1,
        }
    }

    /// Builds the coupling for one replicate. Automorphism seeds are derived
    /// from the experiment seed so that replicate r is reproducible on its
    /// own.
    pub fn build(&self, n: usize, rho: f64, seed: u64, replicate: usize) -> Result<Coupling> {
        match self {
            CouplingFamily::Product => Coupling::product(n),
            CouplingFamily::Correlated => Coupling::correlated(n, rho),
            CouplingFamily::TreeTwisted { .. } => {
                let auto_seed = mix3(seed, 0x7472_6565, replicate as u64);
                Coupling::tree_twisted_seeded(rho, SeededLabels::new(n, auto_seed)?)
            }
        }
    }
}

/// One (n, ρ, family, replicate) cell of the gap experiment.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentRow {
    pub n: usize,
    pub rho: f64,
    pub family: String,
    pub replicate: usize,
    /// Estimate of `‖Z_n/√n‖² - Re⟨Z_n/√n|μ|Z_n/√n⟩ = E|Z'_n - Z''_n|²/(2n)`.
    pub gap: f64,
    pub gap_se: f64,
    /// 95% half-width.
    pub gap_ci: f64,
    /// `E D_n`.
    pub ed_n: f64,
    pub ed_n_se: f64,
    /// `Σ_{k=0}^n P(L_k = 1)` estimate.
    pub sum_l: f64,
    pub sum_l_se: f64,
    /// `Σ_{k=0}^n P(both walkers in Δ)` estimate.
    pub sum_joint_delta: f64,
    /// `sum_l / √n`.
    pub c0_hat: f64,
    /// Largest observed `D_n / |Z'_n - Z''_n|`.
    pub c1_observed: f64,
    pub samples: usize,
    pub seed: u64,
    pub stream: u64,
}

/// Full experiment description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GapExperimentConfig {
    pub ns: Vec<usize>,
    pub rhos: Vec<f64>,
    pub families: Vec<CouplingFamily>,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub config: GapExperimentConfig,
    pub rows: Vec<ExperimentRow>,
}

/// Accumulators for one batch of trajectories.
#[derive(Default, Clone)]
struct GapBatch {
    gap: MeanEstimate,
    dist: MeanEstimate,
    sum_l: MeanEstimate,
    joint_delta: MeanEstimate,
    c1_max: f64,
}

/// Runs the non-cosiness gap experiment over the full parameter grid.
pub fn run_gap_experiment(config: &GapExperimentConfig) -> Result<ExperimentReport> {
    if config.samples == 0 {
        return Err(Error::invalid("need at least one sample"));
    }
    let mut rows = Vec::new();
    for &n in &config.ns {
        for &rho in &config.rhos {
            for family in &config.families {
                for replicate in 0..family.replicates() {
                    let mu = family.build(n, rho, config.seed, replicate)?;
                    let stream = mix3(
                        n as u64 ^ rho.to_bits(),
                        family.tag().len() as u64 ^ 0x676170,
                        replicate as u64,
                    );
                    let stats = sample_pair_statistics(&mu, config.samples, config.seed, stream)?;
                    rows.push(ExperimentRow {
                        n,
                        rho,
                        family: family.tag().to_string(),
                        replicate,
                        gap: stats.gap.mean(),
                        gap_se: stats.gap.std_error(),
                        gap_ci: Z_95 * stats.gap.std_error(),
                        ed_n: stats.dist.mean(),
                        ed_n_se: stats.dist.std_error(),
                        sum_l: stats.sum_l.mean(),
                        sum_l_se: stats.sum_l.std_error(),
                        sum_joint_delta: stats.joint_delta.mean(),
                        c0_hat: stats.sum_l.mean() / (n as f64).sqrt(),
                        c1_observed: stats.c1_max,
                        samples: config.samples,
                        seed: config.seed,
                        stream,
                    });
                }
            }
        }
    }
    Ok(ExperimentReport {
        config: config.clone(),
        rows,
    })
}

fn sample_pair_statistics(
    mu: &Coupling,
    samples: usize,
    seed: u64,
    stream: u64,
) -> Result<GapBatch> {
    let n = mu.n();
    let g = SpiderGraph::new();
    let tasks = samples.div_ceil(BATCH);
    let batches = run_tasks(seed, stream, tasks, |task, rng| {
        let mut acc = GapBatch::default();
        let count = BATCH.min(samples - task * BATCH);
        for _ in 0..count {
            let mut walker = CoupledWalker::new(mu);
            let mut l_sum = 0u64;
            let mut joint = 0u64;
            let (v1, v2) = walker.positions();
            l_sum += u64::from(l_indicator(v1, v2));
            joint += u64::from(v1.is_in_delta() && v2.is_in_delta());
            for _ in 0..n {
                walker.step(rng);
                let (v1, v2) = walker.positions();
                l_sum += u64::from(l_indicator(v1, v2));
                joint += u64::from(v1.is_in_delta() && v2.is_in_delta());
            }
            let (v1, v2) = walker.positions();
            let d = g.distance(v1, v2);
            let chord = (g.position(v1) - g.position(v2)).norm();
            acc.gap.push(chord * chord / (2.0 * n as f64));
            acc.dist.push(d as f64);
            acc.sum_l.push(l_sum as f64);
            acc.joint_delta.push(joint as f64);
            if chord > 0.0 {
                acc.c1_max = acc.c1_max.max(d as f64 / chord);
            }
        }
        acc
    });
    let mut total = GapBatch::default();
    for b in &batches {
        total.gap.merge(&b.gap);
        total.dist.merge(&b.dist);
        total.sum_l.merge(&b.sum_l);
        total.joint_delta.merge(&b.joint_delta);
        total.c1_max = total.c1_max.max(b.c1_max);
    }
    Ok(total)
}

/// Joint triangle-occupancy estimate against the hypercontractive bound:
/// `Σ_k P(Z'_k ∈ Δ & Z''_k ∈ Δ) ≤ Σ_k P(Z_k ∈ Δ)^{2/(1+ρ)}`, with the
/// implied vanishing rate `ε_n(ρ) = (Σ_k bound)/√n`.
#[derive(Debug, Clone, Serialize)]
pub struct JointDeltaReport {
    pub n: usize,
    pub rho: f64,
    pub joint_sum: f64,
    pub joint_se: f64,
    /// `Σ_k p_k(Δ)^{2/(1+ρ)}` from the exact marginal distribution.
    pub bound_sum: f64,
    pub epsilon: f64,
    /// Monte Carlo estimate respects the bound (within 4 standard errors).
    pub consistent: bool,
}

pub fn joint_delta_occupancy(
    mu: &Coupling,
    samples: usize,
    seed: u64,
) -> Result<JointDeltaReport> {
    let n = mu.n();
    let rho = mu.rho_max()?;
    let stats = sample_pair_statistics(mu, samples, seed, 0x6a64656c)?;
    let series = distribution_series(n, &[])?;
    let exponent = 2.0 / (1.0 + rho);
    let bound_sum: f64 = series.delta.iter().map(|p| p.powf(exponent)).sum();
    let joint_sum = stats.joint_delta.mean();
    let joint_se = stats.joint_delta.std_error();
    Ok(JointDeltaReport {
        n,
        rho,
        joint_sum,
        joint_se,
        bound_sum,
        epsilon: bound_sum / (n as f64).sqrt(),
        consistent: joint_sum <= bound_sum + 4.0 * joint_se,
    })
}

/// Gain-rate estimate: `Σ_{k=0}^n P(L_k = 1)` with its scaling constant
/// `ĉ_0 = sum/√n`, plus the conditional three-step recovery check: given
/// the second walker at the origin and the first outside the 2-neighborhood
/// of Δ, the chance that one of the next three configurations flags a gain
/// is at least 1/4.
#[derive(Debug, Clone, Serialize)]
pub struct GainRateReport {
    pub n: usize,
    pub sum_l: f64,
    pub sum_l_se: f64,
    pub c0_hat: f64,
    pub conditional_events: f64,
    pub conditional_freq: f64,
    pub conditional_se: f64,
    /// Set when too few conditioning events were seen for a tight interval.
    pub low_events_warning: bool,
}

pub fn gain_rate(mu: &Coupling, samples: usize, seed: u64) -> Result<GainRateReport> {
    let n = mu.n();
    let origin = SpiderGraph::new().origin();
    let tasks = samples.div_ceil(BATCH);
    let batches = run_tasks(seed, 0x6c726174, tasks, |task, rng| {
        let mut sum_l = MeanEstimate::new();
        let mut cond = RatioEstimate::new();
        let count = BATCH.min(samples - task * BATCH);
        let mut l_seq = vec![false; n + 1];
        let mut event_seq = vec![false; n + 1];
        for _ in 0..count {
            let mut walker = CoupledWalker::new(mu);
            record_step(&walker, 0, &mut l_seq, &mut event_seq, origin);
            for m in 1..=n {
                walker.step(rng);
                record_step(&walker, m, &mut l_seq, &mut event_seq, origin);
            }
            let total_l = l_seq.iter().filter(|&&b| b).count();
            sum_l.push(total_l as f64);
            let mut events = 0.0;
            let mut hits = 0.0;
            for k in 0..=n.saturating_sub(2) {
                if event_seq[k] {
                    events += 1.0;
                    if l_seq[k] || l_seq[k + 1] || l_seq[k + 2] {
                        hits += 1.0;
                    }
                }
            }
            cond.push(hits, events);
        }
        (sum_l, cond)
    });
    let mut sum_l = MeanEstimate::new();
    let mut cond = RatioEstimate::new();
    for (s, c) in &batches {
        sum_l.merge(s);
        cond.merge(c);
    }
    Ok(GainRateReport {
        n,
        sum_l: sum_l.mean(),
        sum_l_se: sum_l.std_error(),
        c0_hat: sum_l.mean() / (n as f64).sqrt(),
        conditional_events: cond.denominator_total(),
        conditional_freq: cond.ratio(),
        conditional_se: cond.std_error(),
        low_events_warning: cond.denominator_total() < 100.0,
    })
}

fn record_step(
    walker: &CoupledWalker,
    m: usize,
    l_seq: &mut [bool],
    event_seq: &mut [bool],
    origin: SpiderVertex,
) {
    let (v1, v2) = walker.positions();
    l_seq[m] = l_indicator(v1, v2);
    event_seq[m] = v2 == origin && !v1.is_in_delta_plus(2);
}

fn mix3(a: u64, b: u64, c: u64) -> u64 {
    let mut x = a
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(b)
        .rotate_left(23)
        .wrapping_mul(0xBF58_476D_1CE4_E5B9)
        .wrapping_add(c);
    x ^= x >> 29;
    x = x.wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 32)
}

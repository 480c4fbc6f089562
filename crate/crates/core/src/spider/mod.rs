//! The spider walk: a unit-step complex-valued martingale on three rays
//! joined by a one-way central triangle, with two equiprobable opposite
//! moves at every vertex.
//!
//! The module provides the graph and its embedding, exact occupation
//! distributions by dynamic programming, the bit-decoding that identifies
//! n-step trajectories with tree leaves, coupled walker pairs driven by any
//! adapted coupling, the combinatorial-distance drift ledger, and the
//! experiment harness measuring the cosiness gap of `Z_n/√n`.

mod distribution;
mod drift;
mod experiment;
mod graph;
mod walk;

pub use distribution::{
    distribution_series, exact_distribution, DistributionEvolver, DistributionSeries,
    WalkDistribution, MAX_DP_STEPS,
};
pub use drift::{
    check_drift_monotonicity, drift_classify, l_indicator, lipschitz_constant, DriftCase,
    DriftCensus, DriftInfo, LipschitzReport,
};
pub use experiment::{
    gain_rate, joint_delta_occupancy, run_gap_experiment, CouplingFamily, ExperimentReport,
    ExperimentRow, GainRateReport, GapExperimentConfig, JointDeltaReport,
};
pub use graph::{Corner, SpiderGraph, SpiderVertex, CORNERS};
pub use walk::{
    coupled_walk, decode_step, endpoint_from_bits, endpoint_function,
    normalized_endpoint_function, walk_from_bits, CoupledWalker, PairStep, PairTrajectory,
    MAX_ENDPOINT_N,
};

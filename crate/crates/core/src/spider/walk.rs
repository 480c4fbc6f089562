use num_complex::Complex64;
use rand::Rng;

use crate::coupling::Coupling;
use crate::cube::{BooleanFunction, CubePoint};
use crate::error::{Error, Result};
use crate::spider::drift::{drift_classify, l_indicator, DriftCase};
use crate::spider::graph::{SpiderGraph, SpiderVertex};

/// Dense endpoint tables are capped here (2^25 complex entries).
pub const MAX_ENDPOINT_N: usize = 25;

/// Decodes one step: bit +1 takes the canonical first move (outward), -1
/// the other. This fixes one identification of n-step trajectories with the
/// leaves of the binary tree; composing the bits with a tree automorphism
/// reaches every other prefix-respecting identification.
#[inline]
pub fn decode_step(v: SpiderVertex, bit: i8) -> SpiderVertex {
    let [first, second] = SpiderGraph::new().moves(v);
    if bit > 0 {
        first
    } else {
        second
    }
}

/// Full trajectory (length n+1, starting at the origin) decoded from a
/// point of the cube.
pub fn walk_from_bits(bits: CubePoint) -> Vec<SpiderVertex> {
    let g = SpiderGraph::new();
    let mut path = Vec::with_capacity(bits.n() + 1);
    let mut v = g.origin();
    path.push(v);
    for j in 0..bits.n() {
        v = decode_step(v, bits.sign(j));
        path.push(v);
    }
    path
}

/// Endpoint of the decoded walk without materializing the path.
pub fn endpoint_from_bits(bits: CubePoint) -> SpiderVertex {
    let mut v = SpiderGraph::new().origin();
    for j in 0..bits.n() {
        v = decode_step(v, bits.sign(j));
    }
    v
}

/// The endpoint embedding `τ ↦ Z_n(τ)` as a dense complex table
/// (unnormalized; `E|Z_n|² = n`, so divide by √n for the unit-norm scaling).
pub fn endpoint_function(n: usize) -> Result<BooleanFunction> {
    if n == 0 {
        return Err(Error::invalid("need at least one step"));
    }
    if n > MAX_ENDPOINT_N {
        return Err(Error::ResourceLimit(format!(
            "n = {n} exceeds the endpoint-table cap {MAX_ENDPOINT_N}"
        )));
    }
    let g = SpiderGraph::new();
    let values = (0..1u32 << n)
        .map(|i| {
            let p = CubePoint::new(n, i).expect("index in range");
            g.position(endpoint_from_bits(p))
        })
        .collect();
    BooleanFunction::new(n, values)
}

/// One record of a coupled trajectory.
#[derive(Debug, Clone, Copy)]
pub struct PairStep {
    pub v1: SpiderVertex,
    pub v2: SpiderVertex,
    /// Combinatorial distance of the two walkers.
    pub d: u64,
    /// Gain indicator: the second walker sits at the beginning of a ray
    /// whose outside part holds the first walker.
    pub l: bool,
    pub case: DriftCase,
    /// Bit pair consumed to reach this configuration (absent at m = 0).
    pub bits: Option<(i8, i8)>,
}

/// A sampled pair of coupled walks with the per-step distance ledger.
#[derive(Debug, Clone)]
pub struct PairTrajectory {
    pub steps: Vec<PairStep>,
}

impl PairTrajectory {
    pub fn n(&self) -> usize {
        self.steps.len() - 1
    }

    /// The ledger `m ↦ D_m - ½ Σ_{k<m} L_k`, a submartingale in the mean.
    pub fn submartingale_ledger(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.steps.len());
        let mut l_sum = 0.0;
        for step in &self.steps {
            out.push(step.d as f64 - 0.5 * l_sum);
            l_sum += f64::from(step.l);
        }
        out
    }
}

/// Streams a coupled pair of walks, one step at a time.
pub struct CoupledWalker<'a> {
    mu: &'a Coupling,
    state: crate::coupling::PairState,
    v1: SpiderVertex,
    v2: SpiderVertex,
}

impl<'a> CoupledWalker<'a> {
    pub fn new(mu: &'a Coupling) -> Self {
        let g = SpiderGraph::new();
        CoupledWalker {
            mu,
            state: mu.start(),
            v1: g.origin(),
            v2: g.origin(),
        }
    }

    pub fn positions(&self) -> (SpiderVertex, SpiderVertex) {
        (self.v1, self.v2)
    }

    pub fn steps_taken(&self) -> usize {
        self.state.step()
    }

    pub fn remaining(&self) -> usize {
        self.mu.n() - self.state.step()
    }

    /// Draws the next bit pair and moves both walkers.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> (i8, i8) {
        let (s1, s2) = self.mu.sample_step(&mut self.state, rng);
        self.v1 = decode_step(self.v1, s1);
        self.v2 = decode_step(self.v2, s2);
        (s1, s2)
    }
}

/// Samples a full coupled trajectory with its drift ledger.
pub fn coupled_walk<R: Rng + ?Sized>(mu: &Coupling, rng: &mut R) -> PairTrajectory {
    let g = SpiderGraph::new();
    let n = mu.n();
    let mut walker = CoupledWalker::new(mu);
    let mut steps = Vec::with_capacity(n + 1);
    let record = |v1: SpiderVertex, v2: SpiderVertex, bits: Option<(i8, i8)>| PairStep {
        v1,
        v2,
        d: g.distance(v1, v2),
        l: l_indicator(v1, v2),
        case: drift_classify(v1, v2).case,
        bits,
    };
    steps.push(record(walker.v1, walker.v2, None));
    for _ in 0..n {
        let bits = walker.step(rng);
        steps.push(record(walker.v1, walker.v2, Some(bits)));
    }
    PairTrajectory { steps }
}

/// `Z_n` scaled to unit norm, `Z_n/√n`.
pub fn normalized_endpoint_function(n: usize) -> Result<BooleanFunction> {
    let f = endpoint_function(n)?;
    Ok(f.scale(Complex64::new(1.0 / (n as f64).sqrt(), 0.0)))
}

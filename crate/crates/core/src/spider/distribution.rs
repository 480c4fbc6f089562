use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spider::graph::{Corner, SpiderGraph, SpiderVertex, CORNERS};

/// Step cap for the dynamic program; sized so the full verification
/// workload (10^5 steps) fits comfortably in time and memory.
pub const MAX_DP_STEPS: usize = 200_000;

/// Exact occupation probabilities of the walk from the origin after a fixed
/// number of steps. Ray states are truncated at the step count, which is
/// exact: no mass can travel further.
#[derive(Debug, Clone)]
pub struct WalkDistribution {
    steps: usize,
    tri: [f64; 3],
    /// ray[(k-1)*3 + corner]
    ray: Vec<f64>,
}

impl WalkDistribution {
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn prob(&self, v: SpiderVertex) -> f64 {
        match v {
            SpiderVertex::Triangle(c) => self.tri[c.index()],
            SpiderVertex::Ray(c, k) => {
                let k = k as usize;
                if k == 0 || k > self.steps {
                    0.0
                } else {
                    self.ray[(k - 1) * 3 + c.index()]
                }
            }
        }
    }

    /// All states with positive probability, in a fixed order (triangle
    /// corners, then rays by increasing k).
    pub fn support(&self) -> Vec<(SpiderVertex, f64)> {
        let mut out = Vec::new();
        for &c in &CORNERS {
            let p = self.tri[c.index()];
            if p > 0.0 {
                out.push((SpiderVertex::Triangle(c), p));
            }
        }
        for k in 1..=self.steps {
            for &c in &CORNERS {
                let p = self.ray[(k - 1) * 3 + c.index()];
                if p > 0.0 {
                    out.push((SpiderVertex::Ray(c, k as u32), p));
                }
            }
        }
        out
    }

    pub fn total(&self) -> f64 {
        kahan_sum(self.tri.iter().copied().chain(self.ray.iter().copied()))
    }

    pub fn delta_probability(&self) -> f64 {
        self.tri.iter().sum()
    }

    /// `Σ_v p(v) position(v)` — zero for a martingale started at the origin.
    pub fn mean_position(&self) -> Complex64 {
        mean_position_of(&self.tri, &self.ray, self.steps)
    }

    /// `E |Z|² = Σ_v p(v) |position(v)|²` — equals the step count.
    pub fn mean_sq_radius(&self) -> f64 {
        mean_sq_radius_of(&self.tri, &self.ray, self.steps)
    }
}

fn mean_position_of(tri: &[f64; 3], ray: &[f64], upto: usize) -> Complex64 {
    let g = SpiderGraph::new();
    let mut re = KahanAcc::new();
    let mut im = KahanAcc::new();
    for &c in &CORNERS {
        let z = g.position(SpiderVertex::Triangle(c));
        let p = tri[c.index()];
        re.add(p * z.re);
        im.add(p * z.im);
    }
    for k in 1..=upto.min(ray.len() / 3) {
        for &c in &CORNERS {
            let p = ray[(k - 1) * 3 + c.index()];
            if p != 0.0 {
                let z = g.position(SpiderVertex::Ray(c, k as u32));
                re.add(p * z.re);
                im.add(p * z.im);
            }
        }
    }
    Complex64::new(re.value(), im.value())
}

fn mean_sq_radius_of(tri: &[f64; 3], ray: &[f64], upto: usize) -> f64 {
    let mut acc = KahanAcc::new();
    // |pos|²: Triangle A,B,C → 0, 1, 1; Ray(A,k) → k²;
    // Ray(B,k) → 1 + k + k²; Ray(C,k) → (1+k)²
    acc.add(tri[1]);
    acc.add(tri[2]);
    for k in 1..=upto.min(ray.len() / 3) {
        let kf = k as f64;
        let base = (k - 1) * 3;
        acc.add(ray[base] * kf * kf);
        acc.add(ray[base + 1] * (1.0 + kf + kf * kf));
        acc.add(ray[base + 2] * (1.0 + kf) * (1.0 + kf));
    }
    acc.value()
}

/// Per-step series recorded during a DP run.
#[derive(Debug, Clone, Default)]
pub struct DistributionSeries {
    /// p_k(origin), k = 0..=n.
    pub origin: Vec<f64>,
    /// P(Z_k ∈ Δ), k = 0..=n.
    pub delta: Vec<f64>,
    /// Probabilities of extra tracked vertices, same indexing.
    pub tracked: Vec<Vec<f64>>,
}

/// Evolves the exact distribution step by step.
#[derive(Debug, Clone)]
pub struct DistributionEvolver {
    step: usize,
    cap: usize,
    tri: [f64; 3],
    ray: Vec<f64>,
    next_tri: [f64; 3],
    next_ray: Vec<f64>,
}

impl DistributionEvolver {
    /// `cap` bounds the number of steps that may be taken.
    pub fn new(cap: usize) -> Result<Self> {
        if cap > MAX_DP_STEPS {
            return Err(Error::ResourceLimit(format!(
                "step cap {cap} exceeds the dynamic-program budget {MAX_DP_STEPS}"
            )));
        }
        Ok(DistributionEvolver {
            step: 0,
            cap,
            tri: [1.0, 0.0, 0.0],
            ray: vec![0.0; 3 * cap],
            next_tri: [0.0; 3],
            next_ray: vec![0.0; 3 * cap],
        })
    }

    pub fn step_index(&self) -> usize {
        self.step
    }

    /// Advances one step: mass at each vertex splits evenly over its two
    /// moves. Incoming mass at a corner comes from its roundabout
    /// predecessor and the first ray vertex; ray mass diffuses along the
    /// ray, fed by the corner.
    pub fn step(&mut self) {
        assert!(self.step < self.cap, "evolver stepped past its cap");
        let reach = self.step.min(self.cap - 1); // rays populated up to `reach`
        let t = &self.tri;
        let r = &self.ray;

        // corner X receives from Triangle(prev(X)) and Ray(X, 1)
        self.next_tri[Corner::A.index()] =
            0.5 * (t[Corner::C.index()] + r[Corner::A.index()]);
        self.next_tri[Corner::B.index()] =
            0.5 * (t[Corner::A.index()] + r[Corner::B.index()]);
        self.next_tri[Corner::C.index()] =
            0.5 * (t[Corner::B.index()] + r[Corner::C.index()]);

        let limit = (reach + 1).min(self.cap); // rays that can be occupied next
        for k in 1..=limit {
            let base = (k - 1) * 3;
            for x in 0..3 {
                let from_inner = if k == 1 { t[x] } else { r[base - 3 + x] };
                let from_outer = if k < self.cap { r[k * 3 + x] } else { 0.0 };
                self.next_ray[base + x] = 0.5 * (from_inner + from_outer);
            }
        }

        std::mem::swap(&mut self.tri, &mut self.next_tri);
        std::mem::swap(&mut self.ray, &mut self.next_ray);
        self.step += 1;
    }

    /// `E |Z|²` of the current distribution.
    pub fn mean_sq_radius(&self) -> f64 {
        mean_sq_radius_of(&self.tri, &self.ray, self.step.min(self.cap))
    }

    /// `Σ_v p(v) position(v)` of the current distribution.
    pub fn mean_position(&self) -> Complex64 {
        mean_position_of(&self.tri, &self.ray, self.step.min(self.cap))
    }

    pub fn total(&self) -> f64 {
        kahan_sum(self.tri.iter().copied().chain(self.ray.iter().copied()))
    }

    pub fn snapshot(&self) -> WalkDistribution {
        WalkDistribution {
            steps: self.step.max(1).min(self.cap),
            tri: self.tri,
            ray: self.ray.clone(),
        }
    }

    pub fn origin_probability(&self) -> f64 {
        self.tri[Corner::A.index()]
    }

    pub fn delta_probability(&self) -> f64 {
        self.tri.iter().sum()
    }

    pub fn prob(&self, v: SpiderVertex) -> f64 {
        match v {
            SpiderVertex::Triangle(c) => self.tri[c.index()],
            SpiderVertex::Ray(c, k) => {
                let k = k as usize;
                if k == 0 || k > self.cap {
                    0.0
                } else {
                    self.ray[(k - 1) * 3 + c.index()]
                }
            }
        }
    }
}

/// Exact distribution after `n` steps.
pub fn exact_distribution(n: usize) -> Result<WalkDistribution> {
    let mut evolver = DistributionEvolver::new(n.max(1))?;
    for _ in 0..n {
        evolver.step();
    }
    let mut snap = evolver.snapshot();
    snap.steps = n.max(1);
    Ok(snap)
}

/// Runs the DP for `n` steps recording per-step series, including the
/// probabilities of any extra `tracked` vertices.
pub fn distribution_series(n: usize, tracked: &[SpiderVertex]) -> Result<DistributionSeries> {
    let mut evolver = DistributionEvolver::new(n.max(1))?;
    let mut series = DistributionSeries {
        origin: Vec::with_capacity(n + 1),
        delta: Vec::with_capacity(n + 1),
        tracked: vec![Vec::with_capacity(n + 1); tracked.len()],
    };
    let record = |e: &DistributionEvolver, s: &mut DistributionSeries| {
        s.origin.push(e.origin_probability());
        s.delta.push(e.delta_probability());
        for (slot, &v) in s.tracked.iter_mut().zip(tracked) {
            slot.push(e.prob(v));
        }
    };
    record(&evolver, &mut series);
    for _ in 0..n {
        evolver.step();
        record(&evolver, &mut series);
    }
    Ok(series)
}

use crate::mc::{kahan_sum, KahanAcc};

//! Adapted couplings of two random cube points.
//!
//! A coupling draws the coordinate pairs (τ'_m, τ''_m) one step at a time.
//! Given the joint past, each walker's next sign is fair, so the step law is
//! fully parameterized by one conditional correlation c ∈ [-1, 1]:
//!
//! ```text
//! P(s, t | past) = (1 + s·t·c(past)) / 4 ,   s, t ∈ {-1, +1}.
//! ```
//!
//! This makes the kernel representation lossless, guarantees both marginals
//! are uniform, and lets ρ_max be read off as the largest |c| over reachable
//! histories.

mod kernel;
mod table;

pub use kernel::DenseKernel;
pub use table::{ImmersionWitness, JointTable, IMMERSION_TOL, MAX_TABLE_N};

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cube::{BooleanFunction, CubePoint};
use crate::error::{Error, Result};
use crate::tree::{LabelCursor, NodeLabels, SeededLabels, TreeAutomorphism};

/// Caller-supplied conditional-correlation strategy for couplings that are
/// too large to tabulate. Consumes explicit sign histories.
pub trait HistoryKernel: Send + Sync {
    fn n(&self) -> usize;
    /// Conditional correlation at step `m` (1-based) given both walkers'
    /// sign histories of length m-1.
    fn correlation(&self, m: usize, hist1: &[i8], hist2: &[i8]) -> f64;
}

#[derive(Clone)]
enum Repr {
    Product,
    Correlated { rho: f64 },
    TreeTwisted { rho: f64, labels: Arc<dyn NodeLabels> },
    Custom { kernel: DenseKernel },
    Procedural { kernel: Arc<dyn HistoryKernel> },
}

/// An adapted coupling of two uniform points of `{-1,+1}^n`.
#[derive(Clone)]
pub struct Coupling {
    n: usize,
    repr: Repr,
}

/// Per-trajectory state consumed by the step API.
#[derive(Clone)]
pub struct PairState {
    step: usize,
    detail: StateDetail,
}

impl PairState {
    /// Number of steps consumed so far.
    pub fn step(&self) -> usize {
        self.step
    }
}

#[derive(Clone)]
enum StateDetail {
    Trivial,
    Twisted { c1: LabelCursor, c2: LabelCursor },
    Dense { p1: u32, p2: u32 },
    Histories { h1: Vec<i8>, h2: Vec<i8> },
}

impl Coupling {
    /// Independent uniform walkers: c ≡ 0.
    pub fn product(n: usize) -> Result<Self> {
        check_steps(n)?;
        Ok(Coupling { n, repr: Repr::Product })
    }

    /// Constant conditional correlation ρ: the ρ-correlated pair.
    pub fn correlated(n: usize, rho: f64) -> Result<Self> {
        check_steps(n)?;
        check_rho(rho)?;
        Ok(Coupling { n, repr: Repr::Correlated { rho } })
    }

    /// The factorized twist `c_m = a(τ'_{1..m-1})·a(τ''_{1..m-1})·ρ`, the
    /// image of the ρ-correlated pair under a tree automorphism applied to
    /// both walkers.
    pub fn tree_twisted(rho: f64, labels: Arc<dyn NodeLabels>) -> Result<Self> {
        check_rho(rho)?;
        let n = labels.n();
        check_steps(n)?;
        Ok(Coupling { n, repr: Repr::TreeTwisted { rho, labels } })
    }

    pub fn tree_twisted_dense(rho: f64, automorphism: &TreeAutomorphism) -> Result<Self> {
        Self::tree_twisted(rho, Arc::new(automorphism.clone()))
    }

    pub fn tree_twisted_seeded(rho: f64, labels: SeededLabels) -> Result<Self> {
        Self::tree_twisted(rho, Arc::new(labels))
    }

    /// Explicit per-history kernel.
    pub fn custom(kernel: DenseKernel) -> Self {
        Coupling { n: kernel.n(), repr: Repr::Custom { kernel } }
    }

    /// History-consuming strategy object; supports sampling but not the
    /// exact (dense) operations.
    pub fn custom_procedural(kernel: Arc<dyn HistoryKernel>) -> Result<Self> {
        let n = kernel.n();
        check_steps(n)?;
        Ok(Coupling { n, repr: Repr::Procedural { kernel } })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Short family tag used in reports.
    pub fn family_name(&self) -> &'static str {
        match &self.repr {
            Repr::Product => "product",
            Repr::Correlated { .. } => "correlated",
            Repr::TreeTwisted { .. } => "tree_twisted",
            Repr::Custom { .. } => "custom",
            Repr::Procedural { .. } => "custom_procedural",
        }
    }

    /// Largest absolute conditional correlation over steps and reachable
    /// histories. Closed forms exist for the named families; dense kernels
    /// are scanned; procedural kernels are not supported.
    pub fn rho_max(&self) -> Result<f64> {
        match &self.repr {
            Repr::Product => Ok(0.0),
            Repr::Correlated { rho } | Repr::TreeTwisted { rho, .. } => Ok(rho.abs()),
            Repr::Custom { .. } => {
                // DFS over reachable histories only: a branch dies when its
                // step probability (1 + s·t·c)/4 vanishes.
                let mut max = 0.0f64;
                let mut stack = vec![self.start()];
                while let Some(state) = stack.pop() {
                    if state.step >= self.n {
                        continue;
                    }
                    let c = self.step_correlation(&state);
                    max = max.max(c.abs());
                    for s1 in [1i8, -1] {
                        for s2 in [1i8, -1] {
                            let p = (1.0 + f64::from(s1 * s2) * c) / 4.0;
                            if p > 0.0 {
                                let mut child = state.clone();
                                self.advance(&mut child, s1, s2);
                                stack.push(child);
                            }
                        }
                    }
                }
                Ok(max)
            }
            Repr::Procedural { .. } => Err(Error::UnsupportedRepresentation(
                "rho_max needs an explicit kernel".into(),
            )),
        }
    }

    /// State at the empty history.
    pub fn start(&self) -> PairState {
        let detail = match &self.repr {
            Repr::Product | Repr::Correlated { .. } => StateDetail::Trivial,
            Repr::TreeTwisted { labels, .. } => StateDetail::Twisted {
                c1: labels.root(),
                c2: labels.root(),
            },
            Repr::Custom { .. } => StateDetail::Dense { p1: 0, p2: 0 },
            Repr::Procedural { .. } => StateDetail::Histories {
                h1: Vec::new(),
                h2: Vec::new(),
            },
        };
        PairState { step: 0, detail }
    }

    /// Conditional correlation of the next coordinate pair.
    pub fn step_correlation(&self, state: &PairState) -> f64 {
        debug_assert!(state.step < self.n);
        match (&self.repr, &state.detail) {
            (Repr::Product, _) => 0.0,
            (Repr::Correlated { rho }, _) => *rho,
            (Repr::TreeTwisted { rho, labels }, StateDetail::Twisted { c1, c2 }) => {
                f64::from(labels.sign_at(c1) * labels.sign_at(c2)) * rho
            }
            (Repr::Custom { kernel }, StateDetail::Dense { p1, p2 }) => {
                kernel.correlation(state.step + 1, *p1, *p2)
            }
            (Repr::Procedural { kernel }, StateDetail::Histories { h1, h2 }) => {
                kernel.correlation(state.step + 1, h1, h2)
            }
            _ => unreachable!("state does not belong to this coupling"),
        }
    }

    /// Appends one drawn coordinate pair to the history.
    pub fn advance(&self, state: &mut PairState, s1: i8, s2: i8) {
        debug_assert!(state.step < self.n);
        match (&self.repr, &mut state.detail) {
            (Repr::TreeTwisted { labels, .. }, StateDetail::Twisted { c1, c2 }) => {
                *c1 = labels.child(c1, s1);
                *c2 = labels.child(c2, s2);
            }
            (Repr::Custom { .. }, StateDetail::Dense { p1, p2 }) => {
                *p1 |= u32::from(s1 < 0) << state.step;
                *p2 |= u32::from(s2 < 0) << state.step;
            }
            (Repr::Procedural { .. }, StateDetail::Histories { h1, h2 }) => {
                h1.push(s1);
                h2.push(s2);
            }
            _ => {}
        }
        state.step += 1;
    }

    /// Draws the next coordinate pair: s fair, then t = s with probability
    /// (1+c)/2 and t = -s otherwise.
    pub fn sample_step<R: Rng + ?Sized>(&self, state: &mut PairState, rng: &mut R) -> (i8, i8) {
        let c = self.step_correlation(state);
        let s1: i8 = if rng.gen::<bool>() { 1 } else { -1 };
        let keep = rng.gen_bool((1.0 + c) / 2.0);
        let s2 = if keep { s1 } else { -s1 };
        self.advance(state, s1, s2);
        (s1, s2)
    }

    /// Draws a full pair of points (dense-index range only).
    pub fn sample_pair<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(CubePoint, CubePoint)> {
        crate::cube::check_n(self.n)?;
        let mut state = self.start();
        let mut i1 = 0u32;
        let mut i2 = 0u32;
        for j in 0..self.n {
            let (s1, s2) = self.sample_step(&mut state, rng);
            i1 |= u32::from(s1 < 0) << j;
            i2 |= u32::from(s2 < 0) << j;
        }
        Ok((CubePoint::new(self.n, i1)?, CubePoint::new(self.n, i2)?))
    }

    /// Visits every positive-probability pair of full points with its
    /// probability. Exact-mode workhorse; requires an explicit
    /// representation and n within the table cap.
    pub fn for_each_outcome(&self, visit: &mut dyn FnMut(u32, u32, f64)) -> Result<()> {
        if matches!(self.repr, Repr::Procedural { .. }) {
            return Err(Error::UnsupportedRepresentation(
                "exact enumeration needs an explicit kernel".into(),
            ));
        }
        if self.n > MAX_TABLE_N {
            return Err(Error::ResourceLimit(format!(
                "n = {} exceeds the exact-mode cap {MAX_TABLE_N}",
                self.n
            )));
        }
        self.enumerate(&self.start(), 0, 0, 1.0, visit);
        Ok(())
    }

    fn enumerate(
        &self,
        state: &PairState,
        i1: u32,
        i2: u32,
        prob: f64,
        visit: &mut dyn FnMut(u32, u32, f64),
    ) {
        if state.step == self.n {
            visit(i1, i2, prob);
            return;
        }
        let c = self.step_correlation(state);
        let j = state.step;
        for (s1, b1) in [(1i8, 0u32), (-1, 1)] {
            for (s2, b2) in [(1i8, 0u32), (-1, 1)] {
                let p = (1.0 + f64::from(s1 * s2) * c) / 4.0;
                if p > 0.0 {
                    let mut child = state.clone();
                    self.advance(&mut child, s1, s2);
                    self.enumerate(&child, i1 | b1 << j, i2 | b2 << j, prob * p, visit);
                }
            }
        }
    }

    /// Materializes the joint table.
    pub fn to_table(&self) -> Result<JointTable> {
        let mut probs = vec![0.0; 1usize << (2 * self.n)];
        let n = self.n;
        self.for_each_outcome(&mut |i1, i2, p| {
            probs[(i1 as usize) | (i2 as usize) << n] += p;
        })?;
        JointTable::new(self.n, probs)
    }

    /// Recovers a dense kernel from a table: `c_m(h) = E(τ'_m τ''_m | h)`,
    /// with c = 0 on unreachable histories. Rejects tables that violate the
    /// adaptedness condition.
    pub fn from_table(table: &JointTable) -> Result<Coupling> {
        let (ok, witness) = table.validate_immersion();
        if !ok {
            let w = witness.expect("violation carries a witness");
            return Err(Error::invalid(format!(
                "table violates the fair-marginal condition at step {} (history {:#x}/{:#x}, conditional mean {:.3e})",
                w.m, w.prefix1, w.prefix2, w.conditional_mean
            )));
        }
        let n = table.n();
        let mut kernel = DenseKernel::constant(n, 0.0)?;
        let mut fine = table.probs().to_vec();
        for m in (1..=n).rev() {
            let coarse = level_fold(&fine, m);
            let depth = m - 1;
            let pref_len = 1usize << depth;
            for p2 in 0..pref_len {
                for p1 in 0..pref_len {
                    let w = coarse[p1 | p2 << depth];
                    if w <= 0.0 {
                        continue;
                    }
                    let mut corr = 0.0;
                    for b1 in 0..2usize {
                        for b2 in 0..2usize {
                            let mass = fine[(p1 | b1 << depth) | (p2 | b2 << depth) << m];
                            let st = if b1 == b2 { 1.0 } else { -1.0 };
                            corr += st * mass;
                        }
                    }
                    kernel.set(m, p1 as u32, p2 as u32, (corr / w).clamp(-1.0, 1.0));
                }
            }
            fine = coarse;
        }
        Ok(Coupling::custom(kernel))
    }

    /// Exact bilinear form `⟨f|μ|g⟩ = E( conj(f(τ')) g(τ'') )` by
    /// enumerating all positive-probability outcomes.
    pub fn bilinear_exact(
        &self,
        f: &BooleanFunction,
        g: &BooleanFunction,
    ) -> Result<Complex64> {
        if f.n() != self.n || g.n() != self.n {
            return Err(Error::dim(format!(
                "coupling n = {}, f n = {}, g n = {}",
                self.n,
                f.n(),
                g.n()
            )));
        }
        let mut acc = Complex64::default();
        self.for_each_outcome(&mut |i1, i2, p| {
            acc += f.value_at(i1).conj() * g.value_at(i2) * p;
        })?;
        Ok(acc)
    }

    /// Monte Carlo bilinear form with standard errors per component.
    pub fn bilinear_sampled<R: Rng + ?Sized>(
        &self,
        f: &BooleanFunction,
        g: &BooleanFunction,
        samples: usize,
        rng: &mut R,
    ) -> Result<SampledBilinear> {
        if f.n() != self.n || g.n() != self.n {
            return Err(Error::dim(format!(
                "coupling n = {}, f n = {}, g n = {}",
                self.n,
                f.n(),
                g.n()
            )));
        }
        let mut re = crate::mc::MeanEstimate::new();
        let mut im = crate::mc::MeanEstimate::new();
        for _ in 0..samples {
            let (p1, p2) = self.sample_pair(rng)?;
            let v = f.value_at(p1.index()).conj() * g.value_at(p2.index());
            re.push(v.re);
            im.push(v.im);
        }
        Ok(SampledBilinear {
            mean: Complex64::new(re.mean(), im.mean()),
            se_re: re.std_error(),
            se_im: im.std_error(),
            samples,
        })
    }

    /// `‖f‖² - Re⟨f|μ|f⟩`: the quantity whose smallness (with ρ_max bounded
    /// away from 1) certifies cosiness.
    pub fn cosiness_gap(&self, f: &BooleanFunction) -> Result<f64> {
        Ok(f.norm_sq() - self.bilinear_exact(f, f)?.re)
    }

    /// Builds a coupling from the interchange spec.
    pub fn from_spec(spec: &CouplingSpec) -> Result<Coupling> {
        match spec.kind.as_str() {
            "product" => Coupling::product(spec.n),
            "correlated" => {
                let rho = spec
                    .rho
                    .ok_or_else(|| Error::invalid("correlated coupling needs rho"))?;
                Coupling::correlated(spec.n, rho)
            }
            "tree_twisted" => {
                let rho = spec
                    .rho
                    .ok_or_else(|| Error::invalid("tree_twisted coupling needs rho"))?;
                let labels = spec
                    .labels
                    .as_ref()
                    .ok_or_else(|| Error::invalid("tree_twisted coupling needs labels"))?;
                let auto = TreeAutomorphism::new(spec.n, labels.clone())?;
                Coupling::tree_twisted_dense(rho, &auto)
            }
            "custom" => {
                let flat = spec
                    .kernel
                    .as_ref()
                    .ok_or_else(|| Error::invalid("custom coupling needs a kernel"))?;
                Ok(Coupling::custom(DenseKernel::from_flat(spec.n, flat)?))
            }
            other => Err(Error::invalid(format!("unknown coupling kind '{other}'"))),
        }
    }
}

/// Monte Carlo estimate of a bilinear form.
#[derive(Debug, Clone, Copy)]
pub struct SampledBilinear {
    pub mean: Complex64,
    pub se_re: f64,
    pub se_im: f64,
    pub samples: usize,
}

/// Interchange form of a coupling:
/// `{n, kind: "product"|"correlated"|"tree_twisted"|"custom", rho?, labels?, kernel?}`,
/// with the kernel flattened in (step, history-index) order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CouplingSpec {
    pub n: usize,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<i8>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel: Option<Vec<f64>>,
}

fn check_steps(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::invalid("coupling needs at least one step"))
    } else {
        Ok(())
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&rho) || rho.is_nan() {
        Err(Error::invalid(format!("rho = {rho} outside [-1, 1]")))
    } else {
        Ok(())
    }
}

/// Same fold as in `table.rs`, local copy to keep the borrow simple.
fn level_fold(fine: &[f64], m: usize) -> Vec<f64> {
    let depth = m - 1;
    let pref_len = 1usize << depth;
    let mut coarse = vec![0.0; 1 << (2 * depth)];
    for p2 in 0..pref_len {
        for p1 in 0..pref_len {
            let mut acc = 0.0;
            for b1 in 0..2usize {
                for b2 in 0..2usize {
                    acc += fine[(p1 | b1 << depth) | (p2 | b2 << depth) << m];
                }
            }
            coarse[p1 | p2 << depth] = acc;
        }
    }
    coarse
}

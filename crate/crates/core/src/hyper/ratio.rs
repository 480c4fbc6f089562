use crate::coupling::Coupling;
use crate::cube::BooleanFunction;
use crate::error::{Error, Result};

/// Supermartingale traces enumerate every history; cap the depth.
pub const MAX_TRACE_N: usize = 10;

/// `‖f‖_p = (2^{-n} Σ_τ |f(τ)|^p)^{1/p}` under the normalized counting
/// measure, consistent with the squared norm used everywhere else.
pub fn p_norm(f: &BooleanFunction, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::invalid(format!("p = {p} must be at least 1")));
    }
    let len = f.values().len() as f64;
    let sum: f64 = f.values().iter().map(|v| v.norm().powf(p)).sum();
    Ok((sum / len).powf(1.0 / p))
}

/// `|⟨g|μ|f⟩| / (‖f‖_{1+ρ} ‖g‖_{1+ρ})`. The bilinear-form bound asserts the
/// ratio is at most 1 whenever ρ_max(μ) ≤ ρ. A vanishing denominator forces
/// a vanishing numerator; 0 is returned by convention.
pub fn hypercontractivity_ratio(
    f: &BooleanFunction,
    g: &BooleanFunction,
    mu: &Coupling,
    rho: f64,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::invalid(format!("rho = {rho} outside [0, 1]")));
    }
    let numerator = mu.bilinear_exact(g, f)?.norm();
    let denominator = p_norm(f, 1.0 + rho)? * p_norm(g, 1.0 + rho)?;
    if denominator == 0.0 {
        return Ok(0.0);
    }
    Ok(numerator / denominator)
}

/// A subset of cube points, kept as a dense membership mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    n: usize,
    mask: Vec<bool>,
}

impl PointSet {
    pub fn from_predicate(n: usize, pred: impl Fn(u32) -> bool) -> Result<Self> {
        crate::cube::check_n(n)?;
        Ok(PointSet {
            n,
            mask: (0..1u32 << n).map(pred).collect(),
        })
    }

    pub fn from_indices(n: usize, indices: &[u32]) -> Result<Self> {
        crate::cube::check_n(n)?;
        let mut mask = vec![false; 1 << n];
        for &i in indices {
            if (i as u64) >= (1u64 << n) {
                return Err(Error::invalid(format!("index {i} out of range for n = {n}")));
            }
            mask[i as usize] = true;
        }
        Ok(PointSet { n, mask })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn contains(&self, index: u32) -> bool {
        self.mask[index as usize]
    }

    pub fn size(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    /// Density |S| / 2^n.
    pub fn density(&self) -> f64 {
        self.size() as f64 / self.mask.len() as f64
    }
}

/// Result of the indicator form of the bound:
/// `P(τ'∈S1 & τ''∈S2)^{1+ρ} ≤ (|S1|/2^n)(|S2|/2^n)`.
#[derive(Debug, Clone, Copy)]
pub struct IndicatorCheck {
    pub joint_probability: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

pub fn indicator_inequality_check(
    s1: &PointSet,
    s2: &PointSet,
    mu: &Coupling,
    rho: f64,
) -> Result<IndicatorCheck> {
    if s1.n() != mu.n() || s2.n() != mu.n() {
        return Err(Error::dim(format!(
            "sets have n = {}, {}; coupling has n = {}",
            s1.n(),
            s2.n(),
            mu.n()
        )));
    }
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::invalid(format!("rho = {rho} outside [0, 1]")));
    }
    let mut joint = 0.0;
    mu.for_each_outcome(&mut |i1, i2, p| {
        if s1.contains(i1) && s2.contains(i2) {
            joint += p;
        }
    })?;
    let lhs = joint.powf(1.0 + rho);
    let rhs = s1.density() * s2.density();
    Ok(IndicatorCheck {
        joint_probability: joint,
        lhs,
        rhs,
        ok: lhs <= rhs + 1e-12,
    })
}

/// Worst conditional slack found at one step of the trace.
#[derive(Debug, Clone, Copy)]
pub struct StepSlack {
    pub m: usize,
    /// max over reachable histories of
    /// `E((M'_m M''_m)^r | h) - (M'_{m-1} M''_{m-1})^r`.
    pub worst_slack: f64,
    pub histories: usize,
}

/// Full trace of the supermartingale argument.
#[derive(Debug, Clone)]
pub struct SupermartingaleTrace {
    pub steps: Vec<StepSlack>,
    pub tolerance: f64,
    pub pass: bool,
    /// `E (M'_n M''_n)^r`, the quantity the argument bounds.
    pub final_value: f64,
    /// `(M'_0 M''_0)^r = ‖f‖_{1+ρ} ‖g‖_{1+ρ}`.
    pub initial_value: f64,
}

/// Follows the proof mechanism of the bilinear-form bound on a concrete
/// coupling: with `r = 1/(1+ρ)` and the closed martingales
/// `M'_m = E(|f|^{1/r} | τ'_{1..m})`, `M''_m = E(|g|^{1/r} | τ''_{1..m})`,
/// the process `(M'_m M''_m)^r` must be a supermartingale for the joint
/// filtration whenever ρ_max(μ) ≤ ρ. Every reachable history is checked.
pub fn supermartingale_trace(
    f: &BooleanFunction,
    g: &BooleanFunction,
    mu: &Coupling,
    rho: f64,
) -> Result<SupermartingaleTrace> {
    let n = mu.n();
    if f.n() != n || g.n() != n {
        return Err(Error::dim(format!(
            "coupling n = {n}, f n = {}, g n = {}",
            f.n(),
            g.n()
        )));
    }
    if n > MAX_TRACE_N {
        return Err(Error::ResourceLimit(format!(
            "n = {n} exceeds the trace cap {MAX_TRACE_N}"
        )));
    }
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::invalid(format!("rho = {rho} outside [0, 1]")));
    }
    let r = 1.0 / (1.0 + rho);
    let m1 = prefix_means(f, 1.0 / r);
    let m2 = prefix_means(g, 1.0 / r);

    let tolerance = 1e-12;
    let mut worst = vec![f64::NEG_INFINITY; n];
    let mut counts = vec![0usize; n];

    // DFS over reachable histories; each internal node is one conditional
    // inequality.
    let mut stack = vec![(mu.start(), 0u32, 0u32)];
    while let Some((state, p1, p2)) = stack.pop() {
        let depth = state.step();
        if depth >= n {
            continue;
        }
        let c = mu.step_correlation(&state);
        let parent = (m1[depth][p1 as usize] * m2[depth][p2 as usize]).powf(r);
        let mut lhs = 0.0;
        for (s1, b1) in [(1i8, 0u32), (-1, 1)] {
            for (s2, b2) in [(1i8, 0u32), (-1, 1)] {
                let p = (1.0 + f64::from(s1 * s2) * c) / 4.0;
                if p > 0.0 {
                    let c1 = p1 | b1 << depth;
                    let c2 = p2 | b2 << depth;
                    lhs += p * (m1[depth + 1][c1 as usize] * m2[depth + 1][c2 as usize]).powf(r);
                    let mut child = state.clone();
                    mu.advance(&mut child, s1, s2);
                    stack.push((child, c1, c2));
                }
            }
        }
        let slack = lhs - parent;
        if slack > worst[depth] {
            worst[depth] = slack;
        }
        counts[depth] += 1;
    }

    let steps: Vec<StepSlack> = (0..n)
        .map(|d| StepSlack {
            m: d + 1,
            worst_slack: worst[d],
            histories: counts[d],
        })
        .collect();
    let pass = steps.iter().all(|s| s.worst_slack <= tolerance);

    // E (M'_n M''_n)^r across the coupling
    let mut final_value = 0.0;
    mu.for_each_outcome(&mut |i1, i2, p| {
        final_value += p * (m1[n][i1 as usize] * m2[n][i2 as usize]).powf(r);
    })?;
    let initial_value = (m1[0][0] * m2[0][0]).powf(r);

    Ok(SupermartingaleTrace {
        steps,
        tolerance,
        pass,
        final_value,
        initial_value,
    })
}

/// `levels[m][p] = E(|f|^q | first m coordinates = p)`, m = 0..=n.
fn prefix_means(f: &BooleanFunction, q: f64) -> Vec<Vec<f64>> {
    let n = f.n();
    let mut levels = vec![Vec::new(); n + 1];
    levels[n] = f.values().iter().map(|v| v.norm().powf(q)).collect();
    for m in (0..n).rev() {
        let fine = &levels[m + 1];
        let mut coarse = vec![0.0; 1 << m];
        for (p, c) in coarse.iter_mut().enumerate() {
            *c = 0.5 * (fine[p] + fine[p | 1 << m]);
        }
        levels[m] = coarse;
    }
    levels
}

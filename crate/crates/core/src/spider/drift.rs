use std::fmt;

use crate::error::{Error, Result};
use crate::spider::graph::{SpiderGraph, SpiderVertex, CORNERS};

/// Drift classification of a walker-pair configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DriftCase {
    /// Walkers coincide; the mean distance after one step is 1 - c ≥ 0.
    Coincide,
    /// Mean distance is conserved exactly, independent of the correlation.
    Generic,
    /// Mean distance gains exactly ½, independent of the correlation.
    GainHalf,
    /// Catch-all for configurations whose drift depends on the correlation
    /// (pairs touching the triangle, same-line neighbors); the drift is
    /// still never negative at any admissible correlation.
    DeltaAdjacent,
}

impl fmt::Display for DriftCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DriftCase::Coincide => "coincide",
            DriftCase::Generic => "generic",
            DriftCase::GainHalf => "gain-half",
            DriftCase::DeltaAdjacent => "delta-adjacent",
        })
    }
}

/// Exact one-step drift of the pair distance as an affine function of the
/// conditional bit-correlation: `E(D_next | c) = alpha + beta·c`.
#[derive(Debug, Clone, Copy)]
pub struct DriftInfo {
    pub d: u64,
    pub alpha: f64,
    pub beta: f64,
    pub case: DriftCase,
}

/// The gain configuration: the second walker stands at the beginning of a
/// ray line (the triangle corner on the ray's backward extension) while
/// the first walker is on that ray outside the triangle.
pub fn l_indicator(v1: SpiderVertex, v2: SpiderVertex) -> bool {
    CORNERS.iter().any(|&x| {
        v2 == SpiderVertex::Triangle(x.next())
            && matches!(v1, SpiderVertex::Ray(c, k) if c == x && k >= 1)
    })
}

/// Classifies a pair by enumerating the four joint moves. With the step law
/// `P(s,t|c) = (1+s·t·c)/4`, the conditional expectation of the next
/// distance is `alpha + beta·c` where `alpha` is the plain average of the
/// four outcomes and `beta` pairs them by sign agreement.
pub fn drift_classify(v1: SpiderVertex, v2: SpiderVertex) -> DriftInfo {
    let g = SpiderGraph::new();
    let d = g.distance(v1, v2);
    let [m1p, m1m] = g.moves(v1);
    let [m2p, m2m] = g.moves(v2);
    let dpp = g.distance(m1p, m2p) as f64;
    let dpm = g.distance(m1p, m2m) as f64;
    let dmp = g.distance(m1m, m2p) as f64;
    let dmm = g.distance(m1m, m2m) as f64;
    let alpha = (dpp + dpm + dmp + dmm) / 4.0;
    let beta = (dpp - dpm - dmp + dmm) / 4.0;

    let case = if v1 == v2 {
        DriftCase::Coincide
    } else if beta == 0.0 && alpha == d as f64 + 0.5 {
        DriftCase::GainHalf
    } else if beta == 0.0 && alpha == d as f64 {
        DriftCase::Generic
    } else {
        DriftCase::DeltaAdjacent
    };
    DriftInfo { d, alpha, beta, case }
}

/// Census entry counts per drift case.
#[derive(Debug, Clone, Default)]
pub struct DriftCensus {
    pub radius: u64,
    pub pairs: usize,
    pub coincide: usize,
    pub generic: usize,
    pub gain_half: usize,
    pub delta_adjacent: usize,
    /// Pairs whose worst-case drift over c ∈ {-1, +1} falls below the
    /// current distance.
    pub violations: Vec<(SpiderVertex, SpiderVertex, f64)>,
    /// Gain-half pairs that are not the declared gain configuration or its
    /// role-swapped mirror, and vice versa.
    pub l_mismatches: Vec<(SpiderVertex, SpiderVertex)>,
    pub pass: bool,
}

/// Exhaustive drift check over all vertex pairs with ray index ≤ `radius`.
/// Distances and moves are translation-invariant along rays, so every
/// combinatorial configuration appears once the radius clears the triangle
/// neighborhood.
///
/// Verified properties:
/// * min over c ∈ {-1, +1} of `alpha + beta·c` is at least the current
///   distance (the pair distance never shrinks in conditional mean);
/// * the gain-half set (alpha = D + ½ with beta = 0) is exactly the gain
///   configuration and its mirror;
/// * pairs on rays (coincidence aside) conserve the distance exactly;
/// * pairs inside the triangle drift strictly upward.
pub fn check_drift_monotonicity(radius: u64) -> Result<DriftCensus> {
    if radius < 3 {
        return Err(Error::invalid("census radius must be at least 3"));
    }
    let mut vertices: Vec<SpiderVertex> =
        CORNERS.iter().map(|&c| SpiderVertex::Triangle(c)).collect();
    for k in 1..=radius {
        for &c in &CORNERS {
            vertices.push(SpiderVertex::Ray(c, k as u32));
        }
    }

    let mut census = DriftCensus {
        radius,
        pass: true,
        ..DriftCensus::default()
    };
    for &v1 in &vertices {
        for &v2 in &vertices {
            let info = drift_classify(v1, v2);
            census.pairs += 1;
            match info.case {
                DriftCase::Coincide => census.coincide += 1,
                DriftCase::Generic => census.generic += 1,
                DriftCase::GainHalf => census.gain_half += 1,
                DriftCase::DeltaAdjacent => census.delta_adjacent += 1,
            }

            let worst = info.alpha - info.beta.abs();
            if worst < info.d as f64 - 1e-12 {
                census.violations.push((v1, v2, worst));
            }

            let is_gain_config = l_indicator(v1, v2) || l_indicator(v2, v1);
            if (info.case == DriftCase::GainHalf) != is_gain_config {
                census.l_mismatches.push((v1, v2));
            }

            if let (SpiderVertex::Ray(x, k), SpiderVertex::Ray(y, j)) = (v1, v2) {
                if x != y || k.abs_diff(j) >= 2 {
                    // separated ray-ray pairs conserve the distance exactly
                    if info.case != DriftCase::Generic {
                        census.violations.push((v1, v2, info.alpha));
                    }
                } else if k.abs_diff(j) == 1 {
                    // same-line neighbors reflect: E = D + ½ - c/2
                    if !(info.alpha == info.d as f64 + 0.5 && info.beta == -0.5) {
                        census.violations.push((v1, v2, info.alpha));
                    }
                }
            }
            if v1.is_in_delta() && v2.is_in_delta() && v1 != v2 {
                // triangle pairs gain strictly
                if info.alpha <= info.d as f64 {
                    census.violations.push((v1, v2, info.alpha));
                }
            }
        }
    }
    census.pass = census.violations.is_empty() && census.l_mismatches.is_empty();
    Ok(census)
}

/// Report of the distance-vs-embedding comparison.
#[derive(Debug, Clone, Copy)]
pub struct LipschitzReport {
    /// Max of `graph_distance / |embedded difference|` over scanned pairs.
    pub scanned_max: f64,
    /// Exact supremum along far ray pairs: distances a+b+1 against chord
    /// length √(a² + ab + b²) approach 2/√3 from below, with equality on
    /// the diagonal.
    pub asymptotic_ray_cap: f64,
    /// Overall constant: combinatorial distance ≤ bound × embedded
    /// distance.
    pub bound: f64,
}

/// Scans all distinct vertex pairs with ray index ≤ `radius`.
pub fn lipschitz_constant(radius: u64) -> Result<LipschitzReport> {
    if radius < 2 {
        return Err(Error::invalid("scan radius must be at least 2"));
    }
    let g = SpiderGraph::new();
    let mut vertices: Vec<SpiderVertex> =
        CORNERS.iter().map(|&c| SpiderVertex::Triangle(c)).collect();
    for k in 1..=radius {
        for &c in &CORNERS {
            vertices.push(SpiderVertex::Ray(c, k as u32));
        }
    }
    let mut scanned_max = 0.0f64;
    for &u in &vertices {
        for &v in &vertices {
            if u == v {
                continue;
            }
            let chord = (g.position(u) - g.position(v)).norm();
            let ratio = g.distance(u, v) as f64 / chord;
            scanned_max = scanned_max.max(ratio);
        }
    }
    let cap = 2.0 / 3.0f64.sqrt();
    Ok(LipschitzReport {
        scanned_max,
        asymptotic_ray_cap: cap,
        bound: scanned_max.max(cap),
    })
}

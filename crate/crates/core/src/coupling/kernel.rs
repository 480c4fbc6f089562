use rand::Rng;

use crate::error::{Error, Result};

/// Dense per-history conditional correlations.
///
/// Level m ∈ 1..=n holds one entry per history pair of (m-1)-bit prefixes,
/// at index `p' | (p'' << (m-1))` with `p'` the first walker's prefix in the
/// shared cube bit-encoding. The flat form (used in JSON) concatenates the
/// levels in order.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseKernel {
    n: usize,
    levels: Vec<Vec<f64>>,
}

impl DenseKernel {
    pub fn new(n: usize, levels: Vec<Vec<f64>>) -> Result<Self> {
        if n == 0 || levels.len() != n {
            return Err(Error::invalid(format!(
                "kernel has {} levels, expected n = {n}",
                levels.len()
            )));
        }
        for (depth, level) in levels.iter().enumerate() {
            if level.len() != 1 << (2 * depth) {
                return Err(Error::invalid(format!(
                    "kernel level {} has {} entries, expected 4^{depth}",
                    depth + 1,
                    level.len()
                )));
            }
            if level.iter().any(|c| !(-1.0..=1.0).contains(c)) {
                return Err(Error::invalid("conditional correlations must lie in [-1, 1]"));
            }
        }
        Ok(DenseKernel { n, levels })
    }

    pub fn constant(n: usize, c: f64) -> Result<Self> {
        let levels = (0..n).map(|d| vec![c; 1 << (2 * d)]).collect();
        DenseKernel::new(n, levels)
    }

    /// Entries i.i.d. uniform in [-cap, cap]; the workhorse of randomized
    /// and adversarial verification.
    pub fn random<R: Rng + ?Sized>(n: usize, cap: f64, rng: &mut R) -> Result<Self> {
        if !(0.0..=1.0).contains(&cap) {
            return Err(Error::invalid(format!("cap = {cap} outside [0, 1]")));
        }
        let levels = (0..n)
            .map(|d| (0..1usize << (2 * d)).map(|_| rng.gen_range(-cap..=cap)).collect())
            .collect();
        DenseKernel::new(n, levels)
    }

    pub fn from_flat(n: usize, flat: &[f64]) -> Result<Self> {
        let mut levels = Vec::with_capacity(n);
        let mut pos = 0usize;
        for d in 0..n {
            let len = 1usize << (2 * d);
            if pos + len > flat.len() {
                return Err(Error::invalid("flat kernel too short"));
            }
            levels.push(flat[pos..pos + len].to_vec());
            pos += len;
        }
        if pos != flat.len() {
            return Err(Error::invalid("flat kernel too long"));
        }
        DenseKernel::new(n, levels)
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.levels.iter().flatten().copied().collect()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Conditional correlation at step `m` (1-based) for prefix pair
    /// `(p1, p2)` of depth m-1.
    #[inline]
    pub fn correlation(&self, m: usize, p1: u32, p2: u32) -> f64 {
        debug_assert!(1 <= m && m <= self.n);
        let depth = m - 1;
        self.levels[depth][(p1 | p2 << depth) as usize]
    }

    pub(crate) fn set(&mut self, m: usize, p1: u32, p2: u32, c: f64) {
        let depth = m - 1;
        self.levels[depth][(p1 | p2 << depth) as usize] = c;
    }

    /// Iterates over `(m, p1, p2)` for all levels and histories.
    pub fn entries(&self) -> impl Iterator<Item = (usize, u32, u32, f64)> + '_ {
        self.levels.iter().enumerate().flat_map(|(depth, level)| {
            level.iter().enumerate().map(move |(h, &c)| {
                let p1 = h as u32 & ((1 << depth) - 1);
                let p2 = (h >> depth) as u32;
                (depth + 1, p1, p2, c)
            })
        })
    }
}

use num_complex::Complex64;

use crate::cube::BooleanFunction;
use crate::error::{Error, Result};
use crate::tree::TreeAutomorphism;

/// Dense joint tables are capped at 4^12 entries.
pub const MAX_TABLE_N: usize = 12;

/// Conditional means must vanish to this tolerance for a table to count as
/// adapted.
pub const IMMERSION_TOL: f64 = 1e-10;

/// Explicit joint probability table of a pair of cube points.
///
/// `probs` has 4^n entries at flat index `i' | (i'' << n)`: the first
/// walker's point index occupies the low bits.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    n: usize,
    probs: Vec<f64>,
}

/// Location of a conditional-mean violation: step `m` and the offending
/// history prefixes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImmersionWitness {
    pub m: usize,
    pub prefix1: u32,
    pub prefix2: u32,
    pub conditional_mean: f64,
}

impl JointTable {
    pub fn new(n: usize, probs: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("level count n must be at least 1"));
        }
        if n > MAX_TABLE_N {
            return Err(Error::ResourceLimit(format!(
                "n = {n} exceeds the joint-table cap {MAX_TABLE_N}"
            )));
        }
        if probs.len() != 1usize << (2 * n) {
            return Err(Error::invalid(format!(
                "table length {} does not match 4^{n}",
                probs.len()
            )));
        }
        if probs.iter().any(|&p| p < 0.0 || !p.is_finite()) {
            return Err(Error::invalid("probabilities must be nonnegative"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("probabilities sum to {total}, not 1")));
        }
        Ok(JointTable { n, probs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    #[inline]
    pub fn prob(&self, i1: u32, i2: u32) -> f64 {
        self.probs[(i1 as usize) | (i2 as usize) << self.n]
    }

    /// Marginal law of one walker (0 = first, 1 = second).
    pub fn marginal(&self, which: usize) -> Vec<f64> {
        let len = 1usize << self.n;
        let mut out = vec![0.0; len];
        for i1 in 0..len {
            for i2 in 0..len {
                let p = self.probs[i1 | i2 << self.n];
                out[if which == 0 { i1 } else { i2 }] += p;
            }
        }
        out
    }

    /// `⟨f|t|g⟩ = Σ p(τ',τ'') conj(f(τ')) g(τ'')`.
    pub fn bilinear(&self, f: &BooleanFunction, g: &BooleanFunction) -> Result<Complex64> {
        if f.n() != self.n || g.n() != self.n {
            return Err(Error::dim(format!(
                "table n = {}, f n = {}, g n = {}",
                self.n,
                f.n(),
                g.n()
            )));
        }
        let len = 1usize << self.n;
        let mut acc = Complex64::default();
        for i2 in 0..len {
            let gv = g.value_at(i2 as u32);
            let row = &self.probs[i2 << self.n..(i2 << self.n) + len];
            let mut inner = Complex64::default();
            for (i1, &p) in row.iter().enumerate() {
                if p != 0.0 {
                    inner += f.value_at(i1 as u32).conj() * p;
                }
            }
            acc += inner * gv;
        }
        Ok(acc)
    }

    /// Image of the measure under `A × A`:
    /// `out[A(i'), A(i'')] = self[i', i'']`.
    pub fn pushforward(&self, a: &TreeAutomorphism) -> Result<JointTable> {
        if a.n() != self.n {
            return Err(Error::dim(format!(
                "table n = {}, automorphism n = {}",
                self.n,
                a.n()
            )));
        }
        let len = 1usize << self.n;
        let map: Vec<u32> = (0..len as u32).map(|i| a.map_index(i)).collect();
        let mut out = vec![0.0; self.probs.len()];
        for i2 in 0..len {
            for i1 in 0..len {
                let p = self.probs[i1 | i2 << self.n];
                if p != 0.0 {
                    out[map[i1] as usize | (map[i2] as usize) << self.n] += p;
                }
            }
        }
        JointTable::new(self.n, out)
    }

    /// Checks the adaptedness condition: for every step m and every
    /// reachable history, the conditional means of both walkers' next signs
    /// vanish (each is a fair sign given the joint past). On failure returns
    /// the witness with the smallest step index.
    pub fn validate_immersion(&self) -> (bool, Option<ImmersionWitness>) {
        let mut fine = self.probs.clone();
        let mut earliest: Option<ImmersionWitness> = None;
        // fold from level n down to 0; `fine` holds level-m masses
        for m in (1..=self.n).rev() {
            let coarse = fold_level(&fine, m);
            let depth = m - 1;
            let pref_len = 1usize << depth;
            for p2 in 0..pref_len {
                for p1 in 0..pref_len {
                    let w = coarse[p1 | p2 << depth];
                    if w <= 0.0 {
                        continue;
                    }
                    let mut mean1 = 0.0;
                    let mut mean2 = 0.0;
                    for b1 in 0..2usize {
                        for b2 in 0..2usize {
                            let mass = fine[(p1 | b1 << depth) | (p2 | b2 << depth) << m];
                            mean1 += if b1 == 0 { mass } else { -mass };
                            mean2 += if b2 == 0 { mass } else { -mass };
                        }
                    }
                    mean1 /= w;
                    mean2 /= w;
                    if mean1.abs().max(mean2.abs()) > IMMERSION_TOL {
                        earliest = Some(ImmersionWitness {
                            m,
                            prefix1: p1 as u32,
                            prefix2: p2 as u32,
                            conditional_mean: if mean1.abs() >= mean2.abs() { mean1 } else { mean2 },
                        });
                    }
                }
            }
            fine = coarse;
        }
        (earliest.is_none(), earliest)
    }
}

/// Folds level-m prefix-pair masses (index `p'|(p''<<m)`) into level m-1.
fn fold_level(fine: &[f64], m: usize) -> Vec<f64> {
    debug_assert_eq!(fine.len(), 1usize << (2 * m));
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

use num_complex::Complex64;

use crate::cube::function::BooleanFunction;
use crate::error::{Error, Result};

/// The Fourier-Walsh coefficients of a function, indexed by subset bitmask,
/// together with the per-level weights `w_m = Σ_{|S|=m} |f̂(S)|²`.
///
/// Coefficients use the normalized measure, `f̂(S) = 2^{-n} Σ_τ f(τ) χ_S(τ)`,
/// so that `Σ_m w_m = norm_sq(f)` with no extra factors.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    n: usize,
    coeffs: Vec<Complex64>,
    level_weights: Vec<f64>,
}

impl SpectralDecomposition {
    pub fn new(n: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if n == 0 || coeffs.len() != 1usize << n {
            return Err(Error::invalid(format!(
                "coefficient table length {} does not match 2^{n}",
                coeffs.len()
            )));
        }
        let mut level_weights = vec![0.0; n + 1];
        for (s, c) in coeffs.iter().enumerate() {
            level_weights[s.count_ones() as usize] += c.norm_sqr();
        }
        Ok(SpectralDecomposition {
            n,
            coeffs,
            level_weights,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Coefficient f̂(S) for the subset bitmask `S`.
    pub fn coeff(&self, subset: u32) -> Complex64 {
        self.coeffs[subset as usize]
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `w_m` for m = 0..=n.
    pub fn level_weights(&self) -> &[f64] {
        &self.level_weights
    }

    pub fn total_weight(&self) -> f64 {
        self.level_weights.iter().sum()
    }

    /// Low/high-frequency tails `(S_1^m, S_m^∞)`: the first sum runs over
    /// levels 1..=m, the second over levels m..=n. Level 0 is excluded from
    /// both.
    pub fn spectral_tails(&self, m: usize) -> Result<(f64, f64)> {
        if m < 1 || m > self.n {
            return Err(Error::invalid(format!(
                "tail split m = {m} out of range 1..={}",
                self.n
            )));
        }
        let low = self.level_weights[1..=m].iter().sum();
        let high = self.level_weights[m..=self.n].iter().sum();
        Ok((low, high))
    }
}

/// Forward Fourier-Walsh transform, `f̂(S) = 2^{-n} Σ_τ f(τ) Π_{i∈S} τ_i`,
/// computed by the in-place butterfly in O(n·2^n).
pub fn wht_forward(f: &BooleanFunction) -> SpectralDecomposition {
    let mut buf = f.values().to_vec();
    butterfly(&mut buf);
    let scale = 1.0 / buf.len() as f64;
    for v in &mut buf {
        *v *= scale;
    }
    SpectralDecomposition::new(f.n(), buf).expect("dimensions preserved")
}

/// Inverse transform, `f(τ) = Σ_S f̂(S) Π_{i∈S} τ_i`.
pub fn wht_inverse(spec: &SpectralDecomposition) -> BooleanFunction {
    let mut buf = spec.coeffs().to_vec();
    butterfly(&mut buf);
    BooleanFunction::new(spec.n(), buf).expect("dimensions preserved")
}

/// Unnormalized Walsh-Hadamard butterfly: replaces `v` by
/// `v'[k] = Σ_i (-1)^{popcount(k & i)} v[i]`.
fn butterfly(values: &mut [Complex64]) {
    let len = values.len();
    debug_assert!(len.is_power_of_two());
    let mut h = 1;
    while h < len {
        for block in (0..len).step_by(h * 2) {
            for i in block..block + h {
                let a = values[i];
                let b = values[i + h];
                values[i] = a + b;
                values[i + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// Dense character function χ_S as a table, mainly for tests and examples.
pub fn character_function(n: usize, subset: u32) -> Result<BooleanFunction> {
    if (subset as u64) >= (1u64 << n) {
        return Err(Error::invalid(format!(
            "subset mask {subset:#x} out of range for n = {n}"
        )));
    }
    BooleanFunction::from_fn(n, |p| Complex64::new(p.character(subset), 0.0))
}

use num_complex::Complex64;
use rand::Rng;

use crate::cube::function::BooleanFunction;
use crate::cube::point::{check_n, CubePoint};
use crate::cube::spectrum::{wht_forward, wht_inverse};
use crate::error::{Error, Result};

/// Correlation parameter of a noisy pair, ρ ∈ [-1, 1].
///
/// The flip probability ε = (1-ρ)/2 is the equivalent parameterization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParam {
    rho: f64,
}

impl NoiseParam {
    pub fn new(rho: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&rho) || rho.is_nan() {
            return Err(Error::invalid(format!("rho = {rho} outside [-1, 1]")));
        }
        Ok(NoiseParam { rho })
    }

    pub fn from_epsilon(epsilon: f64) -> Result<Self> {
        Self::new(1.0 - 2.0 * epsilon)
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn epsilon(&self) -> f64 {
        (1.0 - self.rho) / 2.0
    }
}

/// Applies the noise operator: level-m spectral content is multiplied by ρ^m.
///
/// ρ = 1 is the identity; ρ = 0 projects onto constants (the mean).
pub fn noise_operator(f: &BooleanFunction, noise: NoiseParam) -> BooleanFunction {
    let spec = wht_forward(f);
    let rho = noise.rho();
    let mut pow = vec![1.0; f.n() + 1];
    for m in 1..=f.n() {
        pow[m] = pow[m - 1] * rho;
    }
    let coeffs: Vec<Complex64> = spec
        .coeffs()
        .iter()
        .enumerate()
        .map(|(s, c)| c * pow[s.count_ones() as usize])
        .collect();
    let damped = crate::cube::spectrum::SpectralDecomposition::new(f.n(), coeffs)
        .expect("dimensions preserved");
    wht_inverse(&damped)
}

/// Scalar product `(ρ^N f, g) = Σ_S ρ^{|S|} f̂(S) conj(ĝ(S))`, which equals
/// `E( conj(g(τ')) f(τ'') )` for a ρ-correlated pair (τ', τ'').
pub fn noise_correlation(
    f: &BooleanFunction,
    g: &BooleanFunction,
    noise: NoiseParam,
) -> Result<Complex64> {
    if f.n() != g.n() {
        return Err(Error::dim(format!("f has n = {}, g has n = {}", f.n(), g.n())));
    }
    let fs = wht_forward(f);
    let gs = wht_forward(g);
    let rho = noise.rho();
    let mut pow = vec![1.0; f.n() + 1];
    for m in 1..=f.n() {
        pow[m] = pow[m - 1] * rho;
    }
    let mut acc = Complex64::default();
    for (s, (fc, gc)) in fs.coeffs().iter().zip(gs.coeffs()).enumerate() {
        acc += fc * gc.conj() * pow[s.count_ones() as usize];
    }
    Ok(acc)
}

/// Mean conditional variance of `f(τ'')` given `τ'` over a ρ-correlated pair:
/// `‖f‖² - ‖ρ^N f‖² = Σ_m (1 - ρ^{2m}) w_m ≥ 0`.
pub fn expected_conditional_variance(f: &BooleanFunction, noise: NoiseParam) -> f64 {
    let spec = wht_forward(f);
    let rho_sq = noise.rho() * noise.rho();
    let mut acc = 0.0;
    let mut pow = 1.0;
    for (m, w) in spec.level_weights().iter().enumerate() {
        if m > 0 {
            pow *= rho_sq;
        }
        acc += (1.0 - pow) * w;
    }
    acc.max(0.0)
}

/// Draws a ρ-correlated pair of uniform points: coordinates are independent
/// pairs of fair signs with `E(τ'_k τ''_k) = ρ`, realized by keeping the
/// first sign with probability (1+ρ)/2 and flipping it otherwise.
pub fn sample_correlated_pair<R: Rng + ?Sized>(
    n: usize,
    noise: NoiseParam,
    rng: &mut R,
) -> Result<(CubePoint, CubePoint)> {
    check_n(n)?;
    let keep_prob = (1.0 + noise.rho()) / 2.0;
    let mut first = 0u32;
    let mut second = 0u32;
    for j in 0..n {
        let a: bool = rng.gen();
        let keep = rng.gen_bool(keep_prob);
        let b = a == keep;
        if a {
            first |= 1 << j;
        }
        if b {
            second |= 1 << j;
        }
    }
    Ok((CubePoint::new(n, first)?, CubePoint::new(n, second)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::families::{builtin_family, FamilyKind};
    use crate::cube::spectrum::character_function;
    use crate::testutil::{assert_close, max_abs_diff, random_function, test_rng};

    /// Brute-force conditional expectation `E(f(τ'') | τ' = σ)` by summing
    /// the transition law `Π_k (1 + ρ σ_k τ''_k)/2` over all τ''. Together
    /// with the outer loop over σ this enumerates all 4^n joint outcomes.
    pub(crate) fn conditional_expectation_oracle(
        f: &BooleanFunction,
        rho: f64,
    ) -> BooleanFunction {
        let n = f.n();
        let len = 1usize << n;
        let values = (0..len)
            .map(|sigma| {
                let mut acc = Complex64::default();
                for tau in 0..len {
                    let mut p = 1.0;
                    for j in 0..n {
                        let agree = (sigma ^ tau) >> j & 1 == 0;
                        p *= if agree { (1.0 + rho) / 2.0 } else { (1.0 - rho) / 2.0 };
                    }
                    acc += f.values()[tau] * p;
                }
                acc
            })
            .collect();
        BooleanFunction::new(n, values).unwrap()
    }

    #[test]
    fn character_damping() {
        let f = character_function(4, 0b1011).unwrap();
        let noisy = noise_operator(&f, NoiseParam::new(0.5).unwrap());
        let expect = f.scale(Complex64::new(0.5f64.powi(3), 0.0));
        assert!(max_abs_diff(noisy.values(), expect.values()) < 1e-14);
    }

    #[test]
    fn zero_noise_projects_onto_mean() {
        let f = random_function(5, 21);
        let noisy = noise_operator(&f, NoiseParam::new(0.0).unwrap());
        let mean = f.mean();
        assert!(noisy.values().iter().all(|v| (v - mean).norm() < 1e-13));
    }

    #[test]
    fn matches_conditional_expectation_oracle() {
        for n in 1..=6 {
            let f = random_function(n, 1000 + n as u64);
            for &rho in &[-0.7, 0.0, 0.3, 0.9, 1.0] {
                let fast = noise_operator(&f, NoiseParam::new(rho).unwrap());
                let slow = conditional_expectation_oracle(&f, rho);
                let err = max_abs_diff(fast.values(), slow.values());
                assert!(err < 1e-10, "n = {n}, rho = {rho}: error {err}");
            }
        }
    }

    #[test]
    fn semigroup_property() {
        let f = random_function(6, 5);
        let a = NoiseParam::new(0.8).unwrap();
        let b = NoiseParam::new(-0.5).unwrap();
        let ab = NoiseParam::new(-0.4).unwrap();
        let lhs = noise_operator(&noise_operator(&f, b), a);
        let rhs = noise_operator(&f, ab);
        assert!(max_abs_diff(lhs.values(), rhs.values()) < 1e-12);
    }

    #[test]
    fn contraction() {
        for seed in 0..20 {
            let f = random_function(5, seed);
            let rho = -1.0 + 2.0 * (seed as f64 / 19.0);
            let noisy = noise_operator(&f, NoiseParam::new(rho).unwrap());
            assert!(noisy.norm_sq() <= f.norm_sq() + 1e-12);
        }
    }

    #[test]
    fn correlation_closed_forms() {
        let chi = character_function(3, 0b001).unwrap();
        let c = noise_correlation(&chi, &chi, NoiseParam::new(0.3).unwrap()).unwrap();
        assert_close(c.re, 0.3, 1e-15);
        assert_close(c.im, 0.0, 1e-15);

        // g_n has weight 1/n on each level 1..=n
        let n = 7;
        let g = builtin_family(FamilyKind::TwistedWalk, n).unwrap();
        for &rho in &[0.2, 0.9] {
            let c = noise_correlation(&g, &g, NoiseParam::new(rho).unwrap()).unwrap();
            let expect: f64 = (1..=n).map(|m| rho.powi(m as i32)).sum::<f64>() / n as f64;
            assert_close(c.re, expect, 1e-12);
        }

        // rho = 1 returns the squared norm
        let f = random_function(6, 77);
        let c = noise_correlation(&f, &f, NoiseParam::new(1.0).unwrap()).unwrap();
        assert_close(c.re, f.norm_sq(), 1e-12);
        assert_close(c.im, 0.0, 1e-12);

        let short = random_function(3, 1);
        assert!(noise_correlation(&f, &short, NoiseParam::new(0.5).unwrap()).is_err());
    }

    #[test]
    fn conditional_variance() {
        let n = 9;
        let f = builtin_family(FamilyKind::SimpleWalk, n).unwrap();
        for &rho in &[0.0, 0.4, 0.9] {
            let v = expected_conditional_variance(&f, NoiseParam::new(rho).unwrap());
            assert_close(v, 1.0 - rho * rho, 1e-12);
        }
        let g = random_function(5, 3);
        assert_close(
            expected_conditional_variance(&g, NoiseParam::new(1.0).unwrap()),
            0.0,
            1e-12,
        );
        let total = expected_conditional_variance(&g, NoiseParam::new(0.0).unwrap());
        assert_close(total, g.norm_sq() - g.mean().norm_sqr(), 1e-12);
    }

    #[test]
    fn correlated_pair_exact_cases() {
        let mut rng = test_rng(4);
        let all = NoiseParam::new(1.0).unwrap();
        let anti = NoiseParam::new(-1.0).unwrap();
        for _ in 0..200 {
            let (a, b) = sample_correlated_pair(8, all, &mut rng).unwrap();
            assert_eq!(a, b);
            let (a, b) = sample_correlated_pair(8, anti, &mut rng).unwrap();
            assert_eq!(a.index() ^ b.index(), 0xFF);
        }
    }

    #[test]
    fn correlated_pair_statistics() {
        let mut rng = test_rng(11);
        let noise = NoiseParam::new(0.6).unwrap();
        let samples = 1_000_000usize;
        let mut agree = 0i64;
        for _ in 0..samples {
            let (a, b) = sample_correlated_pair(1, noise, &mut rng).unwrap();
            if a == b {
                agree += 1;
            } else {
                agree -= 1;
            }
        }
        let emp = agree as f64 / samples as f64;
        let sigma = ((1.0 - 0.36) / samples as f64).sqrt();
        assert!(
            (emp - 0.6).abs() < 4.0 * sigma,
            "empirical correlation {emp} off 0.6 by more than 4σ = {}",
            4.0 * sigma
        );
    }
}

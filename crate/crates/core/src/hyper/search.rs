use rand::Rng;

use crate::coupling::{Coupling, DenseKernel};
use crate::cube::BooleanFunction;
use crate::error::Result;
use crate::hyper::ratio::hypercontractivity_ratio;

/// Outcome of the falsification attempt.
#[derive(Debug, Clone)]
pub struct AdversarialReport {
    pub best_ratio: f64,
    pub restarts: usize,
    pub sweeps: usize,
    pub evaluations: u64,
    /// True iff no restart pushed the ratio above `1 + tolerance`.
    pub pass: bool,
    pub tolerance: f64,
}

/// Coordinate ascent on the kernel entries, trying to push the
/// hypercontractivity ratio above 1 within the box |c_m(h)| ≤ ρ.
///
/// The numerator `⟨g|μ|f⟩` is multilinear in the kernel entries and the
/// denominator does not depend on them, so for each entry the maximum of
/// |ratio| sits at an endpoint ±ρ; a sweep tries both endpoints per entry.
/// Random restarts redraw the kernel and the function pair. This is a
/// falsification attempt, not a proof.
pub fn adversarial_ratio_search<R: Rng + ?Sized>(
    n: usize,
    rho: f64,
    restarts: usize,
    rng: &mut R,
) -> Result<AdversarialReport> {
    let tolerance = 1e-9;
    let mut best_ratio = 0.0f64;
    let mut evaluations = 0u64;
    let mut sweeps_total = 0usize;

    for _ in 0..restarts {
        let f = random_complex_function(n, rng);
        let g = random_complex_function(n, rng);
        let mut kernel = DenseKernel::random(n, rho, rng)?;
        let mut current =
            hypercontractivity_ratio(&f, &g, &Coupling::custom(kernel.clone()), rho)?;
        evaluations += 1;

        let entries: Vec<(usize, u32, u32)> = kernel
            .entries()
            .map(|(m, p1, p2, _)| (m, p1, p2))
            .collect();
        loop {
            sweeps_total += 1;
            let mut improved = false;
            for &(m, p1, p2) in &entries {
                let mut best_here = current;
                let mut best_c = kernel.correlation(m, p1, p2);
                for cand in [-rho, rho] {
                    kernel.set(m, p1, p2, cand);
                    let r = hypercontractivity_ratio(
                        &f,
                        &g,
                        &Coupling::custom(kernel.clone()),
                        rho,
                    )?;
                    evaluations += 1;
                    if r > best_here {
                        best_here = r;
                        best_c = cand;
                    }
                }
                kernel.set(m, p1, p2, best_c);
                if best_here > current + 1e-15 {
                    current = best_here;
                    improved = true;
                }
            }
            if !improved || sweeps_total > restarts * 16 {
                break;
            }
        }
        best_ratio = best_ratio.max(current);
    }

    Ok(AdversarialReport {
        best_ratio,
        restarts,
        sweeps: sweeps_total,
        evaluations,
        pass: best_ratio <= 1.0 + tolerance,
        tolerance,
    })
}

fn random_complex_function<R: Rng + ?Sized>(n: usize, rng: &mut R) -> BooleanFunction {
    let values = (0..1usize << n)
        .map(|_| {
            num_complex::Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
        .collect();
    BooleanFunction::new(n, values).expect("valid dimensions")
}

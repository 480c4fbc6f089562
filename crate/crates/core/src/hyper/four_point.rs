use serde::Serialize;

use crate::error::{Error, Result};

/// Admissible parameters of the four-point form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourPointInput {
    r: f64,
    rho: f64,
    x: f64,
    y: f64,
}

impl FourPointInput {
    pub fn new(r: f64, rho: f64, x: f64, y: f64) -> Result<Self> {
        if !(0.5..=1.0).contains(&r) {
            return Err(Error::invalid(format!("r = {r} outside [1/2, 1]")));
        }
        let cap = (1.0 - r) / r;
        if !(rho.abs() <= cap) {
            return Err(Error::invalid(format!(
                "|rho| = {} exceeds (1-r)/r = {cap}",
                rho.abs()
            )));
        }
        if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
            return Err(Error::invalid(format!("(x, y) = ({x}, {y}) outside [0,1]²")));
        }
        Ok(FourPointInput { r, rho, x, y })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }
}

/// The four-point form exactly as displayed: a weighted sum of the four
/// products `(1±x)^r (1±y)^r`, with weight (1+ρ) on the agreeing sign pairs
/// and (1-ρ) on the disagreeing ones.
pub fn four_point_value(inp: FourPointInput) -> f64 {
    let FourPointInput { r, rho, x, y } = inp;
    eval(r, rho, x, y)
}

#[inline]
fn eval(r: f64, rho: f64, x: f64, y: f64) -> f64 {
    let xm = (1.0 - x).powf(r);
    let xp = (1.0 + x).powf(r);
    let ym = (1.0 - y).powf(r);
    let yp = (1.0 + y).powf(r);
    (1.0 + rho) * (xm * ym + xp * yp) + (1.0 - rho) * (xm * yp + xp * ym)
}

/// Verification report of the grid scan.
#[derive(Debug, Clone, Serialize)]
pub struct HyperReport {
    #[serde(rename = "maxValue")]
    pub max_value: f64,
    /// (r, ρ, x, y) attaining the maximum, lexicographically smallest among
    /// ties in scan order.
    pub argmax: (f64, f64, f64, f64),
    #[serde(rename = "gridStep")]
    pub grid_step: f64,
    pub tolerance: f64,
    /// True iff `max_value ≤ 4 + tolerance`.
    pub verdict: bool,
    pub evaluations: u64,
}

/// Scans r over [1/2, 1] and (x, y) over [0,1]² at `grid_step`, evaluating
/// only at the extreme admissible correlations ρ = ±(1-r)/r — the form is
/// linear in ρ, so the endpoints dominate the whole ρ-interval. A local
/// pattern search then refines around the incumbent maximum. The boundary
/// lines x = 1 and y = 1 are always included in the grid.
pub fn verify_four_point(grid_step: f64, tolerance: f64) -> Result<HyperReport> {
    if !(grid_step > 0.0 && grid_step <= 1.0 / 64.0) {
        return Err(Error::invalid(format!(
            "grid step {grid_step} outside (0, 1/64]"
        )));
    }
    let r_steps = (0.5 / grid_step).ceil() as usize;
    let xy_steps = (1.0 / grid_step).ceil() as usize;
    let xs: Vec<f64> = (0..=xy_steps)
        .map(|i| (i as f64 * grid_step).min(1.0))
        .collect();

    let mut evaluations = 0u64;
    let mut best = f64::NEG_INFINITY;
    let mut argmax = (0.5, 0.0, 0.0, 0.0);

    let mut pow_minus = vec![0.0f64; xs.len()];
    let mut pow_plus = vec![0.0f64; xs.len()];
    for ri in 0..=r_steps {
        let r = (0.5 + ri as f64 * grid_step).min(1.0);
        let rho_cap = (1.0 - r) / r;
        for (i, &x) in xs.iter().enumerate() {
            pow_minus[i] = (1.0 - x).powf(r);
            pow_plus[i] = (1.0 + x).powf(r);
        }
        for rho in [-rho_cap, rho_cap] {
            let wa = 1.0 + rho;
            let wd = 1.0 - rho;
            for (xi, &x) in xs.iter().enumerate() {
                let xm = pow_minus[xi];
                let xp = pow_plus[xi];
                for (yi, &y) in xs.iter().enumerate() {
                    let ym = pow_minus[yi];
                    let yp = pow_plus[yi];
                    let v = wa * (xm * ym + xp * yp) + wd * (xm * yp + xp * ym);
                    evaluations += 1;
                    if v > best {
                        best = v;
                        argmax = (r, rho, x, y);
                    }
                }
            }
            if rho_cap == 0.0 {
                break; // r = 1 forces ρ = 0; do not scan it twice
            }
        }
    }

    // Pattern-search refinement over (r, x, y); ρ stays pinned to ±(1-r)/r.
    let (mut r0, _, mut x0, mut y0) = argmax;
    let mut step = grid_step;
    for _ in 0..60 {
        let mut improved = false;
        let mut local_best = best;
        let mut local_arg = argmax;
        for dr in [-1.0, 0.0, 1.0] {
            let r = (r0 + dr * step).clamp(0.5, 1.0);
            let rho_cap = (1.0 - r) / r;
            for dx in [-1.0, 0.0, 1.0] {
                let x = (x0 + dx * step).clamp(0.0, 1.0);
                for dy in [-1.0, 0.0, 1.0] {
                    let y = (y0 + dy * step).clamp(0.0, 1.0);
                    for rho in [-rho_cap, rho_cap] {
                        let v = eval(r, rho, x, y);
                        evaluations += 1;
                        if v > local_best {
                            local_best = v;
                            local_arg = (r, rho, x, y);
                            improved = true;
                        }
                    }
                }
            }
        }
        if improved {
            best = local_best;
            argmax = local_arg;
            (r0, x0, y0) = (local_arg.0, local_arg.2, local_arg.3);
        } else {
            step /= 2.0;
            if step < 1e-14 {
                break;
            }
        }
    }

    Ok(HyperReport {
        max_value: best,
        argmax,
        grid_step,
        tolerance,
        verdict: best <= 4.0 + tolerance,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::assert_close;

    #[test]
    fn origin_value_is_four() {
        for &r in &[0.5, 0.6, 0.75, 0.97, 1.0] {
            let cap = (1.0 - r) / r;
            for rho in [-cap, 0.0, cap] {
                let v = four_point_value(FourPointInput::new(r, rho, 0.0, 0.0).unwrap());
                assert_close(v, 4.0, 0.0);
            }
        }
    }

    #[test]
    fn r_one_forces_rho_zero_and_value_four() {
        assert!(FourPointInput::new(1.0, 0.1, 0.5, 0.5).is_err());
        for &(x, y) in &[(0.3, 0.9), (0.0, 1.0), (0.5, 0.5)] {
            let v = four_point_value(FourPointInput::new(1.0, 0.0, x, y).unwrap());
            assert_close(v, 4.0, 1e-12);
        }
    }

    #[test]
    fn interior_point_stays_below_four() {
        // boundary correlation (1-r)/r = 1/3 at r = 3/4; high-precision
        // reference value computed with 50-digit arithmetic
        let v = four_point_value(FourPointInput::new(0.75, 1.0 / 3.0, 0.5, 0.5).unwrap());
        assert!(v <= 4.0);
        assert_close(v, 3.99546419539775170, 1e-12);
    }

    #[test]
    fn linear_in_rho() {
        // value at an interior ρ is the affine interpolation of the endpoint
        // values, which justifies endpoint-only scanning
        let mut lcg = 0x1234_5678_u64;
        let mut next = move || {
            lcg = lcg.wrapping_mul(6364136223846793005).wrapping_add(1);
            (lcg >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..200 {
            let r = 0.5 + 0.5 * next();
            let cap = (1.0 - r) / r;
            let x = next();
            let y = next();
            let t = next();
            let rho = cap * (2.0 * t - 1.0);
            let lo = four_point_value(FourPointInput::new(r, -cap, x, y).unwrap());
            let hi = four_point_value(FourPointInput::new(r, cap, x, y).unwrap());
            let mid = four_point_value(FourPointInput::new(r, rho, x, y).unwrap());
            let interp = lo + (hi - lo) * (rho + cap) / (2.0 * cap).max(1e-300);
            assert!(
                (mid - interp).abs() < 1e-12,
                "not affine in rho at r={r}, x={x}, y={y}"
            );
        }
    }

    #[test]
    fn coarse_scan_passes() {
        let report = verify_four_point(1.0 / 64.0, 1e-9).unwrap();
        assert!(report.verdict, "max {} at {:?}", report.max_value, report.argmax);
        assert_close(report.max_value, 4.0, 1e-12);
        assert_close(report.argmax.2, 0.0, 0.0);
        assert_close(report.argmax.3, 0.0, 0.0);
    }

    #[test]
    fn half_slice_allows_full_rho_range() {
        // r = 1/2: ρ ranges over [-1, 1]; the slice max still sits at 4
        let mut best = f64::NEG_INFINITY;
        for i in 0..=128 {
            let x = i as f64 / 128.0;
            for j in 0..=128 {
                let y = j as f64 / 128.0;
                for rho in [-1.0, 1.0] {
                    let v = four_point_value(FourPointInput::new(0.5, rho, x, y).unwrap());
                    best = best.max(v);
                }
            }
        }
        assert!(best <= 4.0 + 1e-12, "r = 1/2 slice max {best}");
    }

    #[test]
    fn rejects_forced_failure_tolerance() {
        let report = verify_four_point(1.0 / 64.0, -1.0).unwrap();
        assert!(!report.verdict);
    }

    #[test]
    fn rejects_bad_grid() {
        assert!(verify_four_point(0.5, 1e-9).is_err());
        assert!(verify_four_point(0.0, 1e-9).is_err());
    }
}

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::cube::function::BooleanFunction;
use crate::cube::point::check_n;
use crate::error::{Error, Result};

/// Built-in function families used throughout the test and experiment
/// harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    /// `(τ_1 + … + τ_n)/√n`, the endpoint of the simple walk.
    SimpleWalk,
    /// `(τ_1 + τ_1τ_2 + … + τ_1⋯τ_n)/√n`: the simple walk composed with the
    /// cumulative-product tree automorphism. Flat spectrum, weight 1/n per
    /// level.
    TwistedWalk,
    /// The first coordinate.
    Dictator,
    /// `τ_1⋯τ_n`.
    Parity,
    /// Sign of the coordinate sum; 0 on ties (even n).
    Majority,
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simple-walk" => Ok(FamilyKind::SimpleWalk),
            "twisted-walk" => Ok(FamilyKind::TwistedWalk),
            "dictator" => Ok(FamilyKind::Dictator),
            "parity" => Ok(FamilyKind::Parity),
            "majority" => Ok(FamilyKind::Majority),
            other => Err(Error::invalid(format!("unknown function family '{other}'"))),
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            FamilyKind::SimpleWalk => "simple-walk",
            FamilyKind::TwistedWalk => "twisted-walk",
            FamilyKind::Dictator => "dictator",
            FamilyKind::Parity => "parity",
            FamilyKind::Majority => "majority",
        };
        f.write_str(name)
    }
}

/// Tabulates the named family member at level count `n`.
pub fn builtin_family(kind: FamilyKind, n: usize) -> Result<BooleanFunction> {
    check_n(n)?;
    let len = 1u32 << n;
    let scale = 1.0 / (n as f64).sqrt();
    let values: Vec<Complex64> = (0..len)
        .map(|i| {
            let re = match kind {
                FamilyKind::SimpleWalk => {
                    let minus = (i & (len - 1)).count_ones() as f64;
                    (n as f64 - 2.0 * minus) * scale
                }
                FamilyKind::TwistedWalk => {
                    // Σ_m τ_1⋯τ_m via running prefix parity
                    let mut parity = 0u32;
                    let mut sum = 0.0;
                    for j in 0..n {
                        parity ^= i >> j & 1;
                        sum += if parity == 0 { 1.0 } else { -1.0 };
                    }
                    sum * scale
                }
                FamilyKind::Dictator => {
                    if i & 1 == 0 {
                        1.0
                    } else {
                        -1.0
                    }
                }
                FamilyKind::Parity => {
                    if i.count_ones() % 2 == 0 {
                        1.0
                    } else {
                        -1.0
                    }
                }
                FamilyKind::Majority => {
                    let sum = n as f64 - 2.0 * i.count_ones() as f64;
                    if sum > 0.0 {
                        1.0
                    } else if sum < 0.0 {
                        -1.0
                    } else {
                        0.0
                    }
                }
            };
            Complex64::new(re, 0.0)
        })
        .collect();
    BooleanFunction::new(n, values)
}

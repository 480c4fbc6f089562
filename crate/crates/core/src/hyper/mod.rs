//! The four-point inequality, p-norms, the hypercontractive bilinear-form
//! bound for adapted couplings, and the supermartingale mechanism behind it.
//!
//! The scalar inequality states: for r ∈ [1/2, 1], x, y ∈ [0, 1] and
//! |ρ| ≤ (1-r)/r,
//!
//! ```text
//! (1+ρ)(1-x)^r(1-y)^r + (1-ρ)(1-x)^r(1+y)^r
//!   + (1-ρ)(1+x)^r(1-y)^r + (1+ρ)(1+x)^r(1+y)^r ≤ 4 .
//! ```
//!
//! It is verified here numerically (dense grid plus local refinement around
//! the incumbent maximum), and it drives the bilinear-form bound
//! `|⟨g|μ|f⟩| ≤ ‖f‖_{1+ρ} ‖g‖_{1+ρ}` for every coupling with ρ_max(μ) ≤ ρ.

mod four_point;
mod ratio;
mod search;

pub use four_point::{four_point_value, verify_four_point, FourPointInput, HyperReport};
pub use ratio::{
    hypercontractivity_ratio, indicator_inequality_check, p_norm, supermartingale_trace,
    IndicatorCheck, PointSet, StepSlack, SupermartingaleTrace, MAX_TRACE_N,
};
pub use search::{adversarial_ratio_search, AdversarialReport};

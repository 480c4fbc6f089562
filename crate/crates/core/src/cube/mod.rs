//! Fourier-Walsh analysis on the discrete cube `{-1,+1}^n`: transforms,
//! spectral level weights and tails, the noise operator, correlated-pair
//! statistics, and the built-in function families.
//!
//! All tables share one bit-encoding: point index bit `j` (least significant
//! first) holds coordinate `j`, with a clear bit meaning `+1`.

mod families;
mod function;
mod noise;
mod point;
mod spectrum;

pub use families::{builtin_family, FamilyKind};
pub use function::BooleanFunction;
pub use noise::{
    expected_conditional_variance, noise_correlation, noise_operator, sample_correlated_pair,
    NoiseParam,
};
pub use point::{CubePoint, MAX_DENSE_N};
pub use spectrum::{character_function, wht_forward, wht_inverse, SpectralDecomposition};

pub(crate) use point::check_n;

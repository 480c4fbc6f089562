//! Noise analysis on the discrete cube, the binary tree, and the spider
//! graph.
//!
//! The crate has four layers:
//!
//! * [`cube`] — Fourier-Walsh transforms, spectral level weights, the noise
//!   operator, ρ-correlated pairs, and the built-in function families.
//! * [`tree`] — automorphisms of the n-level binary tree acting on points,
//!   functions, and couplings.
//! * [`coupling`] — adapted joint laws of two cube points parameterized by
//!   per-history conditional correlations, their bilinear forms, and the
//!   hypercontractive machinery ([`hyper`]) built on top.
//! * [`spider`] — the triangle-with-rays walk: exact distributions, coupled
//!   trajectories, the combinatorial-distance drift ledger, and the
//!   non-cosiness experiment harness.
//!
//! Everything is deterministic given the caller's RNG; see [`mc`] for the
//! seeded-stream batch helpers used by the experiment code.

pub mod coupling;
pub mod cube;
pub mod hyper;
pub mod mc;
pub mod spider;
pub mod tree;

mod error;
#[cfg(test)]
mod testutil;

pub use error::{Error, Result};

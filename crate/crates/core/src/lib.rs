//! Dyadic harmonic analysis on finite grids over `[0, 1)`.
//!
//! The crate builds the dyadic paraproduct `pi_b f = sum_I m_I f b_I h_I`,
//! the weighted Haar system attached to a weight `w`, and the three Bellman
//! functions used to control the sums that appear when bounding `pi_b` on
//! `L2(w)` linearly in the `A2` characteristic. Every inequality in that
//! argument has a checker in [`lab`], and [`lab::scan_norm_vs_a2`] measures
//! the operator norm across weight families.
//!
//! Modules:
//! - [`grid`]: intervals, step functions, Haar analysis and synthesis.
//! - [`weights`]: weights, `A2`, BMO, Carleson constants, generators.
//! - [`weighted_haar`]: disbalance coefficients, `H_I^w`, the Bessel sum.
//! - [`paraproduct`]: `pi_b`, the three-sum pairing decomposition, norms.
//! - [`bellman`]: Bellman-function certificates.
//! - [`lab`]: inequality checkers and norm scans.
//! - [`config`]: the frozen suite constants.

// Negated float comparisons throughout the crate are deliberate so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bellman;
pub mod config;
pub mod error;
pub mod grid;
pub mod lab;
pub mod paraproduct;
pub mod weighted_haar;
pub mod weights;

pub use config::SuiteConstants;
pub use error::{DyadicError, Result};
pub use grid::{
    haar_analyze, haar_synthesize, AveragePyramid, DyadicIndex, DyadicSequence, HaarSpectrum,
    StepFunction,
};
pub use weights::{SymbolKind, Weight};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The deterministic generator used by every stochastic routine.
pub type SuiteRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SuiteRng {
    ChaCha8Rng::seed_from_u64(seed)
}

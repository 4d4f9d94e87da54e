//! Simulator and numerics for the capacity of fractal wireless networks in
//! which every source talks to one of its direct social contacts.
//!
//! - [`sympoly`]: log-domain elementary symmetric polynomials, inclusion
//!   probabilities and exact fixed-size product-weighted samplers.
//! - [`netgen`]: node placement, power-law degrees and contact sets.
//! - [`grid`]: cell geometry, TDMA reuse schedule, protocol-model checks and
//!   hop counting.
//! - [`capacity`]: hop-count estimation (Monte Carlo and exact), throughput
//!   bounds, reference orders and scaling fits.
//! - [`fractal`]: box covering, renormalization and exponent estimation.
//! - [`seed`]: deterministic substream seeds.
//! - [`verify`]: the acceptance checks, shared by the test suite and the CLI.

pub mod capacity;
pub mod error;
pub mod fractal;
pub mod grid;
pub mod netgen;
pub mod seed;
pub mod sympoly;
pub mod verify;

pub use error::{Error, Result};

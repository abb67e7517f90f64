//! Auxiliary-beam-pair (ABP) channel estimation for large-array mmWave MIMO
//! links.
//!
//! A transmitter and receiver tile their angular ranges with pairs of analog
//! beams offset `±δ` around per-pair boresights. Comparing the received
//! powers of a pair's two beams yields a ratio in `[-1, 1]` that pins the
//! in-range angle in closed form, giving super-resolution angle estimates
//! from a handful of wide probing beams. This crate provides:
//!
//! - [`array`]: ULA steering vectors and spatial-frequency conversions,
//! - [`channel`]: sparse ray channels, Rician composition, noisy probing,
//! - [`codebook`]: beam-pair grids, probing schedules, monopulse beams,
//! - [`estimator`]: ratio metrics, pair selection, single- and multi-path
//!   AoD/AoA estimation,
//! - [`quantizer`]: feedback codebooks (Lloyd-Max and uniform),
//! - [`analysis`]: closed-form variance predictors.
//!
//! All values are immutable after construction and all randomness flows
//! through explicit seeds, so everything here is safe to share across
//! parallel Monte Carlo workers.

pub mod analysis;
pub mod array;
pub mod channel;
pub mod codebook;
pub mod error;
pub mod estimator;
pub mod quantizer;

pub use error::{Error, Result};

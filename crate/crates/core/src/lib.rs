//! Numerical core for LPC-based speech enhancement.
//!
//! Everything here is pure computation over `alloc` buffers: audio framing,
//! STFT and log-Mel features, classical LPC analysis and synthesis, the two
//! differentiable blocks (stable poles to LP coefficients, LP coefficients
//! plus excitation to waveform) with exact adjoints, a wall-transmission
//! channel simulator, a gradient-based enhancer and objective metrics.
//!
//! File formats and the command-line front end live in the `lpc-enhance`
//! crate.

#![no_std]
// f64 math comes from `num_traits::Float` on bare targets; when std is linked
// anywhere in the graph the inherent methods shadow it and the import is idle.
#![cfg_attr(not(target_os = "none"), allow(unused_imports))]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod blocks;
pub mod channel;
pub mod enhance;
mod error;
pub mod lpc;
pub mod metrics;
pub mod signal;
pub mod synth;

pub use error::{Error, Result};
pub use num_complex::Complex64;

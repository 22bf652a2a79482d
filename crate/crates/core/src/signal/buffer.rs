use alloc::vec::Vec;

use crate::error::{invalid, Result};

/// Mono audio samples at a fixed sample rate.
///
/// Amplitudes are nominally in `[-1, 1]` and are kept in double precision
/// regardless of how they were stored on disk.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SampleBuffer {
    samples: Vec<f64>,
    rate: u32,
}

impl SampleBuffer {
    pub fn new(samples: Vec<f64>, rate: u32) -> Result<Self> {
        if rate == 0 {
            return Err(invalid!("sample rate must be positive"));
        }
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(invalid!("sample {i} is not finite"));
        }
        Ok(Self { samples, rate })
    }

    pub fn zeros(len: usize, rate: u32) -> Result<Self> {
        Self::new(alloc::vec![0.0; len], rate)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn rate(&self) -> u32 {
        self.rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.rate as f64
    }

    /// Same rate, new samples. Used internally where finiteness is already
    /// guaranteed by construction.
    pub(crate) fn with_samples(&self, samples: Vec<f64>) -> Self {
        debug_assert!(samples.iter().all(|x| x.is_finite()));
        Self { samples, rate: self.rate }
    }

    pub(crate) fn from_parts(samples: Vec<f64>, rate: u32) -> Self {
        debug_assert!(rate > 0);
        Self { samples, rate }
    }

    pub fn scaled(&self, gain: f64) -> Self {
        self.with_samples(self.samples.iter().map(|x| x * gain).collect())
    }

    pub fn truncated(&self, len: usize) -> Self {
        let n = len.min(self.samples.len());
        self.with_samples(self.samples[..n].to_vec())
    }
}

/// Slot/frame geometry shared by LPC analysis and the differentiable blocks.
///
/// `slot_len` consecutive samples share one set of `order` LP coefficients;
/// a frame is `slots` slots long.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FrameLayout {
    pub slot_len: usize,
    pub slots: usize,
    pub order: usize,
}

impl FrameLayout {
    /// `M = 46`, `L = 120`, `P = 11` at 11025 Hz.
    pub const DEFAULT: FrameLayout = FrameLayout { slot_len: 46, slots: 120, order: 11 };

    pub fn new(slot_len: usize, slots: usize, order: usize) -> Result<Self> {
        let layout = Self { slot_len, slots, order };
        layout.validate()?;
        Ok(layout)
    }

    pub fn validate(&self) -> Result<()> {
        if self.order == 0 {
            return Err(invalid!("LPC order must be at least 1"));
        }
        if self.slots == 0 {
            return Err(invalid!("a frame needs at least one slot"));
        }
        if self.slot_len < self.order {
            return Err(invalid!(
                "slot length {} is shorter than the LPC order {}",
                self.slot_len,
                self.order
            ));
        }
        Ok(())
    }

    pub fn frame_len(&self) -> usize {
        self.slot_len * self.slots
    }

    /// Same slot geometry with a different number of slots.
    pub fn with_slots(&self, slots: usize) -> Self {
        Self { slots, ..*self }
    }

    /// Slot count needed to cover `n` samples.
    pub fn slots_for(&self, n: usize) -> usize {
        n.div_ceil(self.slot_len)
    }
}

impl Default for FrameLayout {
    fn default() -> Self {
        Self::DEFAULT
    }
}

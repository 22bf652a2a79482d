//! Direct optimisation of per-slot pole parameters against the composite
//! Mel + waveform + LP loss, and a small linear regressor that predicts
//! pole parameters from distorted-speech features.

mod fit;
mod init;
mod loss;
mod optim;
mod regressor;

pub use fit::{enhance_fit, prepare_fit, synthesize, EnhanceOutcome, FitInputs, StopReason};
pub use init::params_from_coefficients;
pub use loss::{composite_loss, LossReport, LossTarget};
pub use optim::{Optimizer, OptimizerKind};
pub use regressor::{
    distorted_baseline_loss, feature_len, slot_features, train_regressor, RegressorModel, TrainConfig, TrainOutcome,
    TrainPair,
};

use crate::blocks::PairingMode;
use crate::error::{invalid, Result};
use crate::signal::mel::MelConfig;
use crate::signal::FrameLayout;

/// Rate the LPC model runs at; inputs are resampled to it and the result
/// back to the input rate.
pub const WORK_RATE: u32 = 11_025;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EnhanceConfig {
    /// Weight of the waveform loss.
    pub mu: f64,
    /// Weight of the LP-coefficient loss.
    pub lambda: f64,
    pub lr: f64,
    pub iters: usize,
    pub layout: FrameLayout,
    pub optimizer: OptimizerKind,
    pub pairing_mode: PairingMode,
    /// Mel analysis for the loss; `None` uses the defaults for the input rate.
    pub mel: Option<MelConfig>,
    /// Stop once the loss has exceeded this multiple of the initial loss ...
    pub divergence_factor: f64,
    /// ... for this many consecutive iterations.
    pub divergence_patience: usize,
}

impl Default for EnhanceConfig {
    fn default() -> Self {
        Self {
            mu: 1.0,
            lambda: 0.3,
            lr: 0.001,
            iters: 500,
            layout: FrameLayout::DEFAULT,
            optimizer: OptimizerKind::default(),
            pairing_mode: PairingMode::Conjugate,
            mel: None,
            divergence_factor: 10.0,
            divergence_patience: 50,
        }
    }
}

impl EnhanceConfig {
    pub fn validate(&self) -> Result<()> {
        self.layout.validate()?;
        if !(self.mu >= 0.0 && self.lambda >= 0.0 && self.mu.is_finite() && self.lambda.is_finite()) {
            return Err(invalid!("mu and lambda must be finite and non-negative"));
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(invalid!("learning rate must be positive, got {}", self.lr));
        }
        if self.iters == 0 {
            return Err(invalid!("iters must be positive"));
        }
        if let Some(mel) = &self.mel {
            mel.validate()?;
        }
        self.optimizer.validate()
    }
}

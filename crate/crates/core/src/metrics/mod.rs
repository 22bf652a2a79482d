//! Objective evaluation: STOI, log-spectral distance, formant-difference
//! histograms and pole-position comparison.

mod formants;
mod lsd;
mod poles;
mod stoi;

pub use formants::{formant_error_stats, voicing_for, FormantErrorStats, FormantHistogram, HIST_BIN_HZ, HIST_RANGE_HZ};
pub use lsd::log_spectral_distance;
pub use poles::{match_poles, pole_compare, PoleComparison, SlotPoles};
pub use stoi::{resample_octave, stoi, stoi_at_10k, STOI_RATE, STOI_SEGMENT};

use alloc::vec::Vec;

use crate::error::Result;
use crate::lpc::{burg_formants_with, track_pitch_with, BurgConfig, PitchConfig};
use crate::signal::resample::resample;
use crate::signal::{FrameLayout, SampleBuffer};

/// Formants, pitch and poles are measured at `analysis_rate`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub analysis_rate: u32,
    pub layout: FrameLayout,
    pub burg: BurgConfig,
    pub pitch: PitchConfig,
    /// `None` compares poles in every slot.
    pub pole_slots: Option<Vec<usize>>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self::for_rate(11025)
    }
}

impl EvalConfig {
    pub fn for_rate(analysis_rate: u32) -> Self {
        Self {
            analysis_rate,
            layout: FrameLayout::DEFAULT,
            burg: BurgConfig::for_rate(analysis_rate),
            pitch: PitchConfig::for_rate(analysis_rate),
            pole_slots: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvalReport {
    pub stoi: f64,
    pub lsd_db: f64,
    pub formant_diff: FormantErrorStats,
    pub pole_pairs: PoleComparison,
}

pub fn evaluate(clean: &SampleBuffer, test: &SampleBuffer, cfg: &EvalConfig) -> Result<EvalReport> {
    let stoi = stoi(clean, test)?;
    let lsd_db = log_spectral_distance(clean, test)?;
    let c = resample(clean, cfg.analysis_rate)?;
    let t = resample(test, cfg.analysis_rate)?;
    let fc = burg_formants_with(&c, &cfg.burg)?;
    let ft = burg_formants_with(&t, &cfg.burg)?;
    let vc = voicing_for(&fc, &track_pitch_with(&c, &cfg.pitch)?);
    let vt = voicing_for(&ft, &track_pitch_with(&t, &cfg.pitch)?);
    let formant_diff = formant_error_stats(&fc, &ft, Some((&vc, &vt)));
    let pole_pairs = pole_compare(&c, &t, &cfg.layout, cfg.pole_slots.as_deref())?;
    Ok(EvalReport { stoi, lsd_db, formant_diff, pole_pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::vowel_sequence;

    #[test]
    fn self_evaluation() {
        let x = vowel_sequence(22050, 1.5, 8).unwrap();
        let r = evaluate(&x, &x, &EvalConfig::default()).unwrap();
        assert!((r.stoi - 1.0).abs() < 1e-6);
        assert_eq!(r.lsd_db, 0.0);
        assert_eq!(r.pole_pairs.mean_distance, 0.0);
        assert!(r.formant_diff.f1.n > 0);
        assert_eq!(r.formant_diff.f1.mean_hz, Some(0.0));
    }
}

use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{invalid, Result};
use crate::lpc::autocorrelation;
use crate::signal::window::hann_interior;
use crate::signal::SampleBuffer;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PitchConfig {
    pub f_min: f64,
    pub f_max: f64,
    pub frame_len: usize,
    pub hop: usize,
    pub voicing_threshold: f64,
    /// Frames whose peak amplitude is below this fraction of the utterance
    /// peak are unvoiced regardless of periodicity.
    pub silence_threshold: f64,
}

impl PitchConfig {
    /// 70-400 Hz, 40 ms frames (three periods at 70 Hz would need 43 ms,
    /// so the frame is stretched to cover that), 10 ms hop.
    pub fn for_rate(rate: u32) -> Self {
        let r = rate as f64;
        let f_min = 70.0;
        Self {
            f_min,
            f_max: 400.0,
            frame_len: (3.0 * r / f_min).ceil() as usize,
            hop: (0.01 * r).round() as usize,
            voicing_threshold: 0.45,
            silence_threshold: 0.03,
        }
    }

    fn validate(&self, rate: u32) -> Result<()> {
        if !(self.f_min > 0.0 && self.f_min < self.f_max && self.f_max <= rate as f64 / 2.0) {
            return Err(invalid!("need 0 < f_min < f_max <= rate/2, got {} and {}", self.f_min, self.f_max));
        }
        if self.hop == 0 {
            return Err(invalid!("hop must be positive"));
        }
        let max_lag = (rate as f64 / self.f_min).ceil() as usize;
        if self.frame_len <= max_lag + 1 {
            return Err(invalid!("frame of {} samples cannot hold lag {}", self.frame_len, max_lag));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PitchFrame {
    pub time_s: f64,
    /// `None` when unvoiced.
    pub f0_hz: Option<f64>,
    /// Normalized autocorrelation at the chosen lag.
    pub strength: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PitchTrack {
    pub rate: u32,
    pub frames: Vec<PitchFrame>,
}

impl PitchTrack {
    pub fn voiced_fraction(&self) -> f64 {
        if self.frames.is_empty() {
            return 0.0;
        }
        self.frames.iter().filter(|f| f.f0_hz.is_some()).count() as f64 / self.frames.len() as f64
    }
}

pub fn track_pitch(buffer: &SampleBuffer, f_min: f64, f_max: f64, frame_len: usize, hop: usize) -> Result<PitchTrack> {
    let cfg = PitchConfig { f_min, f_max, frame_len, hop, ..PitchConfig::for_rate(buffer.rate()) };
    track_pitch_with(buffer, &cfg)
}

/// Autocorrelation pitch: the windowed frame's autocorrelation is divided
/// by the window's own autocorrelation, and the highest peak in the lag
/// range is refined by parabolic interpolation.
pub fn track_pitch_with(buffer: &SampleBuffer, cfg: &PitchConfig) -> Result<PitchTrack> {
    cfg.validate(buffer.rate())?;
    let rate = buffer.rate() as f64;
    let x = buffer.samples();
    let global_peak = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let min_lag = ((rate / cfg.f_max).floor() as usize).max(1);
    let max_lag = (rate / cfg.f_min).ceil() as usize;
    let window = hann_interior(cfg.frame_len);
    let window_ac = autocorrelation(&window, max_lag + 1)?;
    let mut frames = Vec::new();
    let mut start = 0;
    while start + cfg.frame_len <= x.len() {
        let frame = &x[start..start + cfg.frame_len];
        let time_s = (start as f64 + cfg.frame_len as f64 / 2.0) / rate;
        frames.push(pitch_frame(frame, &window, &window_ac, global_peak, min_lag, max_lag, time_s, rate, cfg)?);
        start += cfg.hop;
    }
    Ok(PitchTrack { rate: buffer.rate(), frames })
}

#[allow(clippy::too_many_arguments)]
fn pitch_frame(
    frame: &[f64],
    window: &[f64],
    window_ac: &[f64],
    global_peak: f64,
    min_lag: usize,
    max_lag: usize,
    time_s: f64,
    rate: f64,
    cfg: &PitchConfig,
) -> Result<PitchFrame> {
    let unvoiced = PitchFrame { time_s, f0_hz: None, strength: 0.0 };
    let peak = frame.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if global_peak == 0.0 || peak < cfg.silence_threshold * global_peak {
        return Ok(unvoiced);
    }
    let mean = frame.iter().sum::<f64>() / frame.len() as f64;
    let seg: Vec<f64> = frame.iter().zip(window).map(|(v, w)| (v - mean) * w).collect();
    let r = autocorrelation(&seg, max_lag + 1)?;
    if r[0] <= 0.0 {
        return Ok(unvoiced);
    }
    let norm: Vec<f64> = (0..=max_lag + 1).map(|k| r[k] / r[0] * window_ac[0] / window_ac[k]).collect();
    let mut best = None;
    for k in min_lag.max(1)..=max_lag {
        let is_peak = norm[k] >= norm[k - 1] && norm[k] >= norm[k + 1];
        if is_peak && best.is_none_or(|b: usize| norm[k] > norm[b]) {
            best = Some(k);
        }
    }
    let Some(k) = best else { return Ok(unvoiced) };
    let (a, b, c) = (norm[k - 1], norm[k], norm[k + 1]);
    let denom = a - 2.0 * b + c;
    let shift = if denom < 0.0 { (0.5 * (a - c) / denom).clamp(-0.5, 0.5) } else { 0.0 };
    let strength = (b - 0.25 * (a - c) * shift).min(1.0);
    let f0 = rate / (k as f64 + shift);
    if strength > cfg.voicing_threshold && f0 >= cfg.f_min && f0 <= cfg.f_max {
        Ok(PitchFrame { time_s, f0_hz: Some(f0), strength })
    } else {
        Ok(PitchFrame { time_s, f0_hz: None, strength })
    }
}

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Float;

use crate::blocks::lp2poles;
use crate::error::{invalid, Result};
use crate::signal::window::hann_interior;
use crate::signal::SampleBuffer;

/// Burg's method. Returns predictor coefficients (`x[k] ~ sum a_p x[k-p]`),
/// or `None` when a reflection coefficient leaves the open unit interval.
///
/// The recursion stops early, with the remaining coefficients zero, once
/// the forward/backward error energy is negligible.
pub fn burg(x: &[f64], order: usize) -> Option<Vec<f64>> {
    let n = x.len();
    let mut a = vec![0.0; order + 1];
    a[0] = 1.0;
    let mut f = x.to_vec();
    let mut b = x.to_vec();
    let energy: f64 = x.iter().map(|v| v * v).sum();
    if energy == 0.0 {
        return Some(vec![0.0; order]);
    }
    for m in 1..=order.min(n.saturating_sub(1)) {
        let mut num = 0.0;
        let mut den = 0.0;
        for i in m..n {
            num += f[i] * b[i - 1];
            den += f[i] * f[i] + b[i - 1] * b[i - 1];
        }
        if den <= 1e-14 * energy {
            break;
        }
        let k = -2.0 * num / den;
        if !k.is_finite() || k.abs() >= 1.0 {
            return None;
        }
        let prev = a.clone();
        for i in 1..=m {
            a[i] = prev[i] + k * prev[m - i];
        }
        for i in (m..n).rev() {
            let fi = f[i];
            f[i] = fi + k * b[i - 1];
            b[i] = b[i - 1] + k * fi;
        }
    }
    Some(a[1..].iter().map(|v| -v).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Formant {
    pub frequency_hz: f64,
    pub bandwidth_hz: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FormantFrame {
    pub time_s: f64,
    /// Ascending in frequency. Empty for skipped frames.
    pub formants: Vec<Formant>,
    /// The Burg recursion was unstable on this frame.
    pub skipped: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FormantTrack {
    pub rate: u32,
    pub frames: Vec<FormantFrame>,
}

impl FormantTrack {
    /// Frequency of formant `index` (0 = F1) in each frame, if present.
    pub fn formant(&self, index: usize) -> Vec<Option<f64>> {
        self.frames
            .iter()
            .map(|f| if f.skipped { None } else { f.formants.get(index).map(|v| v.frequency_hz) })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BurgConfig {
    pub order: usize,
    pub frame_len: usize,
    pub hop: usize,
    /// First-order pre-emphasis from this frequency upward; `None` disables it.
    pub pre_emphasis_hz: Option<f64>,
    pub max_bandwidth_hz: f64,
    /// Roots closer than this to 0 Hz or Nyquist are ignored.
    pub edge_hz: f64,
}

impl BurgConfig {
    /// Order `2 + rate / 1000`, 25 ms frames, 10 ms hop.
    pub fn for_rate(rate: u32) -> Self {
        let r = rate as f64;
        Self {
            order: 2 + (r / 1000.0).round() as usize,
            frame_len: (0.025 * r).round() as usize,
            hop: (0.01 * r).round() as usize,
            pre_emphasis_hz: Some(50.0),
            max_bandwidth_hz: 500.0,
            edge_hz: 50.0,
        }
    }
}

pub fn burg_formants(buffer: &SampleBuffer, order: usize, frame_len: usize, hop: usize) -> Result<FormantTrack> {
    let cfg = BurgConfig { order, frame_len, hop, ..BurgConfig::for_rate(buffer.rate()) };
    burg_formants_with(buffer, &cfg)
}

/// Formants per frame from the roots of the Burg predictor:
/// `f = angle * rate / 2 pi`, `bandwidth = -rate / pi * ln |r|`.
pub fn burg_formants_with(buffer: &SampleBuffer, cfg: &BurgConfig) -> Result<FormantTrack> {
    if cfg.order == 0 || cfg.hop == 0 {
        return Err(invalid!("order and hop must be positive"));
    }
    if cfg.frame_len < 2 * cfg.order {
        return Err(invalid!("frame of {} samples is too short for order {}", cfg.frame_len, cfg.order));
    }
    let rate = buffer.rate() as f64;
    let x = buffer.samples();
    let emphasized: Vec<f64> = match cfg.pre_emphasis_hz {
        Some(f) => {
            let alpha = (-2.0 * PI * f / rate).exp();
            (0..x.len()).map(|i| x[i] - if i > 0 { alpha * x[i - 1] } else { 0.0 }).collect()
        }
        None => x.to_vec(),
    };
    let window = hann_interior(cfg.frame_len);
    let nyquist = rate / 2.0;
    let mut frames = Vec::new();
    let mut start = 0;
    while start + cfg.frame_len <= x.len() {
        let seg: Vec<f64> = emphasized[start..start + cfg.frame_len].iter().zip(&window).map(|(a, w)| a * w).collect();
        let time_s = (start as f64 + cfg.frame_len as f64 / 2.0) / rate;
        let frame = match burg(&seg, cfg.order).map(|a| lp2poles(&a)) {
            Some(Ok(roots)) => {
                let mut formants: Vec<Formant> = roots
                    .iter()
                    .filter(|r| r.im > 0.0)
                    .map(|r| Formant {
                        frequency_hz: r.arg() * rate / (2.0 * PI),
                        bandwidth_hz: -rate / PI * r.norm().ln(),
                    })
                    .filter(|f| {
                        f.frequency_hz > cfg.edge_hz
                            && f.frequency_hz < nyquist - cfg.edge_hz
                            && f.bandwidth_hz > 0.0
                            && f.bandwidth_hz < cfg.max_bandwidth_hz
                    })
                    .collect();
                formants.sort_by(|a, b| a.frequency_hz.total_cmp(&b.frequency_hz));
                FormantFrame { time_s, formants, skipped: false }
            }
            _ => FormantFrame { time_s, formants: Vec::new(), skipped: true },
        };
        frames.push(frame);
        start += cfg.hop;
    }
    Ok(FormantTrack { rate: buffer.rate(), frames })
}

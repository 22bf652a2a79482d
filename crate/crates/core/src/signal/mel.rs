//! 80-band log-Mel spectrogram and its adjoint.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use super::stft::{Spectrogram, Stft, StftConfig};
use super::{SampleBuffer, Window};
use crate::error::{invalid, Result};

pub const MEL_FLOOR: f64 = 1e-10;

/// HTK mel scale.
pub fn hz_to_mel(f: f64) -> f64 {
    2595.0 * (1.0 + f / 700.0).log10()
}

pub fn mel_to_hz(m: f64) -> f64 {
    700.0 * (10f64.powf(m / 2595.0) - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MelConfig {
    pub rate: u32,
    pub fft_size: usize,
    pub win_len: usize,
    pub hop: usize,
    pub n_mels: usize,
    pub fmin: f64,
    pub fmax: f64,
    pub floor: f64,
}

impl MelConfig {
    /// 2048-point FFT, 50 ms Hann window, 12.5 ms hop, 80 bands over
    /// `[0, rate / 2]`. Window and hop lengths scale with the rate.
    pub fn for_rate(rate: u32) -> Self {
        let r = rate as f64;
        let win_len = ((0.05 * r).round() as usize).max(1);
        let fft_size = 2048usize.max(win_len.next_power_of_two());
        Self {
            rate,
            fft_size,
            win_len,
            hop: ((0.0125 * r).round() as usize).max(1),
            n_mels: 80,
            fmin: 0.0,
            fmax: r / 2.0,
            floor: MEL_FLOOR,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rate == 0 || self.n_mels == 0 {
            return Err(invalid!("mel rate and band count must be positive"));
        }
        if !(self.fmin >= 0.0 && self.fmin < self.fmax && self.fmax <= self.rate as f64 / 2.0) {
            return Err(invalid!("mel range [{}, {}] must lie within [0, rate / 2]", self.fmin, self.fmax));
        }
        if !(self.floor > 0.0 && self.floor.is_finite()) {
            return Err(invalid!("mel floor must be positive"));
        }
        Ok(())
    }

    pub fn stft_config(&self) -> StftConfig {
        StftConfig { fft_size: self.fft_size, win_len: self.win_len, hop: self.hop, window: Window::Hann, center: true }
    }
}

/// Triangular filters stored sparsely as `(first_bin, weights)`.
#[derive(Debug, Clone)]
pub struct MelFilterbank {
    rows: Vec<(usize, Vec<f64>)>,
    bins: usize,
}

impl MelFilterbank {
    pub fn new(cfg: &MelConfig) -> Self {
        let bins = cfg.fft_size / 2 + 1;
        let (mlo, mhi) = (hz_to_mel(cfg.fmin), hz_to_mel(cfg.fmax));
        let edges: Vec<f64> = (0..cfg.n_mels + 2)
            .map(|i| mel_to_hz(mlo + (mhi - mlo) * i as f64 / (cfg.n_mels + 1) as f64))
            .collect();
        let bin_hz = cfg.rate as f64 / cfg.fft_size as f64;
        let rows = (0..cfg.n_mels)
            .map(|b| {
                let (lo, mid, hi) = (edges[b], edges[b + 1], edges[b + 2]);
                let mut first = None;
                let mut weights = Vec::new();
                for k in 0..bins {
                    let w = triangle(k as f64 * bin_hz, lo, mid, hi);
                    if w > 0.0 {
                        first.get_or_insert(k);
                        weights.push(w);
                    } else if first.is_some() {
                        break;
                    }
                }
                (first.unwrap_or(0), weights)
            })
            .collect();
        Self { rows, bins }
    }

    pub fn n_mels(&self) -> usize {
        self.rows.len()
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn row(&self, band: usize) -> (usize, &[f64]) {
        let (start, w) = &self.rows[band];
        (*start, w)
    }

    pub fn apply(&self, power: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|(start, w)| w.iter().enumerate().map(|(i, wi)| wi * power[start + i]).sum())
            .collect()
    }
}

/// Weight of a triangle with feet `lo`, `hi` and apex `mid` at frequency `f`.
pub fn triangle(f: f64, lo: f64, mid: f64, hi: f64) -> f64 {
    if f <= lo || f >= hi {
        0.0
    } else if f <= mid {
        (f - lo) / (mid - lo)
    } else {
        (hi - f) / (hi - mid)
    }
}

/// Log-Mel energies, `frames x n_mels`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MelSpectrogram {
    pub data: Vec<Vec<f64>>,
    pub hop_s: f64,
    pub win_s: f64,
    pub fft_size: usize,
}

impl MelSpectrogram {
    pub fn frames(&self) -> usize {
        self.data.len()
    }
}

/// Forward log-Mel transform with a reverse-mode adjoint.
#[derive(Debug, Clone)]
pub struct MelTransform {
    cfg: MelConfig,
    stft: Stft,
    bank: MelFilterbank,
}

/// Intermediates kept by [`MelTransform::forward_cached`].
#[derive(Debug, Clone)]
pub struct MelCache {
    spec: Spectrogram,
    mel_power: Vec<Vec<f64>>,
    len: usize,
}

impl MelTransform {
    pub fn new(cfg: MelConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self { stft: Stft::new(cfg.stft_config())?, bank: MelFilterbank::new(&cfg), cfg })
    }

    pub fn config(&self) -> &MelConfig {
        &self.cfg
    }

    pub fn filterbank(&self) -> &MelFilterbank {
        &self.bank
    }

    pub fn forward(&self, x: &[f64]) -> MelSpectrogram {
        self.forward_cached(x).0
    }

    pub fn forward_cached(&self, x: &[f64]) -> (MelSpectrogram, MelCache) {
        let spec = self.stft.forward(x);
        let mel_power: Vec<Vec<f64>> = spec.power().iter().map(|p| self.bank.apply(p)).collect();
        let data = mel_power.iter().map(|row| row.iter().map(|m| (m + self.cfg.floor).ln()).collect()).collect();
        let r = self.cfg.rate as f64;
        let mel = MelSpectrogram {
            data,
            hop_s: self.cfg.hop as f64 / r,
            win_s: self.cfg.win_len as f64 / r,
            fft_size: self.cfg.fft_size,
        };
        (mel, MelCache { spec, mel_power, len: x.len() })
    }

    /// Gradient with respect to the waveform, given `dL/d logmel`.
    pub fn adjoint(&self, cache: &MelCache, grad_log: &[Vec<f64>]) -> Vec<f64> {
        let bins = self.bank.bins();
        let grad_spec: Vec<Vec<Complex64>> = cache
            .spec
            .frames
            .iter()
            .zip(&cache.mel_power)
            .zip(grad_log)
            .map(|((frame, mp), g)| {
                let mut gp = vec![0.0; bins];
                for band in 0..self.bank.n_mels() {
                    let coeff = g[band] / (mp[band] + self.cfg.floor);
                    let (start, w) = self.bank.row(band);
                    for (i, wi) in w.iter().enumerate() {
                        gp[start + i] += coeff * wi;
                    }
                }
                // d|X|^2 / dRe = 2 Re, d|X|^2 / dIm = 2 Im
                frame.iter().zip(&gp).map(|(x, p)| *x * (2.0 * p)).collect()
            })
            .collect();
        self.stft.adjoint(&grad_spec, cache.len)
    }
}

pub fn mel_spectrogram(buffer: &SampleBuffer) -> Result<MelSpectrogram> {
    Ok(MelTransform::new(MelConfig::for_rate(buffer.rate()))?.forward(buffer.samples()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn tone(n: usize, amp: f64) -> Vec<f64> {
        (0..n)
            .map(|i| {
                let t = i as f64 / 22050.0;
                amp * ((2.0 * PI * 440.0 * t).sin() + 0.5 * (2.0 * PI * 1870.0 * t).sin())
            })
            .collect()
    }

    #[test]
    fn paper_configuration() {
        let cfg = MelConfig::for_rate(22050);
        assert_eq!((cfg.fft_size, cfg.win_len, cfg.hop, cfg.n_mels), (2048, 1103, 276, 80));
    }

    #[test]
    fn silence_sits_on_the_floor() {
        let buf = SampleBuffer::zeros(22050, 22050).unwrap();
        let mel = mel_spectrogram(&buf).unwrap();
        assert!(mel.frames() > 0);
        assert!(mel.data.iter().flatten().all(|v| *v == MEL_FLOOR.ln()));
    }

    #[test]
    fn doubling_amplitude_adds_log4() {
        let t = MelTransform::new(MelConfig::for_rate(22050)).unwrap();
        let a = t.forward(&tone(11025, 0.25));
        let b = t.forward(&tone(11025, 0.5));
        for (ra, rb) in a.data.iter().zip(&b.data) {
            for (x, y) in ra.iter().zip(rb) {
                if *x > MEL_FLOOR.ln() + 20.0 {
                    assert!((y - x - 4f64.ln()).abs() < 1e-6, "{x} {y}");
                }
            }
        }
    }

    #[test]
    fn filters_are_positive_and_cross_at_half_height() {
        let cfg = MelConfig::for_rate(22050);
        let bank = MelFilterbank::new(&cfg);
        for b in 0..bank.n_mels() {
            assert!(bank.row(b).1.iter().sum::<f64>() > 0.0, "band {b} empty");
        }
        let (mlo, mhi) = (hz_to_mel(cfg.fmin), hz_to_mel(cfg.fmax));
        let edge = |i: usize| mel_to_hz(mlo + (mhi - mlo) * i as f64 / 81.0);
        for b in 0..79 {
            let crossing = mel_to_hz((hz_to_mel(edge(b + 1)) + hz_to_mel(edge(b + 2))) / 2.0);
            let left = triangle(crossing, edge(b), edge(b + 1), edge(b + 2));
            let right = triangle(crossing, edge(b + 1), edge(b + 2), edge(b + 3));
            // Triangles are linear in Hz, so the mel midpoint crossing is
            // checked at the Hz midpoint of the shared edge pair.
            let mid_hz = (edge(b + 1) + edge(b + 2)) / 2.0;
            let l = triangle(mid_hz, edge(b), edge(b + 1), edge(b + 2));
            let r = triangle(mid_hz, edge(b + 1), edge(b + 2), edge(b + 3));
            assert!((l - 0.5).abs() < 1e-12 && (r - 0.5).abs() < 1e-12);
            assert!(left > 0.0 && right > 0.0);
        }
    }

    #[test]
    fn deterministic() {
        let t = MelTransform::new(MelConfig::for_rate(22050)).unwrap();
        let x = tone(5000, 0.3);
        assert_eq!(t.forward(&x), t.forward(&x));
    }

    #[test]
    fn adjoint_matches_finite_differences() {
        let cfg = MelConfig { rate: 8000, fft_size: 64, win_len: 40, hop: 10, n_mels: 8, fmin: 0.0, fmax: 4000.0, floor: 1e-10 };
        let t = MelTransform::new(cfg).unwrap();
        let x: Vec<f64> = (0..120).map(|i| ((i * 31 % 23) as f64) / 11.0 - 1.0).collect();
        let weights: Vec<Vec<f64>> = (0..cfg.stft_config().frame_count(120))
            .map(|f| (0..8).map(|b| ((f + 2 * b) % 7) as f64 / 7.0 - 0.4).collect())
            .collect();
        let objective = |x: &[f64]| -> f64 {
            t.forward(x).data.iter().zip(&weights).flat_map(|(r, w)| r.iter().zip(w).map(|(a, b)| a * b)).sum()
        };
        let (_, cache) = t.forward_cached(&x);
        let grad = t.adjoint(&cache, &weights);
        for i in [0usize, 5, 37, 60, 119] {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += 1e-6;
            xm[i] -= 1e-6;
            let numeric = (objective(&xp) - objective(&xm)) / 2e-6;
            assert!((numeric - grad[i]).abs() < 1e-5 * numeric.abs().max(1.0), "{i}: {numeric} vs {}", grad[i]);
        }
    }
}

//! Short-time objective intelligibility, following the reference Python
//! implementation step for step (including its Octave-compatible
//! resampler) so scores agree to within floating-point noise.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::signal::fft::{rfft, Fft};
use crate::signal::window::{hann_interior, kaiser};
use crate::signal::SampleBuffer;

pub const STOI_RATE: u32 = 10_000;
const N_FRAME: usize = 256;
const NFFT: usize = 512;
const NUM_BANDS: usize = 15;
const MIN_FREQ: f64 = 150.0;
/// Frames per intermediate intelligibility segment (384 ms).
pub const STOI_SEGMENT: usize = 30;
const BETA_DB: f64 = -15.0;
const DYN_RANGE_DB: f64 = 40.0;
const EPS: f64 = f64::EPSILON;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 { 1.0 } else { (PI * x).sin() / (PI * x) }
}

/// Rational resampler with the Octave `resample` filter design (60 dB
/// Kaiser, roll-off a tenth of the cut-off), applied zero-phase.
pub fn resample_octave(x: &[f64], to: u32, from: u32) -> Vec<f64> {
    let g = gcd(to as u64, from as u64);
    let (p, q) = ((to as u64 / g) as usize, (from as u64 / g) as usize);
    if p == q {
        return x.to_vec();
    }
    let cutoff = 1.0 / (2.0 * p.max(q) as f64);
    let roll_off = cutoff / 10.0;
    let rejection_db = 60.0;
    let half = ((rejection_db - 8.0) / (28.714 * roll_off)).ceil() as usize;
    let beta = 0.1102 * (rejection_db - 8.7);
    let win = kaiser(2 * half + 1, beta);
    let mut h: Vec<f64> = (0..2 * half + 1)
        .map(|i| {
            let t = i as f64 - half as f64;
            win[i] * 2.0 * p as f64 * cutoff * sinc(2.0 * cutoff * t)
        })
        .collect();
    let sum: f64 = h.iter().sum();
    h.iter_mut().for_each(|v| *v *= p as f64 / sum);
    let n_out = (x.len() * p).div_ceil(q);
    let mut y = vec![0.0; n_out];
    for (m, out) in y.iter_mut().enumerate() {
        // h index = m q + half - n p, within [0, 2 half]
        let centre = m * q + half;
        let n_lo = centre.saturating_sub(2 * half).div_ceil(p);
        let n_hi = (centre / p).min(x.len().saturating_sub(1));
        let mut acc = 0.0;
        if !x.is_empty() {
            for n in n_lo..=n_hi {
                acc += h[centre - n * p] * x[n];
            }
        }
        *out = acc;
    }
    y
}

fn frame_starts(len: usize) -> impl Iterator<Item = usize> {
    (0..len.saturating_sub(N_FRAME)).step_by(N_FRAME / 2)
}

/// Drop frames of `x` more than 40 dB below its loudest frame (and the same
/// frames of `y`), then overlap-add the windowed survivors.
fn remove_silent_frames(x: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let w = hann_interior(N_FRAME);
    let hop = N_FRAME / 2;
    let starts: Vec<usize> = frame_starts(x.len()).collect();
    let energy: Vec<f64> = starts
        .iter()
        .map(|&s| {
            let e: f64 = x[s..s + N_FRAME].iter().zip(&w).map(|(v, w)| (v * w) * (v * w)).sum();
            20.0 * (e.sqrt() + EPS).log10()
        })
        .collect();
    let max = energy.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let kept: Vec<usize> = starts.iter().zip(&energy).filter(|(_, e)| max - DYN_RANGE_DB - **e < 0.0).map(|(s, _)| *s).collect();
    if kept.is_empty() {
        return (Vec::new(), Vec::new());
    }
    let len = (kept.len() - 1) * hop + N_FRAME;
    let mut xs = vec![0.0; len];
    let mut ys = vec![0.0; len];
    for (j, &s) in kept.iter().enumerate() {
        for i in 0..N_FRAME {
            xs[j * hop + i] += w[i] * x[s + i];
            ys[j * hop + i] += w[i] * y[s + i];
        }
    }
    (xs, ys)
}

/// One-third octave band matrix as half-open bin ranges.
fn third_octave_bands() -> Vec<(usize, usize)> {
    let bins = NFFT / 2 + 1;
    let freq = |k: usize| k as f64 * STOI_RATE as f64 / NFFT as f64;
    let nearest = |target: f64| {
        let mut best = 0;
        for k in 1..bins {
            if (freq(k) - target).powi(2) < (freq(best) - target).powi(2) {
                best = k;
            }
        }
        best
    };
    (0..NUM_BANDS)
        .map(|k| {
            let k = k as f64;
            let lo = MIN_FREQ * 2f64.powf((2.0 * k - 1.0) / 6.0);
            let hi = MIN_FREQ * 2f64.powf((2.0 * k + 1.0) / 6.0);
            (nearest(lo), nearest(hi))
        })
        .collect()
}

/// Band envelopes, indexed `[band][frame]`.
fn band_envelopes(x: &[f64], bands: &[(usize, usize)], fft: &Fft) -> Vec<Vec<f64>> {
    let w = hann_interior(N_FRAME);
    let mut out = vec![Vec::new(); bands.len()];
    let mut frame = vec![0.0; NFFT];
    for s in frame_starts(x.len()) {
        for i in 0..N_FRAME {
            frame[i] = w[i] * x[s + i];
        }
        let spec = rfft(fft, &frame);
        for (b, &(lo, hi)) in bands.iter().enumerate() {
            out[b].push(spec[lo..hi].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt());
        }
    }
    out
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// STOI of `processed` against `clean`. Both are resampled to 10 kHz when
/// needed.
pub fn stoi(clean: &SampleBuffer, processed: &SampleBuffer) -> Result<f64> {
    if clean.len() != processed.len() || clean.rate() != processed.rate() {
        return Err(invalid!(
            "STOI needs equal lengths and rates, got {} @ {} Hz and {} @ {} Hz",
            clean.len(),
            clean.rate(),
            processed.len(),
            processed.rate()
        ));
    }
    let (x, y) = if clean.rate() == STOI_RATE {
        (clean.samples().to_vec(), processed.samples().to_vec())
    } else {
        (resample_octave(clean.samples(), STOI_RATE, clean.rate()), resample_octave(processed.samples(), STOI_RATE, clean.rate()))
    };
    stoi_at_10k(&x, &y)
}

/// STOI of two equally long signals already at 10 kHz.
pub fn stoi_at_10k(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(invalid!("STOI needs equal lengths, got {} and {}", x.len(), y.len()));
    }
    let (x, y) = remove_silent_frames(x, y);
    let fft = Fft::new(NFFT);
    let bands = third_octave_bands();
    let xt = band_envelopes(&x, &bands, &fft);
    let yt = band_envelopes(&y, &bands, &fft);
    let frames = xt[0].len();
    if frames < STOI_SEGMENT {
        return Err(Error::InsufficientSignal { frames, needed: STOI_SEGMENT });
    }
    let clip = 10f64.powf(-BETA_DB / 20.0);
    let segments = frames - STOI_SEGMENT + 1;
    let mut total = 0.0;
    let mut xs = vec![0.0; STOI_SEGMENT];
    let mut ys = vec![0.0; STOI_SEGMENT];
    for m in STOI_SEGMENT..=frames {
        for b in 0..NUM_BANDS {
            xs.copy_from_slice(&xt[b][m - STOI_SEGMENT..m]);
            ys.copy_from_slice(&yt[b][m - STOI_SEGMENT..m]);
            let alpha = norm(&xs) / (norm(&ys) + EPS);
            for (yv, xv) in ys.iter_mut().zip(&xs) {
                *yv = (*yv * alpha).min(xv * (1.0 + clip));
            }
            let my = ys.iter().sum::<f64>() / STOI_SEGMENT as f64;
            let mx = xs.iter().sum::<f64>() / STOI_SEGMENT as f64;
            ys.iter_mut().for_each(|v| *v -= my);
            xs.iter_mut().for_each(|v| *v -= mx);
            let (ny, nx) = (norm(&ys) + EPS, norm(&xs) + EPS);
            total += xs.iter().zip(&ys).map(|(a, b)| (a / nx) * (b / ny)).sum::<f64>();
        }
    }
    Ok(total / (segments * NUM_BANDS) as f64)
}

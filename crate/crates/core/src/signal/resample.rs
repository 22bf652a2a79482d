//! Rational-ratio polyphase resampling with a Kaiser-windowed sinc.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Float;

use super::window::kaiser;
use super::SampleBuffer;
use crate::error::{invalid, Result};

pub const KAISER_BETA: f64 = 8.0;
pub const TAPS_PER_PHASE: usize = 64;

/// Polyphase resampler from `from` Hz to `to` Hz.
///
/// The filter is linear phase and delay-compensated, so sample `m` of the
/// output is centred at time `m / to`. Each polyphase branch is normalised
/// to unit sum, which makes constant signals pass through unchanged away
/// from the edges.
#[derive(Debug, Clone)]
pub struct Resampler {
    up: usize,
    down: usize,
    half: usize,
    taps: Vec<f64>,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

impl Resampler {
    pub fn new(from: u32, to: u32) -> Result<Self> {
        if from == 0 || to == 0 {
            return Err(invalid!("sample rates must be positive"));
        }
        let g = gcd(from as usize, to as usize);
        let up = to as usize / g;
        let down = from as usize / g;
        let factor = up.max(down);
        let half = TAPS_PER_PHASE / 2 * factor;
        let len = 2 * half + 1;
        let cutoff = 0.5 / factor as f64;
        let window = kaiser(len, KAISER_BETA);
        let mut taps: Vec<f64> = (0..len)
            .map(|j| 2.0 * cutoff * sinc(2.0 * cutoff * (j as f64 - half as f64)) * window[j])
            .collect();
        for phase in 0..up {
            let sum: f64 = taps.iter().skip(phase).step_by(up).sum();
            if sum != 0.0 {
                for t in taps.iter_mut().skip(phase).step_by(up) {
                    *t /= sum;
                }
            }
        }
        Ok(Self { up, down, half, taps })
    }

    pub fn ratio(&self) -> (usize, usize) {
        (self.up, self.down)
    }

    pub fn output_len(&self, input_len: usize) -> usize {
        (input_len * self.up).div_ceil(self.down)
    }

    /// Input index range contributing to output sample `m`, with the tap
    /// offset of the first contributing input.
    fn span(&self, m: usize, input_len: usize) -> (usize, usize) {
        let t = m * self.down + self.half;
        let last = (t / self.up).min(input_len.saturating_sub(1));
        let first = t.saturating_sub(2 * self.half).div_ceil(self.up);
        (first, last)
    }

    pub fn process(&self, input: &[f64]) -> Vec<f64> {
        if self.up == 1 && self.down == 1 {
            return input.to_vec();
        }
        let out_len = self.output_len(input.len());
        let mut out = vec![0.0; out_len];
        if input.is_empty() {
            return out;
        }
        for (m, y) in out.iter_mut().enumerate() {
            let t = m * self.down + self.half;
            let (first, last) = self.span(m, input.len());
            let mut acc = 0.0;
            for n in first..=last {
                acc += input[n] * self.taps[t - n * self.up];
            }
            *y = acc;
        }
        out
    }

    /// Transpose of [`process`](Self::process): maps a gradient on the
    /// output back onto an input of length `input_len`.
    pub fn adjoint(&self, grad_out: &[f64], input_len: usize) -> Vec<f64> {
        if self.up == 1 && self.down == 1 {
            let mut g = grad_out.to_vec();
            g.resize(input_len, 0.0);
            return g;
        }
        let mut grad_in = vec![0.0; input_len];
        if input_len == 0 {
            return grad_in;
        }
        for (m, g) in grad_out.iter().enumerate().take(self.output_len(input_len)) {
            let t = m * self.down + self.half;
            let (first, last) = self.span(m, input_len);
            for n in first..=last {
                grad_in[n] += g * self.taps[t - n * self.up];
            }
        }
        grad_in
    }
}

/// Resample a buffer to `target_rate`.
pub fn resample(buffer: &SampleBuffer, target_rate: u32) -> Result<SampleBuffer> {
    if target_rate == buffer.rate() {
        return Ok(buffer.clone());
    }
    let r = Resampler::new(buffer.rate(), target_rate)?;
    Ok(SampleBuffer::from_parts(r.process(buffer.samples()), target_rate))
}

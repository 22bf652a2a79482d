//! Short-time Fourier transform with centred, reflect-padded framing.
//!
//! With `center` on, the signal is reflect-padded by `win_len / 2` on both
//! sides so frame `t` is centred on sample `t * hop`. Frame count is
//! `floor((n_padded - win_len) / hop) + 1`; an input shorter than one
//! window yields an empty spectrogram.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::fft::Fft;
use super::window::Window;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StftConfig {
    pub fft_size: usize,
    pub win_len: usize,
    pub hop: usize,
    pub window: Window,
    pub center: bool,
}

impl StftConfig {
    pub fn new(fft_size: usize, win_len: usize, hop: usize) -> Result<Self> {
        let cfg = Self { fft_size, win_len, hop, window: Window::Hann, center: true };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.win_len == 0 || self.hop == 0 {
            return Err(invalid!("window length and hop must be positive"));
        }
        if self.win_len > self.fft_size {
            return Err(invalid!("window length {} exceeds FFT size {}", self.win_len, self.fft_size));
        }
        if self.hop > self.win_len {
            return Err(invalid!("hop {} exceeds window length {}", self.hop, self.win_len));
        }
        Ok(())
    }

    pub fn pad(&self) -> usize {
        if self.center {
            self.win_len / 2
        } else {
            0
        }
    }

    pub fn frame_count(&self, n: usize) -> usize {
        if n < self.win_len {
            return 0;
        }
        let padded = n + 2 * self.pad();
        (padded - self.win_len) / self.hop + 1
    }

    pub fn bins(&self) -> usize {
        self.fft_size / 2 + 1
    }
}

/// One-sided complex spectrogram, `frames x (fft_size / 2 + 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    pub config: StftConfig,
    pub frames: Vec<Vec<Complex64>>,
}

impl Spectrogram {
    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn power(&self) -> Vec<Vec<f64>> {
        self.frames.iter().map(|f| f.iter().map(|c| c.norm_sqr()).collect()).collect()
    }
}

fn reflect(i: isize, n: usize) -> usize {
    let n = n as isize;
    let mut j = i;
    // A single reflection suffices because the pad is shorter than the signal.
    if j < 0 {
        j = -j;
    }
    if j >= n {
        j = 2 * (n - 1) - j;
    }
    j.clamp(0, n - 1) as usize
}

/// Precomputed STFT operator (window and FFT plan).
#[derive(Debug, Clone)]
pub struct Stft {
    config: StftConfig,
    window: Vec<f64>,
    fft: Fft,
}

impl Stft {
    pub fn new(config: StftConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self { window: config.window.coefficients(config.win_len), fft: Fft::new(config.fft_size), config })
    }

    pub fn config(&self) -> &StftConfig {
        &self.config
    }

    fn source_index(&self, frame: usize, j: usize, n: usize) -> usize {
        let pos = (frame * self.config.hop + j) as isize - self.config.pad() as isize;
        reflect(pos, n)
    }

    pub fn forward(&self, x: &[f64]) -> Spectrogram {
        let n = x.len();
        let frames = self.config.frame_count(n);
        let mut out = Vec::with_capacity(frames);
        let mut buf = vec![Complex64::new(0.0, 0.0); self.config.fft_size];
        for t in 0..frames {
            buf.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
            for j in 0..self.config.win_len {
                buf[j] = Complex64::new(x[self.source_index(t, j, n)] * self.window[j], 0.0);
            }
            self.fft.forward(&mut buf);
            out.push(buf[..self.config.bins()].to_vec());
        }
        Spectrogram { config: self.config, frames: out }
    }

    /// Gradient with respect to the input signal, given per-bin gradients
    /// `dL/dRe X + i dL/dIm X` on the one-sided spectrogram.
    pub fn adjoint(&self, grad: &[Vec<Complex64>], n: usize) -> Vec<f64> {
        let mut gx = vec![0.0; n];
        let mut buf = vec![Complex64::new(0.0, 0.0); self.config.fft_size];
        for (t, g) in grad.iter().enumerate() {
            buf.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
            buf[..g.len()].copy_from_slice(g);
            self.fft.inverse_unscaled(&mut buf);
            for j in 0..self.config.win_len {
                gx[self.source_index(t, j, n)] += buf[j].re * self.window[j];
            }
        }
        gx
    }
}

pub fn stft(x: &[f64], config: StftConfig) -> Result<Spectrogram> {
    Ok(Stft::new(config)?.forward(x))
}

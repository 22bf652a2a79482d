use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::EnhanceConfig;
use crate::blocks::{
    lp2wav, lp2wav_adjoint, params_adjoint, poles2lp, poles2lp_adjoint, poles_from_params, ComplexCoeffs, LpCoefficients,
    PoleParams, PoleParamsGrad,
};
use crate::error::{invalid, Error, Result};
use crate::lpc::lpc_analyze;
use crate::signal::mel::{MelConfig, MelTransform};
use crate::signal::{FrameLayout, Resampler, SampleBuffer};

/// Loss components of one evaluation. `total = mel + mu * wave + lambda * lp`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LossReport {
    pub total: f64,
    pub mel: f64,
    pub wave: f64,
    pub lp: f64,
}

/// Everything the loss compares against, precomputed from the clean signal
/// at the working rate.
#[derive(Debug, Clone)]
pub struct LossTarget {
    layout: FrameLayout,
    wave: Vec<f64>,
    mel: Vec<Vec<f64>>,
    lp: LpCoefficients,
    up: Option<Resampler>,
    transform: MelTransform,
    /// Mel bands entering the loss: those lying wholly below the working
    /// Nyquist. Higher bands hold only resampler stop-band residue.
    bands: usize,
}

impl LossTarget {
    /// `clean` at the working rate; `layout` is one frame's layout. The Mel
    /// term is computed at `output_rate` after upsampling.
    pub fn new(clean: &SampleBuffer, layout: &FrameLayout, output_rate: u32) -> Result<Self> {
        Self::with_mel(clean, layout, MelConfig::for_rate(output_rate))
    }

    pub fn with_mel(clean: &SampleBuffer, layout: &FrameLayout, mel: MelConfig) -> Result<Self> {
        let frames = lpc_analyze(clean, layout)?;
        let lp = LpCoefficients::concat(frames.iter().map(|f| &f.coeffs));
        let total = layout.with_slots(lp.slots());
        let mut wave = clean.samples().to_vec();
        wave.resize(total.frame_len(), 0.0);
        let up = (mel.rate != clean.rate()).then(|| Resampler::new(clean.rate(), mel.rate)).transpose()?;
        let transform = MelTransform::new(mel)?;
        // The target goes through the same resampling as the synthesis so
        // the band above the working Nyquist does not enter the loss.
        let wide = match &up {
            Some(r) => r.process(&wave),
            None => wave.clone(),
        };
        let mel = transform.forward(&wide).data;
        let bin_hz = transform.config().rate as f64 / transform.config().fft_size as f64;
        let nyquist = clean.rate() as f64 / 2.0;
        let bank = transform.filterbank();
        let bands = (0..bank.n_mels())
            .take_while(|&b| {
                let (start, w) = bank.row(b);
                ((start + w.len()) as f64 - 1.0) * bin_hz <= nyquist
            })
            .count();
        Ok(Self { layout: total, wave, mel, lp, up, transform, bands })
    }

    /// Layout spanning the whole (padded) utterance.
    pub fn layout(&self) -> &FrameLayout {
        &self.layout
    }

    pub fn wave(&self) -> &[f64] {
        &self.wave
    }

    pub fn lp(&self) -> &LpCoefficients {
        &self.lp
    }

    pub fn mel_bands(&self) -> usize {
        self.bands
    }
}

/// Composite loss `L_mel + mu L_wave + lambda L_lp` for pole parameters
/// `params` driving excitation `z`, with its gradient.
///
/// `L_wave` is the waveform MSE at the working rate, `L_mel` the MSE of
/// log-Mel energies after upsampling (bands below the working Nyquist), and `L_lp` the mean complex modulus
/// `|A_hat - A_target|` over slots and orders, where `A_hat` is the complex
/// polynomial expansion of the poles.
pub fn composite_loss(
    params: &PoleParams,
    z: &[f64],
    target: &LossTarget,
    cfg: &EnhanceConfig,
) -> Result<(LossReport, PoleParamsGrad)> {
    params.validate()?;
    let layout = &target.layout;
    if params.order != layout.order || params.slots != layout.slots {
        return Err(invalid!(
            "parameters cover {} slots of order {}, target has {} of order {}",
            params.slots,
            params.order,
            layout.slots,
            layout.order
        ));
    }
    let poles = poles_from_params(params);
    let c = poles2lp(&poles);
    let a = c.real();
    let x = lp2wav(&a, z, layout)?;
    let n = x.len();

    let mut gx = vec![0.0; n];
    let mut wave = 0.0;
    for ((g, xv), tv) in gx.iter_mut().zip(&x).zip(&target.wave) {
        let d = xv - tv;
        wave += d * d;
        *g = 2.0 * cfg.mu * d / n as f64;
    }
    wave /= n as f64;

    let wide = match &target.up {
        Some(r) => r.process(&x),
        None => x.clone(),
    };
    let (m, cache) = target.transform.forward_cached(&wide);
    let bands = target.bands;
    let cells = m.data.len() * bands;
    let mut mel = 0.0;
    if cells > 0 {
        let grad_log: Vec<Vec<f64>> = m
            .data
            .iter()
            .zip(&target.mel)
            .map(|(row, trow)| {
                row.iter()
                    .zip(trow)
                    .enumerate()
                    .map(|(b, (v, t))| {
                        if b >= bands {
                            return 0.0;
                        }
                        let d = v - t;
                        mel += d * d;
                        2.0 * d / cells as f64
                    })
                    .collect()
            })
            .collect();
        mel /= cells as f64;
        let g_wide = target.transform.adjoint(&cache, &grad_log);
        let g_mel = match &target.up {
            Some(r) => r.adjoint(&g_wide, n),
            None => g_wide,
        };
        gx.iter_mut().zip(&g_mel).for_each(|(g, h)| *g += h);
    }

    let count = c.data.len().max(1) as f64;
    let mut lp = 0.0;
    let mut gc: Vec<Complex64> = Vec::with_capacity(c.data.len());
    for (ch, t) in c.data.iter().zip(target.lp.as_slice()) {
        let w = ch - t;
        let mag = w.norm();
        lp += mag;
        gc.push(if mag > 0.0 { w * (cfg.lambda / (mag * count)) } else { Complex64::new(0.0, 0.0) });
    }
    lp /= count;

    let total = mel + cfg.mu * wave + cfg.lambda * lp;
    if !total.is_finite() {
        return Err(Error::NonFiniteLoss { mel, wave, lp });
    }

    let g_lp2wav = lp2wav_adjoint(&a, &x, &gx, layout)?;
    for (g, ga) in gc.iter_mut().zip(g_lp2wav.coeffs.as_slice()) {
        g.re += ga;
    }
    let g_poles = poles2lp_adjoint(&poles, &ComplexCoeffs { order: c.order, slots: c.slots, data: gc });
    Ok((LossReport { total, mel, wave, lp }, params_adjoint(params, &g_poles)))
}

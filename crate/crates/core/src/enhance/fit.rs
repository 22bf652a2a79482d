use alloc::vec::Vec;

use super::{composite_loss, params_from_coefficients, EnhanceConfig, LossReport, LossTarget, Optimizer, WORK_RATE};
use crate::blocks::{lp2wav, poles2lp, poles_from_params, LpCoefficients, PoleParams};
use crate::error::{invalid, Result};
use crate::lpc::lpc_analyze;
use crate::signal::mel::MelConfig;
use crate::signal::resample::resample;
use crate::signal::{FrameLayout, Resampler, SampleBuffer};

/// A distorted/clean pair prepared for fitting at the working rate.
#[derive(Debug, Clone)]
pub struct FitInputs {
    /// Excitation of the distorted signal over the padded utterance.
    pub z: Vec<f64>,
    /// LP coefficients of the distorted signal, one column per slot.
    pub coeffs: LpCoefficients,
    pub init: PoleParams,
    pub target: LossTarget,
    /// Unpadded length and rate of the original input.
    pub output_len: usize,
    pub output_rate: u32,
}

impl FitInputs {
    pub fn layout(&self) -> &FrameLayout {
        self.target.layout()
    }
}

/// Analysis of the distorted signal at `WORK_RATE`.
pub(crate) fn analyze_distorted(distorted: &SampleBuffer, layout: &FrameLayout) -> Result<(LpCoefficients, Vec<f64>)> {
    let d = resample(distorted, WORK_RATE)?;
    if d.len() < layout.frame_len() {
        return Err(invalid!(
            "{} samples at {} Hz is shorter than one frame ({})",
            d.len(),
            WORK_RATE,
            layout.frame_len()
        ));
    }
    let frames = lpc_analyze(&d, layout)?;
    let coeffs = LpCoefficients::concat(frames.iter().map(|f| &f.coeffs));
    let z = frames.iter().flat_map(|f| f.excitation.iter().copied()).collect();
    Ok((coeffs, z))
}

pub fn prepare_fit(distorted: &SampleBuffer, clean: &SampleBuffer, cfg: &EnhanceConfig) -> Result<FitInputs> {
    cfg.validate()?;
    if distorted.len() != clean.len() || distorted.rate() != clean.rate() {
        return Err(invalid!(
            "pair must be aligned: distorted {} @ {} Hz, clean {} @ {} Hz",
            distorted.len(),
            distorted.rate(),
            clean.len(),
            clean.rate()
        ));
    }
    let (coeffs, z) = analyze_distorted(distorted, &cfg.layout)?;
    let mel = cfg.mel.unwrap_or_else(|| MelConfig::for_rate(distorted.rate()));
    let target = LossTarget::with_mel(&resample(clean, WORK_RATE)?, &cfg.layout, mel)?;
    let init = params_from_coefficients(&coeffs, cfg.pairing_mode)?;
    Ok(FitInputs { z, coeffs, init, target, output_len: distorted.len(), output_rate: distorted.rate() })
}

/// Waveform for `params`, resampled to `rate` and cut to `len` samples.
pub fn synthesize(params: &PoleParams, z: &[f64], layout: &FrameLayout, rate: u32, len: usize) -> Result<SampleBuffer> {
    let a = poles2lp(&poles_from_params(params)).real();
    let x = lp2wav(&a, z, layout)?;
    let mut y = if rate == WORK_RATE { x } else { Resampler::new(WORK_RATE, rate)?.process(&x) };
    y.resize(len, 0.0);
    SampleBuffer::new(y, rate)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum StopReason {
    Completed,
    /// The loss stayed above the divergence bound for the configured patience.
    Diverged,
    /// A step produced a non-finite loss or an unstable recursion.
    NonFinite,
}

#[derive(Debug, Clone)]
pub struct EnhanceOutcome {
    pub enhanced: SampleBuffer,
    /// Loss before each optimiser step.
    pub trace: Vec<LossReport>,
    pub best_iter: usize,
    pub best: LossReport,
    pub params: PoleParams,
    pub stop: StopReason,
}

/// Fit pole parameters on the distorted excitation so the synthesis matches
/// the clean signal, and return the synthesis at the best iterate.
pub fn enhance_fit(distorted: &SampleBuffer, clean: &SampleBuffer, cfg: &EnhanceConfig) -> Result<EnhanceOutcome> {
    let inputs = prepare_fit(distorted, clean, cfg)?;
    fit_prepared(&inputs, cfg)
}

pub(crate) fn fit_prepared(inputs: &FitInputs, cfg: &EnhanceConfig) -> Result<EnhanceOutcome> {
    let mut params = inputs.init.clone();
    let mut flat = params.to_flat();
    let mut opt = Optimizer::new(cfg.optimizer, cfg.lr, flat.len());
    let mut trace = Vec::with_capacity(cfg.iters);
    let mut best: Option<(usize, LossReport, PoleParams)> = None;
    let mut above = 0usize;
    let mut stop = StopReason::Completed;
    for iter in 0..cfg.iters {
        params.set_flat(&flat);
        let (report, grad) = match composite_loss(&params, &inputs.z, &inputs.target, cfg) {
            Ok(v) => v,
            Err(e) if iter == 0 => return Err(e),
            Err(e) => {
                log::warn!("stopping at iteration {iter}: {e}");
                stop = StopReason::NonFinite;
                break;
            }
        };
        trace.push(report);
        if best.as_ref().is_none_or(|b| report.total < b.1.total) {
            best = Some((iter, report, params.clone()));
        }
        if report.total > cfg.divergence_factor * trace[0].total {
            above += 1;
            if above >= cfg.divergence_patience {
                stop = StopReason::Diverged;
                break;
            }
        } else {
            above = 0;
        }
        opt.step(&mut flat, &grad.to_flat());
    }
    let (best_iter, best, params) = best.ok_or_else(|| invalid!("no iterations were run"))?;
    let enhanced = synthesize(&params, &inputs.z, inputs.layout(), inputs.output_rate, inputs.output_len)?;
    Ok(EnhanceOutcome { enhanced, trace, best_iter, best, params, stop })
}

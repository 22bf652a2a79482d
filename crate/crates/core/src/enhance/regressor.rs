//! A single linear map from per-slot features of the distorted analysis to
//! pole parameters, trained across utterances on the composite loss.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::fit::{analyze_distorted, synthesize};
use super::{composite_loss, params_from_coefficients, prepare_fit, EnhanceConfig, FitInputs, Optimizer};
use crate::blocks::{LpCoefficients, PairingMode, PoleParams};
use crate::error::{invalid, Result};
use crate::signal::{FrameLayout, SampleBuffer};

/// Floor inside the log of the slot residual energy.
const ENERGY_FLOOR: f64 = 1e-12;

/// Per-slot features: the slot's coefficients, `ln` of its mean squared
/// excitation, and the previous slot's coefficients (zeros for slot 0).
pub fn slot_features(coeffs: &LpCoefficients, z: &[f64], layout: &FrameLayout) -> Vec<Vec<f64>> {
    let p = coeffs.order();
    let m = layout.slot_len;
    (0..coeffs.slots())
        .map(|s| {
            let mut f = Vec::with_capacity(2 * p + 1);
            f.extend_from_slice(coeffs.slot(s));
            let seg = &z[s * m..(s + 1) * m];
            let e = seg.iter().map(|v| v * v).sum::<f64>() / m as f64;
            f.push((e + ENERGY_FLOOR).ln());
            if s == 0 {
                f.extend(core::iter::repeat_n(0.0, p));
            } else {
                f.extend_from_slice(coeffs.slot(s - 1));
            }
            f
        })
        .collect()
}

pub fn feature_len(order: usize) -> usize {
    2 * order + 1
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainConfig {
    pub epochs: usize,
    pub seed: u64,
    /// Ridge penalty of the initial least-squares fit.
    pub ridge: f64,
    /// Loss weights, learning rate, optimiser, layout and pairing mode.
    pub enhance: EnhanceConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { epochs: 5, seed: 0, ridge: 1e-3, enhance: EnhanceConfig::default() }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(invalid!("epochs must be positive"));
        }
        if !(self.ridge >= 0.0 && self.ridge.is_finite()) {
            return Err(invalid!("ridge must be finite and non-negative"));
        }
        self.enhance.validate()
    }
}

/// `y = W * ((x - mean) / scale) + b`, one row of `W` per output.
/// Outputs are `[radius_raw; angle]` for the slot's parameter columns.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RegressorModel {
    pub layout: FrameLayout,
    pub mode: PairingMode,
    pub feature_mean: Vec<f64>,
    pub feature_scale: Vec<f64>,
    /// Row-major, `outputs x features`.
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub config: TrainConfig,
}

impl RegressorModel {
    /// All-zero weights with unit feature scaling; predicts `bias` everywhere.
    pub fn zeros(config: TrainConfig) -> Self {
        let layout = config.enhance.layout;
        let mode = config.enhance.pairing_mode;
        let nf = feature_len(layout.order);
        let no = 2 * mode.columns(layout.order);
        Self {
            layout,
            mode,
            feature_mean: vec![0.0; nf],
            feature_scale: vec![1.0; nf],
            weights: vec![0.0; no * nf],
            bias: vec![0.0; no],
            config,
        }
    }

    pub fn n_features(&self) -> usize {
        self.feature_mean.len()
    }

    pub fn n_outputs(&self) -> usize {
        self.bias.len()
    }

    pub fn validate(&self) -> Result<()> {
        self.layout.validate()?;
        let nf = feature_len(self.layout.order);
        let no = 2 * self.mode.columns(self.layout.order);
        if self.feature_mean.len() != nf || self.feature_scale.len() != nf {
            return Err(invalid!("model expects {} features", nf));
        }
        if self.bias.len() != no || self.weights.len() != no * nf {
            return Err(invalid!("model expects {} outputs x {} features", no, nf));
        }
        let all = self.feature_mean.iter().chain(&self.feature_scale).chain(&self.weights).chain(&self.bias);
        if all.clone().any(|v| !v.is_finite()) || self.feature_scale.iter().any(|&s| s <= 0.0) {
            return Err(invalid!("model contains non-finite values or non-positive scales"));
        }
        Ok(())
    }

    fn normalize(&self, feats: &[Vec<f64>]) -> Vec<Vec<f64>> {
        feats
            .iter()
            .map(|f| f.iter().zip(&self.feature_mean).zip(&self.feature_scale).map(|((x, m), s)| (x - m) / s).collect())
            .collect()
    }

    fn predict_normalized(&self, xs: &[Vec<f64>]) -> PoleParams {
        let nf = self.n_features();
        let c = self.mode.columns(self.layout.order);
        let mut params = PoleParams::zeros(self.mode, self.layout.order, xs.len());
        for (s, x) in xs.iter().enumerate() {
            for o in 0..2 * c {
                let row = &self.weights[o * nf..(o + 1) * nf];
                let y = self.bias[o] + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
                if o < c {
                    params.radius_raw[s * c + o] = y;
                } else {
                    params.angle[s * c + o - c] = y;
                }
            }
        }
        params
    }

    /// Pole parameters for every slot of an analysed utterance.
    pub fn predict(&self, coeffs: &LpCoefficients, z: &[f64]) -> Result<PoleParams> {
        if coeffs.order() != self.layout.order || z.len() != coeffs.slots() * self.layout.slot_len {
            return Err(invalid!("analysis does not match the model layout"));
        }
        Ok(self.predict_normalized(&self.normalize(&slot_features(coeffs, z, &self.layout))))
    }

    /// Enhance a distorted utterance without a clean reference.
    pub fn apply(&self, distorted: &SampleBuffer) -> Result<SampleBuffer> {
        self.validate()?;
        let (coeffs, z) = analyze_distorted(distorted, &self.layout)?;
        let params = self.predict(&coeffs, &z)?;
        let layout = self.layout.with_slots(coeffs.slots());
        synthesize(&params, &z, &layout, distorted.rate(), distorted.len())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TrainPair<'a> {
    pub distorted: &'a SampleBuffer,
    pub clean: &'a SampleBuffer,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: RegressorModel,
    /// Mean total loss over the training pairs before any gradient step.
    pub initial_loss: f64,
    /// Mean total loss after each epoch.
    pub epoch_losses: Vec<f64>,
}

struct Prepared {
    inputs: FitInputs,
    features: Vec<Vec<f64>>,
}

/// Initialise by a ridge fit from features to the distorted signal's own
/// pole parameters, then run Adam on the composite loss, one step per
/// utterance in a seeded random order.
pub fn train_regressor(pairs: &[TrainPair<'_>], cfg: &TrainConfig) -> Result<TrainOutcome> {
    cfg.validate()?;
    if pairs.len() < 2 {
        return Err(invalid!("training needs at least 2 pairs, got {}", pairs.len()));
    }
    let ecfg = &cfg.enhance;
    let prepared: Vec<Prepared> = pairs
        .iter()
        .map(|p| {
            let inputs = prepare_fit(p.distorted, p.clean, ecfg)?;
            let features = slot_features(&inputs.coeffs, &inputs.z, inputs.layout());
            Ok(Prepared { inputs, features })
        })
        .collect::<Result<_>>()?;

    let mut model = RegressorModel::zeros(cfg.clone());
    fit_normalization(&mut model, &prepared);
    let normalized: Vec<Vec<Vec<f64>>> = prepared.iter().map(|p| model.normalize(&p.features)).collect();
    ridge_init(&mut model, &prepared, &normalized, cfg.ridge)?;

    let mut flat = model_to_flat(&model);
    let mut opt = Optimizer::new(ecfg.optimizer, ecfg.lr, flat.len());
    let initial_loss = mean_loss(&model, &prepared, &normalized, ecfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..prepared.len()).collect();
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let g = model_gradient(&model, &prepared[i], &normalized[i], ecfg)?;
            opt.step(&mut flat, &g);
            set_model_flat(&mut model, &flat);
        }
        epoch_losses.push(mean_loss(&model, &prepared, &normalized, ecfg)?);
    }
    Ok(TrainOutcome { model, initial_loss, epoch_losses })
}

fn fit_normalization(model: &mut RegressorModel, prepared: &[Prepared]) {
    let nf = model.n_features();
    let rows = prepared.iter().flat_map(|p| p.features.iter());
    let n = prepared.iter().map(|p| p.features.len()).sum::<usize>() as f64;
    let mut mean = vec![0.0; nf];
    for f in rows.clone() {
        for (m, v) in mean.iter_mut().zip(f) {
            *m += v / n;
        }
    }
    let mut var = vec![0.0; nf];
    for f in rows {
        for ((s, v), m) in var.iter_mut().zip(f).zip(&mean) {
            *s += (v - m) * (v - m) / n;
        }
    }
    model.feature_mean = mean;
    // constant features (the zero padding of slot 0 aside) keep unit scale
    model.feature_scale = var.iter().map(|&v| if v > 1e-18 { v.sqrt() } else { 1.0 }).collect();
}

fn ridge_init(model: &mut RegressorModel, prepared: &[Prepared], xs: &[Vec<Vec<f64>>], ridge: f64) -> Result<()> {
    // augmented design [x, 1]; bias is not penalised
    let nf = model.n_features();
    let na = nf + 1;
    let no = model.n_outputs();
    let c = no / 2;
    let mut ata = vec![0.0; na * na];
    let mut aty = vec![0.0; na * no];
    for (p, x) in prepared.iter().zip(xs) {
        let init = &p.inputs.init;
        for (s, row) in x.iter().enumerate() {
            let mut a = row.clone();
            a.push(1.0);
            for i in 0..na {
                for j in 0..na {
                    ata[i * na + j] += a[i] * a[j];
                }
                for o in 0..no {
                    let y = if o < c { init.radius_raw[s * c + o] } else { init.angle[s * c + o - c] };
                    aty[i * no + o] += a[i] * y;
                }
            }
        }
    }
    for i in 0..nf {
        ata[i * na + i] += ridge;
    }
    // tiny jitter keeps the factorisation alive for collinear features
    let trace = (0..na).map(|i| ata[i * na + i]).sum::<f64>() / na as f64;
    for i in 0..na {
        ata[i * na + i] += 1e-12 * trace.max(1.0);
    }
    let l = cholesky(&ata, na).ok_or_else(|| invalid!("ridge system is not positive definite"))?;
    for o in 0..no {
        let rhs: Vec<f64> = (0..na).map(|i| aty[i * no + o]).collect();
        let w = cholesky_solve(&l, na, &rhs);
        model.weights[o * nf..(o + 1) * nf].copy_from_slice(&w[..nf]);
        model.bias[o] = w[nf];
    }
    Ok(())
}

fn cholesky(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let s = a[i * n + j] - (0..j).map(|k| l[i * n + k] * l[j * n + k]).sum::<f64>();
            if i == j {
                if s <= 0.0 {
                    return None;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Some(l)
}

fn cholesky_solve(l: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; n];
    for i in 0..n {
        y[i] = (b[i] - (0..i).map(|k| l[i * n + k] * y[k]).sum::<f64>()) / l[i * n + i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        x[i] = (y[i] - (i + 1..n).map(|k| l[k * n + i] * x[k]).sum::<f64>()) / l[i * n + i];
    }
    x
}

fn model_to_flat(model: &RegressorModel) -> Vec<f64> {
    let mut v = model.weights.clone();
    v.extend_from_slice(&model.bias);
    v
}

fn set_model_flat(model: &mut RegressorModel, flat: &[f64]) {
    let n = model.weights.len();
    model.weights.copy_from_slice(&flat[..n]);
    model.bias.copy_from_slice(&flat[n..]);
}

fn mean_loss(model: &RegressorModel, prepared: &[Prepared], xs: &[Vec<Vec<f64>>], cfg: &EnhanceConfig) -> Result<f64> {
    let mut total = 0.0;
    for (p, x) in prepared.iter().zip(xs) {
        let params = model.predict_normalized(x);
        total += composite_loss(&params, &p.inputs.z, &p.inputs.target, cfg)?.0.total;
    }
    Ok(total / prepared.len() as f64)
}

/// Gradient of one utterance's total loss with respect to `[weights, bias]`.
fn model_gradient(model: &RegressorModel, p: &Prepared, x: &[Vec<f64>], cfg: &EnhanceConfig) -> Result<Vec<f64>> {
    let params = model.predict_normalized(x);
    let (_, grad) = composite_loss(&params, &p.inputs.z, &p.inputs.target, cfg)?;
    let nf = model.n_features();
    let no = model.n_outputs();
    let c = no / 2;
    let mut g = vec![0.0; no * nf + no];
    for (s, row) in x.iter().enumerate() {
        for o in 0..no {
            let dy = if o < c { grad.radius_raw[s * c + o] } else { grad.angle[s * c + o - c] };
            for (gw, v) in g[o * nf..(o + 1) * nf].iter_mut().zip(row) {
                *gw += dy * v;
            }
            g[no * nf + o] += dy;
        }
    }
    Ok(g)
}

/// Loss of the distorted signal's own analysis, the baseline a trained model
/// should beat.
pub fn distorted_baseline_loss(pair: TrainPair<'_>, cfg: &EnhanceConfig) -> Result<f64> {
    let inputs = prepare_fit(pair.distorted, pair.clean, cfg)?;
    let params = params_from_coefficients(&inputs.coeffs, cfg.pairing_mode)?;
    Ok(composite_loss(&params, &inputs.z, &inputs.target, cfg)?.0.total)
}

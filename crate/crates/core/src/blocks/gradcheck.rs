//! Central-difference verification of the block adjoints.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    lp2wav, lp2wav_adjoint, params_adjoint, poles2lp, poles2lp_adjoint, poles_from_params, ComplexCoeffs,
    LpCoefficients, PairingMode, PoleParams,
};
use crate::enhance::{composite_loss, EnhanceConfig, LossTarget, WORK_RATE};
use crate::signal::mel::MelConfig;
use crate::signal::{FrameLayout, SampleBuffer};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradCheckOp {
    /// params -> poles -> complex coefficients
    Poles2Lp,
    /// (A, Z) -> waveform
    Lp2Wav,
    /// params -> poles -> coefficients -> waveform -> composite loss
    Composed,
}

impl GradCheckOp {
    pub const ALL: [GradCheckOp; 3] = [GradCheckOp::Poles2Lp, GradCheckOp::Lp2Wav, GradCheckOp::Composed];

    pub fn name(self) -> &'static str {
        match self {
            GradCheckOp::Poles2Lp => "poles2lp",
            GradCheckOp::Lp2Wav => "lp2wav",
            GradCheckOp::Composed => "composed",
        }
    }

    /// Acceptance threshold on the reported error.
    pub fn threshold(self) -> f64 {
        match self {
            GradCheckOp::Composed => 1e-4,
            _ => 1e-5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradCheckSetup {
    pub layout: FrameLayout,
    pub mode: PairingMode,
    pub seed: u64,
    pub eps: f64,
    /// Coordinates probed; all of them when the input is smaller.
    pub max_coordinates: usize,
}

impl GradCheckSetup {
    pub fn new(layout: FrameLayout, seed: u64) -> Self {
        Self { layout, mode: PairingMode::Free, seed, eps: 1e-6, max_coordinates: 64 }
    }
}

fn max_error(analytic: &[f64], x: &[f64], f: impl Fn(&[f64]) -> f64, eps: f64, rng: &mut ChaCha8Rng, n: usize) -> f64 {
    let idx: Vec<usize> =
        if x.len() <= n { (0..x.len()).collect() } else { sample(rng, x.len(), n).into_iter().collect() };
    let mut worst = 0.0f64;
    let mut probe = x.to_vec();
    for i in idx {
        probe[i] = x[i] + eps;
        let up = f(&probe);
        probe[i] = x[i] - eps;
        let down = f(&probe);
        probe[i] = x[i];
        let numeric = (up - down) / (2.0 * eps);
        worst = worst.max((analytic[i] - numeric).abs() / numeric.abs().max(1.0));
    }
    worst
}

fn random_params(rng: &mut ChaCha8Rng, mode: PairingMode, order: usize, slots: usize) -> PoleParams {
    let mut p = PoleParams::zeros(mode, order, slots);
    for v in p.radius_raw.iter_mut() {
        *v = rng.random_range(-1.5..1.5);
    }
    for v in p.angle.iter_mut() {
        *v = rng.random_range(-3.0..3.0);
    }
    p
}

fn coeffs_of(params: &PoleParams) -> ComplexCoeffs {
    poles2lp(&poles_from_params(params))
}

/// Maximum over probed coordinates of `|analytic - numeric| / max(1, |numeric|)`.
pub fn grad_check(op: GradCheckOp, setup: &GradCheckSetup) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(setup.seed);
    let layout = setup.layout;
    let (order, slots) = (layout.order, layout.slots);
    match op {
        GradCheckOp::Poles2Lp => {
            let params = random_params(&mut rng, setup.mode, order, slots);
            let dir: Vec<Complex64> = (0..order * slots)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let objective = |flat: &[f64]| {
                let mut p = params.clone();
                p.set_flat(flat);
                coeffs_of(&p).data.iter().zip(&dir).map(|(c, u)| c.re * u.re + c.im * u.im).sum::<f64>()
            };
            let poles = poles_from_params(&params);
            let g = ComplexCoeffs { order, slots, data: dir.clone() };
            let analytic = params_adjoint(&params, &poles2lp_adjoint(&poles, &g)).to_flat();
            max_error(&analytic, &params.to_flat(), objective, setup.eps, &mut rng, setup.max_coordinates)
        }
        GradCheckOp::Lp2Wav => {
            let params = random_params(&mut rng, PairingMode::Conjugate, order, slots);
            let a = coeffs_of(&params).real();
            let n = layout.frame_len();
            let z: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let dir: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let na = a.as_slice().len();
            let mut flat = a.as_slice().to_vec();
            flat.extend_from_slice(&z);
            let objective = |flat: &[f64]| {
                let a = LpCoefficients::from_slot_major(order, slots, flat[..na].to_vec()).unwrap();
                let x = lp2wav(&a, &flat[na..], &layout).unwrap();
                x.iter().zip(&dir).map(|(a, b)| a * b).sum::<f64>()
            };
            let x = lp2wav(&a, &z, &layout).unwrap();
            let g = lp2wav_adjoint(&a, &x, &dir, &layout).unwrap();
            let mut analytic = g.coeffs.as_slice().to_vec();
            analytic.extend_from_slice(&g.excitation);
            max_error(&analytic, &flat, objective, setup.eps, &mut rng, setup.max_coordinates)
        }
        GradCheckOp::Composed => {
            let params = random_params(&mut rng, setup.mode, order, slots);
            let n = layout.frame_len();
            let z: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let clean: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let clean = SampleBuffer::new(clean, WORK_RATE).unwrap();
            let target = LossTarget::with_mel(&clean, &layout, composed_mel()).unwrap();
            let cfg = EnhanceConfig { layout, pairing_mode: setup.mode, ..EnhanceConfig::default() };
            let objective = |flat: &[f64]| {
                let mut p = params.clone();
                p.set_flat(flat);
                composite_loss(&p, &z, &target, &cfg).unwrap().0.total
            };
            let analytic = composite_loss(&params, &z, &target, &cfg).unwrap().1.to_flat();
            max_error(&analytic, &params.to_flat(), objective, setup.eps, &mut rng, setup.max_coordinates)
        }
    }
}

/// Mel analysis small enough for frames of a dozen samples; upsampled 2:1
/// like the full configuration.
fn composed_mel() -> MelConfig {
    MelConfig {
        rate: 2 * WORK_RATE,
        fft_size: 16,
        win_len: 16,
        hop: 4,
        n_mels: 4,
        fmin: 0.0,
        fmax: WORK_RATE as f64,
        floor: 1e-10,
    }
}

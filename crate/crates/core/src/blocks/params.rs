use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::error::{invalid, Result};

/// Margin keeping every pole strictly inside the unit circle:
/// `|r| <= 1 - STABILITY_MARGIN`.
pub const STABILITY_MARGIN: f64 = 1e-3;

/// How the per-slot parameters become poles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum PairingMode {
    /// `order / 2` conjugate pairs plus one real pole `rho * cos(theta)` when
    /// the order is odd. The expanded coefficients are exactly real.
    #[default]
    Conjugate,
    /// `order` independent complex poles; coefficients may be complex.
    Free,
}

impl PairingMode {
    /// Parameter columns per slot for an LPC order.
    pub fn columns(self, order: usize) -> usize {
        match self {
            PairingMode::Conjugate => order.div_ceil(2),
            PairingMode::Free => order,
        }
    }
}

/// Unconstrained pole parameters, `slots x columns` each, slot-major.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PoleParams {
    pub mode: PairingMode,
    pub order: usize,
    pub slots: usize,
    pub radius_raw: Vec<f64>,
    pub angle: Vec<f64>,
}

impl PoleParams {
    pub fn zeros(mode: PairingMode, order: usize, slots: usize) -> Self {
        let n = mode.columns(order) * slots;
        Self { mode, order, slots, radius_raw: vec![0.0; n], angle: vec![0.0; n] }
    }

    pub fn columns(&self) -> usize {
        self.mode.columns(self.order)
    }

    pub fn len(&self) -> usize {
        self.radius_raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radius_raw.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.columns() * self.slots;
        if self.radius_raw.len() != n || self.angle.len() != n {
            return Err(invalid!("pole parameters must have {} entries per field", n));
        }
        if self.radius_raw.iter().chain(&self.angle).any(|v| !v.is_finite()) {
            return Err(invalid!("pole parameters must be finite"));
        }
        Ok(())
    }

    /// Flattened `[radius_raw..., angle...]` view used by optimisers.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = self.radius_raw.clone();
        v.extend_from_slice(&self.angle);
        v
    }

    pub fn set_flat(&mut self, flat: &[f64]) {
        let n = self.radius_raw.len();
        self.radius_raw.copy_from_slice(&flat[..n]);
        self.angle.copy_from_slice(&flat[n..2 * n]);
    }
}

/// Gradient with respect to [`PoleParams`], same layout.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleParamsGrad {
    pub radius_raw: Vec<f64>,
    pub angle: Vec<f64>,
}

impl PoleParamsGrad {
    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = self.radius_raw.clone();
        v.extend_from_slice(&self.angle);
        v
    }
}

/// Poles per slot, `slots x order`, slot-major. In conjugate mode the
/// layout within a slot is `[r_1, conj r_1, r_2, conj r_2, ..., real]`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PoleSet {
    pub order: usize,
    pub slots: usize,
    pub poles: Vec<Complex64>,
}

impl PoleSet {
    pub fn slot(&self, slot: usize) -> &[Complex64] {
        &self.poles[slot * self.order..(slot + 1) * self.order]
    }

    pub fn max_radius(&self) -> f64 {
        self.poles.iter().map(|p| p.norm()).fold(0.0, f64::max)
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn radius(raw: f64) -> f64 {
    (1.0 - STABILITY_MARGIN) * sigmoid(raw)
}

fn radius_derivative(raw: f64) -> f64 {
    let s = sigmoid(raw);
    (1.0 - STABILITY_MARGIN) * s * (1.0 - s)
}

/// `radius = (1 - margin) * sigmoid(radius_raw)`, angle passed through.
pub fn poles_from_params(params: &PoleParams) -> PoleSet {
    let order = params.order;
    let cols = params.columns();
    let mut poles = Vec::with_capacity(order * params.slots);
    for slot in 0..params.slots {
        for c in 0..cols {
            let i = slot * cols + c;
            let rho = radius(params.radius_raw[i]);
            let theta = params.angle[i];
            let pole = Complex64::new(rho * theta.cos(), rho * theta.sin());
            match params.mode {
                PairingMode::Free => poles.push(pole),
                PairingMode::Conjugate => {
                    if 2 * c + 1 < order {
                        poles.push(pole);
                        poles.push(pole.conj());
                    } else {
                        poles.push(Complex64::new(pole.re, 0.0));
                    }
                }
            }
        }
    }
    PoleSet { order, slots: params.slots, poles }
}

/// Pull a gradient on the poles (`dL/dRe r + i dL/dIm r`) back onto the
/// parameters.
pub fn params_adjoint(params: &PoleParams, grad_poles: &[Complex64]) -> PoleParamsGrad {
    let order = params.order;
    let cols = params.columns();
    let mut g_raw = vec![0.0; params.len()];
    let mut g_angle = vec![0.0; params.len()];
    for slot in 0..params.slots {
        let gp = &grad_poles[slot * order..(slot + 1) * order];
        for c in 0..cols {
            let i = slot * cols + c;
            let raw = params.radius_raw[i];
            let rho = radius(raw);
            let (sin, cos) = params.angle[i].sin_cos();
            // Derivatives of (Re, Im) of rho e^{i theta}.
            let (d_rho, d_theta) = match params.mode {
                PairingMode::Free => {
                    let g = gp[c];
                    (g.re * cos + g.im * sin, rho * (-g.re * sin + g.im * cos))
                }
                PairingMode::Conjugate if 2 * c + 1 < order => {
                    let (g, h) = (gp[2 * c], gp[2 * c + 1]);
                    // h belongs to conj(r): Re same, Im negated.
                    let re = g.re + h.re;
                    let im = g.im - h.im;
                    (re * cos + im * sin, rho * (-re * sin + im * cos))
                }
                PairingMode::Conjugate => {
                    let g = gp[2 * c];
                    (g.re * cos, -g.re * rho * sin)
                }
            };
            g_raw[i] = d_rho * radius_derivative(raw);
            g_angle[i] = d_theta;
        }
    }
    PoleParamsGrad { radius_raw: g_raw, angle: g_angle }
}

/// Inverse of the radius map, clamped into the open interval it covers.
pub fn radius_to_raw(rho: f64) -> f64 {
    let s = (rho / (1.0 - STABILITY_MARGIN)).clamp(1e-9, 1.0 - 1e-9);
    (s / (1.0 - s)).ln()
}

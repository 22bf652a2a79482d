use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Float;

use super::StlCurve;
use crate::error::{invalid, Result};
use crate::signal::fft::Fft;
use crate::signal::window::hann_interior;
use crate::signal::SampleBuffer;

/// Realized magnitude must track the target this closely (dB) wherever the
/// target loss is at most [`FIR_CHECK_MAX_LOSS_DB`].
pub const FIR_TOLERANCE_DB: f64 = 1.0;
const FIR_CHECK_MAX_LOSS_DB: f64 = 60.0;
const MIN_TAPS: usize = 63;

/// Linear-phase FIR with symmetric taps and group delay `(len - 1) / 2`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FirChannel {
    taps: Vec<f64>,
    rate: u32,
}

impl FirChannel {
    pub fn new(taps: Vec<f64>, rate: u32) -> Result<Self> {
        let n = taps.len();
        if n % 2 == 0 || taps.iter().any(|t| !t.is_finite()) {
            return Err(invalid!("taps must be finite and of odd length, got {n}"));
        }
        if (0..n / 2).any(|i| (taps[i] - taps[n - 1 - i]).abs() > 1e-12) {
            return Err(invalid!("taps are not symmetric"));
        }
        Ok(Self { taps, rate })
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn rate(&self) -> u32 {
        self.rate
    }

    pub fn delay(&self) -> usize {
        (self.taps.len() - 1) / 2
    }

    /// `|H(f)|` by direct evaluation of the transfer function.
    pub fn magnitude(&self, f: f64) -> f64 {
        let w = 2.0 * PI * f / self.rate as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (n, t) in self.taps.iter().enumerate() {
            acc += Complex64::from_polar(*t, -w * n as f64);
        }
        acc.norm()
    }

    /// Realized loss in dB at `f`.
    pub fn loss_db(&self, f: f64) -> f64 {
        -20.0 * self.magnitude(f).log10()
    }

    /// Largest |realized - target| loss over the curve's grid points whose
    /// target loss is at most 60 dB.
    pub fn worst_deviation_db(&self, curve: &StlCurve) -> f64 {
        curve
            .grid()
            .iter()
            .zip(curve.loss_db())
            .filter(|(_, l)| **l <= FIR_CHECK_MAX_LOSS_DB)
            .map(|(f, l)| (self.loss_db(*f) - l).abs())
            .fold(0.0, f64::max)
    }

    /// Filter with the group delay removed, so the output lines up with the
    /// input sample for sample. Output length equals input length.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        let d = self.delay();
        let t = self.taps.len();
        let mut y = vec![0.0; n];
        for (k, out) in y.iter_mut().enumerate() {
            // x index = k + d - j must lie in [0, n)
            let j_lo = (k + d + 1).saturating_sub(n);
            let j_hi = (k + d).min(t - 1);
            let mut acc = 0.0;
            for j in j_lo..=j_hi {
                acc += self.taps[j] * x[k + d - j];
            }
            *out = acc;
        }
        y
    }

    pub fn apply_buffer(&self, x: &SampleBuffer) -> Result<SampleBuffer> {
        if x.rate() != self.rate {
            return Err(invalid!("channel designed for {} Hz, signal is {} Hz", self.rate, x.rate()));
        }
        Ok(x.with_samples(self.apply(x.samples())))
    }
}

/// Frequency-sampling design: the target magnitude `10^(-loss/20)` is
/// sampled on a dense grid, inverse transformed to a zero-phase response,
/// truncated to `n_taps` around its centre and Hann windowed.
///
/// Logs a warning when the realized response misses the target by more
/// than [`FIR_TOLERANCE_DB`] anywhere the target loss is at most 60 dB.
pub fn design_fir(curve: &StlCurve, n_taps: usize, rate: u32) -> Result<FirChannel> {
    if n_taps % 2 == 0 || n_taps < MIN_TAPS {
        return Err(invalid!("n_taps must be odd and at least {MIN_TAPS}, got {n_taps}"));
    }
    curve.validate_for(rate)?;
    let n = (8 * n_taps).next_power_of_two();
    let bin_hz = rate as f64 / n as f64;
    let mut spectrum = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..=n / 2 {
        let m = 10f64.powf(-curve.loss_at(k as f64 * bin_hz) / 20.0);
        spectrum[k] = Complex64::new(m, 0.0);
        if k > 0 && k < n / 2 {
            spectrum[n - k] = Complex64::new(m, 0.0);
        }
    }
    Fft::new(n).inverse_unscaled(&mut spectrum);
    let half = (n_taps - 1) / 2;
    let window = hann_interior(n_taps);
    let mut taps: Vec<f64> = (0..n_taps)
        .map(|j| {
            let lag = (j + n - half) % n;
            spectrum[lag].re / n as f64 * window[j]
        })
        .collect();
    for i in 0..half {
        let m = 0.5 * (taps[i] + taps[n_taps - 1 - i]);
        taps[i] = m;
        taps[n_taps - 1 - i] = m;
    }
    let channel = FirChannel::new(taps, rate)?;
    let worst = channel.worst_deviation_db(curve);
    if worst > FIR_TOLERANCE_DB {
        log::warn!("FIR with {n_taps} taps misses the loss curve by up to {worst:.2} dB");
    }
    Ok(channel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{mass_law_loss_db, ChannelPreset, CONCRETE_5CM_DENSITY};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn identity_is_delayed_delta() {
        let fir = design_fir(&StlCurve::flat(0.0, 22050).unwrap(), 63, 22050).unwrap();
        let centre = fir.delay();
        for (i, t) in fir.taps().iter().enumerate() {
            let want = if i == centre { 1.0 } else { 0.0 };
            assert!((t - want).abs() < 1e-9, "tap {i}: {t}");
        }
        let x: Vec<f64> = (0..500).map(|i| (i as f64 * 0.37).sin()).collect();
        let y = fir.apply(&x);
        assert!(x.iter().zip(&y).all(|(a, b)| (a - b).abs() < 1e-6));
    }

    #[test]
    fn flat_20db_gain_by_periodogram() {
        let fir = design_fir(&StlCurve::flat(20.0, 22050).unwrap(), 127, 22050).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x: Vec<f64> = (0..1 << 16).map(|_| StandardNormal.sample(&mut rng)).collect();
        let y = fir.apply(&x);
        let trim = 200..x.len() - 200;
        let px: f64 = x[trim.clone()].iter().map(|v| v * v).sum();
        let py: f64 = y[trim].iter().map(|v| v * v).sum();
        let gain_db = 10.0 * (py / px).log10();
        assert!((gain_db + 20.0).abs() < 1.0, "{gain_db}");
    }

    #[test]
    fn concrete_preset_matches_mass_law() {
        let curve = ChannelPreset::Concrete5cm.curve(22050).unwrap();
        let fir = design_fir(&curve, 513, 22050).unwrap();
        for f in [250.0, 1000.0, 4000.0] {
            let got = fir.loss_db(f);
            let want = mass_law_loss_db(f, CONCRETE_5CM_DENSITY);
            assert!((got - want).abs() < 1.0, "{f} Hz: {got} vs {want}");
        }
        assert!(fir.worst_deviation_db(&curve) < FIR_TOLERANCE_DB);
    }

    #[test]
    fn magnitude_decreases_where_loss_increases() {
        let curve = ChannelPreset::Concrete5cm.curve(22050).unwrap();
        let fir = design_fir(&curve, 513, 22050).unwrap();
        let mut prev = f64::INFINITY;
        for f in curve.grid().iter().filter(|f| **f > 100.0 && **f < 8000.0) {
            let m = fir.magnitude(*f);
            assert!(m < prev * 1.01, "{f}");
            prev = m;
        }
    }

    #[test]
    fn taps_validation() {
        assert!(design_fir(&StlCurve::flat(0.0, 22050).unwrap(), 64, 22050).is_err());
        assert!(design_fir(&StlCurve::flat(0.0, 22050).unwrap(), 31, 22050).is_err());
        assert!(FirChannel::new(vec![1.0, 2.0, 3.0], 8000).is_err());
    }
}

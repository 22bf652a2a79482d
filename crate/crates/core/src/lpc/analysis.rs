use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use super::levinson_durbin;
use crate::blocks::{lp2wav, LpCoefficients};
use crate::error::{invalid, Error, Result};
use crate::signal::window::hann_interior;
use crate::signal::{FrameLayout, SampleBuffer};

/// Gaussian lag taper `w[k] = LAG_WINDOW_EXPANSION^(-k^2)` applied to the
/// autocorrelation before the Levinson-Durbin solve.
pub const LAG_WINDOW_EXPANSION: f64 = 1.0001;

/// Biased autocorrelation `r[k] = sum_n x[n] x[n + k]` for `k = 0..=max_lag`.
pub fn autocorrelation(frame: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    if max_lag >= frame.len() {
        return Err(invalid!("max lag {} must be shorter than the frame ({})", max_lag, frame.len()));
    }
    Ok((0..=max_lag).map(|k| frame[k..].iter().zip(frame).map(|(a, b)| a * b).sum()).collect())
}

pub fn lag_window(r: &mut [f64]) {
    let ln = LAG_WINDOW_EXPANSION.ln();
    for (k, v) in r.iter_mut().enumerate().skip(1) {
        *v *= (-ln * (k * k) as f64).exp();
    }
}

/// One analysis frame: LP coefficients per slot plus the residual that
/// drives the all-pole synthesis filter.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LpcFrame {
    pub coeffs: LpCoefficients,
    pub excitation: Vec<f64>,
    pub layout: FrameLayout,
    pub gain: f64,
    pub rate: u32,
}

impl LpcFrame {
    pub fn validate(&self) -> Result<()> {
        self.layout.validate()?;
        if self.coeffs.order() != self.layout.order || self.coeffs.slots() != self.layout.slots {
            return Err(invalid!("coefficient matrix does not match the layout"));
        }
        if self.excitation.len() != self.layout.frame_len() {
            return Err(invalid!("excitation length does not match the layout"));
        }
        if !self.gain.is_finite() || self.excitation.iter().any(|v| !v.is_finite()) {
            return Err(invalid!("frame contains non-finite values"));
        }
        Ok(())
    }

    fn scaled_excitation(&self) -> Vec<f64> {
        if self.gain == 1.0 {
            self.excitation.clone()
        } else {
            self.excitation.iter().map(|z| self.gain * z).collect()
        }
    }
}

/// Per-slot coefficients for the whole (zero-padded) signal.
fn slot_coefficients(x: &[f64], layout: &FrameLayout, slots: usize) -> LpCoefficients {
    let (m, p) = (layout.slot_len, layout.order);
    let win_len = m + 2 * p;
    let taper = hann_interior(win_len);
    let mut coeffs = LpCoefficients::zeros(p, slots);
    let mut seg = vec![0.0; win_len];
    for slot in 0..slots {
        let start = (slot * m) as isize - p as isize;
        for (j, s) in seg.iter_mut().enumerate() {
            let idx = start + j as isize;
            let v = if idx >= 0 && (idx as usize) < x.len() { x[idx as usize] } else { 0.0 };
            *s = v * taper[j];
        }
        let mut r = autocorrelation(&seg, p).expect("window longer than order");
        lag_window(&mut r);
        if let Ok(l) = levinson_durbin(&r, p) {
            coeffs.slot_mut(slot).copy_from_slice(&l.coeffs);
        }
    }
    coeffs
}

/// Inverse-filter `x` with time-varying coefficients; zero history before
/// the first sample.
fn residual(x: &[f64], coeffs: &LpCoefficients, slot_len: usize) -> Vec<f64> {
    (0..x.len())
        .map(|k| {
            let a = coeffs.slot(k / slot_len);
            let mut pred = 0.0;
            for (i, ai) in a.iter().enumerate() {
                if i < k {
                    pred += ai * x[k - 1 - i];
                }
            }
            x[k] - pred
        })
        .collect()
}

/// Split the signal into frames of `slot_len * slots` samples (the last one
/// zero-padded) and estimate per-slot LP coefficients and the residual.
///
/// Each slot's coefficients come from a Hann-tapered window covering the
/// slot and `order` samples on either side.
pub fn lpc_analyze(buffer: &SampleBuffer, layout: &FrameLayout) -> Result<Vec<LpcFrame>> {
    layout.validate()?;
    let frame_len = layout.frame_len();
    if buffer.len() < frame_len {
        return Err(invalid!("signal has {} samples, one frame needs {}", buffer.len(), frame_len));
    }
    let frames = buffer.len().div_ceil(frame_len);
    let mut x = buffer.samples().to_vec();
    x.resize(frames * frame_len, 0.0);
    let coeffs = slot_coefficients(buffer.samples(), layout, frames * layout.slots);
    let z = residual(&x, &coeffs, layout.slot_len);
    Ok((0..frames)
        .map(|f| {
            let slots = f * layout.slots..(f + 1) * layout.slots;
            let mut c = LpCoefficients::zeros(layout.order, layout.slots);
            for (i, s) in slots.enumerate() {
                c.slot_mut(i).copy_from_slice(coeffs.slot(s));
            }
            LpcFrame {
                coeffs: c,
                excitation: z[f * frame_len..(f + 1) * frame_len].to_vec(),
                layout: *layout,
                gain: 1.0,
                rate: buffer.rate(),
            }
        })
        .collect())
}

/// All-pole synthesis of one frame from zero initial state; the same
/// recursion as [`lp2wav`].
pub fn lpc_synthesize(frame: &LpcFrame) -> Result<SampleBuffer> {
    frame.validate()?;
    let x = lp2wav(&frame.coeffs, &frame.scaled_excitation(), &frame.layout)?;
    Ok(SampleBuffer::from_parts(x, frame.rate))
}

/// Synthesize consecutive frames, carrying the last `order` samples of
/// each frame into the next.
pub fn lpc_synthesize_frames(frames: &[LpcFrame]) -> Result<SampleBuffer> {
    let Some(first) = frames.first() else {
        return Err(invalid!("no frames to synthesize"));
    };
    let mut out: Vec<f64> = Vec::with_capacity(frames.len() * first.layout.frame_len());
    for (i, frame) in frames.iter().enumerate() {
        frame.validate()?;
        let history = &out[out.len().saturating_sub(frame.layout.order)..];
        let x = crate::blocks::lp2wav_with_history(&frame.coeffs, &frame.scaled_excitation(), &frame.layout, history)
            .map_err(|e| match e {
                Error::Unstable { index } => Error::Unstable { index: index + i * frame.layout.frame_len() },
                other => other,
            })?;
        out.extend(x);
    }
    Ok(SampleBuffer::from_parts(out, first.rate))
}

/// Analyze then synthesize, trimmed back to the input length.
pub fn resynthesize(buffer: &SampleBuffer, layout: &FrameLayout) -> Result<SampleBuffer> {
    let frames = lpc_analyze(buffer, layout)?;
    Ok(lpc_synthesize_frames(&frames)?.truncated(buffer.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::lp2wav_with_history;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn autocorrelation_examples() {
        assert_eq!(autocorrelation(&[1.0, 0.0, 0.0, 0.0], 2).unwrap(), vec![1.0, 0.0, 0.0]);
        assert_eq!(autocorrelation(&[1.0; 4], 3).unwrap(), vec![4.0, 3.0, 2.0, 1.0]);
        assert!(autocorrelation(&[1.0; 4], 4).is_err());
    }

    #[test]
    fn white_noise_autocorrelation() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 20000;
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let r = autocorrelation(&x, 10).unwrap();
        let variance = 1.0 / 3.0;
        assert!((r[0] / n as f64 - variance).abs() < 0.01);
        for k in 1..=10 {
            assert!(r[k].abs() / r[0] < 0.03);
            assert!(r[0] >= r[k].abs());
        }
    }

    #[test]
    fn silence_gives_zero_frames() {
        let layout = FrameLayout::new(8, 4, 3).unwrap();
        let buf = SampleBuffer::zeros(64, 8000).unwrap();
        for f in lpc_analyze(&buf, &layout).unwrap() {
            assert!(f.coeffs.as_slice().iter().all(|a| *a == 0.0));
            assert!(f.excitation.iter().all(|z| *z == 0.0));
        }
    }

    #[test]
    fn too_short_is_rejected() {
        let layout = FrameLayout::new(8, 4, 3).unwrap();
        assert!(lpc_analyze(&SampleBuffer::zeros(31, 8000).unwrap(), &layout).is_err());
    }

    #[test]
    fn round_trip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let layout = FrameLayout::new(46, 6, 11).unwrap();
        let n = 46 * 6 * 3 + 17;
        let x: Vec<f64> = (0..n)
            .map(|i| 0.4 * (0.07 * i as f64).sin() + 0.2 * (0.31 * i as f64).sin() + 0.05 * rng.random_range(-1.0..1.0))
            .collect();
        let buf = SampleBuffer::new(x.clone(), 11025).unwrap();
        let y = resynthesize(&buf, &layout).unwrap();
        let err: f64 = x.iter().zip(y.samples()).map(|(a, b)| (a - b).powi(2)).sum();
        let energy: f64 = x.iter().map(|a| a * a).sum();
        assert!((err / energy).sqrt() < 1e-10);
    }

    #[test]
    fn synthesis_is_the_lp2wav_recursion() {
        let layout = FrameLayout::new(10, 3, 4).unwrap();
        let x: Vec<f64> = (0..30).map(|i| (0.5 * i as f64).sin() * (0.03 * i as f64).cos()).collect();
        let frame = lpc_analyze(&SampleBuffer::new(x, 8000).unwrap(), &layout).unwrap().remove(0);
        let a = lpc_synthesize(&frame).unwrap();
        let b = lp2wav(&frame.coeffs, &frame.excitation, &layout).unwrap();
        assert_eq!(a.samples(), &b[..]);
        assert_eq!(lp2wav_with_history(&frame.coeffs, &frame.excitation, &layout, &[]).unwrap(), b);
    }

    #[test]
    fn gain_scales_the_excitation() {
        let layout = FrameLayout::new(4, 2, 1).unwrap();
        let frame = LpcFrame {
            coeffs: LpCoefficients::zeros(1, 2),
            excitation: vec![1.0, 2.0, 0.0, -1.0, 0.5, 0.0, 0.0, 3.0],
            layout,
            gain: 2.0,
            rate: 8000,
        };
        assert_eq!(lpc_synthesize(&frame).unwrap().samples(), &[2.0, 4.0, 0.0, -2.0, 1.0, 0.0, 0.0, 6.0]);
    }

    #[test]
    fn geometric_synthesis() {
        let layout = FrameLayout::new(6, 1, 1).unwrap();
        let frame = LpcFrame {
            coeffs: LpCoefficients::repeated(&[0.5], 1),
            excitation: vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            layout,
            gain: 1.0,
            rate: 8000,
        };
        assert_eq!(lpc_synthesize(&frame).unwrap().samples(), &[1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125]);
    }

    #[test]
    fn recovers_known_ar2_per_slot() {
        // Impulse-train excitation with a period long enough for the
        // impulse response to die out, so every slot's autocorrelation is
        // that of the AR process up to edge effects.
        let layout = FrameLayout::new(8000, 3, 2).unwrap();
        let truths = [[1.272_792_206_135_785_6, -0.81], [0.6, -0.5], [-0.4, 0.3]];
        let mut data = Vec::new();
        for t in &truths {
            data.extend_from_slice(t);
        }
        let a = LpCoefficients::from_slot_major(2, 3, data).unwrap();
        let mut z = vec![0.0; layout.frame_len()];
        for k in (0..z.len()).step_by(200) {
            z[k] = 1.0;
        }
        let x = lp2wav(&a, &z, &layout).unwrap();
        let frame = lpc_analyze(&SampleBuffer::new(x, 11025).unwrap(), &layout).unwrap().remove(0);
        for (slot, t) in truths.iter().enumerate() {
            for p in 0..2 {
                let got = frame.coeffs.get(p, slot);
                assert!((got - t[p]).abs() < 1e-3, "slot {slot} a{}: {got} vs {}", p + 1, t[p]);
            }
        }
        // Away from slot edges the residual is the impulse train.
        let z_err = frame.excitation[400..7600].iter().zip(&z[400..7600]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(z_err < 1e-2, "{z_err}");
    }
}

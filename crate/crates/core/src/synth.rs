//! Synthetic two-formant vowels: a jittered glottal pulse train through two
//! resonators, with a glottal low-pass and lip-radiation differencing for a
//! speech-like spectral tilt.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::signal::SampleBuffer;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vowel {
    pub f1_hz: f64,
    pub f2_hz: f64,
    pub b1_hz: f64,
    pub b2_hz: f64,
    pub f0_hz: f64,
    pub duration_s: f64,
}

/// (F1, F2) of a few cardinal vowels, Hz.
pub const VOWEL_TARGETS: [(f64, f64); 5] = [(730.0, 1090.0), (270.0, 2290.0), (300.0, 870.0), (530.0, 1840.0), (570.0, 840.0)];

const GLOTTAL_POLE_HZ: f64 = 100.0;
const PEAK: f64 = 0.5;

fn resonator(f: f64, b: f64, rate: f64) -> (f64, f64) {
    let r = (-PI * b / rate).exp();
    (2.0 * r * (2.0 * PI * f / rate).cos(), -r * r)
}

pub fn synthesize_vowels(vowels: &[Vowel], rate: u32) -> Result<SampleBuffer> {
    let fs = rate as f64;
    for v in vowels {
        let ok = [v.f1_hz, v.f2_hz, v.f0_hz].iter().all(|f| *f > 0.0 && *f < fs / 2.0)
            && v.b1_hz > 0.0
            && v.b2_hz > 0.0
            && v.duration_s > 0.0;
        if !ok {
            return Err(invalid!("vowel parameters out of range: {v:?}"));
        }
    }
    let g = (-2.0 * PI * GLOTTAL_POLE_HZ / fs).exp();
    let mut out = Vec::new();
    // filter state carries across vowel boundaries
    let (mut g1, mut g2) = (0.0, 0.0);
    let mut s1 = [0.0; 2];
    let mut s2 = [0.0; 2];
    let mut lip = 0.0;
    let mut phase = 0.0;
    for v in vowels {
        let n = (v.duration_s * fs).round() as usize;
        let (a1, b1) = resonator(v.f1_hz, v.b1_hz, fs);
        let (a2, b2) = resonator(v.f2_hz, v.b2_hz, fs);
        let ramp = ((0.02 * fs) as usize).min(n / 2).max(1);
        for i in 0..n {
            phase += v.f0_hz / fs;
            let pulse = if phase >= 1.0 {
                phase -= 1.0;
                1.0
            } else {
                0.0
            };
            let env = if i < ramp {
                0.5 - 0.5 * (PI * i as f64 / ramp as f64).cos()
            } else if i >= n - ramp {
                0.5 - 0.5 * (PI * (n - i) as f64 / ramp as f64).cos()
            } else {
                1.0
            };
            g1 = pulse * env + g * g1;
            g2 = g1 + g * g2;
            let y1 = g2 + a1 * s1[0] + b1 * s1[1];
            s1 = [y1, s1[0]];
            let y2 = y1 + a2 * s2[0] + b2 * s2[1];
            s2 = [y2, s2[0]];
            out.push(y2 - lip);
            lip = y2;
        }
    }
    let peak = out.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak > 0.0 {
        out.iter_mut().for_each(|v| *v *= PEAK / peak);
    }
    SampleBuffer::new(out, rate)
}

/// A seeded sequence of vowels from [`VOWEL_TARGETS`] lasting at least
/// `duration_s`, each 250-400 ms with F0 between 100 and 160 Hz.
pub fn vowel_sequence(rate: u32, duration_s: f64, seed: u64) -> Result<SampleBuffer> {
    if !(duration_s > 0.0) {
        return Err(invalid!("duration must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vowels = vec![];
    let mut total = 0.0;
    while total < duration_s {
        let (f1, f2) = VOWEL_TARGETS[rng.random_range(0..VOWEL_TARGETS.len())];
        let v = Vowel {
            f1_hz: f1 * rng.random_range(0.95..1.05),
            f2_hz: f2 * rng.random_range(0.95..1.05),
            b1_hz: rng.random_range(60.0..100.0),
            b2_hz: rng.random_range(80.0..140.0),
            f0_hz: rng.random_range(100.0..160.0),
            duration_s: rng.random_range(0.25..0.4),
        };
        total += v.duration_s;
        vowels.push(v);
    }
    let buf = synthesize_vowels(&vowels, rate)?;
    let n = ((duration_s * rate as f64).ceil() as usize).min(buf.len());
    Ok(buf.truncated(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lpc::{burg_formants_with, BurgConfig};

    #[test]
    fn deterministic_and_bounded() {
        let a = vowel_sequence(22050, 1.0, 3).unwrap();
        assert_eq!(a, vowel_sequence(22050, 1.0, 3).unwrap());
        assert_eq!(a.len(), 22050);
        assert!(a.samples().iter().all(|v| v.abs() <= PEAK + 1e-12));
        assert!(a.samples().iter().sum::<f64>().abs() / (a.len() as f64) < 1e-3);
    }

    #[test]
    fn burg_sees_the_formants() {
        let v = Vowel { f1_hz: 700.0, f2_hz: 1800.0, b1_hz: 80.0, b2_hz: 100.0, f0_hz: 120.0, duration_s: 0.5 };
        let buf = synthesize_vowels(&[v], 22050).unwrap();
        let track = burg_formants_with(&buf, &BurgConfig::for_rate(22050)).unwrap();
        let mid = &track.frames[track.frames.len() / 2];
        let near = |f: f64| mid.formants.iter().any(|x| (x.frequency_hz - f).abs() < 60.0);
        assert!(near(700.0) && near(1800.0), "{:?}", mid.formants);
    }

    #[test]
    fn rejects_bad_vowels() {
        let v = Vowel { f1_hz: 700.0, f2_hz: 20000.0, b1_hz: 80.0, b2_hz: 100.0, f0_hz: 120.0, duration_s: 0.5 };
        assert!(synthesize_vowels(&[v], 22050).is_err());
    }
}

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::signal::{power, SampleBuffer};

/// Number of Voss-McCartney generator rows.
pub const PINK_ROWS: usize = 16;

/// Voss-McCartney pink noise. Row `k` is redrawn every `2^k` samples (the
/// row picked by the trailing zeros of a counter); a white term is added
/// each sample. The result has its mean removed and unit variance.
pub fn pink_noise(n: usize, seed: u64, rate: u32) -> Result<SampleBuffer> {
    if n == 0 {
        return Err(invalid!("pink noise length must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = move || rng.random::<f64>() - 0.5;
    let mut rows = [0.0; PINK_ROWS];
    for r in rows.iter_mut() {
        *r = draw();
    }
    let mut sum: f64 = rows.iter().sum();
    let mut out = Vec::with_capacity(n);
    for counter in 1..=n as u64 {
        let k = counter.trailing_zeros() as usize;
        if k < PINK_ROWS {
            let fresh = draw();
            sum += fresh - rows[k];
            rows[k] = fresh;
        }
        out.push(sum + draw());
    }
    let mean = out.iter().sum::<f64>() / n as f64;
    out.iter_mut().for_each(|v| *v -= mean);
    let sd = power(&out).sqrt();
    if sd > 0.0 {
        out.iter_mut().for_each(|v| *v /= sd);
    }
    SampleBuffer::new(out, rate)
}

/// `signal + g * noise` with `g` chosen so the signal-to-scaled-noise power
/// ratio is exactly `snr_db`. `f64::INFINITY` returns the signal unchanged.
pub fn mix_at_snr(signal: &SampleBuffer, noise: &SampleBuffer, snr_db: f64) -> Result<SampleBuffer> {
    if signal.len() != noise.len() || signal.rate() != noise.rate() {
        return Err(invalid!(
            "signal ({} @ {} Hz) and noise ({} @ {} Hz) differ",
            signal.len(),
            signal.rate(),
            noise.len(),
            noise.rate()
        ));
    }
    if snr_db.is_nan() || snr_db == f64::NEG_INFINITY {
        return Err(invalid!("SNR must be a number or +inf, got {snr_db}"));
    }
    if snr_db == f64::INFINITY {
        return Ok(signal.clone());
    }
    let ps = power(signal.samples());
    if ps <= 0.0 {
        return Err(invalid!("signal has zero power"));
    }
    let pn = power(noise.samples());
    if pn <= 0.0 {
        return Err(Error::ZeroPowerNoise);
    }
    let g = (ps / pn / 10f64.powf(snr_db / 10.0)).sqrt();
    let mut out = vec![0.0; signal.len()];
    for ((o, s), n) in out.iter_mut().zip(signal.samples()).zip(noise.samples()) {
        *o = s + g * n;
    }
    SampleBuffer::new(out, signal.rate())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::fft::{rfft, Fft};
    use crate::signal::window::Window;

    /// Welch PSD (Hann, 50% overlap), then least-squares slope of the
    /// half-octave band means in dB against log2 frequency.
    fn octave_slope(x: &[f64], rate: f64, lo: f64, hi: f64) -> f64 {
        let seg = 4096;
        let fft = Fft::new(seg);
        let w = Window::Hann.coefficients(seg);
        let mut psd = vec![0.0; seg / 2 + 1];
        let mut start = 0;
        while start + seg <= x.len() {
            let frame: Vec<f64> = x[start..start + seg].iter().zip(&w).map(|(a, b)| a * b).collect();
            for (p, c) in psd.iter_mut().zip(rfft(&fft, &frame)) {
                *p += c.norm_sqr();
            }
            start += seg / 2;
        }
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        let mut f0 = lo;
        while f0 * 2f64.sqrt() <= hi {
            let f1 = f0 * 2f64.sqrt();
            let bins: Vec<f64> = (0..psd.len())
                .filter(|k| {
                    let f = *k as f64 * rate / seg as f64;
                    f >= f0 && f < f1
                })
                .map(|k| psd[k])
                .collect();
            xs.push((f0 * f1).sqrt().log2());
            ys.push(10.0 * (bins.iter().sum::<f64>() / bins.len() as f64).log10());
            f0 = f1;
        }
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxy: f64 = xs.iter().zip(&ys).map(|(a, b)| (a - mx) * (b - my)).sum();
        let sxx: f64 = xs.iter().map(|a| (a - mx) * (a - mx)).sum();
        sxy / sxx
    }

    #[test]
    fn deterministic_zero_mean_unit_variance() {
        let a = pink_noise(10000, 3, 22050).unwrap();
        let b = pink_noise(10000, 3, 22050).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, pink_noise(10000, 4, 22050).unwrap());
        let mean = a.samples().iter().sum::<f64>() / a.len() as f64;
        assert!(mean.abs() < 1e-12);
        assert!((power(a.samples()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn slope_is_minus_3db_per_octave() {
        let x = pink_noise(1 << 18, 1, 22050).unwrap();
        let slope = octave_slope(x.samples(), 22050.0, 100.0, 5000.0);
        assert!((slope + 3.0).abs() < 1.0, "{slope}");
    }

    #[test]
    fn mix_hits_requested_snr() {
        let s = pink_noise(5000, 1, 8000).unwrap();
        let n = pink_noise(5000, 2, 8000).unwrap();
        for snr in [-3.0, 0.0, 3.0] {
            let m = mix_at_snr(&s, &n, snr).unwrap();
            let scaled: Vec<f64> = m.samples().iter().zip(s.samples()).map(|(a, b)| a - b).collect();
            let got = 10.0 * (power(s.samples()) / power(&scaled)).log10();
            assert!((got - snr).abs() < 1e-3, "{got}");
        }
        let m = mix_at_snr(&s, &n, 0.0).unwrap();
        let scaled: Vec<f64> = m.samples().iter().zip(s.samples()).map(|(a, b)| a - b).collect();
        assert!((power(&scaled) / power(s.samples()) - 1.0).abs() < 1e-10);
        assert_eq!(mix_at_snr(&s, &n, f64::INFINITY).unwrap(), s);
    }

    #[test]
    fn mix_errors() {
        let s = pink_noise(100, 1, 8000).unwrap();
        let z = SampleBuffer::zeros(100, 8000).unwrap();
        assert_eq!(mix_at_snr(&s, &z, 0.0), Err(Error::ZeroPowerNoise));
        assert!(mix_at_snr(&s, &pink_noise(99, 1, 8000).unwrap(), 0.0).is_err());
        assert!(mix_at_snr(&z, &s, 0.0).is_err());
    }
}

use alloc::vec::Vec;

use num_traits::Float;

use super::{mix_at_snr, pink_noise, FirChannel};
use crate::error::{invalid, Error, Result};
use crate::signal::{power, SampleBuffer};

/// Energy gate: fixed windows whose energy is more than `floor_db` below
/// the loudest window are dropped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VadConfig {
    pub window_s: f64,
    pub floor_db: f64,
}

impl Default for VadConfig {
    fn default() -> Self {
        Self { window_s: 0.03, floor_db: 40.0 }
    }
}

pub fn vad_trim(x: &SampleBuffer, cfg: &VadConfig) -> Result<SampleBuffer> {
    let win = ((cfg.window_s * x.rate() as f64).round() as usize).max(1);
    let samples = x.samples();
    let energies: Vec<f64> = samples.chunks(win).map(|c| c.iter().map(|v| v * v).sum::<f64>() / c.len() as f64).collect();
    let peak = energies.iter().cloned().fold(0.0, f64::max);
    if peak <= 0.0 {
        return Err(Error::EmptyUtterance);
    }
    let gate = peak * 10f64.powf(-cfg.floor_db / 10.0);
    let kept: Vec<f64> = samples
        .chunks(win)
        .zip(&energies)
        .filter(|(_, e)| **e >= gate)
        .flat_map(|(c, _)| c.iter().copied())
        .collect();
    Ok(x.with_samples(kept))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairOptions {
    /// `None` skips silence trimming.
    pub vad: Option<VadConfig>,
    /// Rescale the distorted signal so its speech component has the clean
    /// signal's power. The wall loss is otherwise tens of dB.
    pub match_level: bool,
}

impl Default for PairOptions {
    fn default() -> Self {
        Self { vad: Some(VadConfig::default()), match_level: true }
    }
}

/// Trim silence, pass through the channel and add pink noise at `snr_db`
/// (relative to the filtered speech). Returns `(distorted, clean_aligned)`
/// of equal length and sample-aligned.
pub fn make_pair(clean: &SampleBuffer, channel: &FirChannel, snr_db: f64, seed: u64) -> Result<(SampleBuffer, SampleBuffer)> {
    make_pair_with(clean, channel, snr_db, seed, &PairOptions::default())
}

pub fn make_pair_with(
    clean: &SampleBuffer,
    channel: &FirChannel,
    snr_db: f64,
    seed: u64,
    opts: &PairOptions,
) -> Result<(SampleBuffer, SampleBuffer)> {
    if clean.rate() != channel.rate() {
        return Err(invalid!("clean audio is {} Hz, channel is {} Hz", clean.rate(), channel.rate()));
    }
    let clean = match &opts.vad {
        Some(vad) => vad_trim(clean, vad)?,
        None => clean.clone(),
    };
    if clean.is_empty() {
        return Err(Error::EmptyUtterance);
    }
    let filtered = channel.apply_buffer(&clean)?;
    let pf = power(filtered.samples());
    let mixed = if snr_db == f64::INFINITY || pf == 0.0 {
        filtered
    } else {
        let noise = pink_noise(clean.len(), seed, clean.rate())?;
        mix_at_snr(&filtered, &noise, snr_db)?
    };
    let distorted = if opts.match_level && pf > 0.0 { mixed.scaled((power(clean.samples()) / pf).sqrt()) } else { mixed };
    Ok((distorted, clean))
}

/// Seed of utterance `index` in a corpus generated from `master`, so the
/// result does not depend on the order in which utterances are processed.
pub fn utterance_seed(master: u64, index: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    mix(master ^ mix(index))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn utterance_seeds_differ() {
        assert_ne!(utterance_seed(1, 0), utterance_seed(1, 1));
        assert_ne!(utterance_seed(1, 0), utterance_seed(2, 0));
        assert_eq!(utterance_seed(5, 9), utterance_seed(5, 9));
    }
    use crate::channel::{design_fir, ChannelPreset};
    use crate::synth::vowel_sequence;

    fn channel(p: ChannelPreset) -> FirChannel {
        design_fir(&p.curve(22050).unwrap(), 513, 22050).unwrap()
    }

    #[test]
    fn vad_drops_silence() {
        let mut x = alloc::vec![0.0; 22050];
        for (i, v) in x[5000..10000].iter_mut().enumerate() {
            *v = (i as f64 * 0.1).sin();
        }
        let buf = SampleBuffer::new(x, 22050).unwrap();
        let t = vad_trim(&buf, &VadConfig::default()).unwrap();
        assert!(t.len() >= 5000 && t.len() <= 5000 + 2 * 662, "{}", t.len());
        assert_eq!(vad_trim(&SampleBuffer::zeros(1000, 22050).unwrap(), &VadConfig::default()), Err(Error::EmptyUtterance));
    }

    #[test]
    fn identity_noise_free_is_transparent() {
        let clean = vowel_sequence(22050, 1.0, 5).unwrap();
        let (d, c) = make_pair(&clean, &channel(ChannelPreset::Identity), f64::INFINITY, 0).unwrap();
        assert_eq!(d.len(), c.len());
        assert!(d.samples().iter().zip(c.samples()).all(|(a, b)| (a - b).abs() < 1e-6));
    }

    #[test]
    fn pair_is_aligned() {
        let clean = vowel_sequence(22050, 1.0, 5).unwrap();
        let (d, c) = make_pair(&clean, &channel(ChannelPreset::Concrete5cm), f64::INFINITY, 0).unwrap();
        let (x, y) = (c.samples(), d.samples());
        let xc = |lag: isize| -> f64 {
            (0..x.len())
                .filter_map(|i| {
                    let j = i as isize + lag;
                    (j >= 0 && (j as usize) < y.len()).then(|| x[i] * y[j as usize])
                })
                .sum()
        };
        let best = (-50..=50).max_by(|a, b| xc(*a).total_cmp(&xc(*b))).unwrap();
        assert!(best.abs() <= 1, "{best}");
    }

    #[test]
    fn homogeneous_in_noise_free_mode() {
        // VAD thresholds are relative, so scaling commutes with trimming.
        let clean = vowel_sequence(22050, 0.5, 2).unwrap();
        let ch = channel(ChannelPreset::Concrete5cm);
        let opts = PairOptions { match_level: false, ..PairOptions::default() };
        let (d1, _) = make_pair_with(&clean, &ch, f64::INFINITY, 0, &opts).unwrap();
        let (d2, _) = make_pair_with(&clean.scaled(3.0), &ch, f64::INFINITY, 0, &opts).unwrap();
        for (a, b) in d1.samples().iter().zip(d2.samples()) {
            assert!((3.0 * a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn deterministic_and_level_matched() {
        let clean = vowel_sequence(22050, 0.5, 2).unwrap();
        let ch = channel(ChannelPreset::Concrete5cm);
        let a = make_pair(&clean, &ch, 0.0, 9).unwrap();
        assert_eq!(a, make_pair(&clean, &ch, 0.0, 9).unwrap());
        // speech + equal-power noise, rescaled so speech matches clean
        let ratio = power(a.0.samples()) / power(a.1.samples());
        assert!((ratio - 2.0).abs() < 0.1, "{ratio}");
    }

    #[test]
    fn rate_mismatch() {
        let clean = SampleBuffer::zeros(100, 16000).unwrap();
        assert!(make_pair(&clean, &channel(ChannelPreset::Identity), 0.0, 0).is_err());
    }
}

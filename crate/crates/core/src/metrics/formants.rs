use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::lpc::{FormantTrack, PitchTrack};

pub const HIST_BIN_HZ: f64 = 50.0;
pub const HIST_RANGE_HZ: f64 = 1000.0;

/// Histogram of formant differences (test - reference), 50 Hz bins over
/// [-1000, 1000) Hz. Differences outside the range are counted in
/// `out_of_range` only.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FormantHistogram {
    pub edges_hz: Vec<f64>,
    pub counts: Vec<usize>,
    pub out_of_range: usize,
    /// Number of differences, in range or not. Zero marks empty statistics.
    pub n: usize,
    pub mean_hz: Option<f64>,
    /// Centre of the fullest bin; ties go to the bin nearest 0 Hz.
    pub peak_center_hz: Option<f64>,
}

impl FormantHistogram {
    pub fn from_differences(diffs: &[f64]) -> Self {
        let bins = (2.0 * HIST_RANGE_HZ / HIST_BIN_HZ) as usize;
        let edges_hz: Vec<f64> = (0..=bins).map(|i| -HIST_RANGE_HZ + i as f64 * HIST_BIN_HZ).collect();
        let mut counts = vec![0usize; bins];
        let mut out_of_range = 0;
        for d in diffs {
            let idx = ((d + HIST_RANGE_HZ) / HIST_BIN_HZ).floor();
            if idx >= 0.0 && (idx as usize) < bins {
                counts[idx as usize] += 1;
            } else {
                out_of_range += 1;
            }
        }
        let centers: Vec<f64> = edges_hz.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let max = counts.iter().copied().max().unwrap_or(0);
        let peak_center_hz = (max > 0).then(|| {
            (0..bins)
                .filter(|i| counts[*i] == max)
                .map(|i| centers[i])
                .min_by(|a, b| a.abs().total_cmp(&b.abs()).then(a.total_cmp(b)))
                .unwrap_or(0.0)
        });
        let mean_hz = (!diffs.is_empty()).then(|| diffs.iter().sum::<f64>() / diffs.len() as f64);
        Self { edges_hz, counts, out_of_range, n: diffs.len(), mean_hz, peak_center_hz }
    }

    pub fn centers_hz(&self) -> Vec<f64> {
        self.edges_hz.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FormantErrorStats {
    pub f1: FormantHistogram,
    pub f2: FormantHistogram,
}

/// Voiced flag for each formant frame, taken from the pitch frame nearest
/// in time.
pub fn voicing_for(formants: &FormantTrack, pitch: &PitchTrack) -> Vec<bool> {
    formants
        .frames
        .iter()
        .map(|f| {
            pitch
                .frames
                .iter()
                .min_by(|a, b| (a.time_s - f.time_s).abs().total_cmp(&(b.time_s - f.time_s).abs()))
                .is_some_and(|p| p.f0_hz.is_some())
        })
        .collect()
}

/// F1 and F2 difference histograms over frames where both tracks are
/// voiced (when masks are given) and both have the formant.
pub fn formant_error_stats(
    reference: &FormantTrack,
    test: &FormantTrack,
    voiced: Option<(&[bool], &[bool])>,
) -> FormantErrorStats {
    let mut d1 = Vec::new();
    let mut d2 = Vec::new();
    for (i, (r, t)) in reference.frames.iter().zip(&test.frames).enumerate() {
        if r.skipped || t.skipped {
            continue;
        }
        if let Some((vr, vt)) = voiced {
            if !(vr.get(i).copied().unwrap_or(false) && vt.get(i).copied().unwrap_or(false)) {
                continue;
            }
        }
        if let (Some(a), Some(b)) = (r.formants.first(), t.formants.first()) {
            d1.push(b.frequency_hz - a.frequency_hz);
        }
        if let (Some(a), Some(b)) = (r.formants.get(1), t.formants.get(1)) {
            d2.push(b.frequency_hz - a.frequency_hz);
        }
    }
    FormantErrorStats { f1: FormantHistogram::from_differences(&d1), f2: FormantHistogram::from_differences(&d2) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lpc::{burg_formants_with, BurgConfig, Formant, FormantFrame};
    use crate::synth::vowel_sequence;

    #[test]
    fn histogram_bins() {
        let h = FormantHistogram::from_differences(&[-210.0, -220.0, 10.0, 1500.0]);
        assert_eq!(h.counts.len(), 40);
        assert_eq!(h.n, 4);
        assert_eq!(h.out_of_range, 1);
        assert_eq!(h.peak_center_hz, Some(-225.0));
        assert!((h.mean_hz.unwrap() - 270.0).abs() < 1e-12);
        let empty = FormantHistogram::from_differences(&[]);
        assert!(empty.is_empty() && empty.peak_center_hz.is_none());
    }

    #[test]
    fn ties_prefer_zero() {
        let h = FormantHistogram::from_differences(&[-300.0, 10.0]);
        assert_eq!(h.peak_center_hz, Some(25.0));
    }

    #[test]
    fn identical_tracks_peak_at_zero() {
        let x = vowel_sequence(11025, 1.0, 4).unwrap();
        let t = burg_formants_with(&x, &BurgConfig::for_rate(11025)).unwrap();
        let s = formant_error_stats(&t, &t, None);
        assert!(s.f1.n > 0);
        assert_eq!(s.f1.peak_center_hz, Some(25.0));
        assert_eq!(s.f1.mean_hz, Some(0.0));
    }

    #[test]
    fn missing_f2_excluded() {
        let f = |v: &[f64]| FormantFrame {
            time_s: 0.0,
            formants: v.iter().map(|&frequency_hz| Formant { frequency_hz, bandwidth_hz: 50.0 }).collect(),
            skipped: false,
        };
        let r = FormantTrack { rate: 11025, frames: alloc::vec![f(&[500.0, 1500.0]), f(&[500.0, 1500.0])] };
        let t = FormantTrack { rate: 11025, frames: alloc::vec![f(&[450.0]), f(&[520.0, 1400.0])] };
        let s = formant_error_stats(&r, &t, None);
        assert_eq!((s.f1.n, s.f2.n), (2, 1));
        let s = formant_error_stats(&r, &t, Some((&[true, false], &[true, true])));
        assert_eq!((s.f1.n, s.f2.n), (1, 0));
    }
}

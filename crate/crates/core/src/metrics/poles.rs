use alloc::vec::Vec;

use num_complex::Complex64;

use crate::blocks::{lp2poles, LpCoefficients};
use crate::error::{invalid, Result};
use crate::lpc::lpc_analyze;
use crate::signal::{FrameLayout, SampleBuffer};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SlotPoles {
    pub slot: usize,
    /// Matched pairs: `reference[i]` goes with `test[i]`.
    pub reference: Vec<Complex64>,
    pub test: Vec<Complex64>,
    pub mean_distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PoleComparison {
    pub slots: Vec<SlotPoles>,
    /// Mean over all matched pairs in all requested slots.
    pub mean_distance: f64,
}

/// Greedy assignment: repeatedly pair the closest remaining poles.
pub fn match_poles(reference: &[Complex64], test: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut pairs = Vec::new();
    for (i, r) in reference.iter().enumerate() {
        for (j, t) in test.iter().enumerate() {
            pairs.push(((r - t).norm(), i, j));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut used_r = alloc::vec![false; reference.len()];
    let mut used_t = alloc::vec![false; test.len()];
    let mut out: Vec<(usize, usize)> = Vec::new();
    for (_, i, j) in pairs {
        if !used_r[i] && !used_t[j] {
            used_r[i] = true;
            used_t[j] = true;
            out.push((i, j));
        }
    }
    out.sort();
    (out.iter().map(|p| reference[p.0]).collect(), out.iter().map(|p| test[p.1]).collect())
}

fn all_slots(x: &SampleBuffer, layout: &FrameLayout) -> Result<LpCoefficients> {
    let frames = lpc_analyze(x, layout)?;
    Ok(LpCoefficients::concat(frames.iter().map(|f| &f.coeffs)))
}

/// Per-slot pole sets of both signals (LPC analysis with `layout`), matched
/// pairwise. `slots = None` compares every slot.
pub fn pole_compare(
    reference: &SampleBuffer,
    test: &SampleBuffer,
    layout: &FrameLayout,
    slots: Option<&[usize]>,
) -> Result<PoleComparison> {
    if reference.len() != test.len() || reference.rate() != test.rate() {
        return Err(invalid!("pole comparison needs aligned signals of equal length and rate"));
    }
    let a = all_slots(reference, layout)?;
    let b = all_slots(test, layout)?;
    let indices: Vec<usize> = match slots {
        Some(s) => s.to_vec(),
        None => (0..a.slots()).collect(),
    };
    let mut out = Vec::with_capacity(indices.len());
    let (mut total, mut count) = (0.0, 0usize);
    for slot in indices {
        if slot >= a.slots() {
            return Err(invalid!("slot {slot} out of range ({} slots)", a.slots()));
        }
        let (r, t) = match_poles(&lp2poles(a.slot(slot))?, &lp2poles(b.slot(slot))?);
        let d: f64 = r.iter().zip(&t).map(|(x, y)| (x - y).norm()).sum();
        total += d;
        count += r.len();
        let mean_distance = if r.is_empty() { 0.0 } else { d / r.len() as f64 };
        out.push(SlotPoles { slot, reference: r, test: t, mean_distance });
    }
    Ok(PoleComparison { slots: out, mean_distance: if count == 0 { 0.0 } else { total / count as f64 } })
}

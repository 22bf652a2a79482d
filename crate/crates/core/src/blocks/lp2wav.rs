use alloc::vec;
use alloc::vec::Vec;

use super::LpCoefficients;
use crate::error::{invalid, Error, Result};
use crate::signal::FrameLayout;

fn check_shapes(a: &LpCoefficients, z_len: usize, layout: &FrameLayout) -> Result<()> {
    layout.validate()?;
    if a.order() != layout.order || a.slots() != layout.slots {
        return Err(invalid!(
            "coefficient matrix is {}x{}, layout expects {}x{}",
            a.order(),
            a.slots(),
            layout.order,
            layout.slots
        ));
    }
    if z_len != layout.frame_len() {
        return Err(invalid!("excitation has {} samples, layout expects {}", z_len, layout.frame_len()));
    }
    Ok(())
}

/// `x = (I - W^T)^{-1} Z` by forward substitution with zero initial state:
/// `x[k] = sum_p a_p(slot(k)) x[k-p] + Z[k]`. Each slot's coefficients
/// apply to all of its `slot_len` samples.
pub fn lp2wav(a: &LpCoefficients, z: &[f64], layout: &FrameLayout) -> Result<Vec<f64>> {
    lp2wav_with_history(a, z, layout, &[])
}

/// [`lp2wav`] with `history` holding the samples that precede the frame
/// (most recent last). Missing history is zero.
pub fn lp2wav_with_history(a: &LpCoefficients, z: &[f64], layout: &FrameLayout, history: &[f64]) -> Result<Vec<f64>> {
    check_shapes(a, z.len(), layout)?;
    let order = layout.order;
    let h = history.len().min(order);
    let mut buf = Vec::with_capacity(h + z.len());
    buf.extend_from_slice(&history[history.len() - h..]);
    for (k, zk) in z.iter().enumerate() {
        let coeffs = a.slot(k / layout.slot_len);
        let n = buf.len();
        let mut acc = 0.0;
        for (p, ap) in coeffs.iter().enumerate() {
            if p < n {
                acc += ap * buf[n - 1 - p];
            }
        }
        let x = acc + zk;
        if !x.is_finite() {
            return Err(Error::Unstable { index: k });
        }
        buf.push(x);
    }
    buf.drain(..h);
    Ok(buf)
}

/// Gradients produced by [`lp2wav_adjoint`].
#[derive(Debug, Clone, PartialEq)]
pub struct Lp2WavGrad {
    pub coeffs: LpCoefficients,
    pub excitation: Vec<f64>,
}

/// Reverse mode of [`lp2wav`].
///
/// `x` is the forward output, `grad` is `dL/dx`. Solves the transposed
/// system `(I - W^T)^T w = grad` backwards in time, then
/// `dL/dZ = w` and `dL/da_p(slot) = sum_{k in slot} w[k] x[k-p]`.
pub fn lp2wav_adjoint(a: &LpCoefficients, x: &[f64], grad: &[f64], layout: &FrameLayout) -> Result<Lp2WavGrad> {
    check_shapes(a, x.len(), layout)?;
    if grad.len() != x.len() {
        return Err(invalid!("gradient length {} does not match output length {}", grad.len(), x.len()));
    }
    let n = x.len();
    let order = layout.order;
    let m = layout.slot_len;
    let mut w = vec![0.0; n];
    for j in (0..n).rev() {
        let mut acc = grad[j];
        for p in 1..=order {
            let k = j + p;
            if k >= n {
                break;
            }
            acc += a.get(p - 1, k / m) * w[k];
        }
        if !acc.is_finite() {
            return Err(Error::Unstable { index: j });
        }
        w[j] = acc;
    }
    let mut ga = LpCoefficients::zeros(order, layout.slots);
    for slot in 0..layout.slots {
        let g = ga.slot_mut(slot);
        for k in slot * m..(slot + 1) * m {
            for p in 1..=order.min(k) {
                g[p - 1] += w[k] * x[k - p];
            }
        }
    }
    Ok(Lp2WavGrad { coeffs: ga, excitation: w })
}

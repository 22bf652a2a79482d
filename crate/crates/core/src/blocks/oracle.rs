use alloc::vec;
use alloc::vec::Vec;

use super::LpCoefficients;
use crate::error::{invalid, Error, Result};
use crate::signal::FrameLayout;

/// Largest `M*L + 1` the dense oracle will materialise.
pub const ORACLE_MAX_DIM: usize = 512;

/// Explicit `(ML+1) x (ML+1)` matrices of the LP synthesis system.
///
/// Index 0 is a zero initial sample with no predecessors; sample `k >= 1`
/// is time step `k - 1` of the frame. `x = V [0; Z]`, so `x[0] = 0` and
/// `x[1..]` is the synthesized frame.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSystem {
    pub w: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
    pub x: Vec<f64>,
}

/// Materialise `W`, `V = (I - W^T)^{-1}` and `x = V [0; Z]`.
///
/// Column `k` of `W` holds the coefficients predicting sample `k`:
/// `W[k - p][k] = a_p(slot(k))` for every in-range predecessor `k - p >= 0`.
/// Test-scale only.
pub fn dense_oracle(a: &LpCoefficients, z: &[f64], layout: &FrameLayout) -> Result<DenseSystem> {
    layout.validate()?;
    let dim = layout.frame_len() + 1;
    if dim > ORACLE_MAX_DIM {
        return Err(Error::OracleTooLarge { dim, limit: ORACLE_MAX_DIM });
    }
    if a.order() != layout.order || a.slots() != layout.slots || z.len() != layout.frame_len() {
        return Err(invalid!("oracle inputs do not match the layout"));
    }
    let mut w = vec![vec![0.0; dim]; dim];
    for k in 1..dim {
        let slot = (k - 1) / layout.slot_len;
        for p in 1..=layout.order.min(k) {
            w[k - p][k] = a.get(p - 1, slot);
        }
    }
    // U = I - W^T is unit lower triangular; solve U V = I column by column.
    let u = |i: usize, j: usize| -> f64 { if i == j { 1.0 } else { -w[j][i] } };
    let mut v = vec![vec![0.0; dim]; dim];
    for col in 0..dim {
        for i in 0..dim {
            let mut acc = if i == col { 1.0 } else { 0.0 };
            for j in 0..i {
                acc -= u(i, j) * v[j][col];
            }
            v[i][col] = acc;
        }
    }
    let mut zz = vec![0.0; dim];
    zz[1..].copy_from_slice(z);
    let x = v.iter().map(|row| row.iter().zip(&zz).map(|(a, b)| a * b).sum()).collect();
    Ok(DenseSystem { w, v, x })
}

use alloc::vec;
use alloc::vec::Vec;


use crate::error::{invalid, Error, Result};

/// Output of [`levinson_durbin`].
#[derive(Debug, Clone, PartialEq)]
pub struct Levinson {
    /// Predictor coefficients, `x[k] ~ sum_p a[p-1] x[k-p]`.
    pub coeffs: Vec<f64>,
    /// Reflection coefficient of each completed order.
    pub reflection: Vec<f64>,
    /// Prediction error power after the last completed order.
    pub error: f64,
    /// Prediction error after each order `0..=reached`.
    pub error_by_order: Vec<f64>,
    /// Set when the recursion hit a non-positive error before order `P`;
    /// holds the last stable order, and higher coefficients are zero.
    pub truncated_at: Option<usize>,
}

/// Solve the Toeplitz normal equations for an order-`order` predictor.
pub fn levinson_durbin(r: &[f64], order: usize) -> Result<Levinson> {
    if r.len() < order + 1 {
        return Err(invalid!("need {} autocorrelation lags, got {}", order + 1, r.len()));
    }
    if !(r[0] > 0.0) {
        return Err(Error::DegenerateFrame { r0: r[0] });
    }
    let mut a = vec![0.0; order];
    let mut prev = vec![0.0; order];
    let mut reflection = Vec::with_capacity(order);
    let mut err = r[0];
    let mut error_by_order = vec![err];
    let mut truncated_at = None;
    for i in 1..=order {
        let mut acc = r[i];
        for j in 1..i {
            acc -= a[j - 1] * r[i - j];
        }
        let k = acc / err;
        let next_err = err * (1.0 - k * k);
        if !(next_err > 0.0) || !k.is_finite() || k.abs() >= 1.0 {
            truncated_at = Some(i - 1);
            break;
        }
        prev[..i - 1].copy_from_slice(&a[..i - 1]);
        for j in 1..i {
            a[j - 1] = prev[j - 1] - k * prev[i - j - 1];
        }
        a[i - 1] = k;
        reflection.push(k);
        err = next_err;
        error_by_order.push(err);
    }
    Ok(Levinson { coeffs: a, reflection, error: err, error_by_order, truncated_at })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_order() {
        let l = levinson_durbin(&[1.0, 0.5], 1).unwrap();
        assert_eq!(l.coeffs, vec![0.5]);
        assert!((l.error - 0.75).abs() < 1e-15);
    }

    #[test]
    fn white_autocorrelation() {
        let l = levinson_durbin(&[1.0, 0.0, 0.0, 0.0], 3).unwrap();
        assert_eq!(l.coeffs, vec![0.0; 3]);
        assert_eq!(l.error, 1.0);
    }

    #[test]
    fn degenerate_and_singular() {
        assert_eq!(levinson_durbin(&[0.0, 0.0], 1), Err(Error::DegenerateFrame { r0: 0.0 }));
        // A pure sinusoid is perfectly predictable at order 2.
        let w: f64 = 0.3;
        let r: Vec<f64> = (0..5).map(|k| (w * k as f64).cos()).collect();
        let l = levinson_durbin(&r, 4).unwrap();
        assert!(l.truncated_at.is_some());
        assert!(l.error >= 0.0);
    }
}

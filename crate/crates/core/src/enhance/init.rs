use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::blocks::{lp2poles, radius_to_raw, LpCoefficients, PairingMode, PoleParams};
use crate::error::Result;

/// Pole parameters whose poles are the roots of each slot's predictor
/// polynomial (unstable roots reflected inside the margin).
///
/// In conjugate mode every complex pair maps to one column exactly. Real
/// roots are sorted and adjacent ones merged into a double root at their
/// mean; with an odd order the real root of largest magnitude takes the
/// dedicated real column. Columns are ordered by angle so that the same
/// column tends to track the same resonance from slot to slot.
pub fn params_from_coefficients(a: &LpCoefficients, mode: PairingMode) -> Result<PoleParams> {
    let order = a.order();
    let mut params = PoleParams::zeros(mode, order, a.slots());
    let cols = params.columns();
    for slot in 0..a.slots() {
        let roots = lp2poles(a.slot(slot))?;
        let mut polar: Vec<(f64, f64)> = match mode {
            PairingMode::Free => roots.iter().map(|r| (r.norm(), r.arg())).collect(),
            PairingMode::Conjugate => conjugate_columns(&roots, order),
        };
        if mode == PairingMode::Conjugate {
            // pair columns sorted by angle, the real column stays last
            let pairs = order / 2;
            polar[..pairs].sort_by(|x, y| x.1.total_cmp(&y.1));
        } else {
            polar.sort_by(|x, y| x.1.total_cmp(&y.1));
        }
        for (c, (rho, theta)) in polar.into_iter().enumerate().take(cols) {
            params.radius_raw[slot * cols + c] = radius_to_raw(rho);
            params.angle[slot * cols + c] = theta;
        }
    }
    Ok(params)
}

fn polar_real(r: f64) -> (f64, f64) {
    if r >= 0.0 { (r, 0.0) } else { (-r, PI) }
}

fn conjugate_columns(roots: &[Complex64], order: usize) -> Vec<(f64, f64)> {
    const REAL_TOL: f64 = 1e-9;
    let pairs = order / 2;
    let mut out = Vec::with_capacity(order.div_ceil(2));
    let mut reals: Vec<f64> = Vec::new();
    for r in roots {
        if r.im.abs() <= REAL_TOL * (1.0 + r.norm()) {
            reals.push(r.re);
        } else if r.im > 0.0 {
            out.push((r.norm(), r.arg()));
        }
    }
    let odd_real = if order % 2 == 1 && !reals.is_empty() {
        let i = (0..reals.len()).max_by(|&a, &b| reals[a].abs().total_cmp(&reals[b].abs())).unwrap_or(0);
        Some(reals.remove(i))
    } else {
        None
    };
    reals.sort_by(|a, b| b.total_cmp(a));
    for pair in reals.chunks(2) {
        out.push(polar_real(pair.iter().sum::<f64>() / pair.len() as f64));
    }
    // only reachable when root classification is numerically ambiguous
    out.sort_by(|a, b| b.0.total_cmp(&a.0));
    out.resize(pairs, (0.0, 0.0));
    if order % 2 == 1 {
        out.push(polar_real(odd_real.unwrap_or(0.0)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::{poles2lp, poles_from_params};

    fn expand(params: &PoleParams) -> LpCoefficients {
        poles2lp(&poles_from_params(params)).real()
    }

    #[test]
    fn complex_pairs_round_trip() {
        // two resonances and one real pole
        let r1 = Complex64::from_polar(0.95, 0.4);
        let r2 = Complex64::from_polar(0.8, 1.9);
        let set = crate::blocks::PoleSet { order: 5, slots: 1, poles: alloc::vec![r1, r1.conj(), r2, r2.conj(), Complex64::new(-0.3, 0.0)] };
        let a = poles2lp(&set).real();
        for mode in [PairingMode::Conjugate, PairingMode::Free] {
            let p = params_from_coefficients(&a, mode).unwrap();
            let back = expand(&p);
            for (x, y) in a.as_slice().iter().zip(back.as_slice()) {
                assert!((x - y).abs() < 1e-8, "{mode:?}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn adjacent_reals_merge() {
        // (z - 0.6)(z - 0.4): one conjugate column holding a double root at 0.5
        let a = LpCoefficients::repeated(&[1.0, -0.24], 1);
        let p = params_from_coefficients(&a, PairingMode::Conjugate).unwrap();
        let back = expand(&p);
        assert!((back.get(0, 0) - 1.0).abs() < 1e-8);
        assert!((back.get(1, 0) + 0.25).abs() < 1e-8);
        let free = expand(&params_from_coefficients(&a, PairingMode::Free).unwrap());
        assert!((free.get(1, 0) + 0.24).abs() < 1e-8);
    }

    #[test]
    fn zero_slot_gives_tiny_radii() {
        let a = LpCoefficients::zeros(11, 2);
        let p = params_from_coefficients(&a, PairingMode::Conjugate).unwrap();
        assert!(poles_from_params(&p).max_radius() < 1e-6);
    }
}

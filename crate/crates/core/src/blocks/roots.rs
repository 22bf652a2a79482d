//! Polynomial roots by Aberth-Ehrlich iteration.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Float;

use super::STABILITY_MARGIN;
use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 200;
pub const RESIDUAL_TOLERANCE: f64 = 1e-12;

/// Horner evaluation of `p` and `p'`; coefficients highest power first.
fn eval_with_derivative(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = c[0];
    let mut dp = Complex64::new(0.0, 0.0);
    for coeff in &c[1..] {
        dp = dp * z + p;
        p = p * z + coeff;
    }
    (p, dp)
}

/// `|p(z)| / sum |c_k| |z|^k`, a scale-free backward error.
fn relative_residual(c: &[Complex64], z: Complex64) -> f64 {
    let (p, _) = eval_with_derivative(c, z);
    let r = z.norm();
    let mut scale = 0.0;
    for coeff in c {
        scale = scale * r + coeff.norm();
    }
    if scale == 0.0 {
        0.0
    } else {
        p.norm() / scale
    }
}

/// All roots of the polynomial with coefficients `c` (highest power first,
/// `c[0] != 0`).
pub fn polynomial_roots(c: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut c: Vec<Complex64> = c.to_vec();
    while c.len() > 1 && c[0].norm() == 0.0 {
        c.remove(0);
    }
    let mut roots = Vec::new();
    // Exact zero roots factor out and would otherwise slow convergence.
    while c.len() > 1 && c[c.len() - 1].norm() == 0.0 {
        c.pop();
        roots.push(Complex64::new(0.0, 0.0));
    }
    let degree = c.len() - 1;
    if degree == 0 {
        return Ok(roots);
    }
    let lead = c[0];
    let c: Vec<Complex64> = c.iter().map(|v| v / lead).collect();
    if degree == 1 {
        roots.push(-c[1]);
        return Ok(roots);
    }

    // Initial guesses on a circle sized by the geometric mean of the roots,
    // with an irrational angular offset to avoid symmetric stalls.
    let radius = c[degree].norm().powf(1.0 / degree as f64).max(1e-3);
    let centre = -c[1] / degree as f64;
    let mut z: Vec<Complex64> = (0..degree)
        .map(|k| centre + Complex64::from_polar(radius, 2.0 * PI * k as f64 / degree as f64 + 0.4))
        .collect();

    let mut done = vec![false; degree];
    for _ in 0..MAX_ITERATIONS {
        let mut all_done = true;
        for i in 0..degree {
            if done[i] {
                continue;
            }
            let (p, dp) = eval_with_derivative(&c, z[i]);
            if p.norm() == 0.0 {
                done[i] = true;
                continue;
            }
            let newton = p / dp;
            let mut repulsion = Complex64::new(0.0, 0.0);
            for j in 0..degree {
                if j != i {
                    repulsion += (z[i] - z[j]).inv();
                }
            }
            let step = newton / (Complex64::new(1.0, 0.0) - newton * repulsion);
            if !step.re.is_finite() || !step.im.is_finite() {
                continue;
            }
            z[i] -= step;
            if step.norm() <= 1e-15 * z[i].norm().max(1e-300) || relative_residual(&c, z[i]) < RESIDUAL_TOLERANCE * 1e-2
            {
                done[i] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            break;
        }
    }
    let worst = z.iter().map(|r| relative_residual(&c, *r)).fold(0.0, f64::max);
    if !(worst < RESIDUAL_TOLERANCE) {
        return Err(Error::RootFinding { iterations: MAX_ITERATIONS, residual: worst });
    }
    roots.extend(z);
    Ok(roots)
}

/// Poles of `1 / (1 - a_1 z^-1 - ... - a_P z^-P)`, with any pole outside
/// the stable disc `|r| <= 1 - margin` reflected to `(1 - margin)^2 / conj(r)`.
pub fn lp2poles(a: &[f64]) -> Result<Vec<Complex64>> {
    let mut c = Vec::with_capacity(a.len() + 1);
    c.push(Complex64::new(1.0, 0.0));
    c.extend(a.iter().map(|v| Complex64::new(-v, 0.0)));
    let mut roots = polynomial_roots(&c)?;
    let limit = 1.0 - STABILITY_MARGIN;
    for r in roots.iter_mut() {
        if r.norm() > limit {
            *r = Complex64::new(limit * limit, 0.0) / r.conj();
        }
    }
    Ok(roots)
}

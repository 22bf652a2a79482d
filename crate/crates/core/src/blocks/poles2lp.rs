use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::{ComplexCoeffs, PoleSet};

/// Full linear convolution of two real sequences.
fn conv(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Complex convolution assembled from four real ones.
fn complex_conv(re1: &[f64], im1: &[f64], re2: &[f64], im2: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let re: Vec<f64> = conv(re1, re2).iter().zip(conv(im1, im2)).map(|(a, b)| a - b).collect();
    let im: Vec<f64> = conv(re1, im2).iter().zip(conv(im1, re2)).map(|(a, b)| a + b).collect();
    (re, im)
}

/// Monic polynomial coefficients after each factor: `stages[k]` holds
/// `prod_{i<k} (z - r_i)`, highest power first.
fn expansion_stages(poles: &[Complex64]) -> Vec<Vec<Complex64>> {
    let mut stages = Vec::with_capacity(poles.len() + 1);
    let (mut re, mut im) = (vec![1.0], vec![0.0]);
    stages.push(vec![Complex64::new(1.0, 0.0)]);
    for r in poles {
        let (nre, nim) = complex_conv(&re, &im, &[1.0, -r.re], &[0.0, -r.im]);
        re = nre;
        im = nim;
        stages.push(re.iter().zip(&im).map(|(a, b)| Complex64::new(*a, *b)).collect());
    }
    stages
}

/// Expand `prod (z - r_i)` per slot and return `a_p = -c_p`, where
/// `z^P + c_1 z^{P-1} + ... + c_P` is the expanded monic polynomial.
pub fn poles2lp(poles: &PoleSet) -> ComplexCoeffs {
    let order = poles.order;
    let mut data = Vec::with_capacity(order * poles.slots);
    for slot in 0..poles.slots {
        let stages = expansion_stages(poles.slot(slot));
        let c = &stages[order];
        data.extend(c[1..].iter().map(|v| -v));
    }
    ComplexCoeffs { order, slots: poles.slots, data }
}

/// Reverse mode of [`poles2lp`]: gradient on the complex coefficients
/// (`dL/dRe + i dL/dIm`) to gradient on the poles, same convention.
pub fn poles2lp_adjoint(poles: &PoleSet, grad: &ComplexCoeffs) -> Vec<Complex64> {
    let order = poles.order;
    let mut out = Vec::with_capacity(order * poles.slots);
    for slot in 0..poles.slots {
        let rs = poles.slot(slot);
        let stages = expansion_stages(rs);
        let mut g: Vec<Complex64> = core::iter::once(Complex64::new(0.0, 0.0))
            .chain(grad.slot(slot).iter().map(|v| -v))
            .collect();
        let mut g_poles = vec![Complex64::new(0.0, 0.0); order];
        for k in (0..order).rev() {
            // stage[k+1][j] = stage[k][j] - r_k * stage[k][j-1]
            let prev = &stages[k];
            let r = rs[k];
            let mut gr = Complex64::new(0.0, 0.0);
            for j in 1..g.len() {
                gr -= g[j] * prev[j - 1].conj();
            }
            g_poles[k] = gr;
            let mut g_prev = vec![Complex64::new(0.0, 0.0); prev.len()];
            for (j, gp) in g_prev.iter_mut().enumerate() {
                *gp = g[j] - r.conj() * g[j + 1];
            }
            g = g_prev;
        }
        out.extend(g_poles);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn set(poles: &[Complex64]) -> PoleSet {
        PoleSet { order: poles.len(), slots: 1, poles: poles.to_vec() }
    }

    #[test]
    fn single_pole() {
        let a = poles2lp(&set(&[Complex64::new(0.5, 0.0)]));
        assert_eq!(a.data, vec![Complex64::new(0.5, 0.0)]);
    }

    #[test]
    fn conjugate_pair_matches_quadratic() {
        let r = Complex64::from_polar(0.9, PI / 4.0);
        let a = poles2lp(&set(&[r, r.conj()]));
        assert!((a.data[0].re - 2.0 * 0.9 * (PI / 4.0).cos()).abs() < 1e-15);
        assert!((a.data[0].re - 1.272_792_206_135_785_6).abs() < 1e-12);
        assert!((a.data[1].re + 0.81).abs() < 1e-15);
        assert!(a.max_imag() < 1e-16);
    }

    #[test]
    fn zero_poles_give_zero_coefficients() {
        let a = poles2lp(&PoleSet { order: 4, slots: 2, poles: vec![Complex64::new(0.0, 0.0); 8] });
        assert!(a.data.iter().all(|c| c.norm() == 0.0));
    }
}

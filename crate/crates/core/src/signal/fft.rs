//! Complex FFT for arbitrary lengths.
//!
//! Powers of two use an iterative radix-2 kernel; every other length goes
//! through Bluestein's chirp-z reduction onto a power-of-two kernel.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

#[derive(Debug, Clone)]
pub struct Fft {
    len: usize,
    kind: Kind,
}

#[derive(Debug, Clone)]
enum Kind {
    Radix2(Radix2),
    Bluestein { chirp: Vec<Complex64>, filter_fft: Vec<Complex64>, inner: Radix2 },
}

#[derive(Debug, Clone)]
struct Radix2 {
    twiddles: Vec<Complex64>,
}

impl Radix2 {
    fn new(n: usize) -> Self {
        let twiddles = (0..n / 2)
            .map(|k| Complex64::from_polar(1.0, -2.0 * PI * k as f64 / n as f64))
            .collect();
        Self { twiddles }
    }

    fn run(&self, data: &mut [Complex64], inverse: bool) {
        let n = data.len();
        if n <= 1 {
            return;
        }
        let bits = n.trailing_zeros();
        for i in 0..n {
            let j = i.reverse_bits() >> (usize::BITS - bits);
            if j > i {
                data.swap(i, j);
            }
        }
        let mut size = 2;
        while size <= n {
            let half = size / 2;
            let stride = n / size;
            for start in (0..n).step_by(size) {
                for k in 0..half {
                    let mut w = self.twiddles[k * stride];
                    if inverse {
                        w = w.conj();
                    }
                    let a = data[start + k];
                    let b = data[start + k + half] * w;
                    data[start + k] = a + b;
                    data[start + k + half] = a - b;
                }
            }
            size *= 2;
        }
    }
}

impl Fft {
    pub fn new(len: usize) -> Self {
        let kind = if len.is_power_of_two() || len <= 1 {
            Kind::Radix2(Radix2::new(len.max(1)))
        } else {
            let m = (2 * len - 1).next_power_of_two();
            let chirp: Vec<Complex64> = (0..len)
                .map(|k| {
                    // k^2 mod 2n keeps the phase argument small for large k.
                    let k2 = (k as u128 * k as u128 % (2 * len as u128)) as f64;
                    Complex64::from_polar(1.0, -PI * k2 / len as f64)
                })
                .collect();
            let inner = Radix2::new(m);
            let mut filter = vec![Complex64::new(0.0, 0.0); m];
            filter[0] = chirp[0].conj();
            for k in 1..len {
                filter[k] = chirp[k].conj();
                filter[m - k] = chirp[k].conj();
            }
            inner.run(&mut filter, false);
            Kind::Bluestein { chirp, filter_fft: filter, inner }
        };
        Self { len, kind }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// In-place forward transform, `X[k] = sum_n x[n] exp(-2 pi i k n / N)`.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, false);
    }

    /// In-place inverse transform without the `1/N` factor.
    pub fn inverse_unscaled(&self, data: &mut [Complex64]) {
        self.run(data, true);
    }

    fn run(&self, data: &mut [Complex64], inverse: bool) {
        assert_eq!(data.len(), self.len, "FFT length mismatch");
        match &self.kind {
            Kind::Radix2(kernel) => kernel.run(data, inverse),
            Kind::Bluestein { chirp, filter_fft, inner } => {
                if inverse {
                    // Inverse via conjugation symmetry of the forward transform.
                    for x in data.iter_mut() {
                        *x = x.conj();
                    }
                }
                let m = filter_fft.len();
                let mut buf = vec![Complex64::new(0.0, 0.0); m];
                for (k, x) in data.iter().enumerate() {
                    buf[k] = *x * chirp[k];
                }
                inner.run(&mut buf, false);
                for (b, f) in buf.iter_mut().zip(filter_fft) {
                    *b *= f;
                }
                inner.run(&mut buf, true);
                let scale = 1.0 / m as f64;
                for (k, x) in data.iter_mut().enumerate() {
                    *x = buf[k] * chirp[k] * scale;
                }
                if inverse {
                    for x in data.iter_mut() {
                        *x = x.conj();
                    }
                }
            }
        }
    }
}

/// Forward transform of a real sequence zero-padded to `n`; returns the
/// `n / 2 + 1` non-negative frequency bins.
pub fn rfft(fft: &Fft, input: &[f64]) -> Vec<Complex64> {
    let n = fft.len();
    let mut buf: Vec<Complex64> = input
        .iter()
        .take(n)
        .map(|&x| Complex64::new(x, 0.0))
        .chain(core::iter::repeat(Complex64::new(0.0, 0.0)))
        .take(n)
        .collect();
    fft.forward(&mut buf);
    buf.truncate(n / 2 + 1);
    buf
}

/// `sum_k |X_k|^2` over the full two-sided spectrum reconstructed from the
/// one-sided bins of a length-`n` real transform.
pub fn two_sided_energy(half: &[Complex64], n: usize) -> f64 {
    let mut total = 0.0;
    for (k, x) in half.iter().enumerate() {
        let weight = if k == 0 || (n % 2 == 0 && k == n / 2) { 1.0 } else { 2.0 };
        total += weight * x.norm_sqr();
    }
    total
}

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{invalid, Result};

/// Real LP-coefficient matrix with `order` rows and `slots` columns, stored
/// slot-major: the `order` coefficients of slot `l` are contiguous.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LpCoefficients {
    order: usize,
    slots: usize,
    data: Vec<f64>,
}

impl LpCoefficients {
    pub fn zeros(order: usize, slots: usize) -> Self {
        Self { order, slots, data: vec![0.0; order * slots] }
    }

    pub fn from_slot_major(order: usize, slots: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != order * slots {
            return Err(invalid!("expected {} coefficients, got {}", order * slots, data.len()));
        }
        if data.iter().any(|a| !a.is_finite()) {
            return Err(invalid!("LP coefficients must be finite"));
        }
        Ok(Self { order, slots, data })
    }

    /// Same coefficients `a` for every slot.
    pub fn repeated(a: &[f64], slots: usize) -> Self {
        let mut data = Vec::with_capacity(a.len() * slots);
        for _ in 0..slots {
            data.extend_from_slice(a);
        }
        Self { order: a.len(), slots, data }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    /// `a_{p+1}` of slot `slot` (zero-based `p`).
    pub fn get(&self, p: usize, slot: usize) -> f64 {
        self.data[slot * self.order + p]
    }

    pub fn slot(&self, slot: usize) -> &[f64] {
        &self.data[slot * self.order..(slot + 1) * self.order]
    }

    pub fn slot_mut(&mut self, slot: usize) -> &mut [f64] {
        let p = self.order;
        &mut self.data[slot * p..(slot + 1) * p]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Concatenate slot columns of several matrices of equal order.
    pub fn concat<'a>(parts: impl IntoIterator<Item = &'a LpCoefficients>) -> Self {
        let mut order = 0;
        let mut slots = 0;
        let mut data = Vec::new();
        for m in parts {
            order = m.order;
            slots += m.slots;
            data.extend_from_slice(&m.data);
        }
        Self { order, slots, data }
    }
}

/// Complex output of the iterated convolution, `slots x order`, slot-major.
/// The real part is the LP-coefficient matrix.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComplexCoeffs {
    pub order: usize,
    pub slots: usize,
    pub data: Vec<Complex64>,
}

impl ComplexCoeffs {
    pub fn slot(&self, slot: usize) -> &[Complex64] {
        &self.data[slot * self.order..(slot + 1) * self.order]
    }

    pub fn real(&self) -> LpCoefficients {
        LpCoefficients { order: self.order, slots: self.slots, data: self.data.iter().map(|c| c.re).collect() }
    }

    pub fn max_imag(&self) -> f64 {
        self.data.iter().fold(0.0, |m, c| if c.im.abs() > m { c.im.abs() } else { m })
    }
}

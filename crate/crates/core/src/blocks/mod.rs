//! Differentiable pole-to-coefficient and coefficient-to-waveform blocks.
//!
//! * [`poles_from_params`] maps unconstrained parameters onto strictly
//!   stable poles.
//! * [`poles2lp`] expands `prod (z - r_i)` by iterated complex convolution.
//! * [`lp2wav`] solves the unit-triangular banded system `(I - W^T) x = Z`
//!   without materialising it.
//!
//! Every block carries its reverse-mode adjoint; [`dense_oracle`] and
//! [`grad_check`] exist to validate them.

mod coeffs;
pub mod gradcheck;
mod lp2wav;
mod oracle;
mod params;
mod poles2lp;
pub mod roots;

pub use coeffs::{ComplexCoeffs, LpCoefficients};
pub use gradcheck::{grad_check, GradCheckOp, GradCheckSetup};
pub use lp2wav::{lp2wav, lp2wav_adjoint, lp2wav_with_history, Lp2WavGrad};
pub use oracle::{dense_oracle, DenseSystem, ORACLE_MAX_DIM};
pub use params::{
    params_adjoint, poles_from_params, radius_to_raw, PairingMode, PoleParams, PoleParamsGrad, PoleSet, STABILITY_MARGIN,
};
pub use poles2lp::{poles2lp, poles2lp_adjoint};
pub use roots::{lp2poles, polynomial_roots};

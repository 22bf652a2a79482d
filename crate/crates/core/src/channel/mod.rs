//! Through-wall channel simulation: a mass-law transmission-loss curve
//! realized as a linear-phase FIR, pink noise, SNR mixing and silence
//! trimming, combined into aligned (distorted, clean) pairs.

mod fir;
mod noise;
mod pair;
mod stl;

pub use fir::{design_fir, FirChannel, FIR_TOLERANCE_DB};
pub use noise::{mix_at_snr, pink_noise, PINK_ROWS};
pub use pair::{make_pair, make_pair_with, utterance_seed, vad_trim, PairOptions, VadConfig};
pub use stl::{mass_law_loss_db, mass_law_stl, ChannelPreset, StlCurve, CONCRETE_5CM_DENSITY};

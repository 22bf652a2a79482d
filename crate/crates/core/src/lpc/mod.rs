//! Classical LPC: autocorrelation, Levinson-Durbin, per-slot analysis and
//! synthesis, plus Burg formant and autocorrelation pitch tracking.

mod analysis;
mod burg;
mod levinson;
mod pitch;

pub use analysis::{
    autocorrelation, lag_window, lpc_analyze, lpc_synthesize, lpc_synthesize_frames, resynthesize, LpcFrame,
    LAG_WINDOW_EXPANSION,
};
pub use burg::{burg, burg_formants, burg_formants_with, BurgConfig, Formant, FormantFrame, FormantTrack};
pub use levinson::{levinson_durbin, Levinson};
pub use pitch::{track_pitch, track_pitch_with, PitchConfig, PitchFrame, PitchTrack};

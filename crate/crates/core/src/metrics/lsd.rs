use num_traits::Float;

use crate::error::{invalid, Result};
use crate::signal::stft::stft;
use crate::signal::{SampleBuffer, StftConfig};

const LSD_FLOOR: f64 = 1e-10;

/// RMS over frames and bins of `10 log10(P_clean / P_processed)`, with both
/// power spectra floored at 1e-10. 512-point Hann frames, hop 256.
pub fn log_spectral_distance(clean: &SampleBuffer, processed: &SampleBuffer) -> Result<f64> {
    if clean.len() != processed.len() || clean.rate() != processed.rate() {
        return Err(invalid!("LSD needs equal lengths and rates"));
    }
    let cfg = StftConfig::new(512, 512, 256)?;
    let a = stft(clean.samples(), cfg)?.power();
    let b = stft(processed.samples(), cfg)?.power();
    let mut sum = 0.0;
    let mut count = 0usize;
    for (fa, fb) in a.iter().zip(&b) {
        for (pa, pb) in fa.iter().zip(fb) {
            let d = 10.0 * ((pa + LSD_FLOOR) / (pb + LSD_FLOOR)).log10();
            sum += d * d;
            count += 1;
        }
    }
    Ok(if count == 0 { 0.0 } else { (sum / count as f64).sqrt() })
}

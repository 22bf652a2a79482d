//! Audio buffers, framing, FFT, resampling, STFT and log-Mel features.

mod buffer;
pub mod fft;
pub mod mel;
pub mod resample;
pub mod stft;
pub mod window;

pub use buffer::{FrameLayout, SampleBuffer};
pub use mel::{MelConfig, MelFilterbank, MelSpectrogram};
pub use resample::Resampler;
pub use stft::{Spectrogram, StftConfig};
pub use window::Window;

/// Mean of the squared samples; zero for an empty slice.
pub fn power(samples: &[f64]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.iter().map(|x| x * x).sum::<f64>() / samples.len() as f64
}

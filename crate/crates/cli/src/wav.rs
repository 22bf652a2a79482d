//! RIFF/WAVE reading and writing: PCM16 and IEEE float32, mono.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};
use lpc_enhance_core::signal::SampleBuffer;

use crate::error::{CliError, CliResult};

const PCM16_SCALE: f64 = 32768.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BitDepth {
    #[default]
    Pcm16,
    Float32,
}

impl BitDepth {
    pub fn name(self) -> &'static str {
        match self {
            BitDepth::Pcm16 => "16",
            BitDepth::Float32 => "32f",
        }
    }
}

impl fmt::Display for BitDepth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BitDepth {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "16" => Ok(BitDepth::Pcm16),
            "32f" | "32" | "f32" => Ok(BitDepth::Float32),
            _ => Err(format!("unsupported bit depth {s:?}; use 16 or 32f")),
        }
    }
}

/// A decoded file: samples plus the format it was stored in.
#[derive(Debug, Clone)]
pub struct WavFile {
    pub buffer: SampleBuffer,
    pub depth: BitDepth,
}

pub fn read_wav(path: &Path) -> CliResult<SampleBuffer> {
    Ok(read_wav_with_depth(path)?.buffer)
}

/// Read a PCM16 or float32 file. Only the first channel of a multichannel
/// file is kept.
pub fn read_wav_with_depth(path: &Path) -> CliResult<WavFile> {
    let reader = WavReader::open(path).map_err(|e| wav_error(path, e))?;
    let spec = reader.spec();
    let channels = spec.channels as usize;
    if channels == 0 {
        return Err(CliError::validation(format!("{}: no channels", path.display())));
    }
    if channels > 1 {
        log::warn!("{}: {} channels, using the first one only", path.display(), channels);
    }
    let (interleaved, depth): (Vec<f64>, BitDepth) = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Int, 16) => (
            reader
                .into_samples::<i16>()
                .map(|s| s.map(|v| v as f64 / PCM16_SCALE))
                .collect::<Result<_, _>>()
                .map_err(|e| wav_error(path, e))?,
            BitDepth::Pcm16,
        ),
        (SampleFormat::Float, 32) => (
            reader
                .into_samples::<f32>()
                .map(|s| s.map(|v| v as f64))
                .collect::<Result<_, _>>()
                .map_err(|e| wav_error(path, e))?,
            BitDepth::Float32,
        ),
        (fmt, bits) => {
            return Err(CliError::validation(format!(
                "{}: unsupported sample format {:?} at {} bits (need PCM16 or float32)",
                path.display(),
                fmt,
                bits
            )))
        }
    };
    let samples: Vec<f64> = interleaved.into_iter().step_by(channels).collect();
    let buffer = SampleBuffer::new(samples, spec.sample_rate).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
    Ok(WavFile { buffer, depth })
}

/// Write mono audio. Samples outside [-1, 1] are clipped with a warning;
/// PCM16 stores `round(x * 32768)` saturated to the i16 range.
pub fn write_wav(path: &Path, buffer: &SampleBuffer, depth: BitDepth) -> CliResult<()> {
    let spec = WavSpec {
        channels: 1,
        sample_rate: buffer.rate(),
        bits_per_sample: match depth {
            BitDepth::Pcm16 => 16,
            BitDepth::Float32 => 32,
        },
        sample_format: match depth {
            BitDepth::Pcm16 => SampleFormat::Int,
            BitDepth::Float32 => SampleFormat::Float,
        },
    };
    let clipped = buffer.samples().iter().filter(|v| v.abs() > 1.0).count();
    if clipped > 0 {
        log::warn!("{}: {} samples outside [-1, 1] clipped", path.display(), clipped);
    }
    let mut w = WavWriter::create(path, spec).map_err(|e| wav_error(path, e))?;
    for &v in buffer.samples() {
        let v = v.clamp(-1.0, 1.0);
        match depth {
            BitDepth::Pcm16 => {
                let q = (v * PCM16_SCALE).round().clamp(i16::MIN as f64, i16::MAX as f64) as i16;
                w.write_sample(q)
            }
            BitDepth::Float32 => w.write_sample(v as f32),
        }
        .map_err(|e| wav_error(path, e))?;
    }
    w.finalize().map_err(|e| wav_error(path, e))
}

fn wav_error(path: &Path, e: hound::Error) -> CliError {
    match e {
        hound::Error::IoError(io) => CliError::io(path, io),
        hound::Error::FormatError(m) => CliError::validation(format!("{}: not a valid WAV file ({m})", path.display())),
        hound::Error::Unsupported => CliError::validation(format!("{}: unsupported WAV variant", path.display())),
        other => CliError::runtime(format!("{}: {other}", path.display())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pcm16_scaling() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.wav");
        let spec = WavSpec { channels: 1, sample_rate: 8000, bits_per_sample: 16, sample_format: SampleFormat::Int };
        let mut w = WavWriter::create(&p, spec).unwrap();
        for v in [0i16, 16384, -16384] {
            w.write_sample(v).unwrap();
        }
        w.finalize().unwrap();
        let b = read_wav(&p).unwrap();
        assert_eq!(b.samples(), &[0.0, 0.5, -0.5]);
        assert_eq!(b.rate(), 8000);
    }

    #[test]
    fn round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let x: Vec<f64> = (0..500).map(|i| (i as f64 * 0.37).sin() * 0.9).collect();
        let b = SampleBuffer::new(x.clone(), 22050).unwrap();
        let p = dir.path().join("f.wav");
        write_wav(&p, &b, BitDepth::Float32).unwrap();
        let f = read_wav_with_depth(&p).unwrap();
        assert_eq!(f.depth, BitDepth::Float32);
        for (a, b) in f.buffer.samples().iter().zip(&x) {
            assert_eq!(*a, *b as f32 as f64);
        }
        let p = dir.path().join("i.wav");
        write_wav(&p, &b, BitDepth::Pcm16).unwrap();
        let back = read_wav(&p).unwrap();
        assert!(back.samples().iter().zip(&x).all(|(a, b)| (a - b).abs() <= 1.0 / PCM16_SCALE));
        // a second pass through 16 bits is exact
        write_wav(&p, &back, BitDepth::Pcm16).unwrap();
        assert_eq!(read_wav(&p).unwrap(), back);
    }

    #[test]
    fn clipping_and_silence() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.wav");
        write_wav(&p, &SampleBuffer::new(vec![1.5, -2.0, 0.0], 8000).unwrap(), BitDepth::Pcm16).unwrap();
        let raw: Vec<i16> = WavReader::open(&p).unwrap().into_samples::<i16>().map(|s| s.unwrap()).collect();
        assert_eq!(raw, vec![32767, -32768, 0]);
        write_wav(&p, &SampleBuffer::zeros(4, 8000).unwrap(), BitDepth::Float32).unwrap();
        assert_eq!(read_wav(&p).unwrap().samples(), &[0.0; 4]);
    }

    #[test]
    fn stereo_keeps_first_channel() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.wav");
        let spec = WavSpec { channels: 2, sample_rate: 8000, bits_per_sample: 16, sample_format: SampleFormat::Int };
        let mut w = WavWriter::create(&p, spec).unwrap();
        for v in [100i16, -1, 200, -2, 300, -3] {
            w.write_sample(v).unwrap();
        }
        w.finalize().unwrap();
        let b = read_wav(&p).unwrap();
        assert_eq!(b.samples(), &[100.0 / PCM16_SCALE, 200.0 / PCM16_SCALE, 300.0 / PCM16_SCALE]);
    }

    #[test]
    fn rejects_other_formats() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("8.wav");
        let spec = WavSpec { channels: 1, sample_rate: 8000, bits_per_sample: 8, sample_format: SampleFormat::Int };
        let mut w = WavWriter::create(&p, spec).unwrap();
        w.write_sample(3i8).unwrap();
        w.finalize().unwrap();
        assert!(matches!(read_wav(&p), Err(CliError::Validation(_))));
        let junk = dir.path().join("junk.wav");
        std::fs::write(&junk, b"not a wav").unwrap();
        assert!(read_wav(&junk).is_err());
        assert!(matches!(read_wav(&dir.path().join("missing.wav")), Err(CliError::Io { .. })));
    }
}

//! Run configuration: built-in defaults, then an optional `key = value`
//! file, then command-line flags.

use std::path::Path;
use std::str::FromStr;

use lpc_enhance_core::blocks::PairingMode;
use lpc_enhance_core::channel::ChannelPreset;
use lpc_enhance_core::enhance::{EnhanceConfig, OptimizerKind};
use lpc_enhance_core::signal::mel::MelConfig;
use lpc_enhance_core::signal::FrameLayout;

use crate::error::{CliError, CliResult};
use crate::wav::BitDepth;

/// Keys accepted in a config file. Section headers are allowed and ignored.
pub const CONFIG_KEYS: &[&str] = &[
    "slot_len",
    "slots",
    "order",
    "mu",
    "lambda",
    "lr",
    "iters",
    "pairing_mode",
    "optimizer",
    "adam_beta1",
    "adam_beta2",
    "adam_eps",
    "preset",
    "taps",
    "snr_db",
    "seed",
    "epochs",
    "ridge",
    "bit_depth",
    "jobs",
    "reproducible",
    "mel_fft_size",
    "mel_win_len",
    "mel_hop",
    "mel_bands",
    "mel_fmin",
    "mel_fmax",
    "mel_floor",
];

/// Mel settings that replace the rate-derived defaults once the input rate
/// is known.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MelOverrides {
    pub fft_size: Option<usize>,
    pub win_len: Option<usize>,
    pub hop: Option<usize>,
    pub n_mels: Option<usize>,
    pub fmin: Option<f64>,
    pub fmax: Option<f64>,
    pub floor: Option<f64>,
}

impl MelOverrides {
    pub fn is_empty(&self) -> bool {
        *self == Self::default()
    }

    pub fn resolve(&self, rate: u32) -> MelConfig {
        let mut m = MelConfig::for_rate(rate);
        if let Some(v) = self.win_len {
            m.win_len = v;
            m.fft_size = m.fft_size.max(v.next_power_of_two());
        }
        if let Some(v) = self.fft_size {
            m.fft_size = v;
        }
        if let Some(v) = self.hop {
            m.hop = v;
        }
        if let Some(v) = self.n_mels {
            m.n_mels = v;
        }
        if let Some(v) = self.fmin {
            m.fmin = v;
        }
        if let Some(v) = self.fmax {
            m.fmax = v;
        }
        if let Some(v) = self.floor {
            m.floor = v;
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub layout: FrameLayout,
    pub preset: ChannelPreset,
    pub taps: usize,
    pub snr_db: Vec<f64>,
    pub enhance: EnhanceConfig,
    pub mel: MelOverrides,
    pub seed: u64,
    pub epochs: usize,
    pub ridge: f64,
    /// Output format; `None` keeps the input's format.
    pub bit_depth: Option<BitDepth>,
    pub jobs: usize,
    pub reproducible: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            layout: FrameLayout::DEFAULT,
            preset: ChannelPreset::Concrete5cm,
            taps: 513,
            snr_db: vec![-3.0, 0.0, 3.0],
            enhance: EnhanceConfig::default(),
            mel: MelOverrides::default(),
            seed: 0,
            epochs: 5,
            ridge: 1e-3,
            bit_depth: None,
            jobs: 1,
            reproducible: false,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> CliResult<T> {
    value.trim().parse().map_err(|_| CliError::validation(format!("config key {key}: cannot parse {value:?}")))
}

pub fn parse_pairing_mode(s: &str) -> Result<PairingMode, String> {
    match s {
        "conjugate" => Ok(PairingMode::Conjugate),
        "free" => Ok(PairingMode::Free),
        _ => Err(format!("unknown pairing mode {s:?}; use conjugate or free")),
    }
}

pub fn parse_optimizer(s: &str) -> Result<OptimizerKind, String> {
    match s {
        "adam" => Ok(OptimizerKind::default()),
        "sgd" => Ok(OptimizerKind::Sgd),
        _ => Err(format!("unknown optimizer {s:?}; use adam or sgd")),
    }
}

pub fn parse_preset(s: &str) -> Result<ChannelPreset, String> {
    s.parse().map_err(|e: lpc_enhance_core::Error| e.to_string())
}

/// SNR in dB; `inf` means no noise.
pub fn parse_snr(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("invalid SNR {s:?}"))?;
    if v.is_nan() || v == f64::NEG_INFINITY {
        return Err(format!("invalid SNR {s:?}"));
    }
    Ok(v)
}

fn parse_bool(key: &str, value: &str) -> CliResult<bool> {
    match value.trim() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        _ => Err(CliError::validation(format!("config key {key}: expected a boolean, got {value:?}"))),
    }
}

impl RunConfig {
    /// Defaults overlaid with `path`, if given.
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let mut cfg = Self::default();
        if let Some(p) = path {
            if !p.is_file() {
                return Err(CliError::validation(format!("config file {} does not exist", p.display())));
            }
            let ini = ini::Ini::load_from_file(p)
                .map_err(|e| CliError::validation(format!("{}: {e}", p.display())))?;
            for (_, props) in ini.iter() {
                for (k, v) in props.iter() {
                    cfg.set(k, v)?;
                }
            }
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        let e = &mut self.enhance;
        fn map<T>(key: &str, r: Result<T, String>) -> CliResult<T> {
            r.map_err(|m| CliError::validation(format!("config key {key}: {m}")))
        }
        match key {
            "slot_len" => self.layout.slot_len = parse(key, value)?,
            "slots" => self.layout.slots = parse(key, value)?,
            "order" => self.layout.order = parse(key, value)?,
            "mu" => e.mu = parse(key, value)?,
            "lambda" => e.lambda = parse(key, value)?,
            "lr" => e.lr = parse(key, value)?,
            "iters" => e.iters = parse(key, value)?,
            "pairing_mode" => e.pairing_mode = map(key, parse_pairing_mode(value.trim()))?,
            "optimizer" => e.optimizer = map(key, parse_optimizer(value.trim()))?,
            "adam_beta1" | "adam_beta2" | "adam_eps" => {
                let v: f64 = parse(key, value)?;
                match &mut e.optimizer {
                    OptimizerKind::Adam { beta1, beta2, eps } => match key {
                        "adam_beta1" => *beta1 = v,
                        "adam_beta2" => *beta2 = v,
                        _ => *eps = v,
                    },
                    OptimizerKind::Sgd => {
                        return Err(CliError::validation(format!("config key {key} needs optimizer = adam")))
                    }
                }
            }
            "preset" => self.preset = map(key, parse_preset(value.trim()))?,
            "taps" => self.taps = parse(key, value)?,
            "snr_db" => {
                self.snr_db = value.split(',').map(|s| map(key, parse_snr(s))).collect::<CliResult<_>>()?;
            }
            "seed" => self.seed = parse(key, value)?,
            "epochs" => self.epochs = parse(key, value)?,
            "ridge" => self.ridge = parse(key, value)?,
            "bit_depth" => self.bit_depth = Some(map(key, value.trim().parse())?),
            "jobs" => self.jobs = parse(key, value)?,
            "reproducible" => self.reproducible = parse_bool(key, value)?,
            "mel_fft_size" => self.mel.fft_size = Some(parse(key, value)?),
            "mel_win_len" => self.mel.win_len = Some(parse(key, value)?),
            "mel_hop" => self.mel.hop = Some(parse(key, value)?),
            "mel_bands" => self.mel.n_mels = Some(parse(key, value)?),
            "mel_fmin" => self.mel.fmin = Some(parse(key, value)?),
            "mel_fmax" => self.mel.fmax = Some(parse(key, value)?),
            "mel_floor" => self.mel.floor = Some(parse(key, value)?),
            _ => {
                return Err(CliError::validation(format!(
                    "unknown config key {key:?}; known keys: {}",
                    CONFIG_KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Enhancement settings with the layout and Mel analysis resolved for
    /// an input at `rate`.
    pub fn enhance_for(&self, rate: u32) -> CliResult<EnhanceConfig> {
        let mut e = self.enhance;
        e.layout = self.layout;
        e.mel = (!self.mel.is_empty()).then(|| self.mel.resolve(rate));
        e.validate()?;
        Ok(e)
    }

    pub fn validate(&self) -> CliResult<()> {
        self.layout.validate()?;
        if self.jobs == 0 {
            return Err(CliError::validation("jobs must be at least 1"));
        }
        if self.snr_db.is_empty() {
            return Err(CliError::validation("snr_db needs at least one value"));
        }
        let mut e = self.enhance;
        e.layout = self.layout;
        e.validate()?;
        Ok(())
    }

    /// Worker threads after the reproducibility flag.
    pub fn threads(&self) -> usize {
        if self.reproducible {
            1
        } else {
            self.jobs
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = RunConfig::default();
        assert_eq!((c.layout.slot_len, c.layout.slots, c.layout.order), (46, 120, 11));
        assert_eq!((c.enhance.mu, c.enhance.lambda, c.enhance.lr), (1.0, 0.3, 0.001));
        assert_eq!(c.snr_db, vec![-3.0, 0.0, 3.0]);
        c.validate().unwrap();
    }

    #[test]
    fn file_values_apply_and_unknown_keys_fail() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.ini");
        std::fs::write(&p, "# comment\nmu = 2\n[enhance]\niters = 7\npairing_mode = free\nsnr_db = -3, inf\nmel_bands = 40\n")
            .unwrap();
        let c = RunConfig::load(Some(&p)).unwrap();
        assert_eq!(c.enhance.mu, 2.0);
        assert_eq!(c.enhance.iters, 7);
        assert_eq!(c.enhance.pairing_mode, PairingMode::Free);
        assert_eq!(c.snr_db, vec![-3.0, f64::INFINITY]);
        assert_eq!(c.enhance_for(22050).unwrap().mel.unwrap().n_mels, 40);
        std::fs::write(&p, "bogus = 1\n").unwrap();
        assert!(matches!(RunConfig::load(Some(&p)), Err(CliError::Validation(_))));
        std::fs::write(&p, "mu = abc\n").unwrap();
        assert!(RunConfig::load(Some(&p)).is_err());
        assert!(RunConfig::load(Some(&dir.path().join("none.ini"))).is_err());
    }

    #[test]
    fn every_key_is_settable() {
        let mut c = RunConfig::default();
        for k in CONFIG_KEYS {
            let v = match *k {
                "pairing_mode" => "conjugate",
                "optimizer" => "adam",
                "preset" => "identity",
                "bit_depth" => "32f",
                "reproducible" => "true",
                "snr_db" => "0",
                "adam_beta1" | "adam_beta2" | "adam_eps" | "mel_floor" | "lr" | "ridge" => "0.5",
                _ => "3",
            };
            c.set(k, v).unwrap_or_else(|e| panic!("{k}: {e}"));
        }
    }
}

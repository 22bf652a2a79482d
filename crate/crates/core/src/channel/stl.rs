use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_traits::Float;

use super::fir::{design_fir, FirChannel};
use crate::error::{invalid, Error, Result};

/// Surface density of a 5 cm concrete wall, kg/m^2.
pub const CONCRETE_5CM_DENSITY: f64 = 115.0;

/// Critical (coincidence) frequency of 5 cm concrete, Hz.
const CONCRETE_5CM_CRITICAL_HZ: f64 = 360.0;

const PRESET_GRID_POINTS: usize = 256;
// Below this the loss is held. Starting lower puts a kink inside the
// resolution of a 513-tap design and costs more than 1 dB near it.
const PRESET_GRID_START_HZ: f64 = 100.0;

/// Transmission loss sampled on an ascending frequency grid. Between grid
/// points the loss is interpolated linearly in log-frequency; outside the
/// grid the nearest end value is held.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StlCurve {
    grid: Vec<f64>,
    loss_db: Vec<f64>,
}

impl StlCurve {
    pub fn new(grid: Vec<f64>, loss_db: Vec<f64>) -> Result<Self> {
        if grid.is_empty() || grid.len() != loss_db.len() {
            return Err(invalid!("grid and loss must be non-empty and equally long"));
        }
        if grid.iter().any(|f| !(f.is_finite() && *f > 0.0)) || grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid!("grid must be positive and strictly ascending"));
        }
        if loss_db.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
            return Err(invalid!("loss must be finite and non-negative"));
        }
        Ok(Self { grid, loss_db })
    }

    /// A constant loss at every frequency.
    pub fn flat(loss_db: f64, rate: u32) -> Result<Self> {
        Self::new(vec![rate as f64 / 2.0], vec![loss_db])
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn loss_db(&self) -> &[f64] {
        &self.loss_db
    }

    pub fn loss_at(&self, f: f64) -> f64 {
        let g = &self.grid;
        let n = g.len();
        if f <= g[0] {
            return self.loss_db[0];
        }
        if f >= g[n - 1] {
            return self.loss_db[n - 1];
        }
        let i = g.partition_point(|&x| x <= f) - 1;
        let t = (f.ln() - g[i].ln()) / (g[i + 1].ln() - g[i].ln());
        self.loss_db[i] + t * (self.loss_db[i + 1] - self.loss_db[i])
    }

    /// Check the grid fits below Nyquist.
    pub fn validate_for(&self, rate: u32) -> Result<()> {
        let nyquist = rate as f64 / 2.0;
        if self.grid[self.grid.len() - 1] > nyquist * (1.0 + 1e-12) {
            return Err(invalid!("curve grid extends past Nyquist ({} Hz)", nyquist));
        }
        Ok(())
    }
}

/// Field-incidence mass law with a 0 dB floor.
pub fn mass_law_loss_db(f: f64, surface_density: f64) -> f64 {
    (20.0 * (f * surface_density).log10() - 47.0).max(0.0)
}

pub fn mass_law_stl(surface_density: f64, grid: &[f64]) -> Result<StlCurve> {
    if !(surface_density.is_finite() && surface_density > 0.0) {
        return Err(invalid!("surface density must be positive, got {surface_density}"));
    }
    StlCurve::new(grid.to_vec(), grid.iter().map(|&f| mass_law_loss_db(f, surface_density)).collect())
}

/// `n` log-spaced points from `start` to `stop` inclusive.
fn log_grid(start: f64, stop: f64, n: usize) -> Vec<f64> {
    let (a, b) = (start.ln(), stop.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ChannelPreset {
    /// Mass law for 5 cm concrete.
    #[default]
    Concrete5cm,
    /// Mass law up to half the coincidence frequency, constant above.
    Concrete5cmSharp,
    /// No loss.
    Identity,
}

impl ChannelPreset {
    pub const ALL: [ChannelPreset; 3] = [Self::Concrete5cm, Self::Concrete5cmSharp, Self::Identity];

    pub fn name(self) -> &'static str {
        match self {
            Self::Concrete5cm => "concrete_5cm",
            Self::Concrete5cmSharp => "concrete_5cm_sharp",
            Self::Identity => "identity",
        }
    }

    pub fn curve(self, rate: u32) -> Result<StlCurve> {
        let nyquist = rate as f64 / 2.0;
        match self {
            Self::Identity => StlCurve::flat(0.0, rate),
            Self::Concrete5cm => mass_law_stl(CONCRETE_5CM_DENSITY, &log_grid(PRESET_GRID_START_HZ, nyquist, PRESET_GRID_POINTS)),
            Self::Concrete5cmSharp => {
                let grid = log_grid(PRESET_GRID_START_HZ, nyquist, PRESET_GRID_POINTS);
                let knee = 0.5 * CONCRETE_5CM_CRITICAL_HZ;
                let loss = grid.iter().map(|&f| mass_law_loss_db(f.min(knee), CONCRETE_5CM_DENSITY)).collect();
                StlCurve::new(grid, loss)
            }
        }
    }

    /// Filter for the preset. `Identity` is the exact single unit tap rather
    /// than a designed approximation of it.
    pub fn channel(self, n_taps: usize, rate: u32) -> Result<FirChannel> {
        match self {
            Self::Identity => FirChannel::new(vec![1.0], rate),
            _ => design_fir(&self.curve(rate)?, n_taps, rate),
        }
    }
}

impl fmt::Display for ChannelPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChannelPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidArgument(String::from("unknown channel preset ") + s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_channel_is_transparent() {
        let ch = ChannelPreset::Identity.channel(513, 22050).unwrap();
        let x = [0.25, -0.5, 0.125, 1.0];
        assert_eq!(ch.apply(&x), x.to_vec());
        assert_eq!(ChannelPreset::Concrete5cm.channel(513, 22050).unwrap().taps().len(), 513);
    }

    #[test]
    fn mass_law_values() {
        assert!((mass_law_loss_db(1000.0, 115.0) - 54.214).abs() < 1e-3);
        let d = mass_law_loss_db(2000.0, 115.0) - mass_law_loss_db(1000.0, 115.0);
        assert!((d - 6.0206).abs() < 1e-4);
        assert_eq!(mass_law_loss_db(100.0, 1.0), 0.0);
    }

    #[test]
    fn interpolation_holds_ends() {
        let c = StlCurve::new(vec![100.0, 1000.0], vec![10.0, 30.0]).unwrap();
        assert_eq!(c.loss_at(10.0), 10.0);
        assert_eq!(c.loss_at(5000.0), 30.0);
        assert!((c.loss_at((100.0f64 * 1000.0).sqrt()) - 20.0).abs() < 1e-12);
    }

    #[test]
    fn presets() {
        for p in ChannelPreset::ALL {
            assert_eq!(p.name().parse::<ChannelPreset>().unwrap(), p);
            p.curve(22050).unwrap().validate_for(22050).unwrap();
        }
        let sharp = ChannelPreset::Concrete5cmSharp.curve(22050).unwrap();
        assert_eq!(sharp.loss_at(1000.0), sharp.loss_at(4000.0));
        assert!("brick".parse::<ChannelPreset>().is_err());
    }

    #[test]
    fn bad_curves_rejected() {
        assert!(StlCurve::new(vec![100.0, 50.0], vec![0.0, 0.0]).is_err());
        assert!(StlCurve::new(vec![100.0], vec![-1.0]).is_err());
        assert!(mass_law_stl(0.0, &[100.0]).is_err());
        assert!(StlCurve::flat(0.0, 22050).unwrap().validate_for(8000).is_err());
    }
}

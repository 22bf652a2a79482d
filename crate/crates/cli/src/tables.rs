//! CSV outputs. Missing values are written as `NA`.

use std::fs::File;
use std::path::Path;

use lpc_enhance_core::blocks::{LpCoefficients, PoleSet};
use lpc_enhance_core::enhance::LossReport;
use lpc_enhance_core::lpc::{FormantTrack, PitchTrack};
use lpc_enhance_core::metrics::FormantHistogram;

use crate::error::{CliError, CliResult};

const NA: &str = "NA";

struct Table<'a> {
    path: &'a Path,
    w: csv::Writer<File>,
}

impl<'a> Table<'a> {
    fn create<S: AsRef<str>>(path: &'a Path, header: &[S]) -> CliResult<Self> {
        let file = File::create(path).map_err(|e| CliError::io(path, e))?;
        let mut t = Self { path, w: csv::Writer::from_writer(file) };
        t.row(header.iter().map(|s| s.as_ref().to_string()))?;
        Ok(t)
    }

    fn row(&mut self, fields: impl IntoIterator<Item = String>) -> CliResult<()> {
        let fields: Vec<String> = fields.into_iter().collect();
        self.w.write_record(&fields).map_err(|e| csv_error(self.path, e))
    }

    fn finish(mut self) -> CliResult<()> {
        self.w.flush().map_err(|e| CliError::io(self.path, e))
    }
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => CliError::io(path, io),
            _ => unreachable!(),
        }
    } else {
        CliError::runtime(format!("{}: {e}", path.display()))
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| NA.to_string(), |v| v.to_string())
}

/// `frame_time_s, f1, b1, f2, b2, ...` for the first `n` formants.
pub fn write_formants(path: &Path, track: &FormantTrack, n: usize) -> CliResult<()> {
    let mut header = vec!["frame_time_s".to_string()];
    for i in 1..=n {
        header.push(format!("f{i}"));
        header.push(format!("b{i}"));
    }
    let mut t = Table::create(path, &header)?;
    for fr in &track.frames {
        let mut row = vec![fr.time_s.to_string()];
        for i in 0..n {
            let f = fr.formants.get(i);
            row.push(opt(f.map(|f| f.frequency_hz)));
            row.push(opt(f.map(|f| f.bandwidth_hz)));
        }
        t.row(row)?;
    }
    t.finish()
}

/// `frame_time_s, f0` with `NA` for unvoiced frames.
pub fn write_pitch(path: &Path, track: &PitchTrack) -> CliResult<()> {
    let mut t = Table::create(path, &["frame_time_s", "f0"])?;
    for fr in &track.frames {
        t.row([fr.time_s.to_string(), opt(fr.f0_hz)])?;
    }
    t.finish()
}

pub fn write_trace(path: &Path, trace: &[LossReport]) -> CliResult<()> {
    let mut t = Table::create(path, &["iter", "total", "mel", "wave", "lp"])?;
    for (i, r) in trace.iter().enumerate() {
        t.row([i.to_string(), r.total.to_string(), r.mel.to_string(), r.wave.to_string(), r.lp.to_string()])?;
    }
    t.finish()
}

pub fn write_histogram(path: &Path, h: &FormantHistogram) -> CliResult<()> {
    let mut t = Table::create(path, &["bin_center_hz", "count"])?;
    for (c, n) in h.centers_hz().iter().zip(&h.counts) {
        t.row([c.to_string(), n.to_string()])?;
    }
    t.finish()
}

/// One row per slot: `slot, time_s, a1..aP`; `time_s` is the slot start.
pub fn write_coefficients(path: &Path, a: &LpCoefficients, slot_len: usize, rate: u32) -> CliResult<()> {
    let mut header = vec!["slot".to_string(), "time_s".to_string()];
    header.extend((1..=a.order()).map(|p| format!("a{p}")));
    let mut t = Table::create(path, &header)?;
    for s in 0..a.slots() {
        let mut row = vec![s.to_string(), slot_time(s, slot_len, rate).to_string()];
        row.extend(a.slot(s).iter().map(|v| v.to_string()));
        t.row(row)?;
    }
    t.finish()
}

/// Slot-major pole list with polar form and the matching frequency.
pub fn write_poles(path: &Path, poles: &PoleSet, slot_len: usize, rate: u32) -> CliResult<()> {
    let mut t = Table::create(path, &["slot", "time_s", "index", "re", "im", "radius", "frequency_hz"])?;
    for s in 0..poles.slots {
        for (i, p) in poles.slot(s).iter().enumerate() {
            let hz = p.arg() * rate as f64 / (2.0 * std::f64::consts::PI);
            t.row([
                s.to_string(),
                slot_time(s, slot_len, rate).to_string(),
                i.to_string(),
                p.re.to_string(),
                p.im.to_string(),
                p.norm().to_string(),
                hz.to_string(),
            ])?;
        }
    }
    t.finish()
}

fn slot_time(slot: usize, slot_len: usize, rate: u32) -> f64 {
    (slot * slot_len) as f64 / rate as f64
}

use std::fs;
use std::path::{Path, PathBuf};

use lpc_enhance_core::blocks::{grad_check, lp2poles, GradCheckOp, GradCheckSetup, LpCoefficients, PoleSet};
use lpc_enhance_core::channel::{make_pair, utterance_seed};
use lpc_enhance_core::enhance::{enhance_fit, train_regressor, RegressorModel, TrainConfig, TrainPair, WORK_RATE};
use lpc_enhance_core::lpc::{burg_formants_with, lpc_analyze, resynthesize, track_pitch_with, BurgConfig, PitchConfig};
use lpc_enhance_core::metrics::{evaluate, EvalConfig};
use lpc_enhance_core::signal::resample::resample;
use lpc_enhance_core::signal::{FrameLayout, SampleBuffer};
use lpc_enhance_core::synth::vowel_sequence;
use lpc_enhance_core::Complex64;
use rayon::prelude::*;

use crate::args::*;
use crate::config::RunConfig;
use crate::error::{at, CliError, CliResult};
use crate::manifest::{read_manifest, write_manifest, ManifestRecord};
use crate::tables;
use crate::wav::{read_wav_with_depth, write_wav, BitDepth, WavFile};

pub fn run(cli: Cli) -> CliResult<()> {
    let mut cfg = RunConfig::load(cli.global.config.as_deref())?;
    if let Some(s) = cli.global.seed {
        cfg.seed = s;
    }
    if let Some(j) = cli.global.jobs {
        cfg.jobs = j;
    }
    cfg.reproducible |= cli.global.reproducible;
    match cli.command {
        Command::Distort(a) => distort(cfg, a),
        Command::Analyze(a) => analyze(cfg, a),
        Command::Resynth(a) => resynth(cfg, a),
        Command::Enhance(a) => enhance(cfg, a),
        Command::Train(a) => train(cfg, a),
        Command::Apply(a) => apply(cfg, a),
        Command::Eval(a) => eval(cfg, a),
        Command::Gradcheck(a) => gradcheck(cfg, a),
        Command::MakeCorpus(a) => make_corpus(cfg, a),
        Command::SynthVowels(a) => synth_vowels(cfg, a),
    }
}

fn require_file(path: &Path) -> CliResult<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::validation(format!("input file {} does not exist", path.display())))
    }
}

fn read_input(path: &Path) -> CliResult<WavFile> {
    require_file(path)?;
    read_wav_with_depth(path)
}

fn set_layout(cfg: &mut RunConfig, a: &LayoutArgs) {
    if let Some(v) = a.slot_len {
        cfg.layout.slot_len = v;
    }
    if let Some(v) = a.slots {
        cfg.layout.slots = v;
    }
    if let Some(v) = a.order {
        cfg.layout.order = v;
    }
}

fn set_loss(cfg: &mut RunConfig, a: &LossArgs) {
    let e = &mut cfg.enhance;
    if let Some(v) = a.mu {
        e.mu = v;
    }
    if let Some(v) = a.lambda {
        e.lambda = v;
    }
    if let Some(v) = a.lr {
        e.lr = v;
    }
    if let Some(v) = a.pairing_mode {
        e.pairing_mode = v;
    }
    if let Some(v) = a.optimizer {
        e.optimizer = v;
    }
}

fn set_channel(cfg: &mut RunConfig, a: &ChannelArgs) {
    if let Some(v) = a.preset {
        cfg.preset = v;
    }
    if let Some(v) = a.taps {
        cfg.taps = v;
    }
}

fn out_depth(cfg: &RunConfig, a: &OutputArgs, input: BitDepth) -> BitDepth {
    a.bit_depth.or(cfg.bit_depth).unwrap_or(input)
}

fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}_{suffix}.csv"))
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::runtime(e.to_string()))?;
    s.push('\n');
    fs::write(path, s).map_err(|e| CliError::io(path, e))
}

/// Peak allowed in written pairs, leaving headroom below full scale.
const PAIR_PEAK: f64 = 0.99;

/// Scale both members of a pair by the same gain when either would clip, so
/// the SNR and the alignment survive writing.
fn fit_pair(d: SampleBuffer, c: SampleBuffer) -> (SampleBuffer, SampleBuffer) {
    let peak = d.samples().iter().chain(c.samples()).fold(0.0f64, |m, v| m.max(v.abs()));
    if peak <= PAIR_PEAK {
        return (d, c);
    }
    let g = PAIR_PEAK / peak;
    log::info!("pair peak {peak:.3}, scaling both signals by {g:.4}");
    (d.scaled(g), c.scaled(g))
}

fn distort(mut cfg: RunConfig, a: DistortArgs) -> CliResult<()> {
    set_channel(&mut cfg, &a.channel);
    let f = read_input(&a.input)?;
    let rate = f.buffer.rate();
    let ch = cfg.preset.channel(cfg.taps, rate)?;
    let (d, c) = make_pair(&f.buffer, &ch, a.snr.unwrap_or(0.0), cfg.seed).map_err(at(&a.input))?;
    let (d, c) = fit_pair(d, c);
    let depth = out_depth(&cfg, &a.output, f.depth);
    write_wav(&a.out, &d, depth)?;
    if let Some(p) = &a.clean_out {
        write_wav(p, &c, depth)?;
    }
    Ok(())
}

fn analyze(mut cfg: RunConfig, a: AnalyzeArgs) -> CliResult<()> {
    set_layout(&mut cfg, &a.layout);
    cfg.layout.validate()?;
    let f = read_input(&a.input)?;
    let x = resample(&f.buffer, WORK_RATE)?;
    let frames = lpc_analyze(&x, &cfg.layout).map_err(at(&a.input))?;
    let coeffs = LpCoefficients::concat(frames.iter().map(|f| &f.coeffs));
    let mut poles: Vec<Complex64> = Vec::with_capacity(coeffs.as_slice().len());
    for s in 0..coeffs.slots() {
        poles.extend(lp2poles(coeffs.slot(s))?);
    }
    let poles = PoleSet { order: coeffs.order(), slots: coeffs.slots(), poles };
    let formants = burg_formants_with(&x, &BurgConfig::for_rate(WORK_RATE)).map_err(at(&a.input))?;
    let pitch = track_pitch_with(&x, &PitchConfig::for_rate(WORK_RATE)).map_err(at(&a.input))?;
    let n = formants.frames.iter().map(|f| f.formants.len()).max().unwrap_or(0).max(1);
    tables::write_coefficients(&a.out, &coeffs, cfg.layout.slot_len, WORK_RATE)?;
    tables::write_poles(&a.poles.unwrap_or_else(|| sibling(&a.out, "poles")), &poles, cfg.layout.slot_len, WORK_RATE)?;
    tables::write_formants(&a.formants.unwrap_or_else(|| sibling(&a.out, "formants")), &formants, n)?;
    tables::write_pitch(&a.pitch.unwrap_or_else(|| sibling(&a.out, "pitch")), &pitch)?;
    println!(
        "{} slots of order {}, {} formant frames, voiced fraction {:.3}",
        coeffs.slots(),
        coeffs.order(),
        formants.frames.len(),
        pitch.voiced_fraction()
    );
    Ok(())
}

fn resynth(mut cfg: RunConfig, a: ResynthArgs) -> CliResult<()> {
    set_layout(&mut cfg, &a.layout);
    let f = read_input(&a.input)?;
    let y = resynthesize(&f.buffer, &cfg.layout).map_err(at(&a.input))?;
    write_wav(&a.out, &y, out_depth(&cfg, &a.output, f.depth))
}

fn read_pair(clean: &Path, other: &Path) -> CliResult<(WavFile, WavFile)> {
    let c = read_input(clean)?;
    let o = read_input(other)?;
    if c.buffer.rate() != o.buffer.rate() || c.buffer.len() != o.buffer.len() {
        return Err(CliError::validation(format!(
            "{} ({} samples @ {} Hz) and {} ({} samples @ {} Hz) are not aligned",
            clean.display(),
            c.buffer.len(),
            c.buffer.rate(),
            other.display(),
            o.buffer.len(),
            o.buffer.rate()
        )));
    }
    Ok((c, o))
}

fn enhance(mut cfg: RunConfig, a: EnhanceArgs) -> CliResult<()> {
    set_layout(&mut cfg, &a.layout);
    set_loss(&mut cfg, &a.loss);
    if let Some(n) = a.iters {
        cfg.enhance.iters = n;
    }
    let (clean, distorted) = read_pair(&a.clean, &a.distorted)?;
    let ecfg = cfg.enhance_for(distorted.buffer.rate())?;
    let out = enhance_fit(&distorted.buffer, &clean.buffer, &ecfg)?;
    write_wav(&a.out, &out.enhanced, out_depth(&cfg, &a.output, distorted.depth))?;
    if let Some(p) = &a.trace {
        tables::write_trace(p, &out.trace)?;
    }
    let (first, b) = (out.trace[0], out.best);
    println!("iterations {} stop {:?}", out.trace.len(), out.stop);
    println!("initial total {:.6} mel {:.6} wave {:.6e} lp {:.6}", first.total, first.mel, first.wave, first.lp);
    println!("best@{} total {:.6} mel {:.6} wave {:.6e} lp {:.6}", out.best_iter, b.total, b.mel, b.wave, b.lp);
    Ok(())
}

fn train(mut cfg: RunConfig, a: TrainArgs) -> CliResult<()> {
    set_layout(&mut cfg, &a.layout);
    set_loss(&mut cfg, &a.loss);
    if let Some(n) = a.epochs {
        cfg.epochs = n;
    }
    if let Some(r) = a.ridge {
        cfg.ridge = r;
    }
    require_file(&a.manifest)?;
    let records = read_manifest(&a.manifest)?;
    if records.len() < 2 {
        return Err(CliError::validation(format!("{}: training needs at least 2 pairs", a.manifest.display())));
    }
    let pairs: Vec<(WavFile, WavFile)> =
        records.iter().map(|r| read_pair(&r.clean_path, &r.distorted_path)).collect::<CliResult<_>>()?;
    let rate = pairs[0].0.buffer.rate();
    if let Some(r) = records.iter().zip(&pairs).find(|(_, p)| p.0.buffer.rate() != rate) {
        return Err(CliError::validation(format!("pair {} is not at {} Hz like the first pair", r.0.id, rate)));
    }
    let tcfg = TrainConfig { epochs: cfg.epochs, seed: cfg.seed, ridge: cfg.ridge, enhance: cfg.enhance_for(rate)? };
    let tp: Vec<TrainPair> = pairs.iter().map(|(c, d)| TrainPair { distorted: &d.buffer, clean: &c.buffer }).collect();
    let out = train_regressor(&tp, &tcfg)?;
    println!("initial loss {:.6}", out.initial_loss);
    for (i, l) in out.epoch_losses.iter().enumerate() {
        println!("epoch {} loss {:.6}", i + 1, l);
    }
    write_json(&a.model, &out.model)
}

fn apply(cfg: RunConfig, a: ApplyArgs) -> CliResult<()> {
    require_file(&a.model)?;
    let text = fs::read_to_string(&a.model).map_err(|e| CliError::io(&a.model, e))?;
    let model: RegressorModel = serde_json::from_str(&text)
        .map_err(|e| CliError::validation(format!("{}: not a model file ({e})", a.model.display())))?;
    model.validate().map_err(at(&a.model))?;
    let f = read_input(&a.input)?;
    let y = model.apply(&f.buffer).map_err(at(&a.input))?;
    write_wav(&a.out, &y, out_depth(&cfg, &a.output, f.depth))
}

fn eval(mut cfg: RunConfig, a: EvalArgs) -> CliResult<()> {
    set_layout(&mut cfg, &a.layout);
    cfg.layout.validate()?;
    let (clean, test) = read_pair(&a.clean, &a.test)?;
    let ecfg = EvalConfig { layout: cfg.layout, ..EvalConfig::default() };
    let report = evaluate(&clean.buffer, &test.buffer, &ecfg)?;
    write_json(&a.report, &report)?;
    if let Some(p) = &a.f1_hist {
        tables::write_histogram(p, &report.formant_diff.f1)?;
    }
    if let Some(p) = &a.f2_hist {
        tables::write_histogram(p, &report.formant_diff.f2)?;
    }
    let peak = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |v| v.to_string());
    println!("stoi {:.4}", report.stoi);
    println!("lsd_db {:.4}", report.lsd_db);
    println!("f1_peak_hz {}", peak(report.formant_diff.f1.peak_center_hz));
    println!("f2_peak_hz {}", peak(report.formant_diff.f2.peak_center_hz));
    println!("pole_distance {:.6}", report.pole_pairs.mean_distance);
    Ok(())
}

fn gradcheck(cfg: RunConfig, a: GradcheckArgs) -> CliResult<()> {
    let layout = FrameLayout::new(a.slot_len, a.slots, a.order)?;
    if !(a.eps > 0.0 && a.eps.is_finite()) {
        return Err(CliError::validation("eps must be positive"));
    }
    let ops: &[GradCheckOp] = match a.op {
        GradcheckOpArg::All => &GradCheckOp::ALL,
        GradcheckOpArg::Poles2lp => &[GradCheckOp::Poles2Lp],
        GradcheckOpArg::Lp2wav => &[GradCheckOp::Lp2Wav],
        GradcheckOpArg::Composed => &[GradCheckOp::Composed],
    };
    let mut setup = GradCheckSetup::new(layout, cfg.seed);
    setup.eps = a.eps;
    setup.mode = a.pairing_mode;
    let mut failed = Vec::new();
    for &op in ops {
        let e = grad_check(op, &setup);
        let ok = e < op.threshold();
        println!("{} max_rel_error {:.3e} threshold {:.0e} {}", op.name(), e, op.threshold(), if ok { "ok" } else { "FAIL" });
        if !ok {
            failed.push(op.name());
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::runtime(format!("gradient check failed: {}", failed.join(", "))))
    }
}

fn snr_tag(snr: f64) -> String {
    if snr.is_finite() {
        format!("snr{snr}")
    } else {
        "nonoise".to_string()
    }
}

fn make_corpus(mut cfg: RunConfig, a: MakeCorpusArgs) -> CliResult<()> {
    set_channel(&mut cfg, &a.channel);
    if !a.snr.is_empty() {
        cfg.snr_db = a.snr.clone();
    }
    cfg.validate()?;
    if !a.clean_dir.is_dir() {
        return Err(CliError::validation(format!("{} is not a directory", a.clean_dir.display())));
    }
    let mut files: Vec<PathBuf> = fs::read_dir(&a.clean_dir)
        .map_err(|e| CliError::io(&a.clean_dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x.eq_ignore_ascii_case("wav")))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::validation(format!("no .wav files in {}", a.clean_dir.display())));
    }
    fs::create_dir_all(&a.out_dir).map_err(|e| CliError::io(&a.out_dir, e))?;
    let jobs: Vec<(usize, &PathBuf, f64)> = files
        .iter()
        .flat_map(|f| cfg.snr_db.iter().map(move |&s| (f, s)))
        .enumerate()
        .map(|(i, (f, s))| (i, f, s))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads())
        .build()
        .map_err(|e| CliError::runtime(e.to_string()))?;
    let records: Vec<ManifestRecord> = pool.install(|| {
        jobs.par_iter()
            .map(|&(i, path, snr)| {
                let f = read_wav_with_depth(path)?;
                let ch = cfg.preset.channel(cfg.taps, f.buffer.rate())?;
                let seed = utterance_seed(cfg.seed, i as u64);
                let (d, c) = make_pair(&f.buffer, &ch, snr, seed).map_err(at(path))?;
                let (d, c) = fit_pair(d, c);
                let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                let id = format!("{stem}_{}", snr_tag(snr));
                let clean_path = a.out_dir.join(format!("{id}_clean.wav"));
                let distorted_path = a.out_dir.join(format!("{id}_distorted.wav"));
                let depth = out_depth(&cfg, &a.output, f.depth);
                write_wav(&clean_path, &c, depth)?;
                write_wav(&distorted_path, &d, depth)?;
                Ok(ManifestRecord {
                    id,
                    clean_path,
                    distorted_path,
                    snr_db: snr,
                    channel_preset: cfg.preset.name().to_string(),
                    seed,
                })
            })
            .collect::<CliResult<_>>()
    })?;
    write_manifest(&a.manifest, &records)?;
    println!("{} pairs from {} files", records.len(), files.len());
    Ok(())
}

fn synth_vowels(cfg: RunConfig, a: SynthVowelsArgs) -> CliResult<()> {
    let x: SampleBuffer = vowel_sequence(a.rate, a.duration, cfg.seed)?;
    write_wav(&a.out, &x, out_depth(&cfg, &a.output, BitDepth::Float32))
}

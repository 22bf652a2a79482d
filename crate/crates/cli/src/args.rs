use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lpc_enhance_core::blocks::PairingMode;
use lpc_enhance_core::channel::ChannelPreset;
use lpc_enhance_core::enhance::OptimizerKind;

use crate::config::{parse_optimizer, parse_pairing_mode, parse_preset, parse_snr};
use crate::wav::BitDepth;

#[derive(Debug, Parser)]
#[command(name = "lpc-enhance", version, about = "LPC-based speech enhancement through a simulated wall")]
#[command(propagate_version = true, disable_help_subcommand = true)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Config file of `key = value` lines; command-line flags override it
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Master seed for every random choice
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Worker threads for commands that process several utterances
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
    /// Force single-threaded execution (outputs are identical either way)
    #[arg(long, global = true)]
    pub reproducible: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pass a clean recording through the wall channel and add pink noise.
    /// Both outputs share one gain that keeps their peak below full scale
    Distort(DistortArgs),
    /// Write LPC coefficients, poles, formants and pitch of a recording
    Analyze(AnalyzeArgs),
    /// LPC analysis followed by synthesis; reproduces the input
    Resynth(ResynthArgs),
    /// Fit pole parameters so the resynthesized distorted speech matches the clean reference
    Enhance(EnhanceArgs),
    /// Train the linear pole regressor on a corpus manifest
    Train(TrainArgs),
    /// Enhance a recording with a trained regressor
    Apply(ApplyArgs),
    /// Compare a test recording against its clean reference
    Eval(EvalArgs),
    /// Check block adjoints against central finite differences
    Gradcheck(GradcheckArgs),
    /// Build distorted/clean pairs for every WAV file in a directory
    MakeCorpus(MakeCorpusArgs),
    /// Write a synthetic two-formant vowel sequence
    SynthVowels(SynthVowelsArgs),
}

#[derive(Debug, Args, Default)]
pub struct LayoutArgs {
    /// Samples per slot (M)
    #[arg(long, value_name = "M")]
    pub slot_len: Option<usize>,
    /// Slots per frame (L)
    #[arg(long, value_name = "L")]
    pub slots: Option<usize>,
    /// LPC order (P)
    #[arg(long, value_name = "P")]
    pub order: Option<usize>,
}

#[derive(Debug, Args, Default)]
pub struct LossArgs {
    /// Weight of the waveform loss
    #[arg(long)]
    pub mu: Option<f64>,
    /// Weight of the LP-coefficient loss
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Learning rate
    #[arg(long)]
    pub lr: Option<f64>,
    /// Pole parameterization: conjugate or free
    #[arg(long, value_parser = parse_pairing_mode, value_name = "MODE")]
    pub pairing_mode: Option<PairingMode>,
    /// Optimizer: adam or sgd
    #[arg(long, value_parser = parse_optimizer, value_name = "NAME")]
    pub optimizer: Option<OptimizerKind>,
}

#[derive(Debug, Args, Default)]
pub struct OutputArgs {
    /// Output sample format: 16 or 32f (default: same as the input)
    #[arg(long, value_name = "DEPTH")]
    pub bit_depth: Option<BitDepth>,
}

#[derive(Debug, Args, Default)]
pub struct ChannelArgs {
    /// Channel preset: concrete_5cm, concrete_5cm_sharp or identity
    #[arg(long, value_parser = parse_preset, value_name = "NAME")]
    pub preset: Option<ChannelPreset>,
    /// FIR length (odd, at least 63)
    #[arg(long, value_name = "N")]
    pub taps: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DistortArgs {
    /// Clean input WAV
    #[arg(long = "in", value_name = "WAV")]
    pub input: PathBuf,
    /// Distorted output WAV
    #[arg(long, value_name = "WAV")]
    pub out: PathBuf,
    /// Also write the silence-trimmed clean signal aligned with the output
    #[arg(long, value_name = "WAV")]
    pub clean_out: Option<PathBuf>,
    /// Signal-to-noise ratio in dB (default 0); `inf` adds no noise
    #[arg(long, value_parser = parse_snr, allow_negative_numbers = true, value_name = "DB")]
    pub snr: Option<f64>,
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Input WAV (analysed at 11025 Hz)
    #[arg(long = "in", value_name = "WAV")]
    pub input: PathBuf,
    /// LPC coefficient table, one row per slot
    #[arg(long, value_name = "CSV")]
    pub out: PathBuf,
    /// Pole table (default: <out stem>_poles.csv)
    #[arg(long, value_name = "CSV")]
    pub poles: Option<PathBuf>,
    /// Formant track (default: <out stem>_formants.csv)
    #[arg(long, value_name = "CSV")]
    pub formants: Option<PathBuf>,
    /// Pitch track (default: <out stem>_pitch.csv)
    #[arg(long, value_name = "CSV")]
    pub pitch: Option<PathBuf>,
    #[command(flatten)]
    pub layout: LayoutArgs,
}

#[derive(Debug, Args)]
pub struct ResynthArgs {
    /// Input WAV
    #[arg(long = "in", value_name = "WAV")]
    pub input: PathBuf,
    /// Output WAV
    #[arg(long, value_name = "WAV")]
    pub out: PathBuf,
    #[command(flatten)]
    pub layout: LayoutArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct EnhanceArgs {
    /// Distorted input WAV
    #[arg(long, value_name = "WAV")]
    pub distorted: PathBuf,
    /// Clean reference WAV, sample-aligned with the distorted input
    #[arg(long, value_name = "WAV")]
    pub clean: PathBuf,
    /// Enhanced output WAV
    #[arg(long, value_name = "WAV")]
    pub out: PathBuf,
    /// Loss per iteration (iter, total, mel, wave, lp)
    #[arg(long, value_name = "CSV")]
    pub trace: Option<PathBuf>,
    /// Optimizer steps
    #[arg(long, value_name = "N")]
    pub iters: Option<usize>,
    #[command(flatten)]
    pub loss: LossArgs,
    #[command(flatten)]
    pub layout: LayoutArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Corpus manifest (JSON lines)
    #[arg(long, value_name = "JSONL")]
    pub manifest: PathBuf,
    /// Output model file
    #[arg(long, value_name = "JSON")]
    pub model: PathBuf,
    /// Passes over the corpus
    #[arg(long, value_name = "N")]
    pub epochs: Option<usize>,
    /// Ridge penalty of the initial least-squares fit
    #[arg(long)]
    pub ridge: Option<f64>,
    #[command(flatten)]
    pub loss: LossArgs,
    #[command(flatten)]
    pub layout: LayoutArgs,
}

#[derive(Debug, Args)]
pub struct ApplyArgs {
    /// Trained model file
    #[arg(long, value_name = "JSON")]
    pub model: PathBuf,
    /// Distorted input WAV
    #[arg(long = "in", value_name = "WAV")]
    pub input: PathBuf,
    /// Enhanced output WAV
    #[arg(long, value_name = "WAV")]
    pub out: PathBuf,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Clean reference WAV
    #[arg(long, value_name = "WAV")]
    pub clean: PathBuf,
    /// Recording to score, sample-aligned with the reference
    #[arg(long, value_name = "WAV")]
    pub test: PathBuf,
    /// Metrics report
    #[arg(long, value_name = "JSON")]
    pub report: PathBuf,
    /// F1 difference histogram (bin_center_hz, count)
    #[arg(long, value_name = "CSV")]
    pub f1_hist: Option<PathBuf>,
    /// F2 difference histogram (bin_center_hz, count)
    #[arg(long, value_name = "CSV")]
    pub f2_hist: Option<PathBuf>,
    #[command(flatten)]
    pub layout: LayoutArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GradcheckOpArg {
    All,
    Poles2lp,
    Lp2wav,
    Composed,
}

#[derive(Debug, Args)]
pub struct GradcheckArgs {
    /// Block to check
    #[arg(long, value_enum, default_value_t = GradcheckOpArg::All)]
    pub op: GradcheckOpArg,
    /// Finite-difference step
    #[arg(long, default_value_t = 1e-6)]
    pub eps: f64,
    /// Samples per slot of the test layout
    #[arg(long, default_value_t = 4, value_name = "M")]
    pub slot_len: usize,
    /// Slots of the test layout
    #[arg(long, default_value_t = 3, value_name = "L")]
    pub slots: usize,
    /// LPC order of the test layout
    #[arg(long, default_value_t = 3, value_name = "P")]
    pub order: usize,
    /// Pole parameterization for the parameter checks: conjugate or free
    #[arg(long, value_parser = parse_pairing_mode, default_value = "free", value_name = "MODE")]
    pub pairing_mode: PairingMode,
}

#[derive(Debug, Args)]
pub struct MakeCorpusArgs {
    /// Directory of clean WAV files
    #[arg(long, value_name = "DIR")]
    pub clean_dir: PathBuf,
    /// Directory for the generated pairs
    #[arg(long, value_name = "DIR")]
    pub out_dir: PathBuf,
    /// Manifest to write (JSON lines)
    #[arg(long, value_name = "JSONL")]
    pub manifest: PathBuf,
    /// SNR levels in dB, comma separated; `inf` adds no noise
    #[arg(long, value_parser = parse_snr, value_delimiter = ',', allow_negative_numbers = true, value_name = "DB")]
    pub snr: Vec<f64>,
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SynthVowelsArgs {
    /// Output WAV
    #[arg(long, value_name = "WAV")]
    pub out: PathBuf,
    /// Length in seconds
    #[arg(long, default_value_t = 3.5)]
    pub duration: f64,
    /// Sample rate in Hz
    #[arg(long, default_value_t = 22050)]
    pub rate: u32,
    #[command(flatten)]
    pub output: OutputArgs,
}

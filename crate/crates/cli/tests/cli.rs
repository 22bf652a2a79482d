use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use clap::CommandFactory;
use lpc_enhance::args::Cli;
use lpc_enhance::wav::{read_wav, write_wav, BitDepth};
use lpc_enhance_core::signal::SampleBuffer;
use lpc_enhance_core::synth::vowel_sequence;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lpc-enhance"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn vowels(dir: &Path, name: &str, seconds: f64, seed: u64) -> PathBuf {
    let p = dir.join(name);
    write_wav(&p, &vowel_sequence(22050, seconds, seed).unwrap(), BitDepth::Float32).unwrap();
    p
}

#[test]
fn every_flag_is_documented() {
    let mut cmd = Cli::command();
    cmd.build();
    for sub in cmd.get_subcommands_mut() {
        let name = sub.get_name().to_string();
        let help = sub.render_long_help().to_string();
        for arg in sub.get_arguments() {
            let id = arg.get_id().as_str();
            if id == "help" || id == "version" {
                continue;
            }
            let long = arg.get_long().unwrap_or_else(|| panic!("{name}: {id} has no long flag"));
            assert!(arg.get_help().is_some(), "{name} --{long} has no help text");
            assert!(help.contains(&format!("--{long}")), "{name} --help does not list --{long}");
        }
    }
}

#[test]
fn usage_errors_exit_1() {
    for args in [&["frobnicate"][..], &["resynth", "--bogus"], &["resynth"], &["distort", "--in", "x", "--out", "y", "--snr", "nan"]] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).to_lowercase().contains("usage") || !out.stderr.is_empty());
    }
    let out = run(&["resynth", "--in", "/definitely/missing.wav", "--out", "/tmp/x.wav"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["gradcheck", "--help"]).status.code(), Some(0));
}

#[test]
fn runtime_failures_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let x = vowels(dir.path(), "x.wav", 0.5, 1);
    let out = run(&["resynth", "--in", s(&x), "--out", "/definitely/missing/dir/y.wav"]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn resynth_reproduces_input() {
    let dir = tempfile::tempdir().unwrap();
    let x = vowels(dir.path(), "x.wav", 0.7, 2);
    let y = dir.path().join("y.wav");
    ok(&["resynth", "--in", s(&x), "--out", s(&y)]);
    let (a, b) = (read_wav(&x).unwrap(), read_wav(&y).unwrap());
    assert_eq!(a.len(), b.len());
    let err: f64 = a.samples().iter().zip(b.samples()).map(|(u, v)| (u - v) * (u - v)).sum::<f64>() / a.len() as f64;
    assert!(err.sqrt() < 1e-6, "{}", err.sqrt());
}

#[test]
fn identity_distortion_is_transparent() {
    let dir = tempfile::tempdir().unwrap();
    let x = vowels(dir.path(), "x.wav", 0.8, 3);
    let (d, c) = (dir.path().join("d.wav"), dir.path().join("c.wav"));
    ok(&["distort", "--in", s(&x), "--out", s(&d), "--clean-out", s(&c), "--snr", "inf", "--preset", "identity"]);
    let (input, dist, clean) = (read_wav(&x).unwrap(), read_wav(&d).unwrap(), read_wav(&c).unwrap());
    assert_eq!(dist, clean);
    // the output is a contiguous run of the input
    let n = dist.len();
    assert!(n > 0 && n <= input.len());
    let found = (0..=input.len() - n).any(|o| &input.samples()[o..o + n] == dist.samples());
    assert!(found, "output is not a trimmed copy of the input");
}

#[test]
fn gradcheck_prints_three_passing_lines() {
    let out = ok(&["gradcheck", "--op", "all"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 3, "{out}");
    for (line, name) in lines.iter().zip(["poles2lp", "lp2wav", "composed"]) {
        assert!(line.starts_with(name) && line.ends_with(" ok"), "{line}");
    }
}

fn tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn corpus_is_reproducible_across_job_counts() {
    let dir = tempfile::tempdir().unwrap();
    let clean = dir.path().join("clean");
    fs::create_dir(&clean).unwrap();
    vowels(&clean, "a.wav", 0.6, 4);
    vowels(&clean, "b.wav", 0.6, 5);
    let mut outputs = Vec::new();
    for (tag, jobs) in [("one", "1"), ("many", "3")] {
        let out_dir = dir.path().join(tag);
        fs::create_dir(&out_dir).unwrap();
        let corpus = out_dir.join("pairs");
        let m = out_dir.join("m.jsonl");
        let stdout = ok(&[
            "make-corpus", "--clean-dir", s(&clean), "--out-dir", s(&corpus), "--manifest", s(&m), "--snr=-3,0,inf",
            "--seed", "9", "--jobs", jobs,
        ]);
        assert!(stdout.contains("6 pairs"), "{stdout}");
        outputs.push((tree(&corpus), fs::read_to_string(&m).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
    let lines: Vec<&str> = outputs[0].1.lines().collect();
    assert_eq!(lines.len(), 6);
    assert!(lines.iter().any(|l| l.contains("\"snr_db\":null")));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let x = vowels(dir.path(), "x.wav", 0.8, 6);
    let (d, c) = (dir.path().join("d.wav"), dir.path().join("c.wav"));
    ok(&["distort", "--in", s(&x), "--out", s(&d), "--clean-out", s(&c), "--seed", "2"]);
    let ini = dir.path().join("run.ini");
    fs::write(&ini, "iters = 3\nslots = 20\n").unwrap();
    let (e, t) = (dir.path().join("e.wav"), dir.path().join("t.csv"));
    ok(&["enhance", "--config", s(&ini), "--distorted", s(&d), "--clean", s(&c), "--out", s(&e), "--trace", s(&t)]);
    assert_eq!(fs::read_to_string(&t).unwrap().lines().count(), 1 + 3);
    ok(&["enhance", "--config", s(&ini), "--iters", "2", "--distorted", s(&d), "--clean", s(&c), "--out", s(&e), "--trace", s(&t)]);
    let trace = fs::read_to_string(&t).unwrap();
    assert_eq!(trace.lines().next(), Some("iter,total,mel,wave,lp"));
    assert_eq!(trace.lines().count(), 1 + 2);
    assert_eq!(read_wav(&e).unwrap().len(), read_wav(&d).unwrap().len());
    fs::write(&ini, "nonsense = 1\n").unwrap();
    assert_eq!(run(&["enhance", "--config", s(&ini), "--distorted", s(&d), "--clean", s(&c), "--out", s(&e)]).status.code(), Some(1));
}

#[test]
fn analyze_eval_train_apply() {
    let dir = tempfile::tempdir().unwrap();
    let clean = dir.path().join("clean");
    fs::create_dir(&clean).unwrap();
    vowels(&clean, "a.wav", 0.6, 7);
    vowels(&clean, "b.wav", 0.6, 8);
    let m = dir.path().join("m.jsonl");
    ok(&["make-corpus", "--clean-dir", s(&clean), "--out-dir", s(&dir.path().join("pairs")), "--manifest", s(&m), "--snr", "0"]);
    let d = dir.path().join("pairs/a_snr0_distorted.wav");
    let c = dir.path().join("pairs/a_snr0_clean.wav");

    let an = dir.path().join("an.csv");
    ok(&["analyze", "--in", s(&d), "--out", s(&an)]);
    for suffix in ["poles", "formants", "pitch"] {
        assert!(dir.path().join(format!("an_{suffix}.csv")).is_file(), "{suffix}");
    }
    let header = fs::read_to_string(&an).unwrap().lines().next().unwrap().to_string();
    assert!(header.starts_with("slot,time_s,a1,") && header.ends_with(",a11"), "{header}");

    let (rep, h1) = (dir.path().join("r.json"), dir.path().join("f1.csv"));
    let out = ok(&["eval", "--clean", s(&c), "--test", s(&d), "--report", s(&rep), "--f1-hist", s(&h1)]);
    assert!(out.contains("stoi "));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&rep).unwrap()).unwrap();
    let stoi = report["stoi"].as_f64().unwrap();
    assert!(stoi > 0.0 && stoi < 1.0);
    assert_eq!(fs::read_to_string(&h1).unwrap().lines().count(), 1 + 40);

    let model = dir.path().join("model.json");
    let out = ok(&["train", "--manifest", s(&m), "--model", s(&model), "--epochs", "1", "--slots", "20", "--seed", "3"]);
    assert!(out.contains("epoch 1 loss"), "{out}");
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&model).unwrap()).unwrap();
    assert_eq!(json["layout"]["slots"], 20);
    assert!(json["config"]["enhance"]["lambda"].is_number());
    let y = dir.path().join("y.wav");
    ok(&["apply", "--model", s(&model), "--in", s(&d), "--out", s(&y)]);
    let yb: SampleBuffer = read_wav(&y).unwrap();
    assert_eq!(yb.len(), read_wav(&d).unwrap().len());

    fs::write(&model, "{}").unwrap();
    assert_eq!(run(&["apply", "--model", s(&model), "--in", s(&d), "--out", s(&y)]).status.code(), Some(1));
}

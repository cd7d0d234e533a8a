use clap::Parser;
use proptest::prelude::*;
use raydoom_cli::{parse_resolution, run, Cli};

fn invoke(args: &[&str]) -> anyhow::Result<String> {
    let cli = Cli::try_parse_from(std::iter::once("raydoom").chain(args.iter().copied()))?;
    let mut out = Vec::new();
    run(cli, &mut out)?;
    Ok(String::from_utf8(out).unwrap())
}

#[test]
fn train_eval_replay_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = |f: &str| dir.path().join(f).to_str().unwrap().to_owned();
    invoke(&["train", "--scenario", "basic", "--steps", "300", "--out", &d("run")]).unwrap();
    for f in ["checkpoint.rdqn", "curve.csv", "meta.txt"] {
        assert!(dir.path().join("run").join(f).is_file(), "{f} missing");
    }
    let meta = std::fs::read_to_string(dir.path().join("run/meta.txt")).unwrap();
    assert!(meta.contains("seed = 1") && meta.contains("config_hash = "), "{meta}");

    let ck = d("run/checkpoint.rdqn");
    invoke(&[
        "eval", "--scenario", "basic", "--checkpoint", &ck, "--episodes", "3", "--baseline", "--out", &d("eval.csv"),
        "--record", &d("last.rdrc"),
    ])
    .unwrap();
    let csv = std::fs::read_to_string(d("eval.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("checkpoint,policy,skipcount,seed,mean,sd,min,max,episodes"));
    assert_eq!(lines.count(), 2);

    let report = invoke(&["replay", &d("last.rdrc")]).unwrap();
    assert!(!report.is_empty());
    let mut bytes = std::fs::read(d("last.rdrc")).unwrap();
    let mid = bytes.len() / 2;
    bytes[mid] ^= 1;
    std::fs::write(d("bad.rdrc"), bytes).unwrap();
    assert!(invoke(&["replay", &d("bad.rdrc")]).is_err());
}

#[test]
fn eval_without_checkpoint_fails() {
    let err = invoke(&["eval", "--scenario", "basic", "--checkpoint", "/nonexistent/ck.rdqn"]).unwrap_err();
    assert!(format!("{err:#}").contains("nonexistent"), "{err:#}");
}

#[test]
fn empty_grid_lists_are_rejected() {
    assert!(invoke(&["skipgrid", "--skip", ""]).is_err());
    assert!(invoke(&["skipgrid", "--seeds", ""]).is_err());
}

#[test]
fn skipgrid_episode_counts_rise_with_skip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("grid.csv");
    invoke(&["skipgrid", "--skip", "0,4,10", "--steps", "200", "--episodes", "2", "--out", out.to_str().unwrap()]).unwrap();
    let csv = std::fs::read_to_string(out).unwrap();
    let rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3);
    let episodes: Vec<u64> = rows.iter().map(|r| r[8].parse().unwrap()).collect();
    assert!(episodes.windows(2).all(|w| w[0] <= w[1]), "{episodes:?}");
}

#[test]
fn export_frame_writes_png_and_pgm() {
    let dir = tempfile::tempdir().unwrap();
    let png = dir.path().join("f.png");
    let pgm = dir.path().join("d.pgm");
    invoke(&[
        "export-frame", "--scenario", "basic", "--tics", "5", "--out", png.to_str().unwrap(), "--depth-out",
        pgm.to_str().unwrap(),
    ])
    .unwrap();
    assert_eq!(&std::fs::read(&png).unwrap()[..8], b"\x89PNG\r\n\x1a\n");
    assert!(std::fs::read(&pgm).unwrap().starts_with(b"P5"));
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bench.csv");
    invoke(&["bench", "--resolutions", "64x48", "--depth", "off", "--seconds", "1", "--out", out.to_str().unwrap()])
        .unwrap();
    let csv = std::fs::read_to_string(out).unwrap();
    assert!(csv.starts_with("width,height,depth,fps\n64,48,"), "{csv}");
}

#[test]
fn bench_rejects_short_durations() {
    assert!(invoke(&["bench", "--resolutions", "64x48", "--seconds", "0.2"]).is_err());
}

#[test]
fn bad_resolutions_are_rejected() {
    for s in ["", "320", "0x240", "320x", "axb", "320x240x1"] {
        assert!(parse_resolution(s).is_err(), "{s}");
    }
}

proptest! {
    #[test]
    fn resolution_round_trips(w in 1usize..5000, h in 1usize..5000) {
        prop_assert_eq!(parse_resolution(&format!("{w}x{h}")).unwrap(), (w, h));
    }
}

use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::ValueEnum;
use raydoom::render::{measure_fps, Camera, FpsReport, RenderOptions};
use raydoom::scenario::bundled::BASIC_SCN;
use raydoom::scenario::parse_scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DepthMode {
    On,
    Off,
    Both,
}

impl DepthMode {
    fn flags(self) -> &'static [bool] {
        match self {
            DepthMode::On => &[true],
            DepthMode::Off => &[false],
            DepthMode::Both => &[false, true],
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchOptions {
    pub resolutions: Vec<(usize, usize)>,
    pub depth: DepthMode,
    pub seconds: f64,
    pub out: Option<PathBuf>,
}

/// Header-prefixed CSV, one row per report in measurement order.
pub fn bench_csv(rows: &[FpsReport]) -> String {
    let mut s = String::from("width,height,depth,fps\n");
    for r in rows {
        s.push_str(&format!("{},{},{},{:.1}\n", r.width, r.height, if r.compute_depth { "on" } else { "off" }, r.fps));
    }
    s
}

/// Measures single-threaded RGB render throughput of the opening view of
/// `basic` at every resolution and depth setting.
pub fn bench_cmd(opts: &BenchOptions, out: &mut dyn Write) -> Result<Vec<FpsReport>> {
    if opts.resolutions.is_empty() {
        bail!("no resolutions given");
    }
    let world = parse_scenario(BASIC_SCN)?.spawn(0);
    let camera = Camera::from_actor(&world.player);
    let mut rows = Vec::new();
    for &(w, h) in &opts.resolutions {
        if w < 4 || h < 4 {
            bail!("resolution {w}x{h} is below 4x4");
        }
        for &depth in opts.depth.flags() {
            let report = measure_fps(&world, &camera, &RenderOptions::new(w, h).depth(depth), opts.seconds)?;
            writeln!(out, "{w:>5}x{h:<5} depth {:<3} {:>10.1} fps", if depth { "on" } else { "off" }, report.fps)?;
            rows.push(report);
        }
    }
    if let Some(path) = &opts.out {
        std::fs::write(path, bench_csv(&rows))?;
    }
    Ok(rows)
}

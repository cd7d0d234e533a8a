use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use anyhow::{Context, Result};
use raydoom::engine::ButtonSet;
use raydoom::env::Environment;
use raydoom::render::Frame;
use raydoom::scenario::Channels;

use crate::{env_config, run_hash, EnvArgs};

#[derive(Debug, Clone)]
pub struct ExportOptions {
    pub env: EnvArgs,
    pub seed: u64,
    pub tics: u32,
    pub out: PathBuf,
    pub depth_out: Option<PathBuf>,
}

/// Writes the RGB frame after `tics` idle tics as PNG, and the quantized
/// depth buffer as PGM when asked.
pub fn export_frame_cmd(opts: &ExportOptions, out: &mut dyn Write) -> Result<Frame> {
    let mut cfg = env_config(&opts.env)?;
    cfg.channels = Channels::Rgb;
    cfg.compute_depth = opts.depth_out.is_some();
    let hash = run_hash(&cfg)?;
    let env = Environment::init(cfg)?;
    env.new_episode(Some(opts.seed));
    if opts.tics > 0 {
        env.make_action(ButtonSet::none(env.button_count()), Some(opts.tics - 1))?;
    }
    let state = env.get_state()?;
    let frame = Frame { width: state.width, height: state.height, rgb: state.image_buffer, depth: state.depth };
    let file = File::create(&opts.out).with_context(|| format!("creating {}", opts.out.display()))?;
    frame.write_png(BufWriter::new(file))?;
    if let Some(path) = &opts.depth_out {
        let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        frame.write_depth_pgm(BufWriter::new(file))?;
    }
    writeln!(out, "seed {} config hash {hash:016x}", opts.seed)?;
    writeln!(out, "wrote {}x{} frame at tick {} to {}", frame.width, frame.height, state.tick, opts.out.display())?;
    Ok(frame)
}

use std::io::Write;
use std::net::Ipv4Addr;
use std::path::PathBuf;

use anyhow::Result;
use raydoom::env::Environment;
use raydoom::scenario::Mode;
use raydoom::spectate::{ServeOptions, ServeSummary, SpectateServer};

use crate::{env_config, run_hash, EnvArgs};

#[derive(Debug, Clone)]
pub struct SpectateOptions {
    pub env: EnvArgs,
    pub port: u16,
    pub record: Option<PathBuf>,
    pub asynchronous: bool,
    pub episodes: Option<usize>,
    pub seed: Option<u64>,
}

/// Serves spectator episodes on localhost until the episode budget is spent.
/// A player-mode config is switched to the matching spectator mode.
pub fn spectate_cmd(opts: &SpectateOptions, out: &mut dyn Write) -> Result<ServeSummary> {
    let mut cfg = env_config(&opts.env)?;
    cfg.mode = if opts.asynchronous || cfg.mode.is_async() { Mode::AsyncSpectator } else { Mode::SyncSpectator };
    let hash = run_hash(&cfg)?;
    let env = Environment::init(cfg)?;
    let options = ServeOptions { episodes: opts.episodes, record: opts.record.clone(), seed: opts.seed, ..Default::default() };
    let server = SpectateServer::bind(env, (Ipv4Addr::LOCALHOST, opts.port), options)?;
    writeln!(out, "config hash {hash:016x}")?;
    writeln!(out, "listening on {} (raw TCP or ws://)", server.local_addr()?)?;
    out.flush()?;
    let summary = server.run()?;
    writeln!(out, "served {} episodes, {} decisions", summary.episodes, summary.decisions)?;
    for path in &summary.recordings {
        writeln!(out, "recorded {}", path.display())?;
    }
    Ok(summary)
}

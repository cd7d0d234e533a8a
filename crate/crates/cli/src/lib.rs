//! `raydoom` command-line tool. Every subcommand is a library function so
//! tests can drive it without spawning processes.

mod bench;
mod export;
mod learn;
mod replay;
mod spectate;

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use raydoom::deepq::{Experiment, Profile};
use raydoom::env::load_scenario;
use raydoom::recording::config_hash;
use raydoom::scenario::bundled::{scenario_text, BUILTIN_PREFIX};
use raydoom::scenario::EnvConfig;

pub use bench::{bench_cmd, bench_csv, BenchOptions, DepthMode};
pub use export::{export_frame_cmd, ExportOptions};
pub use learn::{
    eval_cmd, grid_csv, skipgrid_cmd, train_cmd, EvalOptions, EvalReport, GridOptions, GridRow, TrainOptions,
    TrainReport, CROSS_SKIPS,
};
pub use replay::replay_cmd;
pub use spectate::{spectate_cmd, SpectateOptions};

#[derive(Debug, Parser)]
#[command(name = "raydoom", version, about = "Raycasting RL platform: train, evaluate, benchmark, replay")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by commands that build an environment.
#[derive(Debug, Clone, Args)]
pub struct EnvArgs {
    /// Environment config file (`.cfg`).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Scenario: a bundled name (`basic`, `health_gathering`) or a `.scn` path.
    #[arg(long)]
    pub scenario: Option<String>,
    /// Budget profile for learning commands.
    #[arg(long, env = "RAYDOOM_PROFILE", default_value = "desk")]
    pub profile: Profile,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render throughput per resolution and depth setting.
    Bench {
        /// Comma-separated WxH list.
        #[arg(long, value_delimiter = ',', default_value = "160x120,320x240,400x300,640x480")]
        resolutions: Vec<String>,
        #[arg(long, value_enum, default_value = "both")]
        depth: DepthMode,
        /// Timed seconds per cell.
        #[arg(long, default_value_t = 1.0)]
        seconds: f64,
        /// CSV output path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train a deep Q-network; writes checkpoint, learning curve and metadata.
    Train {
        #[command(flatten)]
        env: EnvArgs,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Training skipcount (frames repeated after each decision).
        #[arg(long)]
        skip: Option<u32>,
        /// Learning steps.
        #[arg(long)]
        steps: Option<u64>,
        /// Output directory.
        #[arg(long, default_value = "runs/train")]
        out: PathBuf,
    },
    /// Greedy evaluation of a checkpoint.
    Eval {
        #[command(flatten)]
        env: EnvArgs,
        /// Checkpoint written by `train`.
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long, default_value_t = 100)]
        episodes: usize,
        /// Evaluation skipcount; defaults to the profile's.
        #[arg(long)]
        skip: Option<u32>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Also evaluate a uniformly random policy.
        #[arg(long)]
        baseline: bool,
        /// CSV file the result rows are appended to.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Recording of the first evaluation episode.
        #[arg(long)]
        record: Option<PathBuf>,
    },
    /// Train one agent per (skipcount, seed) and cross-evaluate.
    Skipgrid {
        #[command(flatten)]
        env: EnvArgs,
        #[arg(long, value_delimiter = ',', default_value = "0,4,10")]
        skip: Vec<u32>,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        seeds: Vec<u64>,
        #[arg(long)]
        steps: Option<u64>,
        /// Evaluation episodes per score column.
        #[arg(long, default_value_t = 100)]
        episodes: usize,
        /// CSV output path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-execute a recording and verify every frame hash.
    Replay {
        recording: PathBuf,
    },
    /// Render one frame to PNG and optionally its depth buffer to PGM.
    ExportFrame {
        #[command(flatten)]
        env: EnvArgs,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Idle tics simulated before the capture.
        #[arg(long, default_value_t = 0)]
        tics: u32,
        #[arg(long, default_value = "frame.png")]
        out: PathBuf,
        #[arg(long)]
        depth_out: Option<PathBuf>,
    },
    /// Serve a spectator session over TCP or websocket.
    Spectate {
        #[command(flatten)]
        env: EnvArgs,
        #[arg(long, default_value_t = 7777)]
        port: u16,
        /// Recording path of the first episode; later ones get `.2`, `.3`, ...
        #[arg(long)]
        record: Option<PathBuf>,
        /// Run in real time instead of waiting for each input.
        #[arg(long = "async")]
        asynchronous: bool,
        #[arg(long)]
        episodes: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

/// Runs one parsed command, writing human output to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Bench { resolutions, depth, seconds, out: csv } => {
            let resolutions = resolutions.iter().map(|r| parse_resolution(r)).collect::<Result<Vec<_>>>()?;
            bench_cmd(&BenchOptions { resolutions, depth, seconds, out: csv }, out)?;
        }
        Command::Train { env, seed, skip, steps, out: dir } => {
            train_cmd(&TrainOptions { env, seed, skip, steps, out: dir, test_every: None, test_episodes: None }, out)?;
        }
        Command::Eval { env, checkpoint, episodes, skip, seed, baseline, out: csv, record } => {
            eval_cmd(&EvalOptions { env, checkpoint, episodes, skip, seed, baseline, out: csv, record }, out)?;
        }
        Command::Skipgrid { env, skip, seeds, steps, episodes, out: csv } => {
            skipgrid_cmd(&GridOptions { env, skips: skip, seeds, steps, episodes, out: csv }, out)?;
        }
        Command::Replay { recording } => {
            replay_cmd(&recording, out)?;
        }
        Command::ExportFrame { env, seed, tics, out: png, depth_out } => {
            export_frame_cmd(&ExportOptions { env, seed, tics, out: png, depth_out }, out)?;
        }
        Command::Spectate { env, port, record, asynchronous, episodes, seed } => {
            spectate_cmd(&SpectateOptions { env, port, record, asynchronous, episodes, seed }, out)?;
        }
    }
    Ok(())
}

pub fn parse_resolution(s: &str) -> Result<(usize, usize)> {
    let (w, h) = s.trim().split_once(['x', 'X']).with_context(|| format!("resolution `{s}` is not WxH"))?;
    let w: usize = w.parse().with_context(|| format!("bad width in `{s}`"))?;
    let h: usize = h.parse().with_context(|| format!("bad height in `{s}`"))?;
    if w == 0 || h == 0 {
        bail!("resolution `{s}` has a zero dimension");
    }
    Ok((w, h))
}

/// `builtin:<name>` for bundled names that are not existing files,
/// otherwise the path itself.
pub fn scenario_ref(s: &str) -> String {
    if !s.starts_with(BUILTIN_PREFIX) && scenario_text(s).is_some() && !Path::new(s).exists() {
        format!("{BUILTIN_PREFIX}{s}")
    } else {
        s.to_string()
    }
}

/// Environment config from `--config` (or defaults) with `--scenario`
/// applied.
pub fn env_config(args: &EnvArgs) -> Result<EnvConfig> {
    let mut cfg = match &args.config {
        Some(path) => EnvConfig::load(path).with_context(|| format!("loading config {}", path.display()))?,
        None => EnvConfig::default(),
    };
    if let Some(s) = &args.scenario {
        cfg.scenario_path = scenario_ref(s);
    }
    Ok(cfg)
}

/// Experiment of the selected profile. A `--config` replaces the
/// profile's environment; `--scenario` picks the bundled experiment of the
/// same name or runs the basic experiment's learner on another scenario.
pub fn experiment(args: &EnvArgs) -> Result<Experiment> {
    let scenario = match (&args.scenario, &args.config) {
        (Some(s), _) => scenario_ref(s),
        (None, Some(_)) => env_config(args)?.scenario_path,
        (None, None) => format!("{BUILTIN_PREFIX}basic"),
    };
    let name = scenario.strip_prefix(BUILTIN_PREFIX).unwrap_or("");
    let mut exp = Experiment::for_scenario(name, args.profile).unwrap_or_else(|| Experiment::basic(args.profile));
    if args.config.is_some() {
        exp.env = env_config(args)?;
    }
    exp.env.scenario_path = scenario;
    Ok(exp)
}

/// Hash identifying a run's environment: canonical config and scenario text.
pub fn run_hash(cfg: &EnvConfig) -> Result<u64> {
    let scenario = load_scenario(cfg)?;
    Ok(config_hash(&cfg.to_cfg_string(), &scenario.to_scn_string()))
}

fn ensure_positive(n: usize, what: &str) -> Result<()> {
    if n == 0 {
        bail!("{what} must be at least 1");
    }
    Ok(())
}

use std::fs::OpenOptions;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Mutex;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use raydoom::deepq::checkpoint::{load_checkpoint, save_checkpoint};
use raydoom::deepq::{curve_csv, evaluate, evaluate_random, train, Experiment, ScoreStats, Shape, TrainOutcome};
use raydoom::env::Environment;

use crate::{ensure_positive, experiment, run_hash, EnvArgs};

/// Skipcounts every grid agent is also evaluated at, besides its own.
pub const CROSS_SKIPS: [u32; 2] = [0, 10];

#[derive(Debug, Clone)]
pub struct TrainOptions {
    pub env: EnvArgs,
    pub seed: u64,
    pub skip: Option<u32>,
    pub steps: Option<u64>,
    pub out: PathBuf,
    pub test_every: Option<u64>,
    pub test_episodes: Option<usize>,
}

#[derive(Debug)]
pub struct TrainReport {
    pub outcome: TrainOutcome,
    pub config_hash: u64,
    pub checkpoint: PathBuf,
    pub curve: PathBuf,
    pub metadata: PathBuf,
}

fn configured(args: &EnvArgs, skip: Option<u32>, steps: Option<u64>) -> Result<Experiment> {
    let mut exp = experiment(args)?;
    if let Some(s) = skip {
        exp.train.skipcount = s;
        exp.env.default_skipcount = s;
    }
    if let Some(n) = steps {
        exp.train.total_steps = n;
    }
    Ok(exp)
}

fn stats_line(label: &str, s: &ScoreStats) -> String {
    format!("{label}: mean {:.2} sd {:.2} min {} max {} over {} episodes", s.mean, s.sd, s.min, s.max, s.episodes)
}

/// Trains under the selected profile and writes `checkpoint.rdqn`,
/// `curve.csv` and `meta.txt` into the output directory.
pub fn train_cmd(opts: &TrainOptions, out: &mut dyn Write) -> Result<TrainReport> {
    let mut exp = configured(&opts.env, opts.skip, opts.steps)?;
    if let Some(n) = opts.test_every {
        exp.train.test_every_steps = n;
    }
    if let Some(n) = opts.test_episodes {
        exp.train.test_episodes = n;
    }
    let hash = run_hash(&exp.env)?;
    writeln!(out, "seed {} config hash {hash:016x} profile {}", opts.seed, opts.env.profile)?;
    let env = Environment::init(exp.env.clone())?;
    let spec = exp.net_spec(env.scenario().action_count());
    let outcome = train(&env, &exp.train, spec, opts.seed, |p| {
        let _ = writeln!(out, "{}", stats_line(&format!("step {:>8}", p.step), &p.stats));
    })?;

    std::fs::create_dir_all(&opts.out).with_context(|| format!("creating {}", opts.out.display()))?;
    let checkpoint = opts.out.join("checkpoint.rdqn");
    let curve = opts.out.join("curve.csv");
    let metadata = opts.out.join("meta.txt");
    save_checkpoint(&outcome.network, &checkpoint)?;
    std::fs::write(&curve, curve_csv(&outcome.curve))?;
    let meta = [
        ("seed", opts.seed.to_string()),
        ("config_hash", format!("{hash:016x}")),
        ("profile", opts.env.profile.to_string()),
        ("scenario", exp.env.scenario_path.clone()),
        ("steps", exp.train.total_steps.to_string()),
        ("skipcount", exp.train.skipcount.to_string()),
        ("episodes", outcome.episodes.to_string()),
        ("optimizer_steps", outcome.optimizer_steps.to_string()),
        ("minutes", format!("{:.3}", outcome.seconds / 60.0)),
    ];
    let text: String = meta.iter().map(|(k, v)| format!("{k} = {v}\n")).collect();
    std::fs::write(&metadata, text)?;
    writeln!(out, "wrote {}, {}, {}", checkpoint.display(), curve.display(), metadata.display())?;
    Ok(TrainReport { outcome, config_hash: hash, checkpoint, curve, metadata })
}

#[derive(Debug, Clone)]
pub struct EvalOptions {
    pub env: EnvArgs,
    pub checkpoint: PathBuf,
    pub episodes: usize,
    pub skip: Option<u32>,
    pub seed: u64,
    pub baseline: bool,
    pub out: Option<PathBuf>,
    pub record: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub skipcount: u32,
    pub greedy: ScoreStats,
    pub random: Option<ScoreStats>,
}

/// Greedy evaluation of a checkpoint, optionally beside a random policy.
/// Result rows are appended to `out` as CSV.
pub fn eval_cmd(opts: &EvalOptions, out: &mut dyn Write) -> Result<EvalReport> {
    ensure_positive(opts.episodes, "episodes")?;
    let net = load_checkpoint(&opts.checkpoint).with_context(|| format!("loading {}", opts.checkpoint.display()))?;
    let mut exp = configured(&opts.env, opts.skip, None)?;
    let Shape::Image { c, .. } = net.spec().input else { bail!("checkpoint input is not an image") };
    let channels = exp.env.channels.count();
    if c % channels != 0 {
        bail!("checkpoint expects {c} input planes, the config renders {channels} per frame");
    }
    exp.train.frame_stack = c / channels;
    if net.aux_len() != exp.train.aux_variables.len() {
        bail!("checkpoint expects {} aux inputs, the profile feeds {}", net.aux_len(), exp.train.aux_variables.len());
    }
    let hash = run_hash(&exp.env)?;
    writeln!(out, "seed {} config hash {hash:016x}", opts.seed)?;
    let env = Environment::init(exp.env.clone())?;
    let skip = exp.train.skipcount;
    env.set_recording(opts.record.is_some());
    let greedy = evaluate(&net, &env, &exp.train, opts.episodes, skip, opts.seed)?;
    if let (Some(path), Some(rec)) = (&opts.record, env.take_recording()) {
        rec.save(path)?;
        writeln!(out, "recorded last episode to {}", path.display())?;
    }
    env.set_recording(false);
    writeln!(out, "{}", stats_line(&format!("greedy skip {skip}"), &greedy))?;
    let random = if opts.baseline {
        let r = evaluate_random(&env, opts.episodes, skip, opts.seed)?;
        writeln!(out, "{}", stats_line(&format!("random skip {skip}"), &r))?;
        Some(r)
    } else {
        None
    };
    if let Some(path) = &opts.out {
        let fresh = !path.exists();
        let mut f = OpenOptions::new().create(true).append(true).open(path)?;
        if fresh {
            writeln!(f, "checkpoint,policy,skipcount,seed,mean,sd,min,max,episodes")?;
        }
        for (policy, s) in [("greedy", Some(greedy)), ("random", random)] {
            if let Some(s) = s {
                writeln!(
                    f,
                    "{},{policy},{skip},{},{},{},{},{},{}",
                    opts.checkpoint.display(),
                    opts.seed,
                    s.mean,
                    s.sd,
                    s.min,
                    s.max,
                    s.episodes
                )?;
            }
        }
    }
    Ok(EvalReport { skipcount: skip, greedy, random })
}

#[derive(Debug, Clone)]
pub struct GridOptions {
    pub env: EnvArgs,
    pub skips: Vec<u32>,
    pub seeds: Vec<u64>,
    pub steps: Option<u64>,
    pub episodes: usize,
    pub out: Option<PathBuf>,
}

/// One trained agent of the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridRow {
    pub skipcount: u32,
    pub seed: u64,
    pub native: ScoreStats,
    /// Scores at each of [`CROSS_SKIPS`].
    pub cross: [ScoreStats; 2],
    pub episodes: u64,
    /// Wall-clock minutes of training, test episodes included.
    pub minutes: f64,
    pub curve_mean: f64,
}

/// Header-prefixed CSV ordered by `(skipcount, seed)`.
pub fn grid_csv(rows: &[GridRow]) -> String {
    let mut s = String::from("skipcount,seed,native_mean,native_sd,skip0_mean,skip0_sd,skip10_mean,skip10_sd,episodes,minutes\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{:.3},{:.3},{:.3},{:.3},{:.3},{:.3},{},{:.3}\n",
            r.skipcount,
            r.seed,
            r.native.mean,
            r.native.sd,
            r.cross[0].mean,
            r.cross[0].sd,
            r.cross[1].mean,
            r.cross[1].sd,
            r.episodes,
            r.minutes
        ));
    }
    s
}

fn grid_cell(exp: &Experiment, skip: u32, seed: u64, episodes: usize) -> Result<GridRow> {
    let mut exp = exp.clone();
    exp.train.skipcount = skip;
    exp.env.default_skipcount = skip;
    let env = Environment::init(exp.env.clone())?;
    let spec = exp.net_spec(env.scenario().action_count());
    let start = Instant::now();
    let outcome = train(&env, &exp.train, spec, seed, |_| {})?;
    let minutes = start.elapsed().as_secs_f64() / 60.0;
    let eval = |s| evaluate(&outcome.network, &env, &exp.train, episodes, s, seed);
    let curve_mean = if outcome.curve.is_empty() {
        f64::NAN
    } else {
        outcome.curve.iter().map(|p| p.stats.mean).sum::<f64>() / outcome.curve.len() as f64
    };
    Ok(GridRow {
        skipcount: skip,
        seed,
        native: eval(skip)?,
        cross: [eval(CROSS_SKIPS[0])?, eval(CROSS_SKIPS[1])?],
        episodes: outcome.episodes,
        minutes,
        curve_mean,
    })
}

/// Trains one agent per `(skipcount, seed)` on worker threads and
/// evaluates each at its own skipcount and at [`CROSS_SKIPS`].
pub fn skipgrid_cmd(opts: &GridOptions, out: &mut dyn Write) -> Result<Vec<GridRow>> {
    if opts.skips.is_empty() || opts.seeds.is_empty() {
        bail!("skipgrid needs at least one skipcount and one seed");
    }
    ensure_positive(opts.episodes, "episodes")?;
    let exp = configured(&opts.env, None, opts.steps)?;
    let hash = run_hash(&exp.env)?;
    writeln!(out, "seeds {:?} config hash {hash:016x} profile {}", opts.seeds, opts.env.profile)?;
    let cells: Vec<(u32, u64)> = opts.skips.iter().flat_map(|&k| opts.seeds.iter().map(move |&s| (k, s))).collect();
    let queue = Mutex::new(cells.clone().into_iter());
    let results = Mutex::new(Vec::new());
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(cells.len());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let Some((skip, seed)) = queue.lock().unwrap().next() else { break };
                let row = grid_cell(&exp, skip, seed, opts.episodes);
                results.lock().unwrap().push(((skip, seed), row));
            });
        }
    });
    let mut results = results.into_inner().unwrap();
    results.sort_by_key(|(key, _)| *key);
    let rows = results.into_iter().map(|(_, r)| r).collect::<Result<Vec<_>>>()?;
    let csv = grid_csv(&rows);
    write!(out, "{csv}")?;
    if let Some(path) = &opts.out {
        std::fs::write(path, &csv)?;
    }
    Ok(rows)
}

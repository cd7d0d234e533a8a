use std::collections::VecDeque;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::engine::ButtonSet;
use crate::env::{episode_seed, EnvError, Environment, GameState};
use crate::scenario::{Channels, EnvConfig, GameVariable, Mode, ScenarioDef};

use super::network::{NetError, NetSpec, Network};
use super::optim::{Optimizer, OptimizerState};
use super::qlearn::{argmax, batch_inputs, learn_step, EpsilonSchedule};
use super::replay::{ReplayBuffer, StateInput, Transition};

#[derive(Debug, Error, PartialEq)]
pub enum TrainError {
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub gamma: f64,
    pub optimizer: Optimizer,
    pub replay_capacity: usize,
    pub batch_size: usize,
    pub epsilon: EpsilonSchedule,
    pub total_steps: u64,
    pub test_every_steps: u64,
    pub test_episodes: usize,
    pub skipcount: u32,
    /// Number of most recent frames fed to the network.
    pub frame_stack: usize,
    /// Non-visual inputs joined at the first dense layer.
    pub aux_variables: Vec<GameVariable>,
    /// Multiplies rewards before they enter the replay memory.
    pub reward_scale: f64,
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        let bad = |m: &str| Err(TrainError::InvalidConfig(m.to_string()));
        if self.batch_size == 0 || self.batch_size > self.replay_capacity {
            return bad("batch size must be in 1..=replay capacity");
        }
        if self.epsilon.end > self.epsilon.start || self.epsilon.decay_start >= self.epsilon.decay_end {
            return bad("epsilon must decay over a non-empty step range");
        }
        if self.frame_stack == 0 {
            return bad("frame stack must be at least 1");
        }
        if self.test_episodes == 0 {
            return bad("test episodes must be at least 1");
        }
        Ok(())
    }
}

/// Summary of reported scores over test episodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreStats {
    pub mean: f64,
    /// Population standard deviation.
    pub sd: f64,
    pub min: f64,
    pub max: f64,
    pub episodes: usize,
}

impl ScoreStats {
    pub fn from_scores(scores: &[f64]) -> ScoreStats {
        assert!(!scores.is_empty(), "no scores");
        let n = scores.len() as f64;
        let mean = scores.iter().sum::<f64>() / n;
        let var = scores.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / n;
        ScoreStats {
            mean,
            sd: var.sqrt(),
            min: scores.iter().copied().fold(f64::INFINITY, f64::min),
            max: scores.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            episodes: scores.len(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub step: u64,
    pub stats: ScoreStats,
}

/// Learning curve as CSV with header `step,mean,sd,min,max`.
pub fn curve_csv(curve: &[CurvePoint]) -> String {
    let mut s = String::from("step,mean,sd,min,max\n");
    for p in curve {
        s.push_str(&format!("{},{},{},{},{}\n", p.step, p.stats.mean, p.stats.sd, p.stats.min, p.stats.max));
    }
    s
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub network: Network<f32>,
    pub curve: Vec<CurvePoint>,
    /// Training episodes started.
    pub episodes: u64,
    pub optimizer_steps: u64,
    /// Wall-clock time including test episodes.
    pub seconds: f64,
}

/// Turns game states into network inputs.
#[derive(Debug, Clone)]
pub struct Preprocessor {
    pub aux_variables: Vec<GameVariable>,
    pub frame_stack: usize,
    timeout: f64,
    ammo: f64,
    frames: VecDeque<Arc<Vec<u8>>>,
}

impl Preprocessor {
    pub fn new(scenario: &ScenarioDef, cfg: &TrainConfig) -> Self {
        Preprocessor {
            aux_variables: cfg.aux_variables.clone(),
            frame_stack: cfg.frame_stack,
            timeout: scenario.timeout.max(1) as f64,
            ammo: scenario.mechanics.initial_ammo.max(1) as f64,
            frames: VecDeque::new(),
        }
    }

    /// Bytes as channel planes.
    pub fn planar(state: &GameState) -> Vec<u8> {
        let c = state.channels.count();
        if c == 1 {
            return state.image_buffer.clone();
        }
        let px = state.width * state.height;
        let mut out = vec![0; px * c];
        for (i, p) in state.image_buffer.chunks_exact(c).enumerate() {
            for (ch, &v) in p.iter().enumerate() {
                out[ch * px + i] = v;
            }
        }
        out
    }

    /// Health scaled by 1/100, tick by 1/timeout, ammo by 1/initial ammo.
    pub fn aux(&self, state: &GameState) -> Vec<f32> {
        self.aux_variables
            .iter()
            .map(|&v| {
                let x = state.variable(v).unwrap_or(0.0);
                (match v {
                    GameVariable::Health => x / 100.0,
                    GameVariable::Tick => x / self.timeout,
                    GameVariable::Ammo => x / self.ammo,
                }) as f32
            })
            .collect()
    }

    /// Clears the frame history; the next frame fills every slot.
    pub fn reset(&mut self) {
        self.frames.clear();
    }

    pub fn observe(&mut self, state: &GameState) -> Arc<StateInput> {
        let frame = Arc::new(Self::planar(state));
        if self.frames.is_empty() {
            self.frames.extend(std::iter::repeat(frame).take(self.frame_stack));
        } else {
            self.frames.pop_front();
            self.frames.push_back(frame);
        }
        Arc::new(StateInput { frames: self.frames.iter().cloned().collect(), aux: self.aux(state) })
    }
}

/// Network input geometry for an environment config.
pub fn input_geometry(config: &EnvConfig, frame_stack: usize) -> (usize, usize, usize) {
    let c = match config.channels {
        Channels::Rgb => 3,
        Channels::Gray => 1,
    };
    (c * frame_stack, config.resolution.1, config.resolution.0)
}

/// Greedy action of `net` for one input.
pub fn greedy_action(net: &Network<f32>, input: &StateInput) -> Result<usize, NetError> {
    let (x, aux) = batch_inputs(net, &[input]);
    Ok(argmax(net.predict(&x, aux.as_ref())?.data()))
}

/// Seed of the i-th evaluation episode under a master seed.
pub fn eval_episode_seed(master: u64, i: u64) -> u64 {
    episode_seed(master ^ 0x7E57_7E57_7E57_7E57, i)
}

/// Plays `episodes` episodes with per-episode seeds `eval_episode_seed(seed, i)`
/// and returns reported-score statistics.
pub fn evaluate_policy(
    env: &Environment,
    episodes: usize,
    skipcount: u32,
    seed: u64,
    mut policy: impl FnMut(&GameState) -> Result<ButtonSet, TrainError>,
) -> Result<ScoreStats, TrainError> {
    assert!(episodes >= 1, "at least one episode");
    let mut scores = Vec::with_capacity(episodes);
    for i in 0..episodes {
        env.new_episode(Some(eval_episode_seed(seed, i as u64)));
        while !env.is_episode_finished() {
            let state = env.get_state()?;
            let buttons = policy(&state)?;
            env.make_action(buttons, Some(skipcount))?;
        }
        scores.push(env.get_total_score());
    }
    Ok(ScoreStats::from_scores(&scores))
}

/// Greedy (ε = 0) evaluation of `net`.
pub fn evaluate(
    net: &Network<f32>,
    env: &Environment,
    cfg: &TrainConfig,
    episodes: usize,
    skipcount: u32,
    seed: u64,
) -> Result<ScoreStats, TrainError> {
    let mut pre = Preprocessor::new(&env.scenario(), cfg);
    let buttons = env.button_count();
    let mut last_number = u64::MAX;
    evaluate_policy(env, episodes, skipcount, seed, |state| {
        if state.number <= last_number {
            pre.reset();
        }
        last_number = state.number;
        let a = greedy_action(net, &pre.observe(state))?;
        Ok(ButtonSet::from_action_index(a, buttons).expect("output size matches buttons"))
    })
}

/// Uniformly random button combinations.
pub fn evaluate_random(env: &Environment, episodes: usize, skipcount: u32, seed: u64) -> Result<ScoreStats, TrainError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let buttons = env.button_count();
    evaluate_policy(env, episodes, skipcount, seed, |_| {
        Ok(ButtonSet::from_action_index(rng.gen_range(0..1usize << buttons), buttons).unwrap())
    })
}

/// Deep Q-learning on a synchronous player environment. Each learning step
/// picks an ε-greedy action, executes it with `cfg.skipcount`, stores the
/// transition and, once the replay memory holds a batch, performs one
/// optimizer step. Every `test_every_steps` the greedy policy is evaluated on
/// a separate environment. `on_test` sees each curve point as it is made.
pub fn train(
    env: &Environment,
    cfg: &TrainConfig,
    spec: NetSpec,
    seed: u64,
    mut on_test: impl FnMut(&CurvePoint),
) -> Result<TrainOutcome, TrainError> {
    cfg.validate()?;
    if env.mode() != Mode::SyncPlayer {
        return Err(TrainError::Env(EnvError::ModeMismatch { mode: env.mode(), op: "train" }));
    }
    let buttons = env.button_count();
    let mut net = Network::<f32>::seeded(spec, episode_seed(seed, u64::MAX))?;
    if net.output_len() != 1 << buttons {
        return Err(TrainError::InvalidConfig(format!(
            "network has {} outputs, scenario needs {}",
            net.output_len(),
            1 << buttons
        )));
    }
    let mut opt = OptimizerState::new(cfg.optimizer, &mut net);
    let test_env = Environment::with_scenario(env.config(), env.scenario())?;
    let mut pre = Preprocessor::new(&env.scenario(), cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut replay = ReplayBuffer::new(cfg.replay_capacity);
    let mut curve = Vec::new();
    let mut episodes = 0u64;
    let mut optimizer_steps = 0u64;
    let start = Instant::now();

    let mut current: Option<Arc<StateInput>> = None;
    for step in 1..=cfg.total_steps {
        let state = match current.take() {
            Some(s) => s,
            None => {
                pre.reset();
                let s = env.new_episode(Some(episode_seed(seed, episodes)));
                episodes += 1;
                pre.observe(&s)
            }
        };
        let eps = cfg.epsilon.at(step - 1);
        let action = if rng.gen::<f64>() < eps {
            rng.gen_range(0..1usize << buttons)
        } else {
            greedy_action(&net, &state)?
        };
        let reward = env.make_action(ButtonSet::from_action_index(action, buttons).unwrap(), Some(cfg.skipcount))?;
        let next = if env.is_episode_finished() { None } else { Some(pre.observe(&env.get_state()?)) };
        current = next.clone();
        replay.push(Transition { state, action, reward: (reward * cfg.reward_scale) as f32, next });
        if replay.len() >= cfg.batch_size {
            let batch = replay.sample(cfg.batch_size, &mut rng);
            learn_step(&mut net, &mut opt, &batch, cfg.gamma)?;
            optimizer_steps += 1;
        }
        if cfg.test_every_steps > 0 && step % cfg.test_every_steps == 0 {
            let stats = evaluate(&net, &test_env, cfg, cfg.test_episodes, cfg.skipcount, seed)?;
            let point = CurvePoint { step, stats };
            on_test(&point);
            curve.push(point);
        }
    }
    Ok(TrainOutcome { network: net, curve, episodes, optimizer_steps, seconds: start.elapsed().as_secs_f64() })
}

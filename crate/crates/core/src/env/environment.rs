use std::path::PathBuf;
use std::sync::{Arc, Condvar, Mutex, MutexGuard};
use std::thread::JoinHandle;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::engine::{ButtonSet, GameEvent, WorldState, TICRATE};
use crate::recording::Recording;
use crate::scenario::{bundled, EnvConfig, Mode, ScenarioDef, TerminalCause, MAX_RESOLUTION, MIN_RESOLUTION, MAX_SKIPCOUNT};

use super::session::Session;
use super::state::{ActionProvider, GameState, Observation};

#[derive(Debug, Error, PartialEq)]
pub enum EnvError {
    #[error("cannot load scenario: {0}")]
    ScenarioLoad(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("episode is finished")]
    EpisodeFinished,
    #[error("{op} is not available in {mode} mode")]
    ModeMismatch { mode: Mode, op: &'static str },
    #[error("action provider is gone")]
    ProviderClosed,
    #[error("button vector has {got} entries, scenario declares {expected}")]
    ButtonCount { expected: usize, got: usize },
}

struct Shared {
    session: Mutex<Inner>,
    tick: Condvar,
}

struct Inner {
    session: Session,
    provider: Option<Box<dyn ActionProvider>>,
    /// Buttons repeated by the async clock until replaced.
    latched: ButtonSet,
    /// Running training reward; async callers diff it around their wait.
    reward_clock: f64,
    /// Events of clock tics not yet handed to an async spectator.
    clock_events: Vec<GameEvent>,
    shutdown: bool,
}

/// The platform facade: one live episode at a time.
///
/// Synchronous modes advance only inside calls. Asynchronous modes run a
/// clock thread at 35 tics per wall-clock second that repeats the latched
/// buttons whenever the caller misses a tic.
pub struct Environment {
    mode: Mode,
    shared: Arc<Shared>,
    driver: Option<JoinHandle<()>>,
}

/// Reads a scenario named by a config: `builtin:<name>` or a file path
/// resolved against the config's directory.
pub fn load_scenario(config: &EnvConfig) -> Result<ScenarioDef, EnvError> {
    let path = config.scenario_path.as_str();
    let text = if let Some(name) = path.strip_prefix(bundled::BUILTIN_PREFIX) {
        bundled::scenario_text(name)
            .ok_or_else(|| EnvError::ScenarioLoad(format!("no bundled scenario `{name}`")))?
            .to_string()
    } else {
        let mut full = PathBuf::from(path);
        if full.is_relative() {
            if let Some(dir) = &config.base_dir {
                full = dir.join(full);
            }
        }
        std::fs::read_to_string(&full).map_err(|e| EnvError::ScenarioLoad(format!("{}: {e}", full.display())))?
    };
    ScenarioDef::parse(&text).map_err(|e| EnvError::ScenarioLoad(e.to_string()))
}

fn validate(config: &EnvConfig) -> Result<(), EnvError> {
    let (w, h) = config.resolution;
    let res = MIN_RESOLUTION..=MAX_RESOLUTION;
    if !res.contains(&w) || !res.contains(&h) {
        return Err(EnvError::InvalidConfig(format!("resolution {w}x{h} outside [4, 1024]")));
    }
    if config.default_skipcount > MAX_SKIPCOUNT {
        return Err(EnvError::InvalidConfig(format!("skipcount {} above {MAX_SKIPCOUNT}", config.default_skipcount)));
    }
    if !(config.fov_degrees > 0.0 && config.fov_degrees < 180.0) {
        return Err(EnvError::InvalidConfig(format!("fov {} outside (0, 180)", config.fov_degrees)));
    }
    Ok(())
}

impl Environment {
    /// Validates the config and loads its scenario. No episode is running
    /// afterwards.
    pub fn init(config: EnvConfig) -> Result<Environment, EnvError> {
        let scenario = load_scenario(&config)?;
        Environment::with_scenario(config, scenario)
    }

    pub fn with_scenario(config: EnvConfig, scenario: ScenarioDef) -> Result<Environment, EnvError> {
        validate(&config)?;
        let mode = config.mode;
        let latched = ButtonSet::none(scenario.buttons.len());
        let shared = Arc::new(Shared {
            session: Mutex::new(Inner {
                session: Session::new(config, scenario),
                provider: None,
                latched,
                reward_clock: 0.0,
                clock_events: Vec::new(),
                shutdown: false,
            }),
            tick: Condvar::new(),
        });
        let mut env = Environment { mode, shared, driver: None };
        if mode.is_async() {
            let shared = Arc::clone(&env.shared);
            env.driver = Some(std::thread::spawn(move || clock_driver(shared)));
        }
        Ok(env)
    }

    fn lock(&self) -> MutexGuard<'_, Inner> {
        self.shared.session.lock().expect("environment lock poisoned")
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn config(&self) -> EnvConfig {
        self.lock().session.config.clone()
    }

    pub fn scenario(&self) -> ScenarioDef {
        self.lock().session.scenario.clone()
    }

    pub fn button_count(&self) -> usize {
        self.lock().session.scenario.buttons.len()
    }

    /// Resets the world from the scenario's spawn rules. Without an explicit
    /// seed, the next seed of the config's master-seed sequence is used.
    pub fn new_episode(&self, seed: Option<u64>) -> GameState {
        let mut inner = self.lock();
        inner.session.new_episode(seed);
        inner.latched = ButtonSet::none(inner.session.scenario.buttons.len());
        inner.clock_events.clear();
        let state = inner.session.render();
        self.shared.tick.notify_all();
        state
    }

    pub fn episode_seed(&self) -> u64 {
        self.lock().session.episode_seed
    }

    pub fn is_episode_finished(&self) -> bool {
        !self.lock().session.running()
    }

    pub fn terminal_cause(&self) -> TerminalCause {
        self.lock().session.status.cause
    }

    pub fn get_total_reward(&self) -> f64 {
        self.lock().session.total.training
    }

    /// Total excluding shaping rewards.
    pub fn get_total_score(&self) -> f64 {
        self.lock().session.total.reported
    }

    pub fn tick(&self) -> u32 {
        self.lock().session.world.as_ref().map_or(0, |w| w.tick)
    }

    /// Snapshot of the simulation.
    pub fn world(&self) -> Option<WorldState> {
        self.lock().session.world.clone()
    }

    /// Events emitted by the tics of the most recent decision.
    pub fn last_events(&self) -> Vec<GameEvent> {
        self.lock().session.last_events.clone()
    }

    /// When enabled, episodes started afterwards log every decision and the
    /// frame hash of every tic (each tic is then rendered).
    pub fn set_recording(&self, on: bool) {
        let mut inner = self.lock();
        inner.session.recording = on;
        if !on {
            inner.session.log = None;
        }
    }

    /// The log of the current or last recorded episode.
    pub fn take_recording(&self) -> Option<Recording> {
        self.lock().session.log.take()
    }

    /// Copy of the log so far, leaving recording in place.
    pub fn recording_snapshot(&self) -> Option<Recording> {
        self.lock().session.log.clone()
    }

    pub fn get_state(&self) -> Result<GameState, EnvError> {
        let mut inner = self.lock();
        if !inner.session.running() {
            return Err(EnvError::EpisodeFinished);
        }
        Ok(inner.session.render())
    }

    fn check_buttons(&self, inner: &Inner, buttons: ButtonSet) -> Result<(), EnvError> {
        let expected = inner.session.scenario.buttons.len();
        if buttons.len() != expected {
            return Err(EnvError::ButtonCount { expected, got: buttons.len() });
        }
        Ok(())
    }

    /// Repeats `buttons` for `skip + 1` tics (skip defaults to the config's
    /// skipcount) and returns the summed training reward. Stops early at a
    /// terminal tic.
    ///
    /// In `ASYNC_PLAYER` the buttons are latched and the call blocks until
    /// the clock has advanced that many tics.
    pub fn make_action(&self, buttons: ButtonSet, skip: Option<u32>) -> Result<f64, EnvError> {
        match self.mode {
            Mode::SyncPlayer => {
                let mut inner = self.lock();
                self.check_buttons(&inner, buttons)?;
                if !inner.session.running() {
                    return Err(EnvError::EpisodeFinished);
                }
                let skip = skip.unwrap_or(inner.session.config.default_skipcount);
                Ok(inner.session.act(buttons, skip).training)
            }
            Mode::AsyncPlayer => {
                let mut inner = self.lock();
                self.check_buttons(&inner, buttons)?;
                if !inner.session.running() {
                    return Err(EnvError::EpisodeFinished);
                }
                let skip = skip.unwrap_or(inner.session.config.default_skipcount);
                inner.latched = buttons;
                inner.session.last_events.clear();
                let start_reward = inner.reward_clock;
                let target = inner.session.world.as_ref().map_or(0, |w| w.tick) + skip + 1;
                let mut inner = self
                    .shared
                    .tick
                    .wait_while(inner, |i| {
                        i.session.running() && i.session.world.as_ref().is_some_and(|w| w.tick < target)
                    })
                    .expect("environment lock poisoned");
                inner.session.decisions += 1;
                Ok(inner.reward_clock - start_reward)
            }
            mode => Err(EnvError::ModeMismatch { mode, op: "make_action" }),
        }
    }

    /// Registers the spectator input source.
    pub fn record_action_provider(&self, provider: Box<dyn ActionProvider>) -> Result<(), EnvError> {
        if !self.mode.is_spectator() {
            return Err(EnvError::ModeMismatch { mode: self.mode, op: "record_action_provider" });
        }
        self.lock().provider = Some(provider);
        Ok(())
    }

    /// One spectator decision. Synchronous: pulls buttons from the provider
    /// (waiting as long as it takes) and executes them with the default
    /// skipcount. Asynchronous: waits for the clock's next tic and reports
    /// what the provider's latched input did.
    pub fn spectate_step(&self) -> Result<Observation, EnvError> {
        match self.mode {
            Mode::SyncSpectator => {
                let (state, mut provider) = {
                    let mut inner = self.lock();
                    if !inner.session.running() {
                        return Err(EnvError::EpisodeFinished);
                    }
                    let provider = inner.provider.take().ok_or(EnvError::ProviderClosed)?;
                    (inner.session.render(), provider)
                };
                let decision = provider.decide(&state);
                let mut inner = self.lock();
                inner.provider = Some(provider);
                let buttons = decision.ok_or(EnvError::ProviderClosed)?;
                self.check_buttons(&inner, buttons)?;
                let skip = inner.session.config.default_skipcount;
                let reward = inner.session.act(buttons, skip).training;
                let events = inner.session.last_events.clone();
                Ok(Observation { state, action: buttons, reward, events })
            }
            Mode::AsyncSpectator => {
                let inner = self.lock();
                if !inner.session.running() {
                    return Err(EnvError::EpisodeFinished);
                }
                if inner.provider.is_none() {
                    return Err(EnvError::ProviderClosed);
                }
                let start_tick = inner.session.world.as_ref().map_or(0, |w| w.tick);
                let start_reward = inner.reward_clock;
                let mut inner = self
                    .shared
                    .tick
                    .wait_while(inner, |i| {
                        i.session.running() && i.session.world.as_ref().is_some_and(|w| w.tick == start_tick)
                    })
                    .expect("environment lock poisoned");
                let action = inner.latched;
                let reward = inner.reward_clock - start_reward;
                let events = std::mem::take(&mut inner.clock_events);
                let state = inner.session.render();
                Ok(Observation { state, action, reward, events })
            }
            mode => Err(EnvError::ModeMismatch { mode, op: "spectate_step" }),
        }
    }
}

impl Drop for Environment {
    fn drop(&mut self) {
        if let Some(handle) = self.driver.take() {
            self.lock().shutdown = true;
            self.shared.tick.notify_all();
            let _ = handle.join();
        }
    }
}

/// Advances one tic per 1/35 s against absolute deadlines, so pacing does
/// not drift with the caller's speed.
fn clock_driver(shared: Arc<Shared>) {
    let period = Duration::from_secs_f64(1.0 / TICRATE as f64);
    let mut deadline = Instant::now() + period;
    loop {
        let now = Instant::now();
        if deadline > now {
            std::thread::sleep(deadline - now);
        }
        deadline += period;
        let mut inner = shared.session.lock().expect("environment lock poisoned");
        if inner.shutdown {
            return;
        }
        if !inner.session.running() {
            continue;
        }
        if let Some(mut provider) = inner.provider.take() {
            let state = inner.session.render();
            let decision = provider.decide(&state);
            inner.provider = Some(provider);
            if let Some(b) = decision.filter(|b| b.len() == inner.session.scenario.buttons.len()) {
                inner.latched = b;
            }
        }
        let buttons = inner.latched;
        let tick = inner.session.world.as_ref().map_or(0, |w| w.tick);
        if inner.provider.is_some() {
            inner.session.last_events.clear();
        }
        let before = inner.session.last_events.len();
        let delta = inner.session.tic(buttons, true);
        let new_events = inner.session.last_events[before..].to_vec();
        if inner.provider.is_some() {
            inner.clock_events.extend(new_events);
        }
        inner.session.record_decision(tick, 0, buttons, delta.training);
        inner.reward_clock += delta.training;
        drop(inner);
        shared.tick.notify_all();
    }
}

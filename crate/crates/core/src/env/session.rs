use crate::engine::{ButtonSet, GameEvent, WorldState};
use crate::render::{Camera, Frame, RenderOptions, Renderer};
use crate::scenario::{
    check_terminal, score_events, Channels, EnvConfig, LivingRewardUnit, RewardDelta, ScenarioDef, TerminalCause,
    TerminalStatus,
};

use crate::recording::{DecisionRecord, Recording};

use super::seeds::episode_seed;
use super::state::GameState;

/// Simulation core shared by every control mode.
pub(crate) struct Session {
    pub config: EnvConfig,
    pub scenario: ScenarioDef,
    pub world: Option<WorldState>,
    pub status: TerminalStatus,
    pub total: RewardDelta,
    pub decisions: u64,
    pub episode_seed: u64,
    pub episodes_started: u64,
    pub last_events: Vec<GameEvent>,
    /// Whether the next episode is recorded.
    pub recording: bool,
    pub log: Option<Recording>,
    renderer: Renderer,
    frame: Frame,
    cached: Option<GameState>,
}

impl Session {
    pub fn new(config: EnvConfig, scenario: ScenarioDef) -> Self {
        Session {
            config,
            scenario,
            world: None,
            status: TerminalStatus { done: true, cause: TerminalCause::None },
            total: RewardDelta::default(),
            decisions: 0,
            episode_seed: 0,
            episodes_started: 0,
            last_events: Vec::new(),
            recording: false,
            log: None,
            renderer: Renderer::new(),
            frame: Frame { width: 0, height: 0, rgb: Vec::new(), depth: None },
            cached: None,
        }
    }

    pub fn render_options(&self) -> RenderOptions {
        let (w, h) = self.config.resolution;
        RenderOptions::new(w, h)
            .depth(self.config.compute_depth)
            .sprites(self.config.render_sprites)
            .shading(self.config.floor_ceiling_shading)
    }

    pub fn running(&self) -> bool {
        self.world.is_some() && !self.status.done
    }

    pub fn new_episode(&mut self, seed: Option<u64>) {
        let seed = seed.unwrap_or_else(|| episode_seed(self.config.seed.unwrap_or(0), self.episodes_started));
        self.episodes_started += 1;
        self.episode_seed = seed;
        self.world = Some(self.scenario.spawn(seed));
        self.status = TerminalStatus::RUNNING;
        self.total = RewardDelta::default();
        self.decisions = 0;
        self.last_events.clear();
        self.cached = None;
        self.log = self.recording.then(|| Recording {
            config_text: self.config.to_cfg_string(),
            scenario_text: self.scenario.to_scn_string(),
            seed,
            decisions: Vec::new(),
            tic_hashes: Vec::new(),
        });
        self.record_tic_hash();
    }

    fn record_tic_hash(&mut self) {
        if self.log.is_some() {
            let hash = self.render().frame_hash;
            self.log.as_mut().unwrap().tic_hashes.push(hash);
        }
    }

    pub fn record_decision(&mut self, tick: u32, skip: u32, buttons: ButtonSet, reward: f64) {
        if let Some(log) = self.log.as_mut() {
            log.decisions.push(DecisionRecord { tick, skip: skip as u16, buttons: buttons.mask(), reward: reward as f32 });
        }
    }

    /// One engine tic with reward accounting. `charge_living` says whether
    /// this tic pays the living reward (always, unless it is charged per
    /// action and this is not the first tic of the action).
    pub fn tic(&mut self, buttons: ButtonSet, charge_living: bool) -> RewardDelta {
        let world = self.world.as_mut().expect("tic without an episode");
        let events = world.tic(buttons);
        let units = match self.config.living_reward_unit {
            LivingRewardUnit::Tic => 1,
            LivingRewardUnit::Action => charge_living as u32,
        };
        let delta = score_events(&events, units, &self.scenario.rewards);
        self.status = check_terminal(world, &events, self.scenario.end_on_kill, self.scenario.timeout);
        self.last_events.extend(events);
        self.total += delta;
        self.cached = None;
        self.record_tic_hash();
        delta
    }

    /// Executes `skip + 1` tics with the same buttons, stopping early at a
    /// terminal tic. Skipped tics are never rendered.
    pub fn act(&mut self, buttons: ButtonSet, skip: u32) -> RewardDelta {
        let tick = self.world.as_ref().map_or(0, |w| w.tick);
        self.last_events.clear();
        let mut sum = RewardDelta::default();
        for t in 0..=skip {
            sum += self.tic(buttons, t == 0);
            if self.status.done {
                break;
            }
        }
        self.decisions += 1;
        self.record_decision(tick, skip, buttons, sum.training);
        sum
    }

    /// Renders the current tic once; later calls at the same tic reuse it.
    pub fn render(&mut self) -> GameState {
        if let Some(state) = &self.cached {
            return state.clone();
        }
        let world = self.world.as_ref().expect("render without an episode");
        let camera = Camera::from_actor(&world.player).with_fov(self.config.fov_degrees.to_radians());
        let opts = self.render_options();
        self.renderer.render_into(world, &camera, &opts, &mut self.frame);
        let image_buffer = match self.config.channels {
            Channels::Rgb => self.frame.rgb.clone(),
            Channels::Gray => self.frame.gray(),
        };
        let state = GameState {
            number: self.decisions + 1,
            tick: world.tick,
            width: self.frame.width,
            height: self.frame.height,
            channels: self.config.channels,
            image_buffer,
            depth: self.frame.depth.clone(),
            game_variables: self.scenario.variables.iter().map(|&v| (v, v.read(world))).collect(),
            frame_hash: self.frame.hash(),
        };
        self.cached = Some(state.clone());
        state
    }
}

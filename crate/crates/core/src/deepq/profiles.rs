use std::fmt;
use std::str::FromStr;

use crate::scenario::{Channels, EnvConfig, GameVariable};

use super::network::NetSpec;
use super::optim::Optimizer;
use super::qlearn::EpsilonSchedule;
use super::train::{input_geometry, TrainConfig};

/// Budget scale of the bundled experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// Small inputs, small networks and reduced step counts for one CPU.
    Desk,
    /// Full-size inputs, networks and budgets of the original experiments.
    Paper,
}

impl FromStr for Profile {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "desk" => Ok(Profile::Desk),
            "paper" => Ok(Profile::Paper),
            other => Err(format!("unknown profile `{other}` (expected desk or paper)")),
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profile::Desk => "desk",
            Profile::Paper => "paper",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Architecture {
    BasicPaper,
    HealthPaper,
    Desk,
}

/// Environment, learner settings and network family of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub env: EnvConfig,
    pub train: TrainConfig,
    pub architecture: Architecture,
}

impl Experiment {
    /// Strafe-and-shoot experiment on `basic`.
    pub fn basic(profile: Profile) -> Experiment {
        let epsilon = |start, end| EpsilonSchedule { start: 1.0, end: 0.1, decay_start: start, decay_end: end };
        match profile {
            Profile::Paper => Experiment {
                env: env("builtin:basic", (60, 45), Channels::Rgb, 4),
                train: TrainConfig {
                    gamma: 0.99,
                    optimizer: Optimizer::Sgd { learning_rate: 0.01 },
                    replay_capacity: 10_000,
                    batch_size: 40,
                    epsilon: epsilon(100_000, 200_000),
                    total_steps: 600_000,
                    test_every_steps: 5_000,
                    test_episodes: 1_000,
                    skipcount: 4,
                    frame_stack: 1,
                    aux_variables: vec![],
                    reward_scale: 1.0,
                },
                architecture: Architecture::BasicPaper,
            },
            Profile::Desk => Experiment {
                env: env("builtin:basic", (30, 23), Channels::Gray, 4),
                train: TrainConfig {
                    gamma: 0.99,
                    optimizer: Optimizer::Sgd { learning_rate: 0.01 },
                    replay_capacity: 10_000,
                    batch_size: 32,
                    epsilon: epsilon(20_000, 40_000),
                    total_steps: 100_000,
                    test_every_steps: 5_000,
                    test_episodes: 100,
                    skipcount: 4,
                    frame_stack: 1,
                    aux_variables: vec![],
                    reward_scale: DESK_REWARD_SCALE,
                },
                architecture: Architecture::Desk,
            },
        }
    }

    /// Maze navigation experiment on `health_gathering`.
    pub fn health_gathering(profile: Profile) -> Experiment {
        let aux = vec![GameVariable::Health, GameVariable::Tick];
        let epsilon = |start, end| EpsilonSchedule { start: 1.0, end: 0.1, decay_start: start, decay_end: end };
        match profile {
            Profile::Paper => Experiment {
                env: env("builtin:health_gathering", (120, 45), Channels::Rgb, 10),
                train: TrainConfig {
                    gamma: 1.0,
                    optimizer: Optimizer::rmsprop(0.00001),
                    replay_capacity: 10_000,
                    batch_size: 64,
                    epsilon: epsilon(4_000, 104_000),
                    total_steps: 104_000,
                    test_every_steps: 5_000,
                    test_episodes: 100,
                    skipcount: 10,
                    frame_stack: 4,
                    aux_variables: aux,
                    reward_scale: 1.0,
                },
                architecture: Architecture::HealthPaper,
            },
            Profile::Desk => Experiment {
                env: env("builtin:health_gathering", (48, 18), Channels::Gray, 10),
                train: TrainConfig {
                    gamma: 1.0,
                    optimizer: Optimizer::rmsprop(0.0001),
                    replay_capacity: 10_000,
                    batch_size: 32,
                    epsilon: epsilon(1_000, 20_000),
                    total_steps: 25_000,
                    test_every_steps: 5_000,
                    test_episodes: 20,
                    skipcount: 10,
                    frame_stack: 4,
                    aux_variables: aux,
                    reward_scale: DESK_REWARD_SCALE,
                },
                architecture: Architecture::Desk,
            },
        }
    }

    /// Experiment for a bundled scenario name.
    pub fn for_scenario(name: &str, profile: Profile) -> Option<Experiment> {
        match name {
            "basic" => Some(Experiment::basic(profile)),
            "health_gathering" => Some(Experiment::health_gathering(profile)),
            _ => None,
        }
    }

    /// Network for `actions` outputs under this experiment's input geometry.
    pub fn net_spec(&self, actions: usize) -> NetSpec {
        let (c, h, w) = input_geometry(&self.env, self.train.frame_stack);
        let aux = self.train.aux_variables.len();
        match self.architecture {
            Architecture::BasicPaper => NetSpec::basic_paper(c, h, w, actions),
            Architecture::HealthPaper => NetSpec::health_paper(c, h, w, aux, actions),
            Architecture::Desk => NetSpec::desk(c, h, w, aux, actions),
        }
    }
}

/// Desk runs learn on rewards scaled down to keep SGD at the original
/// learning rate stable.
pub const DESK_REWARD_SCALE: f64 = 0.01;

fn env(scenario: &str, resolution: (usize, usize), channels: Channels, skip: u32) -> EnvConfig {
    EnvConfig {
        scenario_path: scenario.to_string(),
        resolution,
        channels,
        default_skipcount: skip,
        ..EnvConfig::default()
    }
}

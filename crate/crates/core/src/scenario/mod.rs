//! Environment configs, scenario definitions, reward and terminal rules.

pub mod bundled;
mod config;
mod rewards;
mod scn;

pub use config::{
    Channels, ConfigError, EnvConfig, LivingRewardUnit, Mode, MAX_RESOLUTION, MAX_SKIPCOUNT, MIN_RESOLUTION,
};
pub use rewards::{check_terminal, score_events, Reward, RewardDelta, RewardRules, TerminalCause, TerminalStatus};
pub use scn::{AngleRule, GameVariable, Mechanics, PlayerSpawn, ScenarioDef, ScenarioError};

/// Parses an environment config (`.cfg`).
pub fn parse_config(text: &str) -> Result<EnvConfig, ConfigError> {
    EnvConfig::parse(text)
}

/// Parses a scenario definition (`.scn`).
pub fn parse_scenario(text: &str) -> Result<ScenarioDef, ScenarioError> {
    ScenarioDef::parse(text)
}

//! Episode facade: lifecycle, state access, frame skipping, control modes.

mod environment;
mod seeds;
mod session;
mod state;

pub use environment::{load_scenario, EnvError, Environment};
pub use seeds::episode_seed;
pub use state::{ActionProvider, GameState, Observation};

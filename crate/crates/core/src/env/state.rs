use crate::engine::{ButtonSet, GameEvent};
use crate::scenario::{Channels, GameVariable};

/// Observation returned by `get_state`.
#[derive(Debug, Clone, PartialEq)]
pub struct GameState {
    /// 1 for the initial state, incremented by every decision.
    pub number: u64,
    pub tick: u32,
    pub width: usize,
    pub height: usize,
    pub channels: Channels,
    /// Row-major pixels, `channels` bytes each.
    pub image_buffer: Vec<u8>,
    pub depth: Option<Vec<f32>>,
    /// Ordered as the scenario declares its variables.
    pub game_variables: Vec<(GameVariable, f64)>,
    /// Hash of the rendered RGB and depth buffers.
    pub frame_hash: u64,
}

impl GameState {
    pub fn variable(&self, var: GameVariable) -> Option<f64> {
        self.game_variables.iter().find(|(v, _)| *v == var).map(|&(_, x)| x)
    }
}

/// What a learner sees in spectator modes: the state shown to the human,
/// the buttons they pressed and the reward that followed.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub state: GameState,
    pub action: ButtonSet,
    pub reward: f64,
    /// Events of the tics covered by this observation.
    pub events: Vec<GameEvent>,
}

/// Source of button presses in spectator modes.
///
/// In synchronous modes `decide` is called once per decision point and may
/// block; the simulation waits for it. In asynchronous modes it is called once
/// per tic and must return the latest input without blocking. `None` means the
/// provider is gone.
pub trait ActionProvider: Send {
    fn decide(&mut self, state: &GameState) -> Option<ButtonSet>;
}

impl<F> ActionProvider for F
where
    F: FnMut(&GameState) -> Option<ButtonSet> + Send,
{
    fn decide(&mut self, state: &GameState) -> Option<ButtonSet> {
        self(state)
    }
}

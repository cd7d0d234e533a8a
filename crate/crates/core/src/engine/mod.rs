//! Deterministic fixed-timestep game logic.
//!
//! All arithmetic is `f64` in a fixed operation order; a world advanced with
//! the same button sequence reproduces bit-identical state.

mod buttons;
mod collision;
mod entity;
mod event;
mod hitscan;
mod map;
mod world;

pub use buttons::{Button, ButtonSet, UnknownButton, MAX_BUTTONS};
pub use collision::{move_actor, move_actor_among};
pub use entity::{Actor, ActorKind, Item, ItemKind};
pub use event::{EventTag, GameEvent};
pub use hitscan::{hitscan, ray_circle, HitResult};
pub use map::{CellKind, GridMap, MapError, Side, Surface, WallHit};
pub use world::{AcidSchedule, EngineParams, ItemRules, WorldState, TICRATE};

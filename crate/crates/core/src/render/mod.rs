//! Single-core software raycaster producing RGB and depth buffers.

mod bench;
mod camera;
mod frame;
mod raycast;
mod renderer;

pub use bench::{measure_fps, BenchError, FpsReport, MIN_BENCH_SECONDS};
pub use camera::{Camera, RenderOptions};
pub use frame::{quantize_depth, Frame};
pub use raycast::{cast_wall_ray, column_offsets, WallRay};
pub use renderer::{render_frame, Renderer, ITEM_SPRITE_SIZE, MONSTER_SPRITE_SIZE};

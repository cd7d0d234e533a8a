use std::time::{Duration, Instant};

use thiserror::Error;

use crate::engine::WorldState;

use super::camera::{Camera, RenderOptions};
use super::frame::Frame;
use super::renderer::Renderer;

pub const MIN_BENCH_SECONDS: f64 = 1.0;

#[derive(Debug, Error, PartialEq)]
pub enum BenchError {
    #[error("benchmark duration {0}s is below the {MIN_BENCH_SECONDS}s minimum")]
    DurationTooShort(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FpsReport {
    pub width: usize,
    pub height: usize,
    pub compute_depth: bool,
    pub frames: u64,
    pub seconds: f64,
    pub fps: f64,
}

/// Renders in a tight single-threaded loop for at least `duration_s` seconds.
pub fn measure_fps(
    world: &WorldState,
    camera: &Camera,
    opts: &RenderOptions,
    duration_s: f64,
) -> Result<FpsReport, BenchError> {
    if !(duration_s >= MIN_BENCH_SECONDS) {
        return Err(BenchError::DurationTooShort(duration_s));
    }
    let budget = Duration::from_secs_f64(duration_s);
    let mut renderer = Renderer::new();
    let mut frame = Frame { width: 0, height: 0, rgb: Vec::new(), depth: None };
    // Warm-up frame sizes the buffers outside the timed region.
    renderer.render_into(world, camera, opts, &mut frame);
    let start = Instant::now();
    let mut frames = 0u64;
    loop {
        renderer.render_into(world, camera, opts, &mut frame);
        frames += 1;
        if frames % 16 == 0 && start.elapsed() >= budget {
            break;
        }
    }
    std::hint::black_box(&frame);
    let seconds = start.elapsed().as_secs_f64();
    Ok(FpsReport {
        width: opts.width,
        height: opts.height,
        compute_depth: opts.compute_depth,
        frames,
        seconds,
        fps: frames as f64 / seconds,
    })
}

use std::f64::consts::PI;

use crate::engine::Actor;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Camera {
    pub pos: (f64, f64),
    pub angle: f64,
    /// Horizontal field of view, radians, in `(0, pi)`.
    pub fov: f64,
}

impl Camera {
    pub const DEFAULT_FOV: f64 = PI / 2.0;
    /// Eye height as a fraction of the wall height.
    pub const EYE_HEIGHT: f64 = 0.5;

    pub fn new(pos: (f64, f64), angle: f64) -> Self {
        Camera { pos, angle, fov: Self::DEFAULT_FOV }
    }

    pub fn from_actor(actor: &Actor) -> Self {
        Camera::new(actor.pos, actor.angle)
    }

    pub fn with_fov(mut self, fov: f64) -> Self {
        assert!(fov > 0.0 && fov < PI, "fov must lie in (0, pi)");
        self.fov = fov;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RenderOptions {
    pub width: usize,
    pub height: usize,
    pub compute_depth: bool,
    pub render_sprites: bool,
    pub floor_ceiling_shading: bool,
}

impl RenderOptions {
    pub fn new(width: usize, height: usize) -> Self {
        assert!(width >= 4 && height >= 4, "resolution must be at least 4x4");
        RenderOptions { width, height, compute_depth: true, render_sprites: true, floor_ceiling_shading: true }
    }

    pub fn depth(mut self, on: bool) -> Self {
        self.compute_depth = on;
        self
    }

    pub fn sprites(mut self, on: bool) -> Self {
        self.render_sprites = on;
        self
    }

    pub fn shading(mut self, on: bool) -> Self {
        self.floor_ceiling_shading = on;
        self
    }
}

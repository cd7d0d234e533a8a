//! WebAssembly front end over the basic scenario. The page calls
//! [`Demo::step`] with a button mask, blits [`Demo::pixels`] into a canvas
//! and asks [`Demo::inspect_column`] what a clicked column's ray hits.

use raydoom::engine::{hitscan, ButtonSet, HitResult};
use raydoom::env::Environment;
use raydoom::render::{cast_wall_ray, column_offsets, quantize_depth};
use raydoom::scenario::parse_config;
use wasm_bindgen::prelude::*;

/// Basic-scenario session rendering RGB and depth at a fixed resolution.
#[wasm_bindgen]
pub struct Demo {
    env: Environment,
    width: usize,
    height: usize,
    fov: f64,
    show_depth: bool,
    rgb: Vec<u8>,
    depth: Vec<f32>,
}

/// What one screen column's ray meets.
#[wasm_bindgen]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColumnProbe {
    /// Fisheye-corrected wall distance, as written to the depth buffer.
    pub wall_distance: f64,
    /// Euclidean distance to the first thing a shot along this ray hits.
    pub shot_distance: f64,
    /// Index of the monster a shot would hit, or -1 for a wall.
    pub monster: i32,
    pub ray_angle: f64,
}

#[wasm_bindgen]
impl Demo {
    #[wasm_bindgen(constructor)]
    pub fn new(width: usize, height: usize, seed: u64) -> Result<Demo, JsError> {
        let text = format!(
            "scenario = builtin:basic\nresolution = {width}x{height}\nchannels = RGB\ndepth = true\nskipcount = 0\n"
        );
        let cfg = parse_config(&text).map_err(|e| JsError::new(&e.to_string()))?;
        let fov = cfg.fov_degrees.to_radians();
        let env = Environment::init(cfg).map_err(|e| JsError::new(&e.to_string()))?;
        let mut demo = Demo { env, width, height, fov, show_depth: false, rgb: vec![], depth: vec![] };
        demo.reset(seed);
        Ok(demo)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn reset(&mut self, seed: u64) {
        self.env.new_episode(Some(seed));
        self.refresh();
    }

    /// Advances one tic with `mask` over MOVE_LEFT, MOVE_RIGHT, ATTACK
    /// (bit 0 first). Returns the reward, or NaN once the episode is over.
    pub fn step(&mut self, mask: u16) -> f64 {
        if self.env.is_episode_finished() {
            return f64::NAN;
        }
        let buttons = ButtonSet::from_mask(mask & 0b111, self.env.button_count()).expect("three buttons");
        let reward = self.env.make_action(buttons, Some(0)).expect("running episode in player mode");
        self.refresh();
        reward
    }

    pub fn finished(&self) -> bool {
        self.env.is_episode_finished()
    }

    pub fn total_reward(&self) -> f64 {
        self.env.get_total_reward()
    }

    pub fn tick(&self) -> u32 {
        self.env.tick()
    }

    pub fn set_show_depth(&mut self, on: bool) {
        self.show_depth = on;
    }

    /// RGBA bytes of the current view, or of the depth buffer as gray
    /// (near is dark) when depth display is on.
    pub fn pixels(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.width * self.height * 4);
        if self.show_depth {
            for &d in &self.depth {
                let v = quantize_depth(d);
                out.extend_from_slice(&[v, v, v, 255]);
            }
        } else {
            for px in self.rgb.chunks_exact(3) {
                out.extend_from_slice(&[px[0], px[1], px[2], 255]);
            }
        }
        out
    }

    /// Ray through the center of screen column `x`. Columns past the right
    /// edge clamp to the last one.
    pub fn inspect_column(&self, x: usize) -> ColumnProbe {
        let world = self.env.world().expect("an episode has started");
        let offsets = column_offsets(self.width, self.fov);
        let angle = world.player.angle + offsets[x.min(self.width - 1)];
        let wall = cast_wall_ray(&world.map, world.player.pos, angle, world.player.angle);
        let (monster, shot_distance) = match hitscan(&world, world.player.pos, angle) {
            HitResult::Monster { id, distance } => (id as i32, distance),
            HitResult::Wall { distance } => (-1, distance),
        };
        ColumnProbe { wall_distance: wall.perp_distance, shot_distance, monster, ray_angle: angle }
    }
}

impl Demo {
    fn refresh(&mut self) {
        if let Ok(state) = self.env.get_state() {
            self.rgb = state.image_buffer;
            self.depth = state.depth.unwrap_or_default();
        }
    }
}

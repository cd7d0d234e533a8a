use crate::engine::{CellKind, GridMap, ItemKind, Surface, WorldState};

use super::camera::{Camera, RenderOptions};
use super::frame::Frame;
use super::raycast::{cast_prepared, column_offsets, ray_geometry};

/// World size of monster billboards (square).
pub const MONSTER_SPRITE_SIZE: f64 = 0.8;
/// World size of item billboards (square).
pub const ITEM_SPRITE_SIZE: f64 = 0.4;
/// Sprites closer than this to the camera plane are culled.
const NEAR_PLANE: f64 = 0.05;

const CEILING: [u8; 3] = [70, 70, 82];
const FLOOR: [u8; 3] = [100, 92, 76];
const ACID_FLOOR: [u8; 3] = [52, 120, 44];
const MONSTER: [u8; 3] = [240, 190, 40];
const MEDIKIT: [u8; 3] = [236, 236, 236];
const MEDIKIT_CROSS: [u8; 3] = [210, 20, 20];
const VIAL: [u8; 3] = [30, 40, 200];

/// Light and dark checker tones per wall texture id (cycled).
const WALL_PALETTE: [([u8; 3], [u8; 3]); 6] = [
    ([160, 160, 160], [118, 118, 118]),
    ([150, 96, 64], [112, 70, 46]),
    ([80, 120, 160], [56, 88, 120]),
    ([170, 150, 80], [128, 110, 56]),
    ([110, 150, 100], [80, 112, 72]),
    ([140, 90, 140], [104, 64, 104]),
];

/// Checker cells per wall face along each axis.
const CHECKER: f64 = 8.0;

#[derive(Debug, Clone, Copy, Default)]
struct Column {
    /// Half the projected wall slice height, in pixels.
    half: f32,
    /// Maps `|dy|` in pixels to a checker band index.
    band_scale: f32,
    band_offset: u32,
    light: [u8; 3],
    dark: [u8; 3],
    depth: f32,
}

/// Reusable software raycaster. Holds per-resolution tables and scratch
/// buffers; rendering is a pure function of `(world, camera, options)`.
#[derive(Debug, Default)]
pub struct Renderer {
    width: usize,
    fov: f64,
    offsets: Vec<f64>,
    /// Per-column ray geometry for `geometry_angle`.
    geometry: Vec<((f64, f64), f64)>,
    geometry_angle: Option<u64>,
    columns: Vec<Column>,
    wall_depth: Vec<f64>,
    row_color: Vec<[u8; 3]>,
    row_depth: Vec<f32>,
    sprites: Vec<Sprite>,
}

#[derive(Debug, Clone, Copy)]
struct Sprite {
    depth: f64,
    lateral: f64,
    size: f64,
    kind: SpriteKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum SpriteKind {
    Monster,
    Medikit,
    Vial,
}

fn scale(c: [u8; 3], num: u32, den: u32) -> [u8; 3] {
    [(c[0] as u32 * num / den) as u8, (c[1] as u32 * num / den) as u8, (c[2] as u32 * num / den) as u8]
}

fn floor_color(map: &GridMap) -> [u8; 3] {
    let acid = (0..map.height())
        .any(|y| (0..map.width()).any(|x| map.cell(x, y) == CellKind::Floor(Surface::Acid)));
    if acid {
        ACID_FLOOR
    } else {
        FLOOR
    }
}

impl Renderer {
    pub fn new() -> Self {
        Self::default()
    }

    /// Angular offsets of the column rays used for the last frame.
    pub fn column_offsets(&self) -> &[f64] {
        &self.offsets
    }

    /// Wall perpendicular distance per column of the last frame.
    pub fn wall_depths(&self) -> &[f64] {
        &self.wall_depth
    }

    pub fn render(&mut self, world: &WorldState, camera: &Camera, opts: &RenderOptions) -> Frame {
        let mut frame = Frame { width: 0, height: 0, rgb: Vec::new(), depth: None };
        self.render_into(world, camera, opts, &mut frame);
        frame
    }

    /// Renders into `frame`, reusing its allocations.
    pub fn render_into(&mut self, world: &WorldState, camera: &Camera, opts: &RenderOptions, frame: &mut Frame) {
        let (w, h) = (opts.width, opts.height);
        assert!(w >= 4 && h >= 4, "resolution must be at least 4x4");
        if self.width != w || self.fov != camera.fov {
            self.width = w;
            self.fov = camera.fov;
            self.offsets = column_offsets(w, camera.fov);
            self.geometry_angle = None;
        }
        if self.geometry_angle != Some(camera.angle.to_bits()) {
            self.geometry = self.offsets.iter().map(|&off| ray_geometry(camera.angle + off, camera.angle)).collect();
            self.geometry_angle = Some(camera.angle.to_bits());
        }
        let proj = (w as f64 / 2.0) / (camera.fov / 2.0).tan();

        frame.width = w;
        frame.height = h;
        frame.rgb.resize(w * h * 3, 0);
        match (&mut frame.depth, opts.compute_depth) {
            (Some(d), true) => d.resize(w * h, 0.0),
            (None, true) => frame.depth = Some(vec![0.0; w * h]),
            (_, false) => frame.depth = None,
        }

        self.cast_columns(&world.map, camera, proj);
        self.build_rows(&world.map, h, proj, opts.floor_ceiling_shading);
        self.fill(frame);
        if opts.render_sprites {
            self.draw_sprites(world, camera, proj, frame);
        }
    }

    fn cast_columns(&mut self, map: &GridMap, camera: &Camera, proj: f64) {
        self.columns.resize(self.width, Column::default());
        self.wall_depth.resize(self.width, 0.0);
        for (i, &geom) in self.geometry.iter().enumerate() {
            let ray = cast_prepared(map, camera.pos, geom);
            let slice = proj / ray.perp_distance;
            let (mut light, mut dark) = WALL_PALETTE[ray.texture as usize % WALL_PALETTE.len()];
            if ray.side.is_ns() {
                light = scale(light, 3, 4);
                dark = scale(dark, 3, 4);
            }
            // Symmetric checker: bands count outwards from the face center.
            let u_band = ((ray.wall_x - 0.5).abs() * CHECKER) as u32;
            self.wall_depth[i] = ray.perp_distance;
            self.columns[i] = Column {
                half: (slice / 2.0) as f32,
                band_scale: (CHECKER / slice) as f32,
                band_offset: u_band,
                light,
                dark,
                depth: ray.perp_distance as f32,
            };
        }
    }

    fn build_rows(&mut self, map: &GridMap, h: usize, proj: f64, shading: bool) {
        let floor = floor_color(map);
        self.row_color.clear();
        self.row_depth.clear();
        for y in 0..h {
            let dy = (y as f64 + 0.5) - h as f64 / 2.0;
            // Distance to the floor (below the horizon) or ceiling (above).
            let dist = if dy == 0.0 { f64::MAX } else { Camera::EYE_HEIGHT * proj / dy.abs() };
            let base = if dy < 0.0 { CEILING } else { floor };
            let color = if shading {
                let light = (256.0 / (1.0 + 0.12 * dist)) as u32;
                scale(base, light.clamp(64, 256), 256)
            } else {
                base
            };
            self.row_color.push(color);
            self.row_depth.push(dist.min(f32::MAX as f64) as f32);
        }
    }

    fn fill(&self, frame: &mut Frame) {
        let w = frame.width;
        let h = frame.height;
        // Floor and ceiling are constant per row.
        for (y, row) in frame.rgb.chunks_exact_mut(w * 3).enumerate() {
            row[..3].copy_from_slice(&self.row_color[y]);
            let mut filled = 3;
            while filled < row.len() {
                let n = filled.min(row.len() - filled);
                row.copy_within(..n, filled);
                filled += n;
            }
        }
        if let Some(depth) = frame.depth.as_mut() {
            for (y, row) in depth.chunks_exact_mut(w).enumerate() {
                row.fill(self.row_depth[y]);
            }
        }
        // Wall spans: rows whose center lies within half a slice of the
        // horizon. Rows `y` and `h - 1 - y` are equidistant from it, so each
        // texel is computed once and written to both halves.
        let mid = h as f32 / 2.0;
        let upper = h.div_ceil(2);
        for (x, c) in self.columns[..w].iter().enumerate() {
            let y0 = ((mid - c.half - 0.5).floor().max(0.0)) as usize;
            for y in y0..upper {
                let ady = ((y as f32 + 0.5) - mid).abs();
                if ady >= c.half {
                    continue;
                }
                let band = (ady * c.band_scale) as u32;
                let color = if (band + c.band_offset) & 1 == 0 { c.light } else { c.dark };
                let top = (y * w + x) * 3;
                let bottom = ((h - 1 - y) * w + x) * 3;
                frame.rgb[top..top + 3].copy_from_slice(&color);
                frame.rgb[bottom..bottom + 3].copy_from_slice(&color);
            }
        }
        if let Some(depth) = frame.depth.as_mut() {
            for (x, c) in self.columns[..w].iter().enumerate() {
                let y0 = ((mid - c.half - 0.5).floor().max(0.0)) as usize;
                for y in y0..upper {
                    if ((y as f32 + 0.5) - mid).abs() < c.half {
                        depth[y * w + x] = c.depth;
                        depth[(h - 1 - y) * w + x] = c.depth;
                    }
                }
            }
        }
    }

    fn draw_sprites(&mut self, world: &WorldState, camera: &Camera, proj: f64, frame: &mut Frame) {
        let dir = (camera.angle.cos(), camera.angle.sin());
        let right = (-dir.1, dir.0);
        self.sprites.clear();
        let mut push = |pos: (f64, f64), size: f64, kind: SpriteKind| {
            let rel = (pos.0 - camera.pos.0, pos.1 - camera.pos.1);
            let depth = rel.0 * dir.0 + rel.1 * dir.1;
            if depth > NEAR_PLANE {
                let lateral = rel.0 * right.0 + rel.1 * right.1;
                self.sprites.push(Sprite { depth, lateral, size, kind });
            }
        };
        for m in world.monsters.iter().filter(|m| m.alive) {
            push(m.pos, MONSTER_SPRITE_SIZE, SpriteKind::Monster);
        }
        for it in world.items.iter().filter(|i| i.active) {
            let kind = match it.kind {
                ItemKind::Medikit => SpriteKind::Medikit,
                ItemKind::PoisonVial => SpriteKind::Vial,
            };
            push(it.pos, ITEM_SPRITE_SIZE, kind);
        }
        // Far to near; stable so equal depths keep spawn order.
        self.sprites.sort_by(|a, b| b.depth.total_cmp(&a.depth));

        let (w, h) = (frame.width, frame.height);
        let half_h = h as f64 / 2.0;
        for s in &self.sprites {
            let center = w as f64 / 2.0 + proj * s.lateral / s.depth;
            let half_w = proj * (s.size / 2.0) / s.depth;
            // Billboards stand on the floor.
            let top = half_h + (Camera::EYE_HEIGHT - s.size) * proj / s.depth;
            let bottom = half_h + Camera::EYE_HEIGHT * proj / s.depth;
            let x0 = ((center - half_w - 0.5).ceil().max(0.0)) as usize;
            let x1 = ((center + half_w - 0.5).ceil().clamp(0.0, w as f64)) as usize;
            let y0 = ((top - 0.5).ceil().max(0.0)) as usize;
            let y1 = ((bottom - 0.5).ceil().clamp(0.0, h as f64)) as usize;
            let depth = s.depth as f32;
            for x in x0..x1 {
                if s.depth >= self.wall_depth[x] {
                    continue;
                }
                let u = (x as f64 + 0.5 - (center - half_w)) / (2.0 * half_w);
                for y in y0..y1 {
                    let v = (y as f64 + 0.5 - top) / (bottom - top);
                    let Some(color) = sprite_texel(s.kind, u, v) else { continue };
                    let idx = y * w + x;
                    frame.rgb[idx * 3..idx * 3 + 3].copy_from_slice(&color);
                    if let Some(d) = frame.depth.as_mut() {
                        d[idx] = depth;
                    }
                }
            }
        }
    }
}

/// Sprite appearance at normalized billboard coordinates; `None` is
/// transparent.
fn sprite_texel(kind: SpriteKind, u: f64, v: f64) -> Option<[u8; 3]> {
    match kind {
        SpriteKind::Monster => {
            let (du, dv) = (u - 0.5, v - 0.5);
            (du * du * 4.0 + dv * dv * 4.0 <= 1.0).then_some(MONSTER)
        }
        SpriteKind::Medikit => {
            let bar = |t: f64| (0.375..0.625).contains(&t);
            Some(if bar(u) || bar(v) { MEDIKIT_CROSS } else { MEDIKIT })
        }
        SpriteKind::Vial => (0.2..0.8).contains(&u).then_some(VIAL),
    }
}

/// Renders one frame with a fresh [`Renderer`].
pub fn render_frame(world: &WorldState, camera: &Camera, opts: &RenderOptions) -> Frame {
    Renderer::new().render(world, camera, opts)
}

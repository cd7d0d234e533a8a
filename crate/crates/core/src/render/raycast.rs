use crate::engine::{GridMap, Side};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WallRay {
    /// Euclidean hit distance times `cos(ray_angle - camera_angle)`.
    pub perp_distance: f64,
    pub texture: u8,
    pub side: Side,
    pub wall_x: f64,
}

/// Casts one column ray with fisheye correction relative to `camera_angle`.
pub fn cast_wall_ray(map: &GridMap, origin: (f64, f64), ray_angle: f64, camera_angle: f64) -> WallRay {
    cast_prepared(map, origin, ray_geometry(ray_angle, camera_angle))
}

/// Unit direction and fisheye factor of a ray, computed exactly as
/// [`cast_wall_ray`] does.
pub(crate) fn ray_geometry(ray_angle: f64, camera_angle: f64) -> ((f64, f64), f64) {
    let (sin, cos) = ray_angle.sin_cos();
    ((cos, sin), (ray_angle - camera_angle).cos())
}

pub(crate) fn cast_prepared(map: &GridMap, origin: (f64, f64), (dir, correction): ((f64, f64), f64)) -> WallRay {
    let hit = map.trace(origin, dir);
    WallRay {
        perp_distance: hit.distance * correction,
        texture: hit.texture,
        side: hit.side,
        wall_x: hit.wall_x,
    }
}

/// Angular offset of every screen column's ray from the view axis. Column `i`
/// samples the projection plane at its pixel center, so offsets are
/// antisymmetric about the middle of the screen.
pub fn column_offsets(width: usize, fov: f64) -> Vec<f64> {
    let half = (fov / 2.0).tan();
    (0..width)
        .map(|i| {
            let cx = (2 * i + 1) as f64 / width as f64 - 1.0;
            (cx * half).atan()
        })
        .collect()
}

use super::world::WorldState;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HitResult {
    Wall { distance: f64 },
    Monster { id: usize, distance: f64 },
}

impl HitResult {
    pub fn distance(self) -> f64 {
        match self {
            HitResult::Wall { distance } | HitResult::Monster { distance, .. } => distance,
        }
    }
}

/// Distance along the unit ray `dir` to the circle, if the ray meets it.
/// An origin inside the circle hits at distance 0.
pub fn ray_circle(origin: (f64, f64), dir: (f64, f64), center: (f64, f64), radius: f64) -> Option<f64> {
    let f = (center.0 - origin.0, center.1 - origin.1);
    let b = f.0 * dir.0 + f.1 * dir.1;
    let c = f.0 * f.0 + f.1 * f.1 - radius * radius;
    if c <= 0.0 {
        return Some(0.0);
    }
    let disc = b * b - c;
    if disc < 0.0 || b <= 0.0 {
        return None;
    }
    Some(b - disc.sqrt())
}

/// First thing a ray hits: an alive monster strictly closer than the first
/// wall, otherwise that wall.
pub fn hitscan(world: &WorldState, origin: (f64, f64), angle: f64) -> HitResult {
    let dir = (angle.cos(), angle.sin());
    let wall = world.map.trace(origin, dir).distance;
    let mut best: Option<(usize, f64)> = None;
    for (id, m) in world.monsters.iter().enumerate() {
        if !m.alive {
            continue;
        }
        if let Some(t) = ray_circle(origin, dir, m.pos, m.radius) {
            if t < wall && best.is_none_or(|(_, bt)| t < bt) {
                best = Some((id, t));
            }
        }
    }
    match best {
        Some((id, distance)) => HitResult::Monster { id, distance },
        None => HitResult::Wall { distance: wall },
    }
}

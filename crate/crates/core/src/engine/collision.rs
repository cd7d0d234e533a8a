use super::entity::Actor;
use super::map::GridMap;

/// Axis-separated wall sliding: `dx` is applied first, then `dy`; each axis
/// move is cancelled if the actor circle would overlap a wall cell.
pub fn move_actor(map: &GridMap, actor: &Actor, displacement: (f64, f64)) -> Actor {
    move_actor_among(map, actor, displacement, &[])
}

/// Like [`move_actor`], additionally treating each `(center, radius)` in
/// `obstacles` as solid.
pub fn move_actor_among(
    map: &GridMap,
    actor: &Actor,
    displacement: (f64, f64),
    obstacles: &[((f64, f64), f64)],
) -> Actor {
    debug_assert!(displacement.0.abs() <= 1.0 && displacement.1.abs() <= 1.0);
    let mut out = actor.clone();
    let blocked = |pos: (f64, f64)| {
        map.circle_overlaps_wall(pos, actor.radius)
            || obstacles.iter().any(|&(c, r)| {
                let (dx, dy) = (pos.0 - c.0, pos.1 - c.1);
                let reach = r + actor.radius;
                dx * dx + dy * dy < reach * reach
            })
    };
    if displacement.0 != 0.0 {
        let next = (out.pos.0 + displacement.0, out.pos.1);
        if !blocked(next) {
            out.pos = next;
        }
    }
    if displacement.1 != 0.0 {
        let next = (out.pos.0, out.pos.1 + displacement.1);
        if !blocked(next) {
            out.pos = next;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::entity::ActorKind;

    fn player(pos: (f64, f64)) -> Actor {
        Actor::new(ActorKind::Player, pos, 0.0, 0.25, 100)
    }

    /// Brute-force oracle: sample the circle boundary and interior densely.
    fn overlaps_by_sampling(map: &GridMap, c: (f64, f64), r: f64) -> bool {
        let n = 400;
        for i in 0..n {
            let a = i as f64 / n as f64 * std::f64::consts::TAU;
            for k in 1..=20 {
                let rr = r * (k as f64 / 20.0) * (1.0 - 1e-9);
                if map.is_wall_at((c.0 + rr * a.cos(), c.1 + rr * a.sin())) {
                    return true;
                }
            }
        }
        false
    }

    #[test]
    fn open_move_is_exact() {
        let map = GridMap::room(7, 7).unwrap();
        let a = player((3.5, 3.5));
        let b = move_actor(&map, &a, (0.1, 0.0));
        assert_eq!(b.pos, (3.5 + 0.1, 3.5));
    }

    #[test]
    fn zero_displacement_is_identity() {
        let map = GridMap::room(7, 7).unwrap();
        let a = player((3.5, 3.5));
        assert_eq!(move_actor(&map, &a, (0.0, 0.0)), a);
    }

    #[test]
    fn slides_along_east_wall() {
        let map = GridMap::room(7, 7).unwrap();
        // East wall occupies x >= 6; flush means center at 6 - radius.
        let a = player((5.75, 3.5));
        let b = move_actor(&map, &a, (0.5, 0.3));
        assert_eq!(b.pos.0, 5.75);
        assert_eq!(b.pos.1, 3.5 + 0.3);
        assert!(!overlaps_by_sampling(&map, b.pos, b.radius));
        // The cancelled axis really would have overlapped.
        assert!(overlaps_by_sampling(&map, (6.25, 3.5), 0.25));
    }

    #[test]
    fn obstacles_block() {
        let map = GridMap::room(7, 7).unwrap();
        let a = player((3.5, 3.5));
        let b = move_actor_among(&map, &a, (0.3, 0.0), &[((4.2, 3.5), 0.4)]);
        assert_eq!(b.pos, a.pos);
    }
}

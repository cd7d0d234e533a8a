//! Reference implementations and harnesses shared by the integration and
//! acceptance tests.
#![allow(dead_code)]

pub mod corpus;

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use raydoom::deepq::{
    learn_step, LayerKind, NetSpec, Network, Optimizer, OptimizerState, ReplayBuffer, Shape, StateInput, Tensor, Transition,
};
use raydoom::engine::{CellKind, GridMap, Surface, WorldState};

// ---------------------------------------------------------------- geometry

/// Enclosed random map: border walls plus interior walls with probability
/// `density`, textures 1..=9.
pub fn random_map<R: Rng>(rng: &mut R, width: usize, height: usize, density: f64) -> GridMap {
    let mut cells = Vec::with_capacity(width * height);
    for y in 0..height {
        for x in 0..width {
            let border = x == 0 || y == 0 || x + 1 == width || y + 1 == height;
            cells.push(if border || rng.gen_bool(density) {
                CellKind::Wall(rng.gen_range(1..=9))
            } else {
                CellKind::Floor(Surface::Normal)
            });
        }
    }
    GridMap::new(width, height, cells).unwrap()
}

/// Uniform point in a random floor cell, at least `margin` from the cell's
/// edges. `None` when the map has no floor.
pub fn random_floor_point<R: Rng>(rng: &mut R, map: &GridMap, margin: f64) -> Option<(f64, f64)> {
    let floor: Vec<(usize, usize)> = (0..map.height())
        .flat_map(|y| (0..map.width()).map(move |x| (x, y)))
        .filter(|&(x, y)| !map.cell(x, y).is_wall())
        .collect();
    if floor.is_empty() {
        return None;
    }
    let (x, y) = floor[rng.gen_range(0..floor.len())];
    Some((x as f64 + rng.gen_range(margin..1.0 - margin), y as f64 + rng.gen_range(margin..1.0 - margin)))
}

fn solid(map: &GridMap, p: (f64, f64)) -> bool {
    let (x, y) = (p.0.floor(), p.1.floor());
    x < 0.0 || y < 0.0 || x >= map.width() as f64 || y >= map.height() as f64 || map.cell(x as usize, y as usize).is_wall()
}

/// Euclidean distance to the first wall found by marching in steps of
/// `step`; accurate to `step / 2`.
pub fn march_wall(map: &GridMap, origin: (f64, f64), angle: f64, step: f64) -> f64 {
    let dir = (angle.cos(), angle.sin());
    let mut i = 1u64;
    loop {
        let t = i as f64 * step;
        if solid(map, (origin.0 + t * dir.0, origin.1 + t * dir.1)) {
            return t - step / 2.0;
        }
        i += 1;
    }
}

/// What a marched ray meets first: `Some(monster index)` or `None` for a
/// wall, with the distance.
pub fn march_hitscan(world: &WorldState, origin: (f64, f64), angle: f64, step: f64) -> (Option<usize>, f64) {
    let dir = (angle.cos(), angle.sin());
    let mut i = 0u64;
    loop {
        let t = i as f64 * step;
        let p = (origin.0 + t * dir.0, origin.1 + t * dir.1);
        for (id, m) in world.monsters.iter().enumerate() {
            let d = ((p.0 - m.pos.0).powi(2) + (p.1 - m.pos.1).powi(2)).sqrt();
            if m.alive && d <= m.radius {
                return (Some(id), t);
            }
        }
        if i > 0 && solid(&world.map, p) {
            return (None, t - step / 2.0);
        }
        i += 1;
    }
}

// --------------------------------------------------------------- gradients

/// Loss used by the gradient check: `½ Σ out²`.
fn half_square(net: &Network<f64>, x: &Tensor<f64>, aux: Option<&Tensor<f64>>) -> f64 {
    net.predict(x, aux).unwrap().data().iter().map(|v| 0.5 * v * v).sum()
}

fn nudge(net: &mut Network<f64>, index: usize, delta: f64) {
    let mut offset = 0;
    net.for_each_param(|p, _| {
        if index >= offset && index < offset + p.len() {
            p[index - offset] += delta;
        }
        offset += p.len();
    });
}

/// Finite-difference step.
pub const FD_STEP: f64 = 1e-5;
/// Relative errors divide by `max(|analytic|, |numeric|, REL_FLOOR)`.
pub const REL_FLOOR: f64 = 1e-4;

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(REL_FLOOR)
}

/// Largest relative error between backprop and central differences over
/// every parameter, input and aux value of `spec` for a batch of `n`.
pub fn gradient_check<R: Rng>(rng: &mut R, spec: NetSpec, n: usize) -> f64 {
    let mut net = Network::<f64>::seeded(spec.clone(), rng.gen()).unwrap();
    // Non-zero biases so ReLU-family layers see both signs.
    net.for_each_param(|p, _| p.iter_mut().for_each(|v| *v += rng.gen_range(-0.1..0.1)));
    let in_shape = match spec.input {
        Shape::Image { c, h, w } => vec![n, c, h, w],
        Shape::Flat(f) => vec![n, f],
    };
    let x_len: usize = in_shape.iter().product();
    let mut x = Tensor::from_vec(&in_shape, (0..x_len).map(|_| rng.gen_range(-1.0..1.0)).collect());
    let mut aux = (spec.aux > 0)
        .then(|| Tensor::from_vec(&[n, spec.aux], (0..n * spec.aux).map(|_| rng.gen_range(-1.0..1.0)).collect()));

    let out = net.forward(&x, aux.as_ref()).unwrap();
    net.zero_grad();
    let (dx, daux) = net.backward_with_inputs(&out).unwrap();
    let mut analytic = Vec::new();
    net.for_each_param(|_, g| analytic.extend_from_slice(g));

    let mut worst: f64 = 0.0;
    for (i, &a) in analytic.iter().enumerate() {
        nudge(&mut net, i, FD_STEP);
        let up = half_square(&net, &x, aux.as_ref());
        nudge(&mut net, i, -2.0 * FD_STEP);
        let down = half_square(&net, &x, aux.as_ref());
        nudge(&mut net, i, FD_STEP);
        worst = worst.max(rel_err(a, (up - down) / (2.0 * FD_STEP)));
    }
    for i in 0..x_len {
        let orig = x.data()[i];
        x.data_mut()[i] = orig + FD_STEP;
        let up = half_square(&net, &x, aux.as_ref());
        x.data_mut()[i] = orig - FD_STEP;
        let down = half_square(&net, &x, aux.as_ref());
        x.data_mut()[i] = orig;
        worst = worst.max(rel_err(dx.data()[i], (up - down) / (2.0 * FD_STEP)));
    }
    if let (Some(daux), Some(a_len)) = (daux, aux.as_ref().map(|a| a.len())) {
        for i in 0..a_len {
            let orig = aux.as_ref().unwrap().data()[i];
            aux.as_mut().unwrap().data_mut()[i] = orig + FD_STEP;
            let up = half_square(&net, &x, aux.as_ref());
            aux.as_mut().unwrap().data_mut()[i] = orig - FD_STEP;
            let down = half_square(&net, &x, aux.as_ref());
            aux.as_mut().unwrap().data_mut()[i] = orig;
            worst = worst.max(rel_err(daux.data()[i], (up - down) / (2.0 * FD_STEP)));
        }
    }
    worst
}

// ------------------------------------------------------------- tabular MDP

/// Five-state corridor. Action 0 steps left (walls keep state 0 in place),
/// action 1 steps right; every step costs 1 and stepping right out of the
/// last state ends the episode with +10.
pub struct Corridor;

impl Corridor {
    pub const STATES: usize = 5;
    pub const ACTIONS: usize = 2;
    pub const GOAL_REWARD: f64 = 10.0;
    pub const STEP_COST: f64 = -1.0;

    /// `(reward, next state or None when terminal)`.
    pub fn step(s: usize, a: usize) -> (f64, Option<usize>) {
        match a {
            0 => (Self::STEP_COST, Some(s.saturating_sub(1))),
            _ if s + 1 == Self::STATES => (Self::GOAL_REWARD, None),
            _ => (Self::STEP_COST, Some(s + 1)),
        }
    }

    /// Exact Q* by value iteration to a fixed point.
    pub fn q_star(gamma: f64) -> [[f64; 2]; 5] {
        let mut q = [[0.0f64; 2]; 5];
        loop {
            let mut next = q;
            for (s, row) in next.iter_mut().enumerate() {
                for (a, v) in row.iter_mut().enumerate() {
                    let (r, n) = Self::step(s, a);
                    *v = r + n.map_or(0.0, |n| gamma * q[n][0].max(q[n][1]));
                }
            }
            let delta = (0..5).flat_map(|s| (0..2).map(move |a| (s, a))).map(|(s, a)| (next[s][a] - q[s][a]).abs()).fold(0.0, f64::max);
            q = next;
            if delta < 1e-13 {
                return q;
            }
        }
    }
}

pub fn corridor_state(s: usize) -> Arc<StateInput> {
    let mut onehot = vec![0u8; Corridor::STATES];
    onehot[s] = 255;
    Arc::new(StateInput { frames: vec![Arc::new(onehot)], aux: vec![] })
}

/// Fits Q on every corridor transition with uniform replay sampling; returns
/// the largest deviation from value iteration.
pub fn corridor_error(updates: usize, gamma: f64, seed: u64) -> f64 {
    let spec = NetSpec { input: Shape::Flat(Corridor::STATES), aux: 0, layers: vec![LayerKind::LinearOut { actions: 2 }] };
    let mut net = Network::<f32>::seeded(spec, seed).unwrap();
    let mut opt = OptimizerState::new(Optimizer::Sgd { learning_rate: 0.05 }, &mut net);
    let mut replay = ReplayBuffer::new(64);
    for s in 0..Corridor::STATES {
        for a in 0..Corridor::ACTIONS {
            let (r, next) = Corridor::step(s, a);
            replay.push(Transition { state: corridor_state(s), action: a, reward: r as f32, next: next.map(corridor_state) });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..updates {
        let batch = replay.sample(5, &mut rng);
        learn_step(&mut net, &mut opt, &batch, gamma).unwrap();
    }
    let q_star = Corridor::q_star(gamma);
    let mut worst: f64 = 0.0;
    for (s, row) in q_star.iter().enumerate() {
        let x = Tensor::from_vec(&[1, Corridor::STATES], (0..Corridor::STATES).map(|i| (i == s) as u8 as f32).collect());
        let q = net.predict(&x, None).unwrap();
        for a in 0..2 {
            worst = worst.max((q.data()[a] as f64 - row[a]).abs());
        }
    }
    worst
}


// -------------------------------------------------------- scripted policies

pub mod scripts {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use raydoom::engine::{hitscan, Button, ButtonSet, EventTag, HitResult};
    use raydoom::env::Environment;
    use raydoom::scenario::parse_config;

    pub fn env(cfg: &str) -> Environment {
        Environment::init(parse_config(cfg).unwrap()).unwrap()
    }

    fn press(env: &Environment, buttons: &[Button]) -> ButtonSet {
        ButtonSet::from_bools(&env.scenario().buttons.iter().map(|b| buttons.contains(b)).collect::<Vec<_>>())
    }

    /// Per-tic frame hashes and per-decision rewards of one episode driven
    /// by a random action script of `script_seed`.
    pub fn scripted_episode(env: &Environment, seed: u64, script_seed: u64) -> (Vec<u64>, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(script_seed);
        let n = env.button_count();
        env.set_recording(true);
        env.new_episode(Some(seed));
        let mut rewards = Vec::new();
        while !env.is_episode_finished() {
            let buttons = ButtonSet::from_mask(rng.gen_range(0..1u16 << n), n).unwrap();
            let skip = rng.gen_range(0..6);
            rewards.push(env.make_action(buttons, Some(skip)).unwrap());
        }
        let rec = env.take_recording().unwrap();
        env.set_recording(false);
        (rec.tic_hashes, rewards)
    }

    /// Outcome of [`kill_with_misses`].
    #[derive(Debug, Clone, Copy, PartialEq)]
    pub struct KillRun {
        pub total: f64,
        pub kill_tick: Option<u32>,
        pub misses: u32,
    }

    /// In `basic` with one tic per decision: steps off the monster's line
    /// and fires `misses` shots, then lines up and kills it.
    pub fn kill_with_misses(env: &Environment, seed: u64, misses: u32) -> KillRun {
        env.new_episode(Some(seed));
        let mut run = KillRun { total: 0.0, kill_tick: None, misses: 0 };
        while !env.is_episode_finished() {
            let w = env.world().unwrap();
            let aligned = matches!(hitscan(&w, w.player.pos, w.player.angle), HitResult::Monster { .. });
            let monster_right = w.monsters[0].pos.0 >= w.player.pos.0;
            let action = if run.misses < misses {
                if aligned {
                    // Strafe away from the monster, or towards the roomier side when level.
                    let right = if (w.monsters[0].pos.0 - w.player.pos.0).abs() < 1e-9 { w.player.pos.0 < 5.5 } else { !monster_right };
                    press(env, &[if right { Button::MoveRight } else { Button::MoveLeft }])
                } else {
                    press(env, &[Button::Attack])
                }
            } else if aligned {
                press(env, &[Button::Attack])
            } else {
                press(env, &[if monster_right { Button::MoveRight } else { Button::MoveLeft }])
            };
            run.total += env.make_action(action, Some(0)).unwrap();
            for e in env.last_events() {
                match e.tag {
                    EventTag::ShotMissed => run.misses += 1,
                    EventTag::MonsterKilled => run.kill_tick = Some(e.tick),
                    _ => {}
                }
            }
        }
        run
    }

    /// Reported score of an idle episode.
    pub fn idle_score(env: &Environment, seed: u64) -> f64 {
        env.new_episode(Some(seed));
        let none = ButtonSet::none(env.button_count());
        while !env.is_episode_finished() {
            env.make_action(none, None).unwrap();
        }
        env.get_total_score()
    }
}

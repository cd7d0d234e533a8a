//! Acceptance criteria 1-10. Each test prints one `ACCEPTANCE <n> PASS|FAIL`
//! line. Criteria run one at a time so throughput and timing measurements
//! do not compete with each other for cores.

#[path = "../../core/tests/oracles/mod.rs"]
mod oracles;

use std::io::Write;
use std::path::PathBuf;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use raydoom::deepq::{LayerKind, NetSpec, Profile, Shape, LEAKY_SLOPE};
use raydoom::engine::{hitscan, Actor, ActorKind, EngineParams, HitResult, WorldState};
use raydoom::env::GameState;
use raydoom::render::cast_wall_ray;
use raydoom::scenario::bundled::{BASIC_CFG, HEALTH_GATHERING_CFG};
use raydoom_cli::{
    bench_cmd, eval_cmd, replay_cmd, skipgrid_cmd, train_cmd, BenchOptions, DepthMode, EnvArgs, EvalOptions,
    GridOptions, TrainOptions,
};

use oracles::scripts::{env, idle_score, kill_with_misses, scripted_episode};

static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

/// Written to the raw stderr handle so the line survives libtest capture.
fn verdict(n: u32, name: &str, pass: bool, detail: String) {
    let line = format!("ACCEPTANCE {n:>2} {} {name}: {detail}\n", if pass { "PASS" } else { "FAIL" });
    std::io::stderr().write_all(line.as_bytes()).unwrap();
    assert!(pass, "criterion {n} ({name}) failed: {detail}");
}

fn desk_basic() -> EnvArgs {
    EnvArgs { config: None, scenario: Some("basic".into()), profile: Profile::Desk }
}

// 1 -------------------------------------------------------------------------

const DETERMINISM_EPISODES: u64 = 100;
const DETERMINISM_BUDGET: Duration = Duration::from_secs(120);

#[test]
fn criterion_01_determinism() {
    let _g = serial();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xD37);
    let (basic, health) = (env(BASIC_CFG), env(HEALTH_GATHERING_CFG));
    let mut diverged = Vec::new();
    let mut tics = 0usize;
    for i in 0..DETERMINISM_EPISODES {
        let e = if i % 2 == 0 { &basic } else { &health };
        let (seed, script) = (rng.gen(), rng.gen());
        let a = scripted_episode(e, seed, script);
        let b = scripted_episode(e, seed, script);
        tics += a.0.len();
        if a != b {
            diverged.push(i);
        }
    }
    let secs = start.elapsed();
    verdict(
        1,
        "determinism",
        diverged.is_empty() && secs < DETERMINISM_BUDGET,
        format!("{DETERMINISM_EPISODES} episodes x2, {tics} tic hashes each run, diverged {diverged:?}, {secs:.1?}"),
    );
}

// 2 -------------------------------------------------------------------------

const RENDER_CASES: usize = 1000;
const MARCH_STEP: f64 = 1e-4;
const DISTANCE_TOL: f64 = 1e-3;
const RENDER_BUDGET: Duration = Duration::from_secs(60);

#[test]
fn criterion_02_renderer_oracle() {
    let _g = serial();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x2A7);
    let (mut worst, mut class_mismatch, mut cases) = (0.0f64, 0usize, 0usize);
    while cases < RENDER_CASES {
        let (w, h, density) = (rng.gen_range(4..16), rng.gen_range(4..16), rng.gen_range(0.0..0.3));
        let map = oracles::random_map(&mut rng, w, h, density);
        let Some(origin) = oracles::random_floor_point(&mut rng, &map, 0.05) else { continue };
        let player = Actor::new(ActorKind::Player, origin, 0.0, 0.25, 100);
        let mut world = WorldState::new(map, EngineParams::default(), vec![], player, ChaCha8Rng::seed_from_u64(0));
        for _ in 0..rng.gen_range(0..4) {
            let r = rng.gen_range(0.1..0.45);
            if let Some(p) = oracles::random_floor_point(&mut rng, &world.map, r) {
                if ((p.0 - origin.0).powi(2) + (p.1 - origin.1).powi(2)).sqrt() > r + 0.01 {
                    world.monsters.push(Actor::new(ActorKind::Monster, p, 0.0, r, 1));
                }
            }
        }
        let camera = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        let ray = camera + rng.gen_range(-0.78..0.78);
        let dda = cast_wall_ray(&world.map, origin, ray, camera).perp_distance;
        let march = oracles::march_wall(&world.map, origin, ray, MARCH_STEP) * (ray - camera).cos();
        worst = worst.max((dda - march).abs());
        let (expected, _) = oracles::march_hitscan(&world, origin, ray, MARCH_STEP);
        let got = match hitscan(&world, origin, ray) {
            HitResult::Monster { id, .. } => Some(id),
            HitResult::Wall { .. } => None,
        };
        class_mismatch += (got != expected) as usize;
        cases += 1;
    }
    let secs = start.elapsed();
    verdict(
        2,
        "renderer oracle",
        worst < DISTANCE_TOL && class_mismatch == 0 && secs < RENDER_BUDGET,
        format!("{cases} cases, max |dda - march| {worst:.2e} (tol {DISTANCE_TOL}), hitscan mismatches {class_mismatch}, {secs:.1?}"),
    );
}

// 3 -------------------------------------------------------------------------

#[test]
fn criterion_03_reward_closed_forms() {
    let _g = serial();
    let basic = env(BASIC_CFG);
    let mut bad = Vec::new();
    let mut checked = 0;
    for seed in 0..10u64 {
        for misses in 0..4u32 {
            let run = kill_with_misses(&basic, seed, misses);
            let ok = run.misses == misses
                && run.kill_tick.is_some_and(|k| run.total == 101.0 - k as f64 - 5.0 * misses as f64);
            checked += 1;
            if !ok {
                bad.push(format!("seed {seed} m {misses}: {run:?}"));
            }
        }
    }
    let health = env(HEALTH_GATHERING_CFG);
    let idle: Vec<f64> = (0..5).map(|s| idle_score(&health, s)).collect();
    let idle_ok = idle.iter().all(|&s| s == 284.0);
    verdict(
        3,
        "reward closed forms",
        bad.is_empty() && idle_ok,
        format!("{checked} kill-at-k-with-m-misses runs equal 101-k-5m (bad: {bad:?}); idle scores {idle:?} (expect 284)"),
    );
}

// 4 -------------------------------------------------------------------------

const GRAD_TOL: f64 = 1e-6;
const GRAD_BUDGET: Duration = Duration::from_secs(60);

#[test]
fn criterion_04_gradient_checks() {
    let _g = serial();
    let start = Instant::now();
    let image = |c, h, w| Shape::Image { c, h, w };
    let out = LayerKind::LinearOut { actions: 3 };
    let cases: Vec<(&str, NetSpec)> = vec![
        ("conv", NetSpec { input: image(2, 6, 7), aux: 0, layers: vec![LayerKind::Conv { out_channels: 3, kernel: 3 }, out] }),
        ("maxpool", NetSpec { input: image(2, 5, 7), aux: 0, layers: vec![LayerKind::MaxPool2, out] }),
        ("dense", NetSpec { input: Shape::Flat(7), aux: 0, layers: vec![LayerKind::Dense { units: 6 }, out] }),
        (
            "relu",
            NetSpec { input: Shape::Flat(7), aux: 0, layers: vec![LayerKind::Dense { units: 6 }, LayerKind::Relu, out] },
        ),
        (
            "leaky-relu",
            NetSpec {
                input: Shape::Flat(7),
                aux: 0,
                layers: vec![LayerKind::Dense { units: 6 }, LayerKind::LeakyRelu { slope: LEAKY_SLOPE }, out],
            },
        ),
        (
            "aux-concat",
            NetSpec {
                input: image(1, 5, 5),
                aux: 2,
                layers: vec![LayerKind::Conv { out_channels: 2, kernel: 2 }, LayerKind::ConcatAux, LayerKind::Dense { units: 4 }, out],
            },
        ),
        ("desk network", NetSpec::desk(1, 14, 14, 2, 8)),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(0x4);
    let mut errors = Vec::new();
    for (name, spec) in cases {
        errors.push((name, oracles::gradient_check(&mut rng, spec, 2)));
    }
    let worst = errors.iter().map(|e| e.1).fold(0.0, f64::max);
    let secs = start.elapsed();
    let detail: Vec<String> = errors.iter().map(|(n, e)| format!("{n} {e:.1e}")).collect();
    verdict(
        4,
        "gradient checks",
        worst < GRAD_TOL && secs < GRAD_BUDGET,
        format!("max relative error {worst:.2e} (tol {GRAD_TOL:e}) [{}], {secs:.1?}", detail.join(", ")),
    );
}

// 5 -------------------------------------------------------------------------

const TABULAR_UPDATES: usize = 50_000;
const TABULAR_TOL: f64 = 1e-2;
const TABULAR_BUDGET: Duration = Duration::from_secs(300);

#[test]
fn criterion_05_tabular_oracle() {
    let _g = serial();
    let start = Instant::now();
    let err = oracles::corridor_error(TABULAR_UPDATES, 0.9, 5);
    let secs = start.elapsed();
    verdict(
        5,
        "tabular Q oracle",
        err < TABULAR_TOL && secs < TABULAR_BUDGET,
        format!("max |Q - Q*| {err:.2e} after {TABULAR_UPDATES} updates (tol {TABULAR_TOL}), {secs:.1?}"),
    );
}

// 6 -------------------------------------------------------------------------

const LEARN_SEED: u64 = 1;
const LEARN_EPISODES: usize = 300;
const LEARN_MIN_MEAN: f64 = 40.0;
const LEARN_MIN_MARGIN: f64 = 50.0;

#[test]
fn criterion_06_desk_basic_learning() {
    let _g = serial();
    let dir = tempfile::tempdir().unwrap();
    let mut log = Vec::new();
    let train = TrainOptions {
        env: desk_basic(),
        seed: LEARN_SEED,
        skip: None,
        steps: None,
        out: dir.path().to_path_buf(),
        test_every: None,
        test_episodes: None,
    };
    let report = train_cmd(&train, &mut log).unwrap();
    let eval = EvalOptions {
        env: desk_basic(),
        checkpoint: report.checkpoint.clone(),
        episodes: LEARN_EPISODES,
        skip: None,
        seed: LEARN_SEED + 1000,
        baseline: true,
        out: None,
        record: None,
    };
    let r = eval_cmd(&eval, &mut log).unwrap();
    let random = r.random.unwrap();
    let pass = r.greedy.mean >= LEARN_MIN_MEAN && r.greedy.mean - random.mean >= LEARN_MIN_MARGIN;
    let curve: Vec<String> = report.outcome.curve.iter().map(|p| format!("{:.0}", p.stats.mean)).collect();
    verdict(
        6,
        "desk-scale basic learning",
        pass,
        format!(
            "{} steps in {:.1} min, greedy mean {:.2} sd {:.2}, random mean {:.2} over {LEARN_EPISODES} episodes \
             (need >= {LEARN_MIN_MEAN} and margin >= {LEARN_MIN_MARGIN}); curve means [{}]",
            report.outcome.optimizer_steps,
            report.outcome.seconds / 60.0,
            r.greedy.mean,
            r.greedy.sd,
            random.mean,
            curve.join(" ")
        ),
    );
}

// 7 -------------------------------------------------------------------------

const TREND_STEPS: u64 = 50_000;
const TREND_SEEDS: [u64; 3] = [1, 2, 3];

#[test]
fn criterion_07_skip_trend() {
    let _g = serial();
    let grid = GridOptions {
        env: desk_basic(),
        skips: vec![0, 4],
        seeds: TREND_SEEDS.to_vec(),
        steps: Some(TREND_STEPS),
        episodes: 100,
        out: None,
    };
    let rows = skipgrid_cmd(&grid, &mut Vec::new()).unwrap();
    let cell = |skip, seed| rows.iter().find(|r| r.skipcount == skip && r.seed == seed).unwrap();
    let mut wins = 0;
    let mut episodes_rise = true;
    let mut detail = Vec::new();
    for seed in TREND_SEEDS {
        let (a, b) = (cell(0, seed), cell(4, seed));
        wins += (b.native.mean >= a.native.mean) as usize;
        episodes_rise &= b.episodes > a.episodes;
        detail.push(format!(
            "seed {seed}: skip0 {:.1} ({} ep) vs skip4 {:.1} ({} ep)",
            a.native.mean, a.episodes, b.native.mean, b.episodes
        ));
    }
    verdict(
        7,
        "skip trend",
        wins >= 2 && episodes_rise,
        format!("skip4 >= skip0 in {wins}/3, episodes rise {episodes_rise}; {}", detail.join("; ")),
    );
}

// 8 -------------------------------------------------------------------------

const MIN_FPS_320: f64 = 7000.0;
const FPS_SLACK: f64 = 0.05;

#[test]
fn criterion_08_throughput() {
    let _g = serial();
    let opts = BenchOptions {
        resolutions: vec![(160, 120), (320, 240), (400, 300), (640, 480)],
        depth: DepthMode::Both,
        seconds: 1.0,
        out: None,
    };
    let rows = bench_cmd(&opts, &mut Vec::new()).unwrap();
    let fps = |w, d| rows.iter().find(|r| r.width == w && r.compute_depth == d).unwrap().fps;
    let base = fps(320, false);
    let depth_ok = opts.resolutions.iter().all(|&(w, _)| fps(w, true) <= fps(w, false) * (1.0 + FPS_SLACK));
    let order_ok = [false, true].iter().all(|&d| {
        opts.resolutions.windows(2).all(|p| fps(p[1].0, d) <= fps(p[0].0, d) * (1.0 + FPS_SLACK))
    });
    let table: Vec<String> =
        rows.iter().map(|r| format!("{}x{}{} {:.0}", r.width, r.height, if r.compute_depth { "+d" } else { "" }, r.fps)).collect();
    verdict(
        8,
        "throughput",
        base >= MIN_FPS_320 && depth_ok && order_ok,
        format!("320x240 no-depth {base:.0} fps (need {MIN_FPS_320}); depth<=no-depth {depth_ok}; non-increasing {order_ok}; [{}]", table.join(", ")),
    );
}

// 9 -------------------------------------------------------------------------

#[test]
fn criterion_09_parser_corpus() {
    let _g = serial();
    let bad = oracles::corpus::corpus_mismatches();
    let n = oracles::corpus::malformed_cases().len();
    verdict(
        9,
        "parser corpus",
        bad.is_empty() && n == 20,
        format!("2 bundled scenarios + {n} malformed fixtures, mismatches: {bad:?}"),
    );
}

// 10 ------------------------------------------------------------------------

fn record_spectated(dir: &std::path::Path) -> PathBuf {
    let e = env(&format!("{BASIC_CFG}\nresolution = 32x24\nmode = SYNC_SPECTATOR\n"));
    let mut i = 0u16;
    e.record_action_provider(Box::new(move |_: &GameState| {
        i = i.wrapping_add(1);
        raydoom::engine::ButtonSet::from_mask(i % 8, 3)
    }))
    .unwrap();
    e.set_recording(true);
    e.new_episode(Some(77));
    while !e.is_episode_finished() {
        e.spectate_step().unwrap();
    }
    let path = dir.join("spectated.rdrc");
    e.take_recording().unwrap().save(&path).unwrap();
    path
}

fn record_scripted(dir: &std::path::Path, cfg: &str, name: &str, seed: u64) -> PathBuf {
    let e = env(cfg);
    e.set_recording(true);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    e.new_episode(Some(seed));
    while !e.is_episode_finished() {
        let n = e.button_count();
        let b = raydoom::engine::ButtonSet::from_mask(rng.gen_range(0..1u16 << n), n).unwrap();
        e.make_action(b, Some(rng.gen_range(0..5))).unwrap();
    }
    let path = dir.join(name);
    e.take_recording().unwrap().save(&path).unwrap();
    path
}

#[test]
fn criterion_10_replay_integrity() {
    let _g = serial();
    let dir = tempfile::tempdir().unwrap();
    let files = [
        record_scripted(dir.path(), &format!("{BASIC_CFG}\nresolution = 32x24\n"), "basic.rdrc", 3),
        record_scripted(dir.path(), &format!("{HEALTH_GATHERING_CFG}\nresolution = 40x15\n"), "health.rdrc", 4),
        record_spectated(dir.path()),
    ];
    let verified = files.iter().filter(|p| replay_cmd(p, &mut Vec::new()).is_ok()).count();
    let bytes = std::fs::read(&files[0]).unwrap();
    let tampered = dir.path().join("tampered.rdrc");
    let mut undetected = Vec::new();
    for i in 0..bytes.len() {
        let mut t = bytes.clone();
        t[i] ^= 0x5A;
        std::fs::write(&tampered, &t).unwrap();
        if replay_cmd(&tampered, &mut Vec::new()).is_ok() {
            undetected.push(i);
        }
    }
    verdict(
        10,
        "replay integrity",
        verified == files.len() && undetected.is_empty(),
        format!(
            "{verified}/{} fresh recordings verified; {} single-byte tampers, undetected at {undetected:?}",
            files.len(),
            bytes.len()
        ),
    );
}

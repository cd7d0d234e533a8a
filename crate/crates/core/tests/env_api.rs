use std::sync::mpsc;
use std::time::{Duration, Instant};

use raydoom::engine::{Button, ButtonSet, EventTag};
use raydoom::env::{EnvError, Environment, GameState};
use raydoom::scenario::{parse_config, EnvConfig, GameVariable, TerminalCause};

fn config(text: &str) -> EnvConfig {
    parse_config(text).unwrap()
}

fn basic(extra: &str) -> Environment {
    Environment::init(config(&format!("scenario = builtin:basic\nresolution = 60x45\n{extra}"))).unwrap()
}

fn press(env: &Environment, buttons: &[Button]) -> ButtonSet {
    let declared = env.scenario().buttons;
    ButtonSet::from_bools(&declared.iter().map(|b| buttons.contains(b)).collect::<Vec<_>>())
}

/// Monster x offset relative to the player, in world units.
fn monster_offset(env: &Environment) -> f64 {
    let w = env.world().unwrap();
    w.monsters[0].pos.0 - w.player.pos.0
}

#[test]
fn init_leaves_no_episode_running() {
    let env = basic("");
    assert!(env.is_episode_finished());
    assert_eq!(env.get_state(), Err(EnvError::EpisodeFinished));
}

#[test]
fn missing_scenario_file_is_a_load_error() {
    let err = Environment::init(config("scenario = /nonexistent/nowhere.scn")).err().unwrap();
    assert!(matches!(err, EnvError::ScenarioLoad(_)));
}

#[test]
fn first_frame_has_rgb_size_of_resolution() {
    let env = basic("");
    let s = env.new_episode(Some(1));
    assert_eq!(s.image_buffer.len(), 60 * 45 * 3);
    assert_eq!(s.number, 1);
    assert_eq!(s.tick, 0);
    assert!(s.depth.is_none());
    assert_eq!(env.get_total_reward(), 0.0);
}

#[test]
fn gray_and_depth_channels() {
    let env = basic("channels = GRAY\ndepth = true");
    let s = env.new_episode(Some(1));
    assert_eq!(s.image_buffer.len(), 60 * 45);
    assert_eq!(s.depth.as_ref().unwrap().len(), 60 * 45);
}

#[test]
fn same_seed_gives_identical_initial_frame() {
    let env = basic("");
    let a = env.new_episode(Some(77));
    let b = env.new_episode(Some(77));
    assert_eq!(a.image_buffer, b.image_buffer);
}

#[test]
fn basic_spawns_player_center_and_one_monster_on_far_wall() {
    let env = basic("");
    for seed in 0..20 {
        env.new_episode(Some(seed));
        let w = env.world().unwrap();
        assert_eq!(w.player.pos, (5.5, 5.5));
        assert_eq!(w.monsters.len(), 1);
        assert_eq!(w.monsters[0].pos.1, 1.5);
    }
}

#[test]
fn health_spawns_twenty_reproducible_items() {
    let env = Environment::init(config("scenario = builtin:health_gathering\nresolution = 40x30")).unwrap();
    env.new_episode(Some(5));
    let a = env.world().unwrap();
    env.new_episode(Some(5));
    let b = env.world().unwrap();
    assert_eq!(a.active_items(), 20);
    let pos = |w: &raydoom::engine::WorldState| w.items.iter().map(|i| (i.pos, i.kind)).collect::<Vec<_>>();
    assert_eq!(pos(&a), pos(&b));
}

#[test]
fn skip_advances_skip_plus_one_tics() {
    let env = basic("");
    env.new_episode(Some(3));
    let r = env.make_action(press(&env, &[]), Some(4)).unwrap();
    assert_eq!(env.tick(), 5);
    assert_eq!(r, -5.0);
    let r = env.make_action(press(&env, &[]), Some(0)).unwrap();
    assert_eq!(r, -1.0);
    assert_eq!(env.tick(), 6);
}

#[test]
fn default_skipcount_comes_from_config() {
    let env = basic("skipcount = 3");
    env.new_episode(Some(3));
    env.make_action(press(&env, &[]), None).unwrap();
    assert_eq!(env.tick(), 4);
}

#[test]
fn kill_stops_frame_skip_early() {
    let env = basic("");
    // Find a seed that puts the monster straight ahead.
    let seed = (0..200)
        .find(|&s| {
            env.new_episode(Some(s));
            monster_offset(&env).abs() < 1e-9
        })
        .unwrap();
    env.new_episode(Some(seed));
    let r = env.make_action(press(&env, &[Button::Attack]), Some(9)).unwrap();
    assert_eq!(env.tick(), 1);
    assert!(env.is_episode_finished());
    assert_eq!(env.terminal_cause(), TerminalCause::MonsterKilled);
    assert_eq!(r, 100.0);
    let tags: Vec<_> = env.last_events().iter().map(|e| e.tag).collect();
    assert_eq!(tags, vec![EventTag::ShotFired, EventTag::MonsterKilled]);
    assert_eq!(env.make_action(press(&env, &[]), None), Err(EnvError::EpisodeFinished));
}

#[test]
fn timeout_ends_basic_at_300() {
    let env = basic("");
    env.new_episode(Some(9));
    let mut total = 0.0;
    while !env.is_episode_finished() {
        total += env.make_action(press(&env, &[]), Some(7)).unwrap();
    }
    assert_eq!(env.tick(), 300);
    assert_eq!(env.terminal_cause(), TerminalCause::Timeout);
    assert_eq!(total, -300.0);
    assert_eq!(env.get_total_reward(), total);
    assert_eq!(env.get_total_score(), total);
}

#[test]
fn per_action_living_reward_charges_once_per_decision() {
    let env = basic("living_reward_per = action");
    env.new_episode(Some(3));
    assert_eq!(env.make_action(press(&env, &[]), Some(4)).unwrap(), -1.0);
}

#[test]
fn get_state_is_idempotent_and_tracks_health() {
    let env = Environment::init(config("scenario = builtin:health_gathering\nresolution = 40x30")).unwrap();
    env.new_episode(Some(2));
    let a = env.get_state().unwrap();
    let b = env.get_state().unwrap();
    assert_eq!(a, b);
    assert_eq!(a.variable(GameVariable::Health), Some(100.0));
    let none = ButtonSet::none(4);
    env.make_action(none, Some(11)).unwrap();
    let s = env.get_state().unwrap();
    assert_eq!(s.tick, 12);
    assert_eq!(s.variable(GameVariable::Health), Some(94.0));
    assert_eq!(s.number, 2);
}

#[test]
fn idle_health_gathering_scores_284() {
    let env = Environment::init(config("scenario = builtin:health_gathering\nresolution = 40x30")).unwrap();
    for seed in [1, 2, 3] {
        env.new_episode(Some(seed));
        while !env.is_episode_finished() {
            env.make_action(ButtonSet::none(4), Some(10)).unwrap();
        }
        assert_eq!(env.tick(), 284);
        assert_eq!(env.terminal_cause(), TerminalCause::PlayerDied);
        assert_eq!(env.get_total_score(), 284.0);
    }
}

#[test]
fn wrong_button_count_is_rejected() {
    let env = basic("");
    env.new_episode(Some(1));
    assert_eq!(
        env.make_action(ButtonSet::none(4), None),
        Err(EnvError::ButtonCount { expected: 3, got: 4 })
    );
}

#[test]
fn provider_in_player_mode_is_a_mode_mismatch() {
    let env = basic("");
    let provider = |_: &GameState| Some(ButtonSet::none(3));
    assert!(matches!(env.record_action_provider(Box::new(provider)), Err(EnvError::ModeMismatch { .. })));
    assert!(matches!(env.spectate_step(), Err(EnvError::ModeMismatch { .. })));
}

#[test]
fn make_action_in_spectator_mode_is_a_mode_mismatch() {
    let env = basic("mode = SYNC_SPECTATOR");
    env.new_episode(Some(1));
    assert!(matches!(env.make_action(ButtonSet::none(3), None), Err(EnvError::ModeMismatch { .. })));
}

#[test]
fn sync_spectator_passes_provider_action_through() {
    let env = basic("mode = SYNC_SPECTATOR");
    let attack = press(&env, &[Button::Attack]);
    env.record_action_provider(Box::new(move |_: &GameState| Some(attack))).unwrap();
    env.new_episode(Some(4));
    let aligned = monster_offset(&env).abs() < 0.4;
    let obs = env.spectate_step().unwrap();
    assert_eq!(obs.action, attack);
    assert_eq!(obs.state.tick, 0);
    assert_eq!(obs.reward, if aligned { 100.0 } else { -6.0 });
}

#[test]
fn sync_spectator_waits_for_a_blocking_provider() {
    let env = std::sync::Arc::new(basic("mode = SYNC_SPECTATOR"));
    let (tx, rx) = mpsc::channel::<ButtonSet>();
    let rx = std::sync::Mutex::new(rx);
    env.record_action_provider(Box::new(move |_: &GameState| rx.lock().unwrap().recv().ok())).unwrap();
    env.new_episode(Some(4));
    let worker = {
        let env = env.clone();
        std::thread::spawn(move || env.spectate_step())
    };
    std::thread::sleep(Duration::from_millis(200));
    assert_eq!(env.tick(), 0);
    tx.send(ButtonSet::none(3)).unwrap();
    let obs = worker.join().unwrap().unwrap();
    assert_eq!(obs.reward, -1.0);
    assert_eq!(env.tick(), 1);
    drop(tx);
    assert_eq!(env.spectate_step(), Err(EnvError::ProviderClosed));
}

#[test]
fn async_player_runs_on_the_clock() {
    let env = basic("mode = ASYNC_PLAYER");
    env.new_episode(Some(1));
    let start = Instant::now();
    std::thread::sleep(Duration::from_millis(1000));
    let ticks = env.tick();
    let elapsed = start.elapsed().as_secs_f64();
    let expected = elapsed * 35.0;
    assert!((ticks as f64 - expected).abs() <= 2.0, "{ticks} tics in {elapsed}s");
}

#[test]
fn async_player_blocks_until_tics_elapse() {
    let env = basic("mode = ASYNC_PLAYER");
    env.new_episode(Some(1));
    let t0 = env.tick();
    let start = Instant::now();
    let r = env.make_action(press(&env, &[]), Some(6)).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    assert!(env.tick() >= t0 + 7);
    assert!(elapsed > 5.0 / 35.0, "returned after {elapsed}s");
    assert!(r <= -7.0);
}

#[test]
fn async_spectator_latches_provider_input() {
    let env = basic("mode = ASYNC_SPECTATOR");
    let right = press(&env, &[Button::MoveRight]);
    env.record_action_provider(Box::new(move |_: &GameState| Some(right))).unwrap();
    env.new_episode(Some(1));
    let x0 = env.world().unwrap().player.pos.0;
    let obs = env.spectate_step().unwrap();
    assert_eq!(obs.action, right);
    std::thread::sleep(Duration::from_millis(300));
    assert!(env.world().unwrap().player.pos.0 > x0);
}

#[test]
fn async_drop_stops_the_clock() {
    let env = basic("mode = ASYNC_PLAYER");
    env.new_episode(Some(1));
    drop(env);
}

//! Parser corpus: hand-written expectations for the bundled scenarios and
//! the malformed fixtures under `tests/fixtures/malformed`.

use raydoom::engine::{AcidSchedule, Button, CellKind, GridMap, ItemRules, Surface};
use raydoom::scenario::{AngleRule, GameVariable, Mechanics, PlayerSpawn, Reward, RewardRules, ScenarioDef, ScenarioError};

pub const FIXTURE_DIR: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/tests/fixtures/malformed");

fn grid(rows: &[&str]) -> GridMap {
    let cells = rows
        .iter()
        .flat_map(|r| r.chars())
        .map(|ch| match ch {
            '#' => CellKind::Wall(0),
            '~' => CellKind::Floor(Surface::Acid),
            _ => CellKind::Floor(Surface::Normal),
        })
        .collect();
    GridMap::new(rows[0].len(), rows.len(), cells).unwrap()
}

fn stock_mechanics(initial_ammo: u32, items: Option<ItemRules>) -> Mechanics {
    Mechanics {
        move_speed: 0.10,
        turn_speed_deg: 3.0,
        initial_ammo,
        attack_cooldown: 8,
        medikit_heal: 25,
        vial_damage: 30,
        acid: AcidSchedule { damage: 6, period: 17, first_tick: 12 },
        items,
    }
}

pub fn expected_basic() -> ScenarioDef {
    let rows = ["###########", "#MMMMMMMMM#", "#.........#", "#.........#", "#.........#", "#....P....#", "###########"];
    ScenarioDef {
        name: "basic".into(),
        map_rows: rows.iter().map(|r| r.to_string()).collect(),
        map: grid(&rows),
        player_spawn: PlayerSpawn::Fixed { cell: (5, 5) },
        player_angle: AngleRule::Degrees(270.0),
        monster_cells: (1..=9).map(|x| (x, 1)).collect(),
        monsters: 1,
        buttons: vec![Button::MoveLeft, Button::MoveRight, Button::Attack],
        variables: vec![GameVariable::Health, GameVariable::Ammo, GameVariable::Tick],
        timeout: 300,
        rewards: RewardRules { living: Reward::new(-1.0), kill: Reward::new(101.0), miss: Reward::new(-5.0), ..Default::default() },
        end_on_kill: true,
        uses_acid: false,
        mechanics: stock_mechanics(50, None),
    }
}

pub fn expected_health_gathering() -> ScenarioDef {
    let rows = [
        "###############",
        "#~~~~~~~~~~~~~#",
        "#~###~~~~~###~#",
        "#~#~~~~~~~~~#~#",
        "#~#~~~###~~~#~#",
        "#~~~~~~~~~~~~~#",
        "#~~~#~~~~~#~~~#",
        "#~~~#~~#~~#~~~#",
        "#~~~#~~~~~#~~~#",
        "#~~~~~~~~~~~~~#",
        "#~#~~~###~~~#~#",
        "#~#~~~~~~~~~#~#",
        "#~###~~~~~###~#",
        "#~~~~~~~~~~~~~#",
        "###############",
    ];
    ScenarioDef {
        name: "health_gathering".into(),
        map_rows: rows.iter().map(|r| r.to_string()).collect(),
        map: grid(&rows),
        player_spawn: PlayerSpawn::RandomFreeCell,
        player_angle: AngleRule::Random,
        monster_cells: vec![],
        monsters: 0,
        buttons: vec![Button::MoveForward, Button::MoveBackward, Button::TurnLeft, Button::TurnRight],
        variables: vec![GameVariable::Health, GameVariable::Tick],
        timeout: 2100,
        rewards: RewardRules {
            living: Reward::new(1.0),
            death: Reward::shaping(-100.0),
            medikit: Reward::shaping(100.0),
            vial: Reward::shaping(-100.0),
            ..Default::default()
        },
        end_on_kill: false,
        uses_acid: true,
        mechanics: stock_mechanics(0, Some(ItemRules { initial: 20, period: 35, cap: 40, medikit_probability: 0.5 })),
    }
}

fn invalid(line: usize, key: &str, reason: &str) -> ScenarioError {
    ScenarioError::InvalidValue { line, key: key.into(), reason: reason.into() }
}

/// `(fixture file stem, expected error)` for every malformed fixture.
pub fn malformed_cases() -> Vec<(&'static str, ScenarioError)> {
    use ScenarioError::*;
    vec![
        ("01_missing_map", MissingSection("map")),
        ("02_missing_rules", MissingSection("rules")),
        ("03_duplicate_section", DuplicateSection { line: 9, name: "map".into() }),
        ("04_unknown_section", Syntax { line: 9, reason: "unknown section [extras]".into() }),
        ("05_content_outside_section", Syntax { line: 1, reason: "content outside of a section".into() }),
        ("06_ragged_map", NonRectangularMap { line: 7 }),
        ("07_open_border", UnenclosedMap { x: 2, y: 1 }),
        ("08_map_too_small", MapTooSmall),
        ("09_unknown_cell", UnknownCell { line: 7, ch: 'X' }),
        ("10_no_player_cell", NoPlayerSpawn),
        ("11_two_player_cells", MultiplePlayerSpawns),
        ("12_not_enough_monster_cells", NotEnoughMonsterCells { monsters: 2, cells: 1 }),
        ("13_unknown_key", UnknownKey { line: 5, key: "gravity".into() }),
        ("14_duplicate_key", DuplicateKey { line: 5, key: "timeout".into() }),
        ("15_bad_number", invalid(4, "timeout", "expected a tic count, got `soon`")),
        ("16_no_buttons", NoButtons),
        ("17_duplicate_button", invalid(3, "buttons", "duplicate button ATTACK")),
        ("18_zero_timeout", MissingTimeout),
        ("19_unknown_button", invalid(3, "buttons", "unknown button `JUMP`")),
        ("20_item_rules_without_items", invalid(5, "item_cap", "item rules require `items = true`")),
    ]
}

/// Parses every fixture and reports mismatches as readable lines.
pub fn corpus_mismatches() -> Vec<String> {
    let mut out = Vec::new();
    for (stem, expected) in malformed_cases() {
        let path = format!("{FIXTURE_DIR}/{stem}.scn");
        let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
        match raydoom::scenario::parse_scenario(&text) {
            Ok(_) => out.push(format!("{stem}: parsed, expected {expected:?}")),
            Err(e) if e == expected => {}
            Err(e) => out.push(format!("{stem}: got {e:?}, expected {expected:?}")),
        }
    }
    let bundled = [
        ("basic", raydoom::scenario::bundled::BASIC_SCN, expected_basic()),
        ("health_gathering", raydoom::scenario::bundled::HEALTH_GATHERING_SCN, expected_health_gathering()),
    ];
    for (name, text, expected) in bundled {
        match raydoom::scenario::parse_scenario(text) {
            Ok(def) if def == expected => {}
            Ok(def) => out.push(format!("{name}: got {def:?}, expected {expected:?}")),
            Err(e) => out.push(format!("{name}: {e}")),
        }
    }
    out
}

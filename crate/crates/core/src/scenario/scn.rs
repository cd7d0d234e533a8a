use std::collections::HashSet;
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::engine::{
    AcidSchedule, Actor, ActorKind, Button, CellKind, EngineParams, GridMap, ItemRules, MapError, Surface,
    WorldState, MAX_BUTTONS,
};

use super::config::{parse_bool, split_entry};
use super::rewards::{Reward, RewardRules};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GameVariable {
    Health,
    Ammo,
    Tick,
}

impl GameVariable {
    pub fn name(self) -> &'static str {
        match self {
            GameVariable::Health => "HEALTH",
            GameVariable::Ammo => "AMMO",
            GameVariable::Tick => "TICK",
        }
    }

    pub fn read(self, world: &WorldState) -> f64 {
        match self {
            GameVariable::Health => world.player.health as f64,
            GameVariable::Ammo => world.player.ammo as f64,
            GameVariable::Tick => world.tick as f64,
        }
    }
}

impl fmt::Display for GameVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GameVariable {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s.trim().to_ascii_uppercase().as_str() {
            "HEALTH" => Ok(GameVariable::Health),
            "AMMO" => Ok(GameVariable::Ammo),
            "TICK" => Ok(GameVariable::Tick),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlayerSpawn {
    /// Center of the `P` cell.
    Fixed { cell: (usize, usize) },
    /// Uniformly random floor cell.
    RandomFreeCell,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AngleRule {
    Degrees(f64),
    /// Uniform in `[0, 2pi)`.
    Random,
}

/// Scenario-level overrides of the engine mechanics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mechanics {
    pub move_speed: f64,
    pub turn_speed_deg: f64,
    pub initial_ammo: u32,
    pub attack_cooldown: u32,
    pub medikit_heal: i32,
    pub vial_damage: i32,
    pub acid: AcidSchedule,
    pub items: Option<ItemRules>,
}

impl Default for Mechanics {
    fn default() -> Self {
        let p = EngineParams::default();
        Mechanics {
            move_speed: p.move_speed,
            turn_speed_deg: 3.0,
            initial_ammo: p.initial_ammo,
            attack_cooldown: p.attack_cooldown,
            medikit_heal: p.medikit_heal,
            vial_damage: p.vial_damage,
            acid: AcidSchedule::default(),
            items: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioDef {
    pub name: String,
    pub map_rows: Vec<String>,
    pub map: GridMap,
    pub player_spawn: PlayerSpawn,
    pub player_angle: AngleRule,
    /// Cells marked `M`, row-major.
    pub monster_cells: Vec<(usize, usize)>,
    pub monsters: u32,
    pub buttons: Vec<Button>,
    pub variables: Vec<GameVariable>,
    pub timeout: u32,
    pub rewards: RewardRules,
    pub end_on_kill: bool,
    pub uses_acid: bool,
    pub mechanics: Mechanics,
}

#[derive(Debug, Error, PartialEq)]
pub enum ScenarioError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("missing [{0}] section")]
    MissingSection(&'static str),
    #[error("line {line}: duplicate [{name}] section")]
    DuplicateSection { line: usize, name: String },
    #[error("line {line}: map row length differs from the first row")]
    NonRectangularMap { line: usize },
    #[error("map border is open at cell ({x}, {y})")]
    UnenclosedMap { x: usize, y: usize },
    #[error("map must be at least 3x3")]
    MapTooSmall,
    #[error("line {line}: unknown map cell `{ch}`")]
    UnknownCell { line: usize, ch: char },
    #[error("fixed player spawn requires a `P` cell")]
    NoPlayerSpawn,
    #[error("more than one `P` cell")]
    MultiplePlayerSpawns,
    #[error("{monsters} monsters requested but only {cells} `M` cells")]
    NotEnoughMonsterCells { monsters: u32, cells: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: invalid value for `{key}`: {reason}")]
    InvalidValue { line: usize, key: String, reason: String },
    #[error("no buttons declared")]
    NoButtons,
    #[error("{0} buttons declared, at most {MAX_BUTTONS} allowed")]
    TooManyButtons(usize),
    #[error("timeout must be a positive number of tics")]
    MissingTimeout,
}

const RULE_KEYS: [&str; 29] = [
    "name",
    "buttons",
    "variables",
    "timeout",
    "player_spawn",
    "player_angle",
    "monsters",
    "end_on_kill",
    "initial_ammo",
    "living_reward",
    "kill_reward",
    "miss_penalty",
    "death_penalty",
    "medikit_reward",
    "vial_reward",
    "shaping",
    "items",
    "item_initial",
    "item_period",
    "item_cap",
    "medikit_probability",
    "medikit_heal",
    "vial_damage",
    "acid_damage",
    "acid_period",
    "acid_first_tick",
    "move_speed",
    "turn_speed",
    "attack_cooldown",
];

fn reward_key(name: &str) -> &'static str {
    match name {
        "living" => "living_reward",
        "kill" => "kill_reward",
        "miss" => "miss_penalty",
        "death" => "death_penalty",
        "medikit" => "medikit_reward",
        _ => "vial_reward",
    }
}

#[derive(PartialEq)]
enum Section {
    None,
    Map,
    Rules,
}

struct Rules {
    entries: Vec<(usize, String, String)>,
}

impl Rules {
    fn get(&self, key: &str) -> Option<(usize, &str)> {
        self.entries.iter().find(|(_, k, _)| k == key).map(|(l, _, v)| (*l, v.as_str()))
    }

    fn parse<T: FromStr>(&self, key: &str, what: &str) -> Result<Option<T>, ScenarioError> {
        match self.get(key) {
            None => Ok(None),
            Some((line, v)) => v.parse::<T>().map(Some).map_err(|_| ScenarioError::InvalidValue {
                line,
                key: key.to_string(),
                reason: format!("expected {what}, got `{v}`"),
            }),
        }
    }

    fn invalid(&self, key: &str, reason: impl Into<String>) -> ScenarioError {
        let line = self.get(key).map_or(0, |(l, _)| l);
        ScenarioError::InvalidValue { line, key: key.to_string(), reason: reason.into() }
    }
}

impl ScenarioDef {
    pub fn parse(text: &str) -> Result<ScenarioDef, ScenarioError> {
        let mut section = Section::None;
        let mut seen_map = false;
        let mut seen_rules = false;
        let mut rows: Vec<(usize, String)> = Vec::new();
        let mut rules = Rules { entries: Vec::new() };

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.starts_with('[') && trimmed.ends_with(']') {
                let name = trimmed[1..trimmed.len() - 1].trim().to_ascii_lowercase();
                let seen = match name.as_str() {
                    "map" => {
                        section = Section::Map;
                        &mut seen_map
                    }
                    "rules" => {
                        section = Section::Rules;
                        &mut seen_rules
                    }
                    _ => return Err(ScenarioError::Syntax { line, reason: format!("unknown section [{name}]") }),
                };
                if *seen {
                    return Err(ScenarioError::DuplicateSection { line, name });
                }
                *seen = true;
                continue;
            }
            match section {
                Section::Map => {
                    if !trimmed.is_empty() {
                        rows.push((line, trimmed.to_string()));
                    }
                }
                Section::Rules => {
                    let entry = split_entry(raw, line).map_err(|(line, reason)| ScenarioError::Syntax { line, reason })?;
                    let Some((key, value)) = entry else { continue };
                    if !RULE_KEYS.contains(&key.as_str()) {
                        return Err(ScenarioError::UnknownKey { line, key });
                    }
                    if rules.get(&key).is_some() {
                        return Err(ScenarioError::DuplicateKey { line, key });
                    }
                    rules.entries.push((line, key, value));
                }
                Section::None => {
                    let content = raw.split('#').next().unwrap_or("").trim();
                    if !content.is_empty() {
                        return Err(ScenarioError::Syntax { line, reason: "content outside of a section".into() });
                    }
                }
            }
        }
        if !seen_map {
            return Err(ScenarioError::MissingSection("map"));
        }
        if !seen_rules {
            return Err(ScenarioError::MissingSection("rules"));
        }
        Self::build(rows, &rules)
    }

    fn build(rows: Vec<(usize, String)>, rules: &Rules) -> Result<ScenarioDef, ScenarioError> {
        // Map grid.
        let width = rows.first().map_or(0, |(_, r)| r.chars().count());
        let height = rows.len();
        let mut cells = Vec::with_capacity(width * height);
        let mut player_cells = Vec::new();
        let mut monster_cells = Vec::new();
        let mut uses_acid = false;
        for (y, (line, row)) in rows.iter().enumerate() {
            if row.chars().count() != width {
                return Err(ScenarioError::NonRectangularMap { line: *line });
            }
            for (x, ch) in row.chars().enumerate() {
                cells.push(match ch {
                    '#' => CellKind::Wall(0),
                    '1'..='9' => CellKind::Wall(ch as u8 - b'0'),
                    '.' => CellKind::Floor(Surface::Normal),
                    '~' => {
                        uses_acid = true;
                        CellKind::Floor(Surface::Acid)
                    }
                    'P' => {
                        player_cells.push((x, y));
                        CellKind::Floor(Surface::Normal)
                    }
                    'M' => {
                        monster_cells.push((x, y));
                        CellKind::Floor(Surface::Normal)
                    }
                    _ => return Err(ScenarioError::UnknownCell { line: *line, ch }),
                });
            }
        }
        let map = GridMap::new(width, height, cells).map_err(|e| match e {
            MapError::TooSmall { .. } | MapError::CellCount { .. } => ScenarioError::MapTooSmall,
            MapError::Unenclosed { x, y } => ScenarioError::UnenclosedMap { x, y },
        })?;
        if player_cells.len() > 1 {
            return Err(ScenarioError::MultiplePlayerSpawns);
        }

        let name = rules.get("name").map_or("unnamed", |(_, v)| v).to_string();

        let buttons = match rules.get("buttons") {
            None => return Err(ScenarioError::NoButtons),
            Some((line, v)) => {
                let mut out = Vec::new();
                for part in v.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                    let b: Button = part.parse().map_err(|_| ScenarioError::InvalidValue {
                        line,
                        key: "buttons".into(),
                        reason: format!("unknown button `{part}`"),
                    })?;
                    if out.contains(&b) {
                        return Err(rules.invalid("buttons", format!("duplicate button {b}")));
                    }
                    out.push(b);
                }
                out
            }
        };
        if buttons.is_empty() {
            return Err(ScenarioError::NoButtons);
        }
        if buttons.len() > MAX_BUTTONS {
            return Err(ScenarioError::TooManyButtons(buttons.len()));
        }

        let variables = match rules.get("variables") {
            None => vec![GameVariable::Health, GameVariable::Ammo, GameVariable::Tick],
            Some((_, v)) => {
                let mut out = Vec::new();
                for part in v.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                    let gv: GameVariable =
                        part.parse().map_err(|_| rules.invalid("variables", format!("unknown variable `{part}`")))?;
                    if out.contains(&gv) {
                        return Err(rules.invalid("variables", format!("duplicate variable {gv}")));
                    }
                    out.push(gv);
                }
                out
            }
        };

        let timeout = match rules.parse::<u32>("timeout", "a tic count")? {
            None | Some(0) => return Err(ScenarioError::MissingTimeout),
            Some(t) => t,
        };

        let player_spawn = match rules.get("player_spawn").map(|(_, v)| v.to_ascii_lowercase()) {
            None => PlayerSpawn::Fixed { cell: player_cells.first().copied().ok_or(ScenarioError::NoPlayerSpawn)? },
            Some(v) if v == "fixed" => {
                PlayerSpawn::Fixed { cell: player_cells.first().copied().ok_or(ScenarioError::NoPlayerSpawn)? }
            }
            Some(v) if v == "random" => PlayerSpawn::RandomFreeCell,
            Some(_) => return Err(rules.invalid("player_spawn", "expected `fixed` or `random`")),
        };

        let player_angle = match rules.get("player_angle") {
            None => AngleRule::Degrees(0.0),
            Some((_, v)) if v.eq_ignore_ascii_case("random") => AngleRule::Random,
            Some(_) => AngleRule::Degrees(rules.parse::<f64>("player_angle", "degrees or `random`")?.unwrap()),
        };

        let monsters = rules.parse::<u32>("monsters", "a count")?.unwrap_or(0);
        if monsters as usize > monster_cells.len() {
            return Err(ScenarioError::NotEnoughMonsterCells { monsters, cells: monster_cells.len() });
        }

        let flag = |key: &str| -> Result<Option<bool>, ScenarioError> {
            rules.get(key).map(|(_, v)| parse_bool(v).ok_or_else(|| rules.invalid(key, "expected a boolean"))).transpose()
        };
        let end_on_kill = flag("end_on_kill")?.unwrap_or(monsters > 0);

        let mut rewards = RewardRules::default();
        for name in RewardRules::NAMES {
            if let Some(v) = rules.parse::<f64>(reward_key(name), "a number")? {
                if !v.is_finite() {
                    return Err(rules.invalid(reward_key(name), "must be finite"));
                }
                rewards.get_mut(name).unwrap().value = v;
            }
        }
        if let Some((_, v)) = rules.get("shaping") {
            let mut seen = HashSet::new();
            for part in v.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                let part = part.to_ascii_lowercase();
                let r = rewards
                    .get_mut(&part)
                    .ok_or_else(|| rules.invalid("shaping", format!("unknown reward `{part}`")))?;
                if !seen.insert(part) {
                    return Err(rules.invalid("shaping", "duplicate entry"));
                }
                r.shaping = true;
            }
        }

        let mut mech = Mechanics::default();
        let pos_f64 = |key: &str| -> Result<Option<f64>, ScenarioError> {
            match rules.parse::<f64>(key, "a number")? {
                Some(v) if !(v > 0.0 && v.is_finite()) => Err(rules.invalid(key, "must be positive")),
                other => Ok(other),
            }
        };
        if let Some(v) = pos_f64("move_speed")? {
            if v > 1.0 {
                return Err(rules.invalid("move_speed", "at most one cell per tic"));
            }
            mech.move_speed = v;
        }
        if let Some(v) = pos_f64("turn_speed")? {
            mech.turn_speed_deg = v;
        }
        if let Some(v) = rules.parse::<u32>("initial_ammo", "a count")? {
            mech.initial_ammo = v;
        }
        if let Some(v) = rules.parse::<u32>("attack_cooldown", "a tic count")? {
            mech.attack_cooldown = v;
        }
        if let Some(v) = rules.parse::<u32>("medikit_heal", "hit points")? {
            mech.medikit_heal = v as i32;
        }
        if let Some(v) = rules.parse::<u32>("vial_damage", "hit points")? {
            mech.vial_damage = v as i32;
        }
        if let Some(v) = rules.parse::<u32>("acid_damage", "hit points")? {
            mech.acid.damage = v;
        }
        if let Some(v) = rules.parse::<u32>("acid_period", "a tic count")? {
            if v == 0 {
                return Err(rules.invalid("acid_period", "must be positive"));
            }
            mech.acid.period = v;
        }
        if let Some(v) = rules.parse::<u32>("acid_first_tick", "a tic")? {
            mech.acid.first_tick = v;
        }
        if flag("items")?.unwrap_or(false) {
            let mut ir = ItemRules::default();
            if let Some(v) = rules.parse::<u32>("item_initial", "a count")? {
                ir.initial = v;
            }
            if let Some(v) = rules.parse::<u32>("item_period", "a tic count")? {
                ir.period = v;
            }
            if let Some(v) = rules.parse::<u32>("item_cap", "a count")? {
                ir.cap = v;
            }
            if let Some(v) = rules.parse::<f64>("medikit_probability", "a probability")? {
                if !(0.0..=1.0).contains(&v) {
                    return Err(rules.invalid("medikit_probability", "must lie in [0, 1]"));
                }
                ir.medikit_probability = v;
            }
            mech.items = Some(ir);
        } else {
            for key in ["item_initial", "item_period", "item_cap", "medikit_probability"] {
                if rules.get(key).is_some() {
                    return Err(rules.invalid(key, "item rules require `items = true`"));
                }
            }
        }

        Ok(ScenarioDef {
            name,
            map_rows: rows.into_iter().map(|(_, r)| r).collect(),
            map,
            player_spawn,
            player_angle,
            monster_cells,
            monsters,
            buttons,
            variables,
            timeout,
            rewards,
            end_on_kill,
            uses_acid,
            mechanics: mech,
        })
    }

    pub fn engine_params(&self) -> EngineParams {
        let m = &self.mechanics;
        EngineParams {
            move_speed: m.move_speed,
            turn_speed: m.turn_speed_deg.to_radians(),
            initial_ammo: m.initial_ammo,
            attack_cooldown: m.attack_cooldown,
            medikit_heal: m.medikit_heal,
            vial_damage: m.vial_damage,
            acid: self.uses_acid.then_some(m.acid),
            items: m.items,
            ..EngineParams::default()
        }
    }

    pub fn action_count(&self) -> usize {
        1 << self.buttons.len()
    }

    /// Builds the initial world. Random draws, in order: player cell (random
    /// spawn only), player angle (random angle only), one cell per monster
    /// among the remaining `M` cells, then per initial item a cell and a kind.
    pub fn spawn(&self, seed: u64) -> WorldState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = self.engine_params();
        let cell = match self.player_spawn {
            PlayerSpawn::Fixed { cell } => cell,
            PlayerSpawn::RandomFreeCell => {
                let cells = self.map.floor_cells();
                cells[rng.gen_range(0..cells.len())]
            }
        };
        let angle = match self.player_angle {
            AngleRule::Degrees(d) => d.to_radians(),
            AngleRule::Random => rng.gen::<f64>() * TAU,
        };
        let center = |(x, y): (usize, usize)| (x as f64 + 0.5, y as f64 + 0.5);
        let mut player = Actor::new(ActorKind::Player, center(cell), angle, params.player_radius, params.max_health);
        player.ammo = params.initial_ammo;

        let mut world = WorldState::new(self.map.clone(), params.clone(), self.buttons.clone(), player, rng);
        let mut open = self.monster_cells.clone();
        for _ in 0..self.monsters {
            let c = open.remove(world.rng.gen_range(0..open.len()));
            world.monsters.push(Actor::new(
                ActorKind::Monster,
                center(c),
                0.0,
                params.monster_radius,
                params.monster_health,
            ));
        }
        if let Some(items) = params.items {
            for _ in 0..items.initial.min(items.cap) {
                world.spawn_random_item();
            }
        }
        world
    }

    /// Canonical text form. Parsing the result yields an equal definition.
    pub fn to_scn_string(&self) -> String {
        let mut s = String::from("[rules]\n");
        let mut kv = |k: &str, v: String| s.push_str(&format!("{k} = {v}\n"));
        let join = |items: Vec<String>| items.join(", ");
        kv("name", self.name.clone());
        kv("buttons", join(self.buttons.iter().map(|b| b.to_string()).collect()));
        kv("variables", join(self.variables.iter().map(|v| v.to_string()).collect()));
        kv("timeout", self.timeout.to_string());
        kv(
            "player_spawn",
            match self.player_spawn {
                PlayerSpawn::Fixed { .. } => "fixed".into(),
                PlayerSpawn::RandomFreeCell => "random".into(),
            },
        );
        kv(
            "player_angle",
            match self.player_angle {
                AngleRule::Degrees(d) => format!("{d}"),
                AngleRule::Random => "random".into(),
            },
        );
        kv("monsters", self.monsters.to_string());
        kv("end_on_kill", self.end_on_kill.to_string());
        for name in RewardRules::NAMES {
            kv(reward_key(name), format!("{}", self.rewards.get(name).unwrap().value));
        }
        let shaping: Vec<String> = RewardRules::NAMES
            .iter()
            .filter(|n| self.rewards.get(n).is_some_and(|r: &Reward| r.shaping))
            .map(|n| n.to_string())
            .collect();
        if !shaping.is_empty() {
            kv("shaping", join(shaping));
        }
        let m = &self.mechanics;
        kv("move_speed", format!("{}", m.move_speed));
        kv("turn_speed", format!("{}", m.turn_speed_deg));
        kv("initial_ammo", m.initial_ammo.to_string());
        kv("attack_cooldown", m.attack_cooldown.to_string());
        kv("medikit_heal", m.medikit_heal.to_string());
        kv("vial_damage", m.vial_damage.to_string());
        kv("acid_damage", m.acid.damage.to_string());
        kv("acid_period", m.acid.period.to_string());
        kv("acid_first_tick", m.acid.first_tick.to_string());
        kv("items", m.items.is_some().to_string());
        if let Some(ir) = m.items {
            kv("item_initial", ir.initial.to_string());
            kv("item_period", ir.period.to_string());
            kv("item_cap", ir.cap.to_string());
            kv("medikit_probability", format!("{}", ir.medikit_probability));
        }
        s.push_str("\n[map]\n");
        for row in &self.map_rows {
            s.push_str(row);
            s.push('\n');
        }
        s
    }
}

use std::f64::consts::TAU;
use std::hash::Hasher;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::buttons::{Button, ButtonSet};
use super::collision::move_actor_among;
use super::entity::{Actor, Item, ItemKind};
use super::event::{EventTag, GameEvent};
use super::hitscan::{hitscan, HitResult};
use super::map::{GridMap, Surface};

/// Logical frames per simulated second.
pub const TICRATE: u32 = 35;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcidSchedule {
    pub damage: u32,
    pub period: u32,
    pub first_tick: u32,
}

impl Default for AcidSchedule {
    fn default() -> Self {
        AcidSchedule { damage: 6, period: 17, first_tick: 12 }
    }
}

impl AcidSchedule {
    pub fn applies_at(&self, tick: u32) -> bool {
        tick >= self.first_tick && (tick - self.first_tick) % self.period == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ItemRules {
    pub initial: u32,
    pub period: u32,
    pub cap: u32,
    pub medikit_probability: f64,
}

impl Default for ItemRules {
    fn default() -> Self {
        ItemRules { initial: 20, period: 35, cap: 40, medikit_probability: 0.5 }
    }
}

/// Tunable game mechanics. Defaults are the stock values; scenarios override.
#[derive(Debug, Clone, PartialEq)]
pub struct EngineParams {
    /// Strafe and forward speed, units per tic.
    pub move_speed: f64,
    /// Radians per tic.
    pub turn_speed: f64,
    pub player_radius: f64,
    pub max_health: i32,
    pub initial_ammo: u32,
    pub attack_cooldown: u32,
    pub monster_radius: f64,
    pub monster_health: i32,
    pub item_radius: f64,
    pub medikit_heal: i32,
    pub vial_damage: i32,
    pub acid: Option<AcidSchedule>,
    pub items: Option<ItemRules>,
}

impl Default for EngineParams {
    fn default() -> Self {
        EngineParams {
            move_speed: 0.10,
            turn_speed: 3.0_f64.to_radians(),
            player_radius: 0.25,
            max_health: 100,
            initial_ammo: 50,
            attack_cooldown: 8,
            monster_radius: 0.4,
            monster_health: 1,
            item_radius: 0.2,
            medikit_heal: 25,
            vial_damage: 30,
            acid: None,
            items: None,
        }
    }
}

/// Complete simulation snapshot. Mutated only through [`WorldState::tic`].
#[derive(Debug, Clone, PartialEq)]
pub struct WorldState {
    pub map: GridMap,
    pub params: EngineParams,
    /// Declared button order used to interpret [`ButtonSet`]s.
    pub buttons: Vec<Button>,
    pub player: Actor,
    pub monsters: Vec<Actor>,
    pub items: Vec<Item>,
    pub tick: u32,
    pub rng: ChaCha8Rng,
    /// Events emitted by the most recent tic.
    pub pending_events: Vec<GameEvent>,
}

impl WorldState {
    pub fn new(
        map: GridMap,
        params: EngineParams,
        buttons: Vec<Button>,
        player: Actor,
        rng: ChaCha8Rng,
    ) -> Self {
        WorldState {
            map,
            params,
            buttons,
            player,
            monsters: Vec::new(),
            items: Vec::new(),
            tick: 0,
            rng,
            pending_events: Vec::new(),
        }
    }

    pub fn active_items(&self) -> usize {
        self.items.iter().filter(|i| i.active).count()
    }

    /// Floor cells eligible for a new item: no active item on them and not
    /// the player's own cell. Row-major order.
    pub fn free_item_cells(&self) -> Vec<(usize, usize)> {
        let player_cell = self.map.cell_at(self.player.pos);
        self.map
            .floor_cells()
            .into_iter()
            .filter(|&c| Some(c) != player_cell)
            .filter(|&c| !self.items.iter().any(|i| i.active && self.map.cell_at(i.pos) == Some(c)))
            .collect()
    }

    /// Draws a cell uniformly from [`Self::free_item_cells`], then the item
    /// kind (one `f64` draw against the medikit probability). Returns false
    /// when no cell is free; no random numbers are consumed in that case.
    pub fn spawn_random_item(&mut self) -> bool {
        let Some(rules) = self.params.items else { return false };
        let cells = self.free_item_cells();
        if cells.is_empty() {
            return false;
        }
        let (cx, cy) = cells[self.rng.gen_range(0..cells.len())];
        let medikit = self.rng.gen::<f64>() < rules.medikit_probability;
        let kind = if medikit { ItemKind::Medikit } else { ItemKind::PoisonVial };
        let pos = (cx as f64 + 0.5, cy as f64 + 0.5);
        // Reuse a consumed slot so the vector stays bounded over long episodes.
        let item = Item { kind, pos, radius: self.params.item_radius, active: true };
        match self.items.iter_mut().find(|i| !i.active) {
            Some(slot) => *slot = item,
            None => self.items.push(item),
        }
        true
    }

    /// Advances exactly one tic. Order within a tic: turn, move, cooldown,
    /// attack, acid, item pickups, item spawn, death check.
    pub fn tic(&mut self, buttons: ButtonSet) -> Vec<GameEvent> {
        debug_assert!(self.player.alive, "tic on a dead player");
        self.tick += 1;
        let tick = self.tick;
        let mut events = Vec::new();
        let emit = |events: &mut Vec<GameEvent>, tag| events.push(GameEvent { tag, tick });
        let held = |b| buttons.pressed(&self.buttons, b);
        let axis = |pos: bool, neg: bool| (pos as i32 - neg as i32) as f64;

        let turn = axis(held(Button::TurnRight), held(Button::TurnLeft));
        let forward = axis(held(Button::MoveForward), held(Button::MoveBackward));
        let strafe = axis(held(Button::MoveRight), held(Button::MoveLeft));
        let attack = held(Button::Attack);

        if turn != 0.0 {
            self.player.angle = (self.player.angle + turn * self.params.turn_speed).rem_euclid(TAU);
        }
        if forward != 0.0 || strafe != 0.0 {
            let speed = self.params.move_speed;
            let (dir, right) = (self.player.direction(), self.player.right());
            let dx = forward * dir.0 * speed + strafe * right.0 * speed;
            let dy = forward * dir.1 * speed + strafe * right.1 * speed;
            let obstacles: Vec<_> =
                self.monsters.iter().filter(|m| m.alive).map(|m| (m.pos, m.radius)).collect();
            self.player = move_actor_among(&self.map, &self.player, (dx, dy), &obstacles);
        }

        self.player.attack_cooldown = self.player.attack_cooldown.saturating_sub(1);
        if attack && self.player.attack_cooldown == 0 && self.player.ammo > 0 {
            self.player.ammo -= 1;
            self.player.attack_cooldown = self.params.attack_cooldown;
            emit(&mut events, EventTag::ShotFired);
            match hitscan(self, self.player.pos, self.player.angle) {
                HitResult::Monster { id, .. } => {
                    let m = &mut self.monsters[id];
                    m.health -= 1;
                    if m.health <= 0 {
                        m.alive = false;
                        emit(&mut events, EventTag::MonsterKilled);
                    }
                }
                HitResult::Wall { .. } => emit(&mut events, EventTag::ShotMissed),
            }
        }

        if let Some(acid) = self.params.acid {
            let on_acid = self.map.surface_at(self.player.pos) == Some(Surface::Acid);
            if on_acid && acid.applies_at(tick) {
                self.damage_player(acid.damage as i32);
                emit(&mut events, EventTag::PlayerDamaged(acid.damage));
            }
        }

        for idx in 0..self.items.len() {
            let item = &self.items[idx];
            if !item.active {
                continue;
            }
            let (dx, dy) = (self.player.pos.0 - item.pos.0, self.player.pos.1 - item.pos.1);
            let reach = self.player.radius + item.radius;
            if dx * dx + dy * dy >= reach * reach {
                continue;
            }
            let kind = item.kind;
            self.items[idx].active = false;
            match kind {
                ItemKind::Medikit => {
                    self.player.health = (self.player.health + self.params.medikit_heal).min(self.params.max_health);
                    emit(&mut events, EventTag::MedikitTaken);
                }
                ItemKind::PoisonVial => {
                    let dmg = self.params.vial_damage;
                    self.damage_player(dmg);
                    emit(&mut events, EventTag::VialTaken);
                    emit(&mut events, EventTag::PlayerDamaged(dmg as u32));
                }
            }
        }

        if let Some(rules) = self.params.items {
            if rules.period > 0 && tick % rules.period == 0 && (self.active_items() as u32) < rules.cap {
                self.spawn_random_item();
            }
        }

        if self.player.health <= 0 {
            self.player.alive = false;
            emit(&mut events, EventTag::PlayerDied);
        }

        self.pending_events = events.clone();
        events
    }

    fn damage_player(&mut self, amount: i32) {
        self.player.health = (self.player.health - amount).max(0);
    }

    /// Stable 64-bit digest of the full simulation state (FNV-1a).
    pub fn state_hash(&self) -> u64 {
        let mut h = fnv::FnvHasher::default();
        let put_actor = |h: &mut fnv::FnvHasher, a: &Actor| {
            h.write_u64(a.pos.0.to_bits());
            h.write_u64(a.pos.1.to_bits());
            h.write_u64(a.angle.to_bits());
            h.write_i32(a.health);
            h.write_u32(a.ammo);
            h.write_u8(a.alive as u8);
            h.write_u32(a.attack_cooldown);
        };
        h.write_u32(self.tick);
        put_actor(&mut h, &self.player);
        for m in &self.monsters {
            put_actor(&mut h, m);
        }
        for i in &self.items {
            h.write_u8(i.kind as u8);
            h.write_u64(i.pos.0.to_bits());
            h.write_u64(i.pos.1.to_bits());
            h.write_u8(i.active as u8);
        }
        h.write_u64(self.rng.get_word_pos() as u64);
        h.write_u64((self.rng.get_word_pos() >> 64) as u64);
        h.finish()
    }
}

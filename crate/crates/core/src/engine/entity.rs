#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ActorKind {
    Player,
    Monster,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Actor {
    pub kind: ActorKind,
    pub pos: (f64, f64),
    /// Facing, radians. Direction is `(cos, sin)` with `y` growing southwards,
    /// so increasing the angle turns right.
    pub angle: f64,
    pub radius: f64,
    pub health: i32,
    pub ammo: u32,
    pub alive: bool,
    pub attack_cooldown: u32,
}

impl Actor {
    pub fn new(kind: ActorKind, pos: (f64, f64), angle: f64, radius: f64, health: i32) -> Self {
        assert!(radius > 0.0);
        Actor { kind, pos, angle, radius, health, ammo: 0, alive: true, attack_cooldown: 0 }
    }

    pub fn direction(&self) -> (f64, f64) {
        (self.angle.cos(), self.angle.sin())
    }

    /// Unit vector pointing to the actor's right.
    pub fn right(&self) -> (f64, f64) {
        (-self.angle.sin(), self.angle.cos())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ItemKind {
    Medikit,
    PoisonVial,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Item {
    pub kind: ItemKind,
    pub pos: (f64, f64),
    pub radius: f64,
    pub active: bool,
}

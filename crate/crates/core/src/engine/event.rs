use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventTag {
    MonsterKilled,
    ShotFired,
    ShotMissed,
    MedikitTaken,
    VialTaken,
    PlayerDied,
    PlayerDamaged(u32),
}

impl EventTag {
    /// Stable numeric code used by the wire protocol.
    pub fn code(self) -> u8 {
        match self {
            EventTag::MonsterKilled => 0,
            EventTag::ShotFired => 1,
            EventTag::ShotMissed => 2,
            EventTag::MedikitTaken => 3,
            EventTag::VialTaken => 4,
            EventTag::PlayerDied => 5,
            EventTag::PlayerDamaged(_) => 6,
        }
    }

    pub fn from_code(code: u8, amount: u32) -> Option<Self> {
        Some(match code {
            0 => EventTag::MonsterKilled,
            1 => EventTag::ShotFired,
            2 => EventTag::ShotMissed,
            3 => EventTag::MedikitTaken,
            4 => EventTag::VialTaken,
            5 => EventTag::PlayerDied,
            6 => EventTag::PlayerDamaged(amount),
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GameEvent {
    pub tag: EventTag,
    pub tick: u32,
}

impl fmt::Display for GameEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.tag {
            EventTag::PlayerDamaged(n) => write!(f, "PLAYER_DAMAGED({n})@{}", self.tick),
            tag => write!(f, "{tag:?}@{}", self.tick),
        }
    }
}

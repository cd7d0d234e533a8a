use crate::engine::{EventTag, GameEvent, WorldState};

/// One reward entry. Shaping entries count towards the training reward only.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Reward {
    pub value: f64,
    pub shaping: bool,
}

impl Reward {
    pub const fn new(value: f64) -> Self {
        Reward { value, shaping: false }
    }

    pub const fn shaping(value: f64) -> Self {
        Reward { value, shaping: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RewardRules {
    /// Charged per elapsed unit (tic by default).
    pub living: Reward,
    pub kill: Reward,
    pub miss: Reward,
    pub death: Reward,
    pub medikit: Reward,
    pub vial: Reward,
}

impl RewardRules {
    pub const NAMES: [&'static str; 6] = ["living", "kill", "miss", "death", "medikit", "vial"];

    pub fn get(&self, name: &str) -> Option<&Reward> {
        Some(match name {
            "living" => &self.living,
            "kill" => &self.kill,
            "miss" => &self.miss,
            "death" => &self.death,
            "medikit" => &self.medikit,
            "vial" => &self.vial,
            _ => return None,
        })
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut Reward> {
        Some(match name {
            "living" => &mut self.living,
            "kill" => &mut self.kill,
            "miss" => &mut self.miss,
            "death" => &mut self.death,
            "medikit" => &mut self.medikit,
            "vial" => &mut self.vial,
            _ => return None,
        })
    }

    fn for_event(&self, tag: EventTag) -> Option<&Reward> {
        match tag {
            EventTag::MonsterKilled => Some(&self.kill),
            EventTag::ShotMissed => Some(&self.miss),
            EventTag::PlayerDied => Some(&self.death),
            EventTag::MedikitTaken => Some(&self.medikit),
            EventTag::VialTaken => Some(&self.vial),
            EventTag::ShotFired | EventTag::PlayerDamaged(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RewardDelta {
    /// Sum of every reward, shaping included.
    pub training: f64,
    /// Sum of non-shaping rewards only.
    pub reported: f64,
}

impl std::ops::AddAssign for RewardDelta {
    fn add_assign(&mut self, rhs: Self) {
        self.training += rhs.training;
        self.reported += rhs.reported;
    }
}

/// Rewards for `elapsed` living units plus every event in `events`.
pub fn score_events(events: &[GameEvent], elapsed: u32, rules: &RewardRules) -> RewardDelta {
    let mut out = RewardDelta::default();
    let mut add = |r: &Reward, times: f64| {
        let v = r.value * times;
        out.training += v;
        if !r.shaping {
            out.reported += v;
        }
    };
    add(&rules.living, elapsed as f64);
    for e in events {
        if let Some(r) = rules.for_event(e.tag) {
            add(r, 1.0);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TerminalCause {
    None,
    PlayerDied,
    MonsterKilled,
    Timeout,
}

impl TerminalCause {
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Self> {
        [TerminalCause::None, TerminalCause::PlayerDied, TerminalCause::MonsterKilled, TerminalCause::Timeout]
            .get(code as usize)
            .copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TerminalStatus {
    pub done: bool,
    pub cause: TerminalCause,
}

impl TerminalStatus {
    pub const RUNNING: TerminalStatus = TerminalStatus { done: false, cause: TerminalCause::None };

    fn ended(cause: TerminalCause) -> Self {
        TerminalStatus { done: true, cause }
    }
}

/// Priority: player death, then a kill (when the scenario ends on kills),
/// then timeout.
pub fn check_terminal(world: &WorldState, events: &[GameEvent], end_on_kill: bool, timeout: u32) -> TerminalStatus {
    let has = |tag| events.iter().any(|e| e.tag == tag);
    if !world.player.alive || has(EventTag::PlayerDied) {
        TerminalStatus::ended(TerminalCause::PlayerDied)
    } else if end_on_kill && has(EventTag::MonsterKilled) {
        TerminalStatus::ended(TerminalCause::MonsterKilled)
    } else if world.tick >= timeout {
        TerminalStatus::ended(TerminalCause::Timeout)
    } else {
        TerminalStatus::RUNNING
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(tag: EventTag) -> GameEvent {
        GameEvent { tag, tick: 1 }
    }

    fn basic() -> RewardRules {
        RewardRules { living: Reward::new(-1.0), kill: Reward::new(101.0), miss: Reward::new(-5.0), ..Default::default() }
    }

    fn health() -> RewardRules {
        RewardRules {
            living: Reward::new(1.0),
            death: Reward::shaping(-100.0),
            medikit: Reward::shaping(100.0),
            vial: Reward::shaping(-100.0),
            ..Default::default()
        }
    }

    #[test]
    fn kill_after_twenty_tics() {
        let d = score_events(&[ev(EventTag::ShotFired), ev(EventTag::MonsterKilled)], 20, &basic());
        assert_eq!(d, RewardDelta { training: 81.0, reported: 81.0 });
    }

    #[test]
    fn missed_shot() {
        let d = score_events(&[ev(EventTag::ShotFired), ev(EventTag::ShotMissed)], 5, &basic());
        assert_eq!(d.training, -10.0);
        assert_eq!(d.reported, -10.0);
    }

    #[test]
    fn shaping_excluded_from_report() {
        let d = score_events(&[ev(EventTag::MedikitTaken)], 10, &health());
        assert_eq!(d, RewardDelta { training: 110.0, reported: 10.0 });
    }

    #[test]
    fn damage_is_not_rewarded() {
        let d = score_events(&[ev(EventTag::PlayerDamaged(6))], 1, &health());
        assert_eq!(d.training, 1.0);
    }
}

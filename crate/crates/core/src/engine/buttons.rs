use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Maximum number of buttons a scenario may declare (256 action indices).
pub const MAX_BUTTONS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Button {
    MoveLeft,
    MoveRight,
    Attack,
    MoveForward,
    MoveBackward,
    TurnLeft,
    TurnRight,
}

impl Button {
    pub const ALL: [Button; 7] = [
        Button::MoveLeft,
        Button::MoveRight,
        Button::Attack,
        Button::MoveForward,
        Button::MoveBackward,
        Button::TurnLeft,
        Button::TurnRight,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Button::MoveLeft => "MOVE_LEFT",
            Button::MoveRight => "MOVE_RIGHT",
            Button::Attack => "ATTACK",
            Button::MoveForward => "MOVE_FORWARD",
            Button::MoveBackward => "MOVE_BACKWARD",
            Button::TurnLeft => "TURN_LEFT",
            Button::TurnRight => "TURN_RIGHT",
        }
    }
}

impl fmt::Display for Button {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown button `{0}`")]
pub struct UnknownButton(pub String);

impl FromStr for Button {
    type Err = UnknownButton;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let upper = s.trim().to_ascii_uppercase();
        Button::ALL
            .into_iter()
            .find(|b| b.name() == upper)
            .ok_or_else(|| UnknownButton(s.trim().to_string()))
    }
}

/// Ordered boolean vector over a scenario's declared buttons.
///
/// Stored as a bitmask where bit `i` is declared button `i`; this is also the
/// wire and recording encoding. The action index is the big-endian reading of
/// the vector, so the first declared button is the most significant bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ButtonSet {
    mask: u16,
    len: u8,
}

impl ButtonSet {
    pub fn none(len: usize) -> Self {
        assert!(len <= MAX_BUTTONS);
        ButtonSet { mask: 0, len: len as u8 }
    }

    /// `None` when the mask sets bits beyond the declared button count.
    pub fn from_mask(mask: u16, len: usize) -> Option<Self> {
        if len > MAX_BUTTONS || (mask >> len) != 0 {
            return None;
        }
        Some(ButtonSet { mask, len: len as u8 })
    }

    pub fn from_bools(pressed: &[bool]) -> Self {
        assert!(pressed.len() <= MAX_BUTTONS);
        let mask = pressed
            .iter()
            .enumerate()
            .fold(0u16, |m, (i, &p)| if p { m | (1 << i) } else { m });
        ButtonSet { mask, len: pressed.len() as u8 }
    }

    pub fn from_action_index(index: usize, len: usize) -> Option<Self> {
        if len > MAX_BUTTONS || index >= (1usize << len) {
            return None;
        }
        let mut mask = 0u16;
        for i in 0..len {
            if index & (1 << (len - 1 - i)) != 0 {
                mask |= 1 << i;
            }
        }
        Some(ButtonSet { mask, len: len as u8 })
    }

    pub fn action_index(self) -> usize {
        (0..self.len as usize).fold(0, |acc, i| (acc << 1) | ((self.mask >> i) & 1) as usize)
    }

    pub fn mask(self) -> u16 {
        self.mask
    }

    pub fn len(self) -> usize {
        self.len as usize
    }

    pub fn is_empty(self) -> bool {
        self.len == 0
    }

    pub fn get(self, i: usize) -> bool {
        i < self.len as usize && (self.mask >> i) & 1 == 1
    }

    pub fn to_bools(self) -> Vec<bool> {
        (0..self.len()).map(|i| self.get(i)).collect()
    }

    /// Whether `button` is pressed, given the declared button order.
    pub fn pressed(self, declared: &[Button], button: Button) -> bool {
        declared.iter().position(|&b| b == button).is_some_and(|i| self.get(i))
    }
}

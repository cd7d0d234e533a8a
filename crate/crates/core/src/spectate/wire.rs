//! Length-prefixed binary messages: u32 payload length, u8 tag, payload.
//! All integers little-endian; strings are a u16 byte length and UTF-8.

use thiserror::Error;

use crate::engine::{EventTag, GameEvent};
use crate::scenario::{Mode, TerminalCause};

pub const PROTOCOL_VERSION: u16 = 1;

/// Largest accepted payload.
pub const MAX_PAYLOAD: usize = 64 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Tag {
    Hello = 0,
    Config = 1,
    Frame = 2,
    Input = 3,
    Event = 4,
    EpisodeEnd = 5,
    Error = 6,
}

impl Tag {
    pub fn from_u8(v: u8) -> Option<Tag> {
        Some(match v {
            0 => Tag::Hello,
            1 => Tag::Config,
            2 => Tag::Frame,
            3 => Tag::Input,
            4 => Tag::Event,
            5 => Tag::EpisodeEnd,
            6 => Tag::Error,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigMsg {
    pub width: u16,
    pub height: u16,
    /// Bytes per pixel of FRAME images.
    pub channels: u8,
    pub mode: Mode,
    pub skipcount: u16,
    pub buttons: Vec<String>,
    pub variables: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameMsg {
    pub tick: u32,
    pub width: u16,
    pub height: u16,
    pub channels: u8,
    /// Row-major pixels, `channels` interleaved bytes each.
    pub image: Vec<u8>,
    pub depth8: Option<Vec<u8>>,
    pub variables: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum WireMessage {
    Hello { version: u16, client: String },
    Config(ConfigMsg),
    Frame(FrameMsg),
    /// Bit i presses the i-th declared button.
    Input { buttons: u16, client_tick: u32 },
    Event(GameEvent),
    EpisodeEnd { total_reward: f64, total_score: f64, cause: TerminalCause, ticks: u32 },
    Error { message: String },
}

#[derive(Debug, Error, PartialEq)]
pub enum WireError {
    #[error("truncated message")]
    TruncatedMessage,
    #[error("unknown tag {0}")]
    UnknownTag(u8),
    #[error("malformed {tag:?} payload: {reason}")]
    Malformed { tag: Tag, reason: String },
}

impl WireMessage {
    pub fn tag(&self) -> Tag {
        match self {
            WireMessage::Hello { .. } => Tag::Hello,
            WireMessage::Config(_) => Tag::Config,
            WireMessage::Frame(_) => Tag::Frame,
            WireMessage::Input { .. } => Tag::Input,
            WireMessage::Event(_) => Tag::Event,
            WireMessage::EpisodeEnd { .. } => Tag::EpisodeEnd,
            WireMessage::Error { .. } => Tag::Error,
        }
    }
}

fn put_str(b: &mut Vec<u8>, s: &str) {
    let bytes = &s.as_bytes()[..s.len().min(u16::MAX as usize)];
    b.extend_from_slice(&(bytes.len() as u16).to_le_bytes());
    b.extend_from_slice(bytes);
}

pub fn encode(msg: &WireMessage) -> Vec<u8> {
    let mut p = Vec::new();
    match msg {
        WireMessage::Hello { version, client } => {
            p.extend_from_slice(&version.to_le_bytes());
            put_str(&mut p, client);
        }
        WireMessage::Config(c) => {
            p.extend_from_slice(&c.width.to_le_bytes());
            p.extend_from_slice(&c.height.to_le_bytes());
            p.push(c.channels);
            p.push(c.mode.code());
            p.extend_from_slice(&c.skipcount.to_le_bytes());
            for list in [&c.buttons, &c.variables] {
                p.push(list.len() as u8);
                list.iter().for_each(|s| put_str(&mut p, s));
            }
        }
        WireMessage::Frame(f) => {
            p.extend_from_slice(&f.tick.to_le_bytes());
            p.extend_from_slice(&f.width.to_le_bytes());
            p.extend_from_slice(&f.height.to_le_bytes());
            p.push(f.channels);
            p.extend_from_slice(&(f.image.len() as u32).to_le_bytes());
            p.extend_from_slice(&f.image);
            match &f.depth8 {
                Some(d) => {
                    p.push(1);
                    p.extend_from_slice(&(d.len() as u32).to_le_bytes());
                    p.extend_from_slice(d);
                }
                None => p.push(0),
            }
            p.push(f.variables.len() as u8);
            f.variables.iter().for_each(|v| p.extend_from_slice(&v.to_le_bytes()));
        }
        WireMessage::Input { buttons, client_tick } => {
            p.extend_from_slice(&buttons.to_le_bytes());
            p.extend_from_slice(&client_tick.to_le_bytes());
        }
        WireMessage::Event(e) => {
            let amount = match e.tag {
                EventTag::PlayerDamaged(a) => a,
                _ => 0,
            };
            p.push(e.tag.code());
            p.extend_from_slice(&amount.to_le_bytes());
            p.extend_from_slice(&e.tick.to_le_bytes());
        }
        WireMessage::EpisodeEnd { total_reward, total_score, cause, ticks } => {
            p.extend_from_slice(&total_reward.to_le_bytes());
            p.extend_from_slice(&total_score.to_le_bytes());
            p.push(cause.code());
            p.extend_from_slice(&ticks.to_le_bytes());
        }
        WireMessage::Error { message } => put_str(&mut p, message),
    }
    let mut out = Vec::with_capacity(p.len() + 5);
    out.extend_from_slice(&(p.len() as u32).to_le_bytes());
    out.push(msg.tag() as u8);
    out.extend_from_slice(&p);
    out
}

struct Payload<'a> {
    tag: Tag,
    rest: &'a [u8],
}

impl<'a> Payload<'a> {
    fn bad(&self, reason: &str) -> WireError {
        WireError::Malformed { tag: self.tag, reason: reason.to_string() }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], WireError> {
        if self.rest.len() < n {
            return Err(self.bad("payload shorter than its fields"));
        }
        let (h, t) = self.rest.split_at(n);
        self.rest = t;
        Ok(h)
    }

    fn u8(&mut self) -> Result<u8, WireError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, WireError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32, WireError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64, WireError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn string(&mut self) -> Result<String, WireError> {
        let n = self.u16()? as usize;
        let bytes = self.take(n)?;
        String::from_utf8(bytes.to_vec()).map_err(|_| self.bad("string is not UTF-8"))
    }

    fn bytes(&mut self) -> Result<Vec<u8>, WireError> {
        let n = self.u32()? as usize;
        Ok(self.take(n)?.to_vec())
    }
}

/// Decodes one message from the front of `bytes`, returning it with the
/// number of bytes consumed.
pub fn decode(bytes: &[u8]) -> Result<(WireMessage, usize), WireError> {
    if bytes.len() < 5 {
        return Err(WireError::TruncatedMessage);
    }
    let len = u32::from_le_bytes(bytes[..4].try_into().unwrap()) as usize;
    let tag = Tag::from_u8(bytes[4]).ok_or(WireError::UnknownTag(bytes[4]))?;
    if len > MAX_PAYLOAD {
        return Err(WireError::Malformed { tag, reason: format!("payload of {len} bytes") });
    }
    if bytes.len() - 5 < len {
        return Err(WireError::TruncatedMessage);
    }
    let mut p = Payload { tag, rest: &bytes[5..5 + len] };
    let msg = match tag {
        Tag::Hello => WireMessage::Hello { version: p.u16()?, client: p.string()? },
        Tag::Config => {
            let width = p.u16()?;
            let height = p.u16()?;
            let channels = p.u8()?;
            let mode = Mode::from_code(p.u8()?).ok_or_else(|| p.bad("unknown mode"))?;
            let skipcount = p.u16()?;
            let mut lists = [Vec::new(), Vec::new()];
            for list in &mut lists {
                let n = p.u8()?;
                for _ in 0..n {
                    list.push(p.string()?);
                }
            }
            let [buttons, variables] = lists;
            WireMessage::Config(ConfigMsg { width, height, channels, mode, skipcount, buttons, variables })
        }
        Tag::Frame => {
            let tick = p.u32()?;
            let width = p.u16()?;
            let height = p.u16()?;
            let channels = p.u8()?;
            let image = p.bytes()?;
            if image.len() != width as usize * height as usize * channels as usize {
                return Err(p.bad("image size does not match dimensions"));
            }
            let depth8 = match p.u8()? {
                0 => None,
                1 => {
                    let d = p.bytes()?;
                    if d.len() != width as usize * height as usize {
                        return Err(p.bad("depth size does not match dimensions"));
                    }
                    Some(d)
                }
                _ => return Err(p.bad("depth flag")),
            };
            let n = p.u8()?;
            let variables = (0..n).map(|_| p.f64()).collect::<Result<_, _>>()?;
            WireMessage::Frame(FrameMsg { tick, width, height, channels, image, depth8, variables })
        }
        Tag::Input => WireMessage::Input { buttons: p.u16()?, client_tick: p.u32()? },
        Tag::Event => {
            let code = p.u8()?;
            let amount = p.u32()?;
            let tick = p.u32()?;
            let tag = EventTag::from_code(code, amount).ok_or_else(|| p.bad("unknown event"))?;
            WireMessage::Event(GameEvent { tag, tick })
        }
        Tag::EpisodeEnd => {
            let total_reward = p.f64()?;
            let total_score = p.f64()?;
            let cause = TerminalCause::from_code(p.u8()?).ok_or_else(|| p.bad("unknown cause"))?;
            WireMessage::EpisodeEnd { total_reward, total_score, cause, ticks: p.u32()? }
        }
        Tag::Error => WireMessage::Error { message: p.string()? },
    };
    if !p.rest.is_empty() {
        return Err(p.bad("trailing payload bytes"));
    }
    Ok((msg, 5 + len))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_carries_raw_image_bytes() {
        let image = vec![7u8; 120 * 45 * 3];
        let msg = WireMessage::Frame(FrameMsg {
            tick: 3,
            width: 120,
            height: 45,
            channels: 3,
            image,
            depth8: None,
            variables: vec![100.0, 3.0],
        });
        let bytes = encode(&msg);
        let image_len = u32::from_le_bytes(bytes[5 + 9..5 + 13].try_into().unwrap());
        assert_eq!(image_len, 16_200);
        assert_eq!(decode(&bytes).unwrap(), (msg, bytes.len()));
    }

    #[test]
    fn length_beyond_buffer_is_truncated() {
        let mut bytes = encode(&WireMessage::Input { buttons: 1, client_tick: 2 });
        bytes.pop();
        assert_eq!(decode(&bytes), Err(WireError::TruncatedMessage));
        assert_eq!(decode(&bytes[..3]), Err(WireError::TruncatedMessage));
    }

    #[test]
    fn unknown_tag_is_rejected() {
        assert_eq!(decode(&[0, 0, 0, 0, 42]), Err(WireError::UnknownTag(42)));
    }
}

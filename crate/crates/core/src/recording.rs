//! Episode recordings and their replay verification.
//!
//! Layout, little-endian: magic `RDRC`, version u32, config hash u64, episode
//! seed u64; config text and scenario text, each as a u32 byte length and
//! UTF-8 bytes; decision count u32 and per decision tick u32, skip u16,
//! button mask u16, reward f32; hash count u32 and one u64 frame hash per
//! tic starting with the initial frame; finally a u64 FNV-1a checksum of all
//! preceding bytes.

use std::hash::Hasher;
use std::path::Path;

use fnv::FnvHasher;
use thiserror::Error;

use crate::engine::ButtonSet;
use crate::env::{EnvError, Environment};
use crate::scenario::{parse_config, parse_scenario, Mode};

pub const RECORDING_MAGIC: [u8; 4] = *b"RDRC";
pub const RECORDING_VERSION: u32 = 1;

/// One decision: the tick it was taken at and what it did.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionRecord {
    pub tick: u32,
    pub skip: u16,
    pub buttons: u16,
    /// Training reward of the decision.
    pub reward: f32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Recording {
    pub config_text: String,
    pub scenario_text: String,
    pub seed: u64,
    pub decisions: Vec<DecisionRecord>,
    pub tic_hashes: Vec<u64>,
}

#[derive(Debug, Error, PartialEq)]
pub enum RecordingError {
    #[error("corrupt recording: {0}")]
    CorruptRecording(String),
    #[error("frame hash mismatch at tick {tick}")]
    HashMismatch { tick: u32 },
    #[error("decision {decision} diverged: {reason}")]
    DecisionMismatch { decision: usize, reason: String },
    #[error("io: {0}")]
    Io(String),
    #[error(transparent)]
    Env(#[from] EnvError),
}

fn fnv(bytes: &[u8]) -> u64 {
    let mut h = FnvHasher::default();
    h.write(bytes);
    h.finish()
}

/// Hash identifying a config together with its scenario.
pub fn config_hash(config_text: &str, scenario_text: &str) -> u64 {
    let mut h = FnvHasher::default();
    h.write(config_text.as_bytes());
    h.write_u8(0);
    h.write(scenario_text.as_bytes());
    h.finish()
}

impl Recording {
    pub fn config_hash(&self) -> u64 {
        config_hash(&self.config_text, &self.scenario_text)
    }

    pub fn total_reward(&self) -> f64 {
        self.decisions.iter().map(|d| d.reward as f64).sum()
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut b = Vec::new();
        b.extend_from_slice(&RECORDING_MAGIC);
        b.extend_from_slice(&RECORDING_VERSION.to_le_bytes());
        b.extend_from_slice(&self.config_hash().to_le_bytes());
        b.extend_from_slice(&self.seed.to_le_bytes());
        for text in [&self.config_text, &self.scenario_text] {
            b.extend_from_slice(&(text.len() as u32).to_le_bytes());
            b.extend_from_slice(text.as_bytes());
        }
        b.extend_from_slice(&(self.decisions.len() as u32).to_le_bytes());
        for d in &self.decisions {
            b.extend_from_slice(&d.tick.to_le_bytes());
            b.extend_from_slice(&d.skip.to_le_bytes());
            b.extend_from_slice(&d.buttons.to_le_bytes());
            b.extend_from_slice(&d.reward.to_le_bytes());
        }
        b.extend_from_slice(&(self.tic_hashes.len() as u32).to_le_bytes());
        for h in &self.tic_hashes {
            b.extend_from_slice(&h.to_le_bytes());
        }
        let sum = fnv(&b);
        b.extend_from_slice(&sum.to_le_bytes());
        b
    }

    /// Parses the structure without checking the trailing checksum, so that
    /// replay can locate semantic divergence first.
    pub fn decode_unchecked(bytes: &[u8]) -> Result<(Recording, bool), RecordingError> {
        let corrupt = |m: &str| RecordingError::CorruptRecording(m.to_string());
        let mut r = Cursor { rest: bytes };
        if r.take(4)? != RECORDING_MAGIC {
            return Err(corrupt("bad magic"));
        }
        let version = r.u32()?;
        if version != RECORDING_VERSION {
            return Err(corrupt(&format!("unsupported version {version}")));
        }
        let stored_hash = r.u64()?;
        let seed = r.u64()?;
        let config_text = r.text()?;
        let scenario_text = r.text()?;
        let n = r.u32()? as usize;
        let mut decisions = Vec::with_capacity(n.min(bytes.len() / 12));
        for _ in 0..n {
            decisions.push(DecisionRecord { tick: r.u32()?, skip: r.u16()?, buttons: r.u16()?, reward: f32::from_bits(r.u32()?) });
        }
        let n = r.u32()? as usize;
        let mut tic_hashes = Vec::with_capacity(n.min(bytes.len() / 8));
        for _ in 0..n {
            tic_hashes.push(r.u64()?);
        }
        let body_len = bytes.len() - r.rest.len();
        let sum = r.u64()?;
        if !r.rest.is_empty() {
            return Err(corrupt("trailing bytes"));
        }
        let rec = Recording { config_text, scenario_text, seed, decisions, tic_hashes };
        if rec.config_hash() != stored_hash {
            return Err(corrupt("config hash does not match embedded config"));
        }
        Ok((rec, sum == fnv(&bytes[..body_len])))
    }

    pub fn decode(bytes: &[u8]) -> Result<Recording, RecordingError> {
        match Recording::decode_unchecked(bytes)? {
            (rec, true) => Ok(rec),
            (_, false) => Err(RecordingError::CorruptRecording("checksum mismatch".into())),
        }
    }

    pub fn save(&self, path: &Path) -> Result<(), RecordingError> {
        std::fs::write(path, self.encode()).map_err(|e| RecordingError::Io(e.to_string()))
    }

    pub fn load_bytes(path: &Path) -> Result<Vec<u8>, RecordingError> {
        std::fs::read(path).map_err(|e| RecordingError::Io(e.to_string()))
    }
}

struct Cursor<'a> {
    rest: &'a [u8],
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], RecordingError> {
        if self.rest.len() < n {
            return Err(RecordingError::CorruptRecording("truncated".into()));
        }
        let (h, t) = self.rest.split_at(n);
        self.rest = t;
        Ok(h)
    }

    fn u16(&mut self) -> Result<u16, RecordingError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32, RecordingError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, RecordingError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn text(&mut self) -> Result<String, RecordingError> {
        let n = self.u32()? as usize;
        String::from_utf8(self.take(n)?.to_vec())
            .map_err(|_| RecordingError::CorruptRecording("text is not UTF-8".into()))
    }
}

/// Outcome of a successful replay.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplayReport {
    pub decisions: usize,
    pub tics_verified: usize,
    pub total_reward: f64,
    pub config_hash: u64,
    pub seed: u64,
}

/// Re-executes a recording in `SYNC_PLAYER` mode and checks every tick,
/// reward and frame hash. Semantic divergence is reported before a bad
/// checksum.
pub fn replay(bytes: &[u8]) -> Result<ReplayReport, RecordingError> {
    let (rec, checksum_ok) = Recording::decode_unchecked(bytes)?;
    let corrupt = |m: String| RecordingError::CorruptRecording(m);
    let mut config = parse_config(&rec.config_text).map_err(|e| corrupt(format!("embedded config: {e}")))?;
    config.mode = Mode::SyncPlayer;
    let scenario = parse_scenario(&rec.scenario_text).map_err(|e| corrupt(format!("embedded scenario: {e}")))?;
    let buttons = scenario.buttons.len();
    let env = Environment::with_scenario(config, scenario)?;
    env.set_recording(true);
    env.new_episode(Some(rec.seed));

    let mut divergence: Option<RecordingError> = None;
    let mut executed = 0;
    for (i, d) in rec.decisions.iter().enumerate() {
        if env.is_episode_finished() {
            divergence = Some(RecordingError::DecisionMismatch { decision: i, reason: "episode already ended".into() });
            break;
        }
        if env.tick() != d.tick {
            divergence = Some(RecordingError::DecisionMismatch {
                decision: i,
                reason: format!("tick {} recorded, {} replayed", d.tick, env.tick()),
            });
            break;
        }
        let Some(set) = ButtonSet::from_mask(d.buttons, buttons) else {
            divergence = Some(corrupt(format!("decision {i} presses undeclared buttons")));
            break;
        };
        let reward = env.make_action(set, Some(d.skip as u32))?;
        executed += 1;
        if reward as f32 != d.reward && divergence.is_none() {
            divergence = Some(RecordingError::DecisionMismatch {
                decision: i,
                reason: format!("reward {} recorded, {reward} replayed", d.reward),
            });
        }
    }
    let hashes = env.take_recording().map(|r| r.tic_hashes).unwrap_or_default();
    if let Some(tick) = hashes.iter().zip(&rec.tic_hashes).position(|(a, b)| a != b) {
        return Err(RecordingError::HashMismatch { tick: tick as u32 });
    }
    if let Some(e) = divergence {
        return Err(e);
    }
    if hashes.len() != rec.tic_hashes.len() {
        return Err(RecordingError::HashMismatch { tick: hashes.len().min(rec.tic_hashes.len()) as u32 });
    }
    if !checksum_ok {
        return Err(corrupt("checksum mismatch".into()));
    }
    Ok(ReplayReport {
        decisions: executed,
        tics_verified: hashes.len(),
        total_reward: env.get_total_reward(),
        config_hash: rec.config_hash(),
        seed: rec.seed,
    })
}

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channels {
    Rgb,
    Gray,
}

impl Channels {
    pub fn count(self) -> usize {
        match self {
            Channels::Rgb => 3,
            Channels::Gray => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    SyncPlayer,
    SyncSpectator,
    AsyncPlayer,
    AsyncSpectator,
}

impl Mode {
    pub fn is_async(self) -> bool {
        matches!(self, Mode::AsyncPlayer | Mode::AsyncSpectator)
    }

    pub fn is_spectator(self) -> bool {
        matches!(self, Mode::SyncSpectator | Mode::AsyncSpectator)
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::SyncPlayer => "SYNC_PLAYER",
            Mode::SyncSpectator => "SYNC_SPECTATOR",
            Mode::AsyncPlayer => "ASYNC_PLAYER",
            Mode::AsyncSpectator => "ASYNC_SPECTATOR",
        }
    }

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Self> {
        [Mode::SyncPlayer, Mode::SyncSpectator, Mode::AsyncPlayer, Mode::AsyncSpectator].get(code as usize).copied()
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s.to_ascii_uppercase().as_str() {
            "SYNC_PLAYER" | "PLAYER" => Ok(Mode::SyncPlayer),
            "SYNC_SPECTATOR" | "SPECTATOR" => Ok(Mode::SyncSpectator),
            "ASYNC_PLAYER" => Ok(Mode::AsyncPlayer),
            "ASYNC_SPECTATOR" => Ok(Mode::AsyncSpectator),
            _ => Err(()),
        }
    }
}

/// Unit the living reward is charged per.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LivingRewardUnit {
    Tic,
    Action,
}

pub const MAX_SKIPCOUNT: u32 = 100;
pub const MIN_RESOLUTION: usize = 4;
pub const MAX_RESOLUTION: usize = 1024;

#[derive(Debug, Clone, PartialEq)]
pub struct EnvConfig {
    /// `builtin:<name>` or a path, resolved against `base_dir`.
    pub scenario_path: String,
    pub resolution: (usize, usize),
    pub channels: Channels,
    pub compute_depth: bool,
    pub mode: Mode,
    pub default_skipcount: u32,
    pub seed: Option<u64>,
    pub living_reward_unit: LivingRewardUnit,
    pub fov_degrees: f64,
    pub render_sprites: bool,
    pub floor_ceiling_shading: bool,
    /// Directory of the file the config came from, if any.
    pub base_dir: Option<PathBuf>,
}

impl Default for EnvConfig {
    fn default() -> Self {
        EnvConfig {
            scenario_path: "builtin:basic".to_string(),
            resolution: (160, 120),
            channels: Channels::Rgb,
            compute_depth: false,
            mode: Mode::SyncPlayer,
            default_skipcount: 0,
            seed: None,
            living_reward_unit: LivingRewardUnit::Tic,
            fov_degrees: 90.0,
            render_sprites: true,
            floor_ceiling_shading: true,
            base_dir: None,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("value for `{key}` out of range: {value}")]
    ValueOutOfRange { key: String, value: String },
    #[error("cannot read config {path}: {reason}")]
    Io { path: String, reason: String },
}

const KEYS: [&str; 11] = [
    "scenario",
    "resolution",
    "channels",
    "depth",
    "mode",
    "skipcount",
    "seed",
    "living_reward_per",
    "fov",
    "render_sprites",
    "floor_ceiling_shading",
];

pub(crate) fn parse_bool(v: &str) -> Option<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" | "on" => Some(true),
        "false" | "0" | "no" | "off" => Some(false),
        _ => None,
    }
}

/// Splits a `key = value` line after comment stripping. `Ok(None)` for blank
/// lines.
pub(crate) fn split_entry(raw: &str, line: usize) -> Result<Option<(String, String)>, (usize, String)> {
    let text = raw.split('#').next().unwrap_or("").trim();
    if text.is_empty() {
        return Ok(None);
    }
    let Some((k, v)) = text.split_once('=') else {
        return Err((line, format!("expected `key = value`, got `{text}`")));
    };
    let key = k.trim().to_ascii_lowercase();
    if key.is_empty() {
        return Err((line, "empty key".to_string()));
    }
    Ok(Some((key, v.trim().to_string())))
}

impl EnvConfig {
    /// One `key = value` per line, `#` comments, case-insensitive keys.
    /// Missing keys keep their defaults.
    pub fn parse(text: &str) -> Result<EnvConfig, ConfigError> {
        let mut cfg = EnvConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let entry = split_entry(raw, line).map_err(|(line, reason)| ConfigError::Syntax { line, reason })?;
            let Some((key, value)) = entry else { continue };
            if !KEYS.contains(&key.as_str()) {
                return Err(ConfigError::UnknownKey(key));
            }
            let out_of_range = || ConfigError::ValueOutOfRange { key: key.clone(), value: value.clone() };
            let syntax = |what: &str| ConfigError::Syntax { line, reason: format!("`{key}` expects {what}, got `{value}`") };
            match key.as_str() {
                "scenario" => {
                    if value.is_empty() {
                        return Err(syntax("a path"));
                    }
                    cfg.scenario_path = value.clone();
                }
                "resolution" => {
                    let (w, h) = value
                        .to_ascii_lowercase()
                        .split_once('x')
                        .and_then(|(w, h)| Some((w.trim().parse::<i64>().ok()?, h.trim().parse::<i64>().ok()?)))
                        .ok_or_else(|| syntax("WIDTHxHEIGHT"))?;
                    let ok = |d: i64| (MIN_RESOLUTION as i64..=MAX_RESOLUTION as i64).contains(&d);
                    if !ok(w) || !ok(h) {
                        return Err(out_of_range());
                    }
                    cfg.resolution = (w as usize, h as usize);
                }
                "channels" => {
                    cfg.channels = match value.to_ascii_uppercase().as_str() {
                        "RGB" | "RGB24" => Channels::Rgb,
                        "GRAY" | "GRAY8" => Channels::Gray,
                        _ => return Err(syntax("RGB or GRAY")),
                    }
                }
                "depth" => cfg.compute_depth = parse_bool(&value).ok_or_else(|| syntax("a boolean"))?,
                "render_sprites" => cfg.render_sprites = parse_bool(&value).ok_or_else(|| syntax("a boolean"))?,
                "floor_ceiling_shading" => {
                    cfg.floor_ceiling_shading = parse_bool(&value).ok_or_else(|| syntax("a boolean"))?
                }
                "mode" => cfg.mode = value.parse().map_err(|_| syntax("a control mode"))?,
                "skipcount" => {
                    let n: i64 = value.parse().map_err(|_| syntax("an integer"))?;
                    if !(0..=MAX_SKIPCOUNT as i64).contains(&n) {
                        return Err(out_of_range());
                    }
                    cfg.default_skipcount = n as u32;
                }
                "seed" => {
                    let n: i128 = value.parse().map_err(|_| syntax("an integer"))?;
                    cfg.seed = Some(u64::try_from(n).map_err(|_| out_of_range())?);
                }
                "living_reward_per" => {
                    cfg.living_reward_unit = match value.to_ascii_lowercase().as_str() {
                        "tic" | "tick" => LivingRewardUnit::Tic,
                        "action" | "decision" => LivingRewardUnit::Action,
                        _ => return Err(syntax("`tic` or `action`")),
                    }
                }
                "fov" => {
                    let f: f64 = value.parse().map_err(|_| syntax("degrees"))?;
                    if !(f > 0.0 && f < 180.0) {
                        return Err(out_of_range());
                    }
                    cfg.fov_degrees = f;
                }
                _ => unreachable!(),
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<EnvConfig, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io { path: path.display().to_string(), reason: e.to_string() })?;
        let mut cfg = EnvConfig::parse(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    /// Canonical text form; parses back to an equal config (minus `base_dir`).
    pub fn to_cfg_string(&self) -> String {
        let mut s = String::new();
        s += &format!("scenario = {}\n", self.scenario_path);
        s += &format!("resolution = {}x{}\n", self.resolution.0, self.resolution.1);
        s += &format!("channels = {}\n", if self.channels == Channels::Rgb { "RGB" } else { "GRAY" });
        s += &format!("depth = {}\n", self.compute_depth);
        s += &format!("mode = {}\n", self.mode);
        s += &format!("skipcount = {}\n", self.default_skipcount);
        if let Some(seed) = self.seed {
            s += &format!("seed = {seed}\n");
        }
        let unit = if self.living_reward_unit == LivingRewardUnit::Tic { "tic" } else { "action" };
        s += &format!("living_reward_per = {unit}\n");
        s += &format!("fov = {}\n", self.fov_degrees);
        s += &format!("render_sprites = {}\n", self.render_sprites);
        s += &format!("floor_ceiling_shading = {}\n", self.floor_ceiling_shading);
        s
    }
}

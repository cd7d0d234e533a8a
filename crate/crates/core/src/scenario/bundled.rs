//! Scenario and config files compiled into the library.

pub const BASIC_SCN: &str = include_str!("../../scenarios/basic.scn");
pub const BASIC_CFG: &str = include_str!("../../scenarios/basic.cfg");
pub const HEALTH_GATHERING_SCN: &str = include_str!("../../scenarios/health_gathering.scn");
pub const HEALTH_GATHERING_CFG: &str = include_str!("../../scenarios/health_gathering.cfg");

pub const BUILTIN_PREFIX: &str = "builtin:";

/// Scenario text for a bundled scenario name.
pub fn scenario_text(name: &str) -> Option<&'static str> {
    match name {
        "basic" => Some(BASIC_SCN),
        "health_gathering" => Some(HEALTH_GATHERING_SCN),
        _ => None,
    }
}

/// Config text for a bundled scenario name.
pub fn config_text(name: &str) -> Option<&'static str> {
    match name {
        "basic" => Some(BASIC_CFG),
        "health_gathering" => Some(HEALTH_GATHERING_CFG),
        _ => None,
    }
}

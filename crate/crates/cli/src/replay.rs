use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use raydoom::recording::{replay, Recording, ReplayReport};

/// Verifies a recording; any divergence or corruption is an error.
pub fn replay_cmd(path: &Path, out: &mut dyn Write) -> Result<ReplayReport> {
    let bytes = Recording::load_bytes(path).with_context(|| format!("reading {}", path.display()))?;
    let report = replay(&bytes).with_context(|| format!("replaying {}", path.display()))?;
    writeln!(out, "seed {} config hash {:016x}", report.seed, report.config_hash)?;
    writeln!(
        out,
        "ok: {} decisions, {} frame hashes verified, total reward {}",
        report.decisions, report.tics_verified, report.total_reward
    )?;
    Ok(report)
}

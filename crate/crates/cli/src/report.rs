//! Path resolution and JSON report plumbing. Inputs are canonicalized up
//! front so every error and every report names an absolute path; reports are
//! written with stable field order so identical runs produce identical bytes.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

/// Canonicalizes an input path, failing early with the path in the message.
pub fn resolve_input(path: &Path) -> Result<PathBuf> {
    fs::canonicalize(path).with_context(|| format!("cannot resolve input {}", path.display()))
}

/// Absolute form of an output path; the parent directory must exist (create
/// it first for directories we own).
pub fn resolve_output(path: &Path) -> Result<PathBuf> {
    if path.is_absolute() {
        return Ok(path.to_path_buf());
    }
    Ok(std::env::current_dir()
        .context("cannot read working directory")?
        .join(path))
}

pub fn to_pretty_json(value: &impl Serialize) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).context("cannot serialize report")?;
    s.push('\n');
    Ok(s)
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    fs::write(path, to_pretty_json(value)?)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

pub fn print_json(value: &impl Serialize) -> Result<()> {
    print!("{}", to_pretty_json(value)?);
    Ok(())
}

/// Standard report envelope: the command, its full flag set (seed included),
/// and a command-specific body.
#[derive(Serialize)]
pub struct Report<C: Serialize, B: Serialize> {
    pub command: &'static str,
    pub config: C,
    #[serde(flatten)]
    pub body: B,
}

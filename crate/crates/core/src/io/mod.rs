//! Files: trajectory container, run configuration and CSV exports.

mod config;
mod csv;
mod trajectory_file;

pub use config::{ControlSpec, RunConfig, TargetSpec};
pub use csv::{cost_csv, energy_csv, norms_csv};
pub use trajectory_file::{
    decode, encode, load_provenance, load_trajectory, save_trajectory, sidecar_path, Provenance,
    FORMAT_VERSION, MAGIC,
};

use std::io::Write;
use std::path::Path;

use crate::error::Result;

/// Write through a temporary file in the destination directory and rename it
/// into place, so readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

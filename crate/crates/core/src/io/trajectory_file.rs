//! Binary trajectory container.
//!
//! Layout, all little-endian:
//!
//! | bytes | content |
//! |---|---|
//! | 12 | magic `THIRDGRADETJ` |
//! | 4 | format version (`u32`) |
//! | 4 x 4 | `max_mode`, `grid_size`, `n_steps`, kind tag (`u32`) |
//! | 2 x 8 | `alpha1`, `dt` (`f64`) |
//! | `(n_steps + 1) M^2 x 8` | coefficients, one row per node |
//! | 4 | CRC32 of the coefficient bytes |

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::BasisKey;
use crate::trajectory::{Trajectory, TrajectoryKind};

use super::write_atomic;

pub const MAGIC: &[u8; 12] = b"THIRDGRADETJ";
pub const FORMAT_VERSION: u32 = 1;
const HEADER_LEN: usize = 16 + 16 + 16;

/// Side-car record written next to every trajectory file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
    pub code_version: String,
    pub kind: TrajectoryKind,
    pub max_mode: usize,
    pub n_steps: usize,
}

pub fn encode(traj: &Trajectory) -> Vec<u8> {
    let key = traj.key();
    let mut payload = Vec::with_capacity(traj.nodes().len() * key.n_modes() * 8);
    for c in traj.nodes().iter().flatten() {
        payload.extend_from_slice(&c.to_le_bytes());
    }
    let mut out = Vec::with_capacity(HEADER_LEN + payload.len() + 4);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    for v in [key.max_mode, key.grid_size, traj.n_steps()] {
        out.extend_from_slice(&(v as u32).to_le_bytes());
    }
    out.extend_from_slice(&traj.kind().tag().to_le_bytes());
    out.extend_from_slice(&key.alpha1().to_le_bytes());
    out.extend_from_slice(&traj.dt().to_le_bytes());
    out.extend_from_slice(&payload);
    out.extend_from_slice(&crc32fast::hash(&payload).to_le_bytes());
    out
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(b[at..at + 4].try_into().expect("4 bytes"))
}

fn f64_at(b: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(b[at..at + 8].try_into().expect("8 bytes"))
}

pub fn decode(bytes: &[u8], path: &Path) -> Result<Trajectory> {
    let truncated = |expected: usize| Error::ChecksumFailed {
        path: path.to_path_buf(),
        reason: format!("truncated: expected {expected} bytes, found {}", bytes.len()),
    };
    if bytes.len() < 12 || &bytes[..12] != MAGIC {
        return Err(Error::MagicMismatch {
            path: path.to_path_buf(),
        });
    }
    if bytes.len() < HEADER_LEN {
        return Err(truncated(HEADER_LEN));
    }
    let version = u32_at(bytes, 12);
    if version != FORMAT_VERSION {
        return Err(Error::VersionUnsupported {
            path: path.to_path_buf(),
            version,
        });
    }
    let max_mode = u32_at(bytes, 16) as usize;
    let grid_size = u32_at(bytes, 20) as usize;
    let n_steps = u32_at(bytes, 24) as usize;
    let tag = u32_at(bytes, 28);
    let alpha1 = f64_at(bytes, 32);
    let dt = f64_at(bytes, 40);
    let n_modes = max_mode * max_mode;
    let payload_len = (n_steps + 1) * n_modes * 8;
    let total = HEADER_LEN + payload_len + 4;
    if bytes.len() != total {
        return Err(truncated(total));
    }
    let payload = &bytes[HEADER_LEN..HEADER_LEN + payload_len];
    let stored = u32_at(bytes, HEADER_LEN + payload_len);
    let actual = crc32fast::hash(payload);
    if stored != actual {
        return Err(Error::ChecksumFailed {
            path: path.to_path_buf(),
            reason: format!("stored CRC32 {stored:08x}, computed {actual:08x}"),
        });
    }
    let kind = TrajectoryKind::from_tag(tag).ok_or_else(|| Error::ChecksumFailed {
        path: path.to_path_buf(),
        reason: format!("unknown trajectory kind tag {tag}"),
    })?;
    let nodes = payload
        .chunks_exact(n_modes * 8)
        .map(|row| row.chunks_exact(8).map(|c| f64_at(c, 0)).collect())
        .collect();
    Trajectory::from_nodes(BasisKey::new(max_mode, grid_size, alpha1), dt, kind, nodes)
}

/// Write `traj` and its provenance side-car (`<path>.json`), each atomically.
pub fn save_trajectory(path: &Path, traj: &Trajectory, provenance: &Provenance) -> Result<()> {
    write_atomic(path, &encode(traj))?;
    let side = sidecar_path(path);
    write_atomic(&side, serde_json::to_string_pretty(provenance)?.as_bytes())
}

pub fn load_trajectory(path: &Path) -> Result<Trajectory> {
    let bytes = std::fs::read(path)?;
    decode(&bytes, path)
}

pub fn load_provenance(path: &Path) -> Result<Provenance> {
    let text = std::fs::read_to_string(sidecar_path(path))?;
    Ok(serde_json::from_str(&text)?)
}

pub fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    s.into()
}

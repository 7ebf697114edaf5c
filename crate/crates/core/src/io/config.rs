//! Run configuration.
//!
//! ```toml
//! seed = 7
//!
//! [model]
//! nu = 0.5
//! alpha1 = 0.1
//! alpha2 = 0.05
//! beta = 0.2
//!
//! [disc]
//! M = 4          # modes per axis
//! grid = 16      # optional, defaults to 4 M
//! dt = 0.0078125
//! T = 0.5
//!
//! [cost]
//! lambda = 1e-6
//! K = 10.0
//! # target_path = "target.traj"
//!
//! [opt]
//! max_iter = 200
//! tol = 1e-4
//!
//! [init]
//! modes = [[1, 1, 0.5]]          # (m, n, coefficient) of y0
//!
//! [control]
//! modes = [[1, 2, 1.0]]          # constant-in-time control, or path = "u.traj"
//!
//! [target]
//! control_modes = [[1, 1, 2.0]]  # target = state under this constant control
//! ```
//!
//! `cost.target_path` and `[target]` are mutually exclusive. Unknown keys are
//! rejected so typos surface as errors.

use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use toml::{Table, Value};

use crate::control::OptimizerOptions;
use crate::error::{Error, Result};
use crate::spectral::{Field, ModelParams, SpectralBasis};

/// Where the tracking target comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum TargetSpec {
    /// No target given; only `simulate` and `taylor` can run.
    None,
    Path(PathBuf),
    /// Solve the state under this constant control and track the result.
    Manufactured(Vec<(usize, usize, f64)>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ControlSpec {
    Modes(Vec<(usize, usize, f64)>),
    Path(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ModelParams,
    pub max_mode: usize,
    pub grid: Option<usize>,
    pub dt: f64,
    pub horizon: f64,
    pub n_steps: usize,
    pub lambda: f64,
    pub radius: f64,
    pub target: TargetSpec,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
    pub init_modes: Vec<(usize, usize, f64)>,
    pub control: ControlSpec,
    /// SHA-256 of the file bytes, hex encoded.
    pub hash: String,
}

const SECTIONS: &[(&str, &[&str])] = &[
    ("model", &["nu", "alpha1", "alpha2", "beta"]),
    ("disc", &["M", "grid", "dt", "T"]),
    ("cost", &["lambda", "K", "target_path"]),
    ("opt", &["max_iter", "tol"]),
    ("init", &["modes"]),
    ("control", &["modes", "path"]),
    ("target", &["control_modes"]),
];

struct Reader<'a> {
    root: &'a Table,
    base: &'a Path,
}

impl<'a> Reader<'a> {
    fn section(&self, name: &str) -> Result<Option<&'a Table>> {
        match self.root.get(name) {
            None => Ok(None),
            Some(Value::Table(t)) => Ok(Some(t)),
            Some(_) => Err(Error::config(name, "expected a table")),
        }
    }

    fn raw(&self, path: &str) -> Result<Option<&'a Value>> {
        let (sec, key) = path.split_once('.').expect("dotted key");
        Ok(self.section(sec)?.and_then(|t| t.get(key)))
    }

    fn f64_opt(&self, path: &str) -> Result<Option<f64>> {
        match self.raw(path)? {
            None => Ok(None),
            Some(Value::Float(x)) => Ok(Some(*x)),
            Some(Value::Integer(i)) => Ok(Some(*i as f64)),
            Some(_) => Err(Error::config(path, "expected a number")),
        }
    }

    fn f64(&self, path: &str) -> Result<f64> {
        self.f64_opt(path)?
            .ok_or_else(|| Error::config(path, "missing required key"))
    }

    fn usize_opt(&self, path: &str) -> Result<Option<usize>> {
        match self.raw(path)? {
            None => Ok(None),
            Some(Value::Integer(i)) if *i >= 0 => Ok(Some(*i as usize)),
            Some(_) => Err(Error::config(path, "expected a non-negative integer")),
        }
    }

    fn path_opt(&self, path: &str) -> Result<Option<PathBuf>> {
        match self.raw(path)? {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(self.base.join(s))),
            Some(_) => Err(Error::config(path, "expected a string path")),
        }
    }

    fn modes(&self, path: &str) -> Result<Option<Vec<(usize, usize, f64)>>> {
        let Some(v) = self.raw(path)? else {
            return Ok(None);
        };
        let bad = || Error::config(path, "expected a list of [m, n, coefficient] triples");
        let list = v.as_array().ok_or_else(bad)?;
        list.iter()
            .map(|item| {
                let t = item.as_array().filter(|t| t.len() == 3).ok_or_else(bad)?;
                let idx = |v: &Value| v.as_integer().filter(|i| *i >= 1).map(|i| i as usize);
                let c = t[2].as_float().or_else(|| t[2].as_integer().map(|i| i as f64));
                match (idx(&t[0]), idx(&t[1]), c) {
                    (Some(m), Some(n), Some(c)) => Ok((m, n, c)),
                    _ => Err(bad()),
                }
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("<file>", format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    /// Parse config text; relative paths resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let root: Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::config("<toml>", e.message().to_string()))?;
        for (key, value) in &root {
            match SECTIONS.iter().find(|(s, _)| s == key) {
                Some((_, keys)) => {
                    if let Value::Table(t) = value {
                        if let Some(k) = t.keys().find(|k| !keys.contains(&k.as_str())) {
                            return Err(Error::config(format!("{key}.{k}"), "unknown key"));
                        }
                    }
                }
                None if key == "seed" => {}
                None => return Err(Error::config(key.clone(), "unknown key")),
            }
        }
        let r = Reader { root: &root, base };

        let params = ModelParams::new(
            r.f64("model.nu")?,
            r.f64("model.alpha1")?,
            r.f64("model.alpha2")?,
            r.f64("model.beta")?,
        )
        .map_err(|e| Error::config("model", e.to_string()))?;

        let max_mode = r
            .usize_opt("disc.M")?
            .ok_or_else(|| Error::config("disc.M", "missing required key"))?;
        if max_mode == 0 {
            return Err(Error::config("disc.M", "must be at least 1"));
        }
        let grid = r.usize_opt("disc.grid")?;
        if let Some(g) = grid {
            if 2 * g <= 3 * max_mode {
                return Err(Error::config(
                    "disc.grid",
                    format!("grid {g} too coarse for M = {max_mode}: need 2 grid > 3 M"),
                ));
            }
        }
        let dt = r.f64("disc.dt")?;
        let horizon = r.f64("disc.T")?;
        if !(dt > 0.0) {
            return Err(Error::config("disc.dt", "must be positive"));
        }
        if !(horizon > 0.0) {
            return Err(Error::config("disc.T", "must be positive"));
        }
        let ratio = horizon / dt;
        let n_steps = ratio.round();
        if (ratio - n_steps).abs() > 1e-9 * ratio || n_steps < 1.0 {
            return Err(Error::config("disc.dt", format!("T / dt = {ratio} is not a positive integer")));
        }

        let lambda = r.f64_opt("cost.lambda")?.unwrap_or(0.0);
        if !(lambda >= 0.0) {
            return Err(Error::config("cost.lambda", "must be >= 0"));
        }
        let radius = r.f64_opt("cost.K")?.unwrap_or(f64::INFINITY);
        if !(radius > 0.0) {
            return Err(Error::config("cost.K", "must be > 0"));
        }
        let target = match (r.path_opt("cost.target_path")?, r.modes("target.control_modes")?) {
            (Some(_), Some(_)) => {
                return Err(Error::config(
                    "cost.target_path",
                    "conflicts with [target].control_modes; give one target",
                ))
            }
            (Some(p), None) => TargetSpec::Path(p),
            (None, Some(m)) => TargetSpec::Manufactured(m),
            (None, None) => TargetSpec::None,
        };

        let defaults = OptimizerOptions::default();
        let max_iter = r.usize_opt("opt.max_iter")?.unwrap_or(defaults.max_iter);
        let tol = r.f64_opt("opt.tol")?.unwrap_or(defaults.tol);
        if !(tol >= 0.0) {
            return Err(Error::config("opt.tol", "must be >= 0"));
        }
        let seed = match root.get("seed") {
            None => 0,
            Some(Value::Integer(i)) if *i >= 0 => *i as u64,
            Some(_) => return Err(Error::config("seed", "expected a non-negative integer")),
        };
        let init_modes = r.modes("init.modes")?.unwrap_or_default();
        let control = match (r.modes("control.modes")?, r.path_opt("control.path")?) {
            (Some(_), Some(_)) => {
                return Err(Error::config("control.path", "conflicts with control.modes"))
            }
            (None, Some(p)) => ControlSpec::Path(p),
            (Some(m), None) => ControlSpec::Modes(m),
            (None, None) => ControlSpec::Modes(vec![]),
        };
        for (key, modes) in [("init.modes", &init_modes)]
            .into_iter()
            .chain(match &control {
                ControlSpec::Modes(m) => Some(("control.modes", m)),
                _ => None,
            })
            .chain(match &target {
                TargetSpec::Manufactured(m) => Some(("target.control_modes", m)),
                _ => None,
            })
        {
            if let Some((m, n, _)) = modes.iter().find(|(m, n, _)| *m > max_mode || *n > max_mode) {
                return Err(Error::config(key, format!("mode ({m}, {n}) exceeds M = {max_mode}")));
            }
        }

        Ok(Self {
            params,
            max_mode,
            grid,
            dt,
            horizon,
            n_steps: n_steps as usize,
            lambda,
            radius,
            target,
            max_iter,
            tol,
            seed,
            init_modes,
            control,
            hash: hex(&Sha256::digest(text.as_bytes())),
        })
    }

    pub fn basis(&self) -> Result<SpectralBasis> {
        match self.grid {
            Some(g) => SpectralBasis::with_grid(self.max_mode, self.params.alpha1(), g),
            None => SpectralBasis::new(self.max_mode, self.params.alpha1()),
        }
    }

    /// Field with the listed `(m, n, coefficient)` entries.
    pub fn modes_field(basis: &SpectralBasis, modes: &[(usize, usize, f64)]) -> Result<Field> {
        let mut f = Field::zeros(basis);
        for &(m, n, c) in modes {
            let k = basis
                .index_of(m, n)
                .ok_or_else(|| Error::config("modes", format!("mode ({m}, {n}) not in basis")))?;
            f.coeffs_mut()[k] += c;
        }
        Ok(f)
    }

    pub fn optimizer_options(&self, seed: u64) -> OptimizerOptions {
        OptimizerOptions {
            max_iter: self.max_iter,
            tol: self.tol,
            seed,
            ..OptimizerOptions::default()
        }
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

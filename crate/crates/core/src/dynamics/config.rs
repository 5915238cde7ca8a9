use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::init::{InitSpec, Profile};
use crate::error::{Error, Result};
use crate::spectral::Grid;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    Mhd,
    Elsasser,
    Euler,
}

impl SystemKind {
    pub fn name(&self) -> &'static str {
        match self {
            SystemKind::Mhd => "mhd",
            SystemKind::Elsasser => "elsasser",
            SystemKind::Euler => "euler",
        }
    }
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SystemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mhd" => Ok(SystemKind::Mhd),
            "elsasser" => Ok(SystemKind::Elsasser),
            "euler" => Ok(SystemKind::Euler),
            _ => Err(Error::Config(format!("unknown system '{s}'"))),
        }
    }
}

/// Simulation parameters, read from a flat TOML file (`key = value` per
/// line). Unknown keys are rejected. See the README for the schema.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    pub n: usize,
    pub length: f64,
    pub dt: f64,
    pub t_end: f64,
    pub dealias: bool,
    pub system: SystemKind,
    pub profile: Profile,
    pub amplitude: f64,
    pub epsilon: Option<f64>,
    pub seed: u64,
    pub kmax: i64,
    /// Time between diagnostics records; a multiple of `dt`.
    pub cadence: f64,
    /// Stop once ‖∇u‖∞ + ‖∇b‖∞ exceeds this value.
    pub theta: f64,
    /// Stop once the spectral tail holds more than this energy fraction.
    pub tail_threshold: f64,
    /// Integrate the Euler flow from u₀ alongside the main system.
    pub euler_reference: bool,
    /// Time at which sweeps report E.
    pub t_fix: f64,
    /// Time between state snapshots when snapshots are requested.
    pub snapshot_cadence: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n: 128,
            length: 2.0 * PI,
            dt: 1e-3,
            t_end: 1.0,
            dealias: true,
            system: SystemKind::Mhd,
            profile: Profile::OrszagTang,
            amplitude: 1.0,
            epsilon: None,
            seed: 0,
            kmax: 4,
            cadence: 0.01,
            theta: 1e3,
            tail_threshold: 1e-4,
            euler_reference: false,
            t_fix: 0.5,
            snapshot_cadence: 0.25,
        }
    }
}

/// Relative slack when checking that times are multiples of `dt`.
const MULTIPLE_TOL: f64 = 1e-9;

fn steps_for(span: f64, dt: f64, what: &str) -> Result<usize> {
    let ratio = span / dt;
    let steps = ratio.round();
    if (ratio - steps).abs() > MULTIPLE_TOL * steps.max(1.0) {
        return Err(Error::Config(format!("{what} = {span} is not a multiple of dt = {dt}")));
    }
    Ok(steps as usize)
}

impl SimConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: SimConfig = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::ConfigFile {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Self::parse(&text).map_err(|e| Error::ConfigFile {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("plain data serializes")
    }

    pub fn validate(&self) -> Result<()> {
        Grid::new(self.n, self.length)?;
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(self.dt) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end.is_finite() && self.t_end >= self.dt) {
            return Err(Error::Config(format!("t_end must be >= dt, got {}", self.t_end)));
        }
        if !positive(self.theta) {
            return Err(Error::Config(format!("theta must be positive, got {}", self.theta)));
        }
        if !(positive(self.tail_threshold) && self.tail_threshold < 1.0) {
            return Err(Error::Config("tail_threshold must lie in (0, 1)".into()));
        }
        if !positive(self.amplitude) {
            return Err(Error::Config(format!("amplitude must be positive, got {}", self.amplitude)));
        }
        if let Some(eps) = self.epsilon {
            if !(eps.is_finite() && eps >= 0.0) {
                return Err(Error::Config(format!("epsilon must be >= 0, got {eps}")));
            }
        }
        if !(self.t_fix.is_finite() && self.t_fix >= 0.0) {
            return Err(Error::Config("t_fix must be >= 0".into()));
        }
        if self.kmax < 1 {
            return Err(Error::Config("kmax must be >= 1".into()));
        }
        if !(self.cadence >= self.dt) {
            return Err(Error::Config("cadence must be >= dt".into()));
        }
        if !(self.snapshot_cadence >= self.dt) {
            return Err(Error::Config("snapshot_cadence must be >= dt".into()));
        }
        steps_for(self.t_end, self.dt, "t_end")?;
        steps_for(self.cadence, self.dt, "cadence")?;
        steps_for(self.snapshot_cadence, self.dt, "snapshot_cadence")?;
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.n, self.length)
    }

    pub fn total_steps(&self) -> usize {
        steps_for(self.t_end, self.dt, "t_end").expect("validated")
    }

    pub fn record_every(&self) -> usize {
        steps_for(self.cadence, self.dt, "cadence").expect("validated")
    }

    pub fn snapshot_every(&self) -> usize {
        steps_for(self.snapshot_cadence, self.dt, "snapshot_cadence").expect("validated")
    }

    /// Number of diagnostics rows of a run that reaches `t_end`.
    pub fn expected_records(&self) -> usize {
        self.total_steps() / self.record_every() + 1
    }

    pub fn init_spec(&self) -> InitSpec {
        InitSpec {
            profile: self.profile,
            amplitude: self.amplitude,
            epsilon: self.epsilon,
            seed: self.seed,
            kmax: self.kmax,
        }
    }
}

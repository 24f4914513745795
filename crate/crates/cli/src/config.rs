//! Experiment configuration, read from TOML.
//!
//! ```toml
//! [sweep]
//! c0 = [1.0]
//! k = [1.0]
//! Y = [0.1, 0.5, 0.9]
//!
//! [mc]
//! T = 200.0
//! dt = 1e-3
//! MC = 2000
//! master_seed = 1
//!
//! [pde]
//! ny = 801
//! nz = 81
//!
//! [run]
//! mode = "all"
//! out = "out"
//! ```
//!
//! Every key is optional; defaults reproduce the protocol behind the
//! reference table (`T = 500`, `dt = 1e-4`, `MC = 5000`, `Y = 0.1 .. 0.9`).

use std::path::{Path, PathBuf};

use epp_core::sde::check_step;
use epp_core::OscillatorParams;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Mode {
    /// Direct estimator only.
    McDirect,
    /// Cycle estimators only.
    McCycles,
    /// PDE route only.
    Pde,
    All,
}

impl Mode {
    pub fn direct(self) -> bool {
        matches!(self, Mode::McDirect | Mode::All)
    }
    pub fn cycles(self) -> bool {
        matches!(self, Mode::McCycles | Mode::All)
    }
    pub fn pde(self) -> bool {
        matches!(self, Mode::Pde | Mode::All)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleSampling {
    /// One cycle per independent path.
    Single,
    /// Every complete cycle of each direct-estimator path.
    Harvest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartRule {
    BurnIn,
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Sweep {
    pub c0: Vec<f64>,
    pub k: Vec<f64>,
    #[serde(rename = "Y")]
    pub bound: Vec<f64>,
}

impl Default for Sweep {
    fn default() -> Self {
        Self {
            c0: vec![1.0],
            k: vec![1.0],
            bound: (1..=9).map(|n| n as f64 / 10.0).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MonteCarlo {
    #[serde(rename = "T")]
    pub horizon: f64,
    pub dt: f64,
    #[serde(rename = "MC")]
    pub paths: usize,
    pub master_seed: u64,
    pub cycles: CycleSampling,
    pub cycle_start: StartRule,
    /// Give up on a single cycle after this much simulated time.
    pub time_limit: f64,
}

impl Default for MonteCarlo {
    fn default() -> Self {
        Self {
            horizon: 500.0,
            dt: 1e-4,
            paths: 5000,
            master_seed: 1,
            cycles: CycleSampling::Single,
            cycle_start: StartRule::BurnIn,
            time_limit: 1e4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PdeGrid {
    /// Velocity truncation; `6 / sqrt(2 c0)` when absent.
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    pub ny: usize,
    pub nz: usize,
}

impl Default for PdeGrid {
    fn default() -> Self {
        Self {
            half_width: None,
            ny: 801,
            nz: 81,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub mode: Mode,
    /// Not echoed into reports.
    #[serde(skip_serializing)]
    pub out: PathBuf,
    /// Worker threads, 0 for all cores. Not echoed into reports.
    #[serde(skip_serializing)]
    pub threads: usize,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            mode: Mode::All,
            out: PathBuf::from("out"),
            threads: 0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    /// Per-row cycle records.
    pub cycles: bool,
    /// Per-row PDE fields (`pi+`, `v+(.; y)`, second moment).
    pub fields: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub sweep: Sweep,
    pub mc: MonteCarlo,
    pub pde: PdeGrid,
    pub run: RunSection,
    pub output: OutputSection,
}

/// One parameter set of the sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub index: usize,
    pub params: OscillatorParams,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Sweep rows in `c0`, `k`, `Y` order (last varies fastest).
    pub fn rows(&self) -> Result<Vec<Row>, CliError> {
        let mut rows = Vec::new();
        for &c0 in &self.sweep.c0 {
            for &k in &self.sweep.k {
                for &bound in &self.sweep.bound {
                    let params = OscillatorParams::new(c0, k, bound).map_err(|e| {
                        CliError::Config(format!("c0 = {c0}, k = {k}, Y = {bound}: {e}"))
                    })?;
                    rows.push(Row {
                        index: rows.len(),
                        params,
                    });
                }
            }
        }
        Ok(rows)
    }

    pub fn validate(&self) -> Result<Vec<Row>, CliError> {
        let rows = self.rows()?;
        let mode = self.run.mode;
        if mode.direct() || mode.cycles() {
            let mc = &self.mc;
            if !(mc.dt > 0.0 && mc.dt.is_finite()) {
                return Err(CliError::Config(format!(
                    "dt must be positive, got {}",
                    mc.dt
                )));
            }
            if mc.paths < 2 {
                return Err(CliError::Config(format!(
                    "MC must be at least 2, got {}",
                    mc.paths
                )));
            }
            let needs_horizon = mode.direct() || mc.cycles == CycleSampling::Harvest;
            if needs_horizon && !(mc.horizon > 0.0 && mc.horizon.is_finite()) {
                return Err(CliError::Config(format!(
                    "T must be positive, got {}",
                    mc.horizon
                )));
            }
            if !(mc.time_limit > 0.0) {
                return Err(CliError::Config("time_limit must be positive".into()));
            }
            for row in &rows {
                check_step(&row.params, mc.dt)
                    .map_err(|e| CliError::Config(format!("Y = {}: {e}", row.params.bound())))?;
            }
        }
        if mode.pde() {
            let g = &self.pde;
            if g.ny < 3 || g.ny.is_multiple_of(2) {
                return Err(CliError::Config(format!(
                    "ny must be odd and at least 3, got {}",
                    g.ny
                )));
            }
            if g.nz < 3 {
                return Err(CliError::Config(format!(
                    "nz must be at least 3, got {}",
                    g.nz
                )));
            }
            if let Some(l) = g.half_width {
                if !(l > 0.0 && l.is_finite()) {
                    return Err(CliError::Config(format!("L must be positive, got {l}")));
                }
            }
        }
        Ok(rows)
    }

    /// TOML rendering of everything that determines the numbers.
    pub fn echo(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::InitialPulse;
use crate::model::{CouplingSchedule, GridSpec, MediumParams, ScheduleKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Analytic,
    #[default]
    Adiabatic,
    Full,
    Thermal,
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Analytic => "analytic",
            ModelKind::Adiabatic => "adiabatic",
            ModelKind::Full => "full",
            ModelKind::Thermal => "thermal",
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(ModelKind::Analytic),
            "adiabatic" => Ok(ModelKind::Adiabatic),
            "full" => Ok(ModelKind::Full),
            "thermal" => Ok(ModelKind::Thermal),
            other => Err(Error::Config(format!(
                "unknown model `{other}` (expected analytic, adiabatic, full or thermal)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SwitchShape {
    /// Coupling switched on as `tanh(t/T_s)`.
    #[default]
    Tanh,
    /// Coupling already at full strength at `t = 0`.
    Constant,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub n_z: usize,
    pub z_min: f64,
    pub z_max: f64,
    pub cfl: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        let g = GridSpec::default();
        Self {
            n_z: g.n_z,
            z_min: g.z_min,
            z_max: g.z_max,
            cfl: g.cfl,
        }
    }
}

/// One simulation run. Lengths are in pulse lengths, times in switching
/// times, rates per switching time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub model: ModelKind,
    pub kappa_plus_sq: f64,
    pub phi: f64,
    pub gamma_bc: f64,
    #[serde(rename = "gamma_ba_Ts")]
    pub gamma_ba_ts: f64,
    pub l_a: f64,
    pub grid: GridConfig,
    pub t_end: f64,
    pub snapshot_every: f64,
    #[serde(rename = "M")]
    pub modes: usize,
    /// Thermal diffusion strength; `None` selects `4|κ⁺|²|κ⁻|²`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_coef: Option<f64>,
    pub cos2_theta0: f64,
    pub schedule: SwitchShape,
    pub pulse_center: f64,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelKind::default(),
            kappa_plus_sq: 0.5,
            phi: 0.0,
            gamma_bc: 0.0,
            gamma_ba_ts: 100.0,
            l_a: 0.1,
            grid: GridConfig::default(),
            t_end: 10.0,
            snapshot_every: 0.1,
            modes: 8,
            d_coef: None,
            cos2_theta0: 1e-4,
            schedule: SwitchShape::default(),
            pulse_center: 0.0,
            output_dir: PathBuf::from("out"),
        }
    }
}

/// Parse a JSON run configuration; missing keys take their defaults.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = serde_json::from_str(text).map_err(|e| {
        if e.is_data() {
            Error::Config(e.to_string())
        } else {
            Error::Parse {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            }
        }
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn serialize_config(cfg: &RunConfig) -> String {
    serde_json::to_string_pretty(cfg).expect("run configuration is always serializable")
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.5..=1.0).contains(&self.kappa_plus_sq) {
            return Err(Error::Config(format!(
                "kappa_plus_sq must lie in [0.5, 1], got {}",
                self.kappa_plus_sq
            )));
        }
        let positive = [
            ("t_end", self.t_end),
            ("snapshot_every", self.snapshot_every),
            ("gamma_ba_Ts", self.gamma_ba_ts),
            ("l_a", self.l_a),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {value}")));
            }
        }
        if !(self.phi.is_finite() && self.pulse_center.is_finite()) {
            return Err(Error::Config("phi and pulse_center must be finite".into()));
        }
        if self.modes < 2 {
            return Err(Error::Config(format!("M must be at least 2, got {}", self.modes)));
        }
        if let Some(d) = self.d_coef {
            if !(d >= 0.0 && d.is_finite()) {
                return Err(Error::Config(format!("d_coef must be non-negative, got {d}")));
            }
        }
        let grid = self.grid_spec()?;
        if !grid.contains(self.pulse_center) {
            return Err(Error::Config(format!(
                "pulse_center {} lies outside the grid",
                self.pulse_center
            )));
        }
        self.medium()?;
        self.schedule()?;
        Ok(())
    }

    pub fn grid_spec(&self) -> Result<GridSpec> {
        GridSpec::new(self.grid.n_z, self.grid.z_min, self.grid.z_max, self.grid.cfl)
    }

    pub fn medium(&self) -> Result<MediumParams> {
        let defaults = MediumParams::default();
        MediumParams::new(
            self.gamma_ba_ts,
            self.gamma_bc,
            defaults.delta_p,
            defaults.delta_2ph,
            self.l_a,
            self.grid.z_max - self.grid.z_min,
        )
    }

    pub fn schedule(&self) -> Result<CouplingSchedule> {
        let kind = match self.schedule {
            SwitchShape::Tanh => ScheduleKind::TanhSwitch,
            SwitchShape::Constant => ScheduleKind::Constant,
        };
        CouplingSchedule::from_kappa_plus_sq(self.kappa_plus_sq, self.phi, self.cos2_theta0, kind)
    }

    pub fn pulse(&self) -> Result<InitialPulse> {
        InitialPulse::gaussian(num_complex::Complex64::new(1.0, 0.0), 1.0, self.pulse_center)
    }

    /// Snapshot times `0, Δ, 2Δ, …` up to and including `t_end`.
    pub fn snapshot_times(&self) -> Vec<f64> {
        let count = (self.t_end / self.snapshot_every + 1e-9).floor() as usize;
        let mut times: Vec<f64> = (0..=count).map(|k| k as f64 * self.snapshot_every).collect();
        let last = *times.last().unwrap();
        if self.t_end - last > 1e-9 * self.t_end {
            times.push(self.t_end);
        } else {
            *times.last_mut().unwrap() = last.min(self.t_end);
        }
        times
    }
}

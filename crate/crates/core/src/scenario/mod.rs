//! Run orchestration: configuration, dispatch to a model tier, snapshot
//! output and comparison of finished runs.
//!
//! A run directory holds `manifest.json` and one CSV per snapshot. Output
//! depends only on the configuration, so repeated runs are byte-identical.

mod compare;
mod config;
mod output;

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::adiabatic::{run_adiabatic, Scheme};
use crate::analytic::evolve_closed_form;
use crate::error::Result;
use crate::full::run_full;
use crate::thermal::{run_thermal, ThermalParams};

pub use compare::{compare_runs, CompareReport, CompareRow, Norm};
pub use config::{parse_config, serialize_config, GridConfig, ModelKind, RunConfig, SwitchShape};
pub use output::{read_snapshot, snapshot_file_name, SnapshotTable, CSV_HEADER};

pub const SOLVER_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotEntry {
    pub index: usize,
    pub t: f64,
    pub file: String,
}

/// Everything needed to reproduce and interpret a run directory.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    #[serde(flatten)]
    pub config: RunConfig,
    pub beta: f64,
    pub kappa_minus_sq: f64,
    /// Unit convention of every number in the run directory.
    pub units: &'static str,
    pub scheme: String,
    pub solver_version: &'static str,
    pub warnings: Vec<String>,
    pub snapshots: Vec<SnapshotEntry>,
    /// Not written to disk.
    #[serde(skip)]
    pub wall_time: f64,
}

const UNITS: &str = "z in L_p = v_g0 T_s, t in T_s, velocities in v_g0, fields in units of the stored amplitude";

/// One snapshot ready to be written.
pub(crate) struct SnapshotData {
    pub field: crate::field::PolaritonField,
    /// Probe energy density relative to the pre-storage group velocity.
    pub energy_density: Vec<f64>,
}

pub fn run_scenario(cfg: &RunConfig) -> Result<RunManifest> {
    let start = Instant::now();
    cfg.validate()?;
    let out_dir = cfg.output_dir.as_path();
    output::ensure_writable(out_dir)?;

    let sched = cfg.schedule()?;
    let medium = cfg.medium()?;
    let grid = cfg.grid_spec()?;
    let pulse = cfg.pulse()?;
    let times = cfg.snapshot_times();
    let cos2_0 = sched.cos2_theta0();
    let mut warnings = Vec::new();
    if cos2_0 > 0.01 {
        warnings.push(format!("cos2_theta0 = {cos2_0} is outside the slow-light regime"));
    }

    let polariton_energy = |field: &crate::field::PolaritonField| -> Result<Vec<f64>> {
        let ratio = sched.eval(field.t)?.cos2_theta / cos2_0;
        Ok(field.density().into_iter().map(|d| d * ratio).collect())
    };

    let (scheme, snapshots): (String, Vec<SnapshotData>) = match cfg.model {
        ModelKind::Analytic => {
            let mut snaps = Vec::with_capacity(times.len());
            for &t in &times {
                let field = evolve_closed_form(&pulse, &sched, &medium, &grid, t)?;
                let energy_density = polariton_energy(&field)?;
                snaps.push(SnapshotData { field, energy_density });
            }
            ("closed-form".to_string(), snaps)
        }
        ModelKind::Adiabatic => {
            let scheme = Scheme::default();
            let (fields, w) = run_adiabatic(&pulse, &sched, &medium, &grid, scheme, &times)?;
            warnings.extend(w);
            let snaps = fields
                .into_iter()
                .map(|field| {
                    let energy_density = polariton_energy(&field)?;
                    Ok(SnapshotData { field, energy_density })
                })
                .collect::<Result<_>>()?;
            (scheme.name().to_string(), snaps)
        }
        ModelKind::Full => {
            let run = run_full(&pulse, &sched, &medium, &grid, cfg.modes, &times, None)?;
            warnings.extend(run.warnings);
            let snaps = run
                .snapshots
                .into_iter()
                .map(|s| SnapshotData {
                    energy_density: s.fields.intensity().into_iter().map(|e| e / cos2_0).collect(),
                    field: s.psi,
                })
                .collect();
            (format!("integrating-factor-trapezoid dt={}", run.dt), snaps)
        }
        ModelKind::Thermal => {
            let mut params = ThermalParams::default_for(&sched);
            if let Some(d) = cfg.d_coef {
                params.d_coef = d;
            }
            let run = run_thermal(&pulse, &sched, &medium, &grid, &params, &times)?;
            warnings.extend(run.warnings);
            let snaps = run
                .snapshots
                .into_iter()
                .map(|field| {
                    let energy_density = polariton_energy(&field)?;
                    Ok(SnapshotData { field, energy_density })
                })
                .collect::<Result<_>>()?;
            (params.scheme.name().to_string(), snaps)
        }
    };

    let mut entries = Vec::with_capacity(snapshots.len());
    for (index, snap) in snapshots.iter().enumerate() {
        let file = snapshot_file_name(index, snap.field.t);
        output::write_snapshot(&out_dir.join(&file), snap)?;
        entries.push(SnapshotEntry {
            index,
            t: snap.field.t,
            file,
        });
    }

    let manifest = RunManifest {
        config: cfg.clone(),
        beta: sched.beta(),
        kappa_minus_sq: sched.kappa_minus().norm_sqr(),
        units: UNITS,
        scheme,
        solver_version: SOLVER_VERSION,
        warnings,
        snapshots: entries,
        wall_time: start.elapsed().as_secs_f64(),
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest is always serializable") + "\n";
    output::write_atomic(&out_dir.join("manifest.json"), text.as_bytes())?;
    log::info!(
        "{} run finished: {} snapshots in {:.3} s",
        cfg.model.name(),
        manifest.snapshots.len(),
        manifest.wall_time
    );
    Ok(manifest)
}

/// The parts of a manifest needed to read a run back.
#[derive(Clone, Debug, Deserialize)]
pub struct ManifestSummary {
    pub grid: GridConfig,
    pub snapshots: Vec<SnapshotEntry>,
}

pub fn read_manifest(dir: &Path) -> Result<ManifestSummary> {
    let path = dir.join("manifest.json");
    let text = std::fs::read_to_string(&path).map_err(|e| crate::error::Error::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| crate::error::Error::Parse {
        line: e.line(),
        column: e.column(),
        message: format!("{}: {e}", path.display()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn small(model: ModelKind, dir: &Path) -> RunConfig {
        RunConfig {
            model,
            kappa_plus_sq: 0.55,
            grid: GridConfig {
                n_z: 256,
                ..GridConfig::default()
            },
            t_end: 2.0,
            snapshot_every: 0.5,
            modes: 3,
            output_dir: dir.to_path_buf(),
            ..RunConfig::default()
        }
    }

    #[test]
    fn manifest_reports_derived_quantities() {
        let dir = tempfile::tempdir().unwrap();
        let m = run_scenario(&small(ModelKind::Adiabatic, dir.path())).unwrap();
        assert!((m.beta - 0.234_520_787_991_171_5).abs() < 1e-12);
        assert!((m.kappa_minus_sq - 0.45).abs() < 1e-12);
        assert_eq!(m.snapshots.len(), 5);
        let text = std::fs::read_to_string(dir.path().join("manifest.json")).unwrap();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        for key in ["beta", "kappa_minus_sq", "scheme", "warnings", "snapshots", "kappa_plus_sq", "gamma_ba_Ts", "M"] {
            assert!(value.get(key).is_some(), "missing {key}");
        }
        assert!(value.get("wall_time").is_none());
        let summary = read_manifest(dir.path()).unwrap();
        assert_eq!(summary.snapshots, m.snapshots);
    }

    #[test]
    fn every_model_runs() {
        for model in [ModelKind::Analytic, ModelKind::Adiabatic, ModelKind::Full, ModelKind::Thermal] {
            let dir = tempfile::tempdir().unwrap();
            let m = run_scenario(&small(model, dir.path())).unwrap();
            for entry in &m.snapshots {
                let table = read_snapshot(&dir.path().join(&entry.file)).unwrap();
                assert_eq!(table.z.len(), 256);
                assert!(table.energy_density.iter().all(|e| e.is_finite() && *e >= 0.0));
            }
        }
    }

    #[test]
    fn unwritable_output_fails_before_compute() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        std::fs::write(&blocker, b"x").unwrap();
        let cfg = small(ModelKind::Adiabatic, &blocker.join("sub"));
        assert!(matches!(run_scenario(&cfg), Err(Error::Io { .. })));
    }
}

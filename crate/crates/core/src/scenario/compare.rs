use std::fmt;
use std::path::Path;

use serde::Serialize;

use super::output::read_snapshot;
use super::read_manifest;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    /// `(Σ |Δ|² Δz)^{1/2}`.
    L2,
    Linf,
}

impl std::str::FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l2" => Ok(Norm::L2),
            "linf" => Ok(Norm::Linf),
            other => Err(Error::Config(format!("unknown norm `{other}` (expected l2 or linf)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareRow {
    pub index: usize,
    pub t: f64,
    pub field: &'static str,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareReport {
    pub norm: Norm,
    pub rows: Vec<CompareRow>,
    pub max: f64,
}

impl fmt::Display for CompareReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "index,t,field,distance")?;
        for r in &self.rows {
            writeln!(f, "{},{:.6},{},{:.6e}", r.index, r.t, r.field, r.distance)?;
        }
        write!(f, "max,{:.6e}", self.max)
    }
}

fn distance<T: Copy>(a: &[T], b: &[T], dz: f64, norm: Norm, diff: impl Fn(T, T) -> f64) -> f64 {
    let pointwise = a.iter().zip(b).map(|(&x, &y)| diff(x, y));
    match norm {
        Norm::L2 => (pointwise.map(|d| d * d).sum::<f64>() * dz).sqrt(),
        Norm::Linf => pointwise.fold(0.0, f64::max),
    }
}

/// Per-snapshot distances between two run directories on the same grid.
pub fn compare_runs(dir_a: &Path, dir_b: &Path, norm: Norm) -> Result<CompareReport> {
    let a = read_manifest(dir_a)?;
    let b = read_manifest(dir_b)?;
    if a.grid.n_z != b.grid.n_z || a.grid.z_min != b.grid.z_min || a.grid.z_max != b.grid.z_max {
        return Err(Error::Compare(format!(
            "grid mismatch: {} cells on [{}, {}] vs {} cells on [{}, {}]",
            a.grid.n_z, a.grid.z_min, a.grid.z_max, b.grid.n_z, b.grid.z_min, b.grid.z_max
        )));
    }
    if a.snapshots.len() != b.snapshots.len() {
        return Err(Error::Compare(format!(
            "snapshot count mismatch: {} vs {}",
            a.snapshots.len(),
            b.snapshots.len()
        )));
    }
    let dz = (a.grid.z_max - a.grid.z_min) / (a.grid.n_z - 1) as f64;
    let mut rows = Vec::with_capacity(3 * a.snapshots.len());
    for (sa, sb) in a.snapshots.iter().zip(&b.snapshots) {
        if (sa.t - sb.t).abs() > 1e-9 * sa.t.abs().max(1.0) {
            return Err(Error::Compare(format!(
                "snapshot {} is at t = {} in one run and t = {} in the other",
                sa.index, sa.t, sb.t
            )));
        }
        let ta = read_snapshot(&dir_a.join(&sa.file))?;
        let tb = read_snapshot(&dir_b.join(&sb.file))?;
        if ta.z.len() != a.grid.n_z || tb.z.len() != a.grid.n_z {
            return Err(Error::Compare(format!("snapshot {} does not match its grid", sa.index)));
        }
        let cdiff = |x: num_complex::Complex64, y: num_complex::Complex64| (x - y).norm();
        let entries = [
            ("psi_plus", distance(&ta.psi_plus, &tb.psi_plus, dz, norm, cdiff)),
            ("psi_minus", distance(&ta.psi_minus, &tb.psi_minus, dz, norm, cdiff)),
            (
                "energy_density",
                distance(&ta.energy_density, &tb.energy_density, dz, norm, |x: f64, y: f64| (x - y).abs()),
            ),
        ];
        for (field, d) in entries {
            rows.push(CompareRow {
                index: sa.index,
                t: sa.t,
                field,
                distance: d,
            });
        }
    }
    let max = rows.iter().map(|r| r.distance).fold(0.0, f64::max);
    Ok(CompareReport { norm, rows, max })
}

//! Norms, peaks and moments of gridded profiles.

use serde::Serialize;

use crate::field::PolaritonField;
use crate::model::{GridSpec, ScheduleSample};
use crate::numerics::trapezoid;

/// Local maxima below this fraction of the global maximum are ignored.
pub const DEFAULT_PEAK_THRESHOLD: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Peak {
    pub z: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Observables {
    /// `∫(|Ψ⁺|² + |Ψ⁻|²) dz`.
    pub norm: f64,
    /// `cos²θ (|Ψ⁺|² + |Ψ⁻|²)` per cell.
    pub energy_density: Vec<f64>,
    /// Maxima of `|Ψ⁺|² + |Ψ⁻|²`.
    pub peaks: Vec<Peak>,
    /// `None` for an all-zero field.
    pub centroid: Option<f64>,
}

pub fn observables(field: &PolaritonField, sample: &ScheduleSample) -> Observables {
    let density = field.density();
    let grid = &field.grid;
    Observables {
        norm: trapezoid(&density, grid.dz()),
        energy_density: density.iter().map(|d| sample.cos2_theta * d).collect(),
        peaks: find_peaks(&density, grid, DEFAULT_PEAK_THRESHOLD),
        centroid: centroid(&density, grid),
    }
}

/// Interior local maxima, refined by a parabola through three nodes.
pub fn find_peaks(profile: &[f64], grid: &GridSpec, rel_threshold: f64) -> Vec<Peak> {
    let max = profile.iter().cloned().fold(0.0, f64::max);
    if !(max > 0.0) {
        return Vec::new();
    }
    let floor = rel_threshold * max;
    let dz = grid.dz();
    let mut peaks = Vec::new();
    for i in 1..profile.len().saturating_sub(1) {
        let (l, c, r) = (profile[i - 1], profile[i], profile[i + 1]);
        if c < floor || !(c > l && c >= r) {
            continue;
        }
        let curvature = l - 2.0 * c + r;
        let (offset, value) = if curvature < 0.0 {
            let off = 0.5 * (l - r) / curvature;
            (off, c - 0.25 * (l - r) * off)
        } else {
            (0.0, c)
        };
        peaks.push(Peak {
            z: grid.z(i) + offset * dz,
            value,
        });
    }
    peaks
}

/// `∫z ρ dz / ∫ρ dz`.
pub fn centroid(profile: &[f64], grid: &GridSpec) -> Option<f64> {
    moments(profile, grid).map(|(mean, _)| mean)
}

/// Mean and variance of a non-negative profile treated as a distribution.
pub fn moments(profile: &[f64], grid: &GridSpec) -> Option<(f64, f64)> {
    let dz = grid.dz();
    let mass = trapezoid(profile, dz);
    if !(mass > 0.0) {
        return None;
    }
    let zs = grid.positions();
    let first: Vec<f64> = profile.iter().zip(&zs).map(|(p, z)| p * z).collect();
    let mean = trapezoid(&first, dz) / mass;
    let second: Vec<f64> = profile
        .iter()
        .zip(&zs)
        .map(|(p, z)| p * (z - mean) * (z - mean))
        .collect();
    Some((mean, trapezoid(&second, dz) / mass))
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::initial_polariton;
    use crate::field::InitialPulse;
    use crate::model::{CouplingSchedule, ScheduleKind};

    #[test]
    fn gaussian_norm() {
        let grid = GridSpec::new(1024, -10.0, 10.0, 0.5).unwrap();
        let oracle = (std::f64::consts::PI / 2.0).sqrt();
        for kp2 in [0.5, 0.55, 0.8, 1.0] {
            let s = CouplingSchedule::from_kappa_plus_sq(kp2, 0.3, 1e-4, ScheduleKind::TanhSwitch).unwrap();
            let f = initial_polariton(&InitialPulse::default(), &s, &grid).unwrap();
            let obs = observables(&f, &s.eval(0.0).unwrap());
            assert!((obs.norm - oracle).abs() < 1e-6, "norm {}", obs.norm);
            assert_eq!(obs.peaks.len(), 1);
            assert!(obs.peaks[0].z.abs() < grid.dz());
            assert!(obs.centroid.unwrap().abs() < 1e-12);
            assert!(obs.energy_density.iter().all(|&e| e == 0.0));
        }
    }

    #[test]
    fn zero_field_has_no_peaks() {
        let grid = GridSpec::new(64, -1.0, 1.0, 0.5).unwrap();
        let f = PolaritonField::zeros(grid, 0.0);
        let s = CouplingSchedule::standing_wave(1e-4, ScheduleKind::Constant).unwrap();
        let obs = observables(&f, &s.eval(0.0).unwrap());
        assert_eq!(obs.norm, 0.0);
        assert!(obs.peaks.is_empty());
        assert!(obs.centroid.is_none());
    }

    #[test]
    fn parabolic_refinement_locates_off_grid_peak() {
        let grid = GridSpec::new(201, -2.0, 2.0, 0.5).unwrap();
        let profile: Vec<f64> = grid.positions().iter().map(|z| (-(z - 0.013) * (z - 0.013) * 4.0).exp()).collect();
        let peaks = find_peaks(&profile, &grid, 1e-3);
        assert_eq!(peaks.len(), 1);
        assert!((peaks[0].z - 0.013).abs() < 1e-4);
    }

    #[test]
    fn slope_of_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        assert!((fit_slope(&x, &y) - 2.0).abs() < 1e-14);
    }
}

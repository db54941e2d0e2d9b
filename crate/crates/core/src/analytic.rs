//! Closed-form retrieval dynamics for constant coupling ratios.
//!
//! After switch-on the polariton components evolve as
//!
//! ```text
//! Ψ⁺(z,t) = κ⁺/2 [(1 + β/|κ⁺|²) Ψ(z − βr, 0) + (1 − β/|κ⁺|²) Ψ(z + βr, 0)] e^{−Γ_bc t}
//! Ψ⁻(z,t) = κ⁻/2 [Ψ(z − βr, 0) + Ψ(z + βr, 0)] e^{−Γ_bc t}
//! ```
//!
//! with `r = r(t)` the retardation of the schedule. A standing wave
//! (`β = 0`) leaves both components frozen apart from ground-state decay.
//!
//! The Raman coherence follows from the adiabatic dark-state relation
//!
//! ```text
//! √N σ_bc = −sinθ (Ψ⁺ e^{ikz} + Ψ⁻ e^{−ikz}) / (κ⁺ e^{ikz} + κ⁻ e^{−ikz})
//! ```
//!
//! which for `|κ⁻| < |κ⁺|` is a geometric series in `e^{−2ikz}` with ratio
//! `−κ⁻/κ⁺`. Harmonics are indexed by `n` and the optical phase `kz` is
//! only needed when a series is evaluated pointwise.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{InitialPulse, PolaritonField};
use crate::model::{CouplingSchedule, GridSpec, MediumParams};

/// `|κ⁻/κ⁺|` above this is treated as an exact standing wave.
const STANDING_WAVE_TOL: f64 = 1e-12;

/// `Ψ±(z, 0) = κ± Ψ(z, 0)`.
pub fn initial_polariton(pulse: &InitialPulse, sched: &CouplingSchedule, grid: &GridSpec) -> Result<PolaritonField> {
    if !grid.contains(pulse.center) {
        return Err(Error::Domain(format!(
            "pulse center {} lies outside the grid [{}, {}]",
            pulse.center, grid.z_min, grid.z_max
        )));
    }
    let (kp, km) = sched.kappa_at(0.0);
    let base = pulse.sample(grid);
    Ok(PolaritonField {
        grid: *grid,
        psi_plus: base.iter().map(|v| kp * v).collect(),
        psi_minus: base.iter().map(|v| km * v).collect(),
        t: 0.0,
    })
}

/// Closed-form polariton field at time `t`.
pub fn evolve_closed_form(
    pulse: &InitialPulse,
    sched: &CouplingSchedule,
    medium: &MediumParams,
    grid: &GridSpec,
    t: f64,
) -> Result<PolaritonField> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("closed form requires t ≥ 0, got {t}")));
    }
    if !sched.has_constant_kappa() {
        return Err(Error::UnsupportedOracle(
            "time-dependent coupling ratios have no closed-form solution".into(),
        ));
    }
    if !grid.contains(pulse.center) {
        return Err(Error::Domain(format!(
            "pulse center {} lies outside the grid",
            pulse.center
        )));
    }
    let kp = sched.kappa_plus();
    let km = sched.kappa_minus();
    let kp2 = kp.norm_sqr();
    let beta = sched.beta();
    let shift = beta * sched.retardation(t)?;
    let decay = (-medium.gamma_bc_complex() * t).exp();
    let ratio = beta / kp2;
    let fwd_coeff = kp * 0.5 * (1.0 + ratio) * decay;
    let bwd_coeff = kp * 0.5 * (1.0 - ratio) * decay;
    let minus_coeff = km * 0.5 * decay;

    let mut psi_plus = Vec::with_capacity(grid.n_z);
    let mut psi_minus = Vec::with_capacity(grid.n_z);
    for i in 0..grid.n_z {
        let z = grid.z(i);
        let ahead = pulse.eval(z - shift);
        let behind = pulse.eval(z + shift);
        psi_plus.push(fwd_coeff * ahead + bwd_coeff * behind);
        psi_minus.push(minus_coeff * (ahead + behind));
    }
    Ok(PolaritonField {
        grid: *grid,
        psi_plus,
        psi_minus,
        t,
    })
}

/// Spatial harmonics of the scaled Raman coherence `√N σ_bc`.
///
/// `coefficients[n][i]` multiplies `e^{−2inkz}` in cell `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct RamanSeries {
    pub coefficients: Vec<Vec<Complex64>>,
    /// Geometric ratio `−κ⁻/κ⁺` between consecutive harmonics `n ≥ 1`.
    pub ratio: Complex64,
    /// True when the standing-wave closed form (dc term only) was used.
    pub dc_only: bool,
}

impl RamanSeries {
    /// `Σ_n c_n e^{−2in·phase}` in one cell.
    pub fn evaluate(&self, cell: usize, phase: f64) -> Complex64 {
        let step = Complex64::from_polar(1.0, -2.0 * phase);
        let mut basis = Complex64::new(1.0, 0.0);
        let mut sum = Complex64::new(0.0, 0.0);
        for c in &self.coefficients {
            sum += c[cell] * basis;
            basis *= step;
        }
        sum
    }
}

/// Harmonic decomposition of the Raman coherence for the given field.
pub fn raman_series(field: &PolaritonField, sched: &CouplingSchedule, n_terms: usize) -> Result<RamanSeries> {
    if n_terms < 1 {
        return Err(Error::Domain("raman_series needs at least one term".into()));
    }
    let sin_theta = sched.eval(field.t)?.sin_theta();
    let (kp, km) = sched.kappa_at(field.t);
    let q = km / kp;
    let n = field.grid.n_z;
    let mut coefficients = vec![vec![Complex64::new(0.0, 0.0); n]; n_terms];

    if q.norm() >= 1.0 - STANDING_WAVE_TOL {
        for i in 0..n {
            let mean = (field.psi_plus[i] / kp + field.psi_minus[i] / km) * 0.5;
            coefficients[0][i] = -sin_theta * mean;
        }
        return Ok(RamanSeries {
            coefficients,
            ratio: -q,
            dc_only: true,
        });
    }

    // c₀ = −sinθ Ψ⁺/κ⁺,  c_n = −sinθ (−q)^{n−1} (Ψ⁻ − qΨ⁺)/κ⁺
    for i in 0..n {
        let plus = field.psi_plus[i] / kp;
        coefficients[0][i] = -sin_theta * plus;
        let mut tail = -sin_theta * (field.psi_minus[i] / kp - q * plus);
        for c in coefficients.iter_mut().skip(1) {
            c[i] = tail;
            tail *= -q;
        }
    }
    Ok(RamanSeries {
        coefficients,
        ratio: -q,
        dc_only: false,
    })
}

/// Pointwise dark-state Raman coherence at optical phase `kz`.
///
/// Singular at coupling-field nodes of an exact standing wave.
pub fn raman_pointwise(
    psi_plus: Complex64,
    psi_minus: Complex64,
    kappa_plus: Complex64,
    kappa_minus: Complex64,
    sin_theta: f64,
    phase: f64,
) -> Complex64 {
    let fwd = Complex64::from_polar(1.0, phase);
    let bwd = fwd.conj();
    -sin_theta * (psi_plus * fwd + psi_minus * bwd) / (kappa_plus * fwd + kappa_minus * bwd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ScheduleKind;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn grid() -> GridSpec {
        GridSpec::new(1024, -10.0, 10.0, 0.5).unwrap()
    }

    fn sched(kp2: f64, phi: f64) -> CouplingSchedule {
        CouplingSchedule::from_kappa_plus_sq(kp2, phi, 1e-4, ScheduleKind::TanhSwitch).unwrap()
    }

    fn pulse() -> InitialPulse {
        InitialPulse::default()
    }

    fn nearest(grid: &GridSpec, z: f64) -> usize {
        ((z - grid.z_min) / grid.dz()).round() as usize
    }

    #[test]
    fn initial_condition_components() {
        let s = sched(0.55, 0.3);
        // odd n_z puts a node exactly on the pulse center
        let g = GridSpec::new(1001, -10.0, 10.0, 0.5).unwrap();
        let f = initial_polariton(&pulse(), &s, &g).unwrap();
        let c = 500;
        assert!((f.psi_plus[c] - s.kappa_plus()).norm() < 1e-15);
        assert!((f.psi_minus[c] - s.kappa_minus()).norm() < 1e-15);
        let one_lp = 550;
        assert!((g.z(one_lp) - 1.0).abs() < 1e-12);
        assert!((f.psi_plus[one_lp].norm() - 0.55f64.sqrt() * (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn standing_wave_initial_split() {
        let g = grid();
        let s = sched(0.5, 0.0);
        let f = initial_polariton(&pulse(), &s, &g).unwrap();
        for i in 0..g.n_z {
            let base = pulse().eval(g.z(i)) * FRAC_1_SQRT_2;
            assert!((f.psi_plus[i] - base).norm() < 1e-15);
            assert!((f.psi_minus[i] - base).norm() < 1e-15);
        }
    }

    #[test]
    fn pulse_outside_grid_rejected() {
        let p = InitialPulse::gaussian(Complex64::new(1.0, 0.0), 1.0, 20.0).unwrap();
        assert!(matches!(initial_polariton(&p, &sched(0.5, 0.0), &grid()), Err(Error::Domain(_))));
    }

    #[test]
    fn closed_form_at_zero_is_initial() {
        let g = grid();
        let s = sched(0.55, 0.4);
        let m = MediumParams::default();
        let a = evolve_closed_form(&pulse(), &s, &m, &g, 0.0).unwrap();
        let b = initial_polariton(&pulse(), &s, &g).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-15);
    }

    #[test]
    fn standing_wave_is_frozen() {
        let g = grid();
        let s = sched(0.5, 0.0);
        let m = MediumParams::default();
        let init = initial_polariton(&pulse(), &s, &g).unwrap();
        for t in [0.5, 3.0, 25.0] {
            let f = evolve_closed_form(&pulse(), &s, &m, &g, t).unwrap();
            assert!(f.max_abs_diff(&init) < 1e-15);
        }
    }

    #[test]
    fn split_peak_amplitudes() {
        // constant schedule so that r(t) = t; choose βr = 5
        let s = CouplingSchedule::from_kappa_plus_sq(0.55, 0.0, 1e-4, ScheduleKind::Constant).unwrap();
        let beta = s.beta();
        let t = 5.0 / beta;
        let g = GridSpec::new(2001, -10.0, 10.0, 0.5).unwrap();
        let f = evolve_closed_form(&pulse(), &s, &MediumParams::default(), &g, t).unwrap();
        let right = nearest(&g, 5.0);
        let left = nearest(&g, -5.0);
        // reference values from 40-digit arithmetic
        assert!((f.psi_plus[right].norm() - 0.528_923_807_363_202_1).abs() < 1e-9);
        assert!((f.psi_plus[left].norm() - 0.212_696_041_346_364_18).abs() < 1e-9);
        assert!((f.psi_minus[right].norm() - 0.335_410_196_624_968_45).abs() < 1e-9);
        assert!((f.psi_minus[left].norm() - 0.335_410_196_624_968_45).abs() < 1e-9);
    }

    #[test]
    fn decay_envelope() {
        let g = grid();
        let s = sched(0.5, 0.0);
        let m = MediumParams::new(100.0, 0.3, 0.0, 0.2, 0.1, 20.0).unwrap();
        let init = initial_polariton(&pulse(), &s, &g).unwrap();
        let f = evolve_closed_form(&pulse(), &s, &m, &g, 2.0).unwrap();
        let factor = (-m.gamma_bc_complex() * 2.0).exp();
        for i in 0..g.n_z {
            assert!((f.psi_plus[i] - init.psi_plus[i] * factor).norm() < 1e-15);
        }
    }

    #[test]
    fn tabulated_kappa_has_no_closed_form() {
        use crate::model::ScheduleTable;
        let table = ScheduleTable::new(vec![0.0, 1.0], vec![0.0, 1e-4], Some(vec![0.5, 0.6])).unwrap();
        let s = CouplingSchedule::from_kappa_plus_sq(0.5, 0.0, 1e-4, ScheduleKind::Tabulated(table)).unwrap();
        let r = evolve_closed_form(&pulse(), &s, &MediumParams::default(), &grid(), 1.0);
        assert!(matches!(r, Err(Error::UnsupportedOracle(_))));
    }

    /// Fourth-order central differences of the closed form in z and t.
    fn pde_residual(kp2: f64, phi: f64, gamma_bc: f64, delta: f64, t: f64) -> f64 {
        let g = GridSpec::new(4097, -10.0, 10.0, 0.5).unwrap();
        let s = sched(kp2, phi);
        let m = MediumParams::new(100.0, gamma_bc, 0.0, delta, 0.1, 20.0).unwrap();
        let ht = 1e-3;
        let at = |tt: f64| evolve_closed_form(&pulse(), &s, &m, &g, tt).unwrap();
        let fs = [at(t - 2.0 * ht), at(t - ht), at(t + ht), at(t + 2.0 * ht)];
        let f0 = at(t);
        let dt = |sel: fn(&PolaritonField) -> &Vec<Complex64>, i: usize| {
            (sel(&fs[0])[i] - sel(&fs[1])[i] * 8.0 + sel(&fs[2])[i] * 8.0 - sel(&fs[3])[i]) / (12.0 * ht)
        };
        let h = g.dz();
        let dz = |v: &Vec<Complex64>, i: usize| (v[i - 2] - v[i - 1] * 8.0 + v[i + 1] * 8.0 - v[i + 2]) / (12.0 * h);
        let kp = s.kappa_plus();
        let km = s.kappa_minus();
        let a = kp.norm_sqr();
        let b = kp * km.conj();
        let v = s.eval(t).unwrap().v_g;
        let gam = m.gamma_bc_complex();
        let mut worst: f64 = 0.0;
        for i in 2..g.n_z - 2 {
            let r_plus = dt(|f| &f.psi_plus, i) + gam * f0.psi_plus[i] + a * v * dz(&f0.psi_plus, i)
                - b * v * dz(&f0.psi_minus, i);
            let r_minus = dt(|f| &f.psi_minus, i) + gam * f0.psi_minus[i] - a * v * dz(&f0.psi_minus, i)
                + b.conj() * v * dz(&f0.psi_plus, i);
            worst = worst.max(r_plus.norm()).max(r_minus.norm());
        }
        worst
    }

    #[test]
    fn closed_form_solves_coupled_equations() {
        for (kp2, phi, gbc, delta, t) in [
            (0.55, 0.0, 0.0, 0.0, 3.0),
            (0.7, 1.1, 0.2, 0.5, 2.0),
            (0.5, 0.0, 0.0, 0.0, 1.5),
            (1.0, 0.0, 0.1, 0.0, 4.0),
        ] {
            let r = pde_residual(kp2, phi, gbc, delta, t);
            assert!(r < 1e-6, "residual {r} for |κ⁺|²={kp2}");
        }
    }

    #[test]
    fn late_time_norm_fraction() {
        let g = GridSpec::new(2048, -12.0, 12.0, 0.5).unwrap();
        let s = sched(0.55, 0.0);
        let m = MediumParams::default();
        let norm = |f: &PolaritonField| crate::numerics::trapezoid(&f.density(), g.dz());
        let n0 = norm(&initial_polariton(&pulse(), &s, &g).unwrap());
        // βr ≥ 2.5 gives a 5 L_p separation
        let mut t = 0.0;
        while s.beta() * s.retardation(t).unwrap() < 2.5 {
            t += 0.5;
        }
        let ratio = norm(&evolve_closed_form(&pulse(), &s, &m, &g, t).unwrap()) / n0;
        assert!((ratio - 0.55).abs() < 1e-3, "ratio {ratio}");
    }

    #[test]
    fn reflection_swaps_split_coefficients() {
        // Reflecting about z₀ maps the forward-moving copy onto the backward
        // one: Ψ⁻ is even and Ψ⁺ exchanges its two weights.
        let g = GridSpec::new(2001, -10.0, 10.0, 0.5).unwrap();
        let s = sched(0.55, 0.0);
        let m = MediumParams::default();
        let f = evolve_closed_form(&pulse(), &s, &m, &g, 8.0).unwrap();
        let kp = s.kappa_plus();
        let ratio = s.beta() / kp.norm_sqr();
        let shift = s.beta() * s.retardation(8.0).unwrap();
        for i in 0..g.n_z {
            let j = g.n_z - 1 - i;
            assert!((f.psi_minus[i] - f.psi_minus[j]).norm() < 1e-14);
            let z = g.z(i);
            let swapped = kp * 0.5
                * ((1.0 - ratio) * pulse().eval(z - shift) + (1.0 + ratio) * pulse().eval(z + shift));
            assert!((f.psi_plus[j] - swapped).norm() < 1e-12);
        }
    }

    #[test]
    fn standing_wave_series_is_dc() {
        let g = grid();
        let s = sched(0.5, 0.0);
        let f = evolve_closed_form(&pulse(), &s, &MediumParams::default(), &g, 2.0).unwrap();
        let series = raman_series(&f, &s, 6).unwrap();
        assert!(series.dc_only);
        let sin_theta = s.eval(2.0).unwrap().sin_theta();
        for i in 0..g.n_z {
            assert!((series.coefficients[0][i] + sin_theta * pulse().eval(g.z(i))).norm() < 1e-15);
            for n in 1..6 {
                assert_eq!(series.coefficients[n][i], Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn series_needs_a_term() {
        let g = grid();
        let s = sched(0.55, 0.0);
        let f = initial_polariton(&pulse(), &s, &g).unwrap();
        assert!(matches!(raman_series(&f, &s, 0), Err(Error::Domain(_))));
    }

    /// Fourier coefficient of e^{−2in·phase} by direct sampling of the
    /// pointwise expression over one period.
    fn brute_force_harmonic(
        psi_plus: Complex64,
        psi_minus: Complex64,
        s: &CouplingSchedule,
        sin_theta: f64,
        n: usize,
    ) -> Complex64 {
        let samples = 4096;
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..samples {
            let phase = PI * (j as f64 + 0.5) / samples as f64;
            let v = raman_pointwise(psi_plus, psi_minus, s.kappa_plus(), s.kappa_minus(), sin_theta, phase);
            acc += v * Complex64::from_polar(1.0, 2.0 * n as f64 * phase);
        }
        acc / samples as f64
    }

    #[test]
    fn series_ratio_matches_brute_force() {
        let g = GridSpec::new(2001, -10.0, 10.0, 0.5).unwrap();
        let s = sched(0.55, 0.0);
        let t = 6.0;
        let f = evolve_closed_form(&pulse(), &s, &MediumParams::default(), &g, t).unwrap();
        let series = raman_series(&f, &s, 8).unwrap();
        let sin_theta = s.eval(t).unwrap().sin_theta();
        let cell = nearest(&g, s.beta() * s.retardation(t).unwrap());
        for n in 1..6 {
            let ratio = (series.coefficients[n + 1][cell] / series.coefficients[n][cell]).norm();
            assert!((ratio - 0.904_534_033_733_290_9).abs() < 1e-12);
            let bf = brute_force_harmonic(f.psi_plus[cell], f.psi_minus[cell], &s, sin_theta, n);
            assert!((bf - series.coefficients[n][cell]).norm() < 1e-10);
        }
    }

    #[test]
    fn traveling_wave_series_single_term() {
        let g = grid();
        let s = sched(1.0, 0.0);
        let t = 3.0;
        let f = evolve_closed_form(&pulse(), &s, &MediumParams::default(), &g, t).unwrap();
        let series = raman_series(&f, &s, 4).unwrap();
        let sin_theta = s.eval(t).unwrap().sin_theta();
        let r = s.retardation(t).unwrap();
        for i in 0..g.n_z {
            let expect = -sin_theta * pulse().eval(g.z(i) - r);
            assert!((series.coefficients[0][i] - expect).norm() < 1e-14);
            let direct = raman_pointwise(f.psi_plus[i], f.psi_minus[i], s.kappa_plus(), s.kappa_minus(), sin_theta, 0.37);
            assert!((direct - expect).norm() < 1e-14);
            for n in 1..4 {
                assert_eq!(series.coefficients[n][i], Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn series_reconstruction_matches_pointwise() {
        let g = GridSpec::new(401, -10.0, 10.0, 0.5).unwrap();
        // |κ⁻/κ⁺| ≤ 0.5: 32 terms leave a tail below 1e-9
        for (kp2, phi) in [(0.8, 0.0), (0.9, 0.6), (1.0, 0.0)] {
            let s = sched(kp2, phi);
            let t = 4.0;
            let f = evolve_closed_form(&pulse(), &s, &MediumParams::default(), &g, t).unwrap();
            let series = raman_series(&f, &s, 32).unwrap();
            let sin_theta = s.eval(t).unwrap().sin_theta();
            for i in (0..g.n_z).step_by(7) {
                for phase in [0.1, 0.9, 2.3] {
                    let direct = raman_pointwise(f.psi_plus[i], f.psi_minus[i], s.kappa_plus(), s.kappa_minus(), sin_theta, phase);
                    assert!((series.evaluate(i, phase) - direct).norm() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn series_truncation_error_is_geometric_tail() {
        // up to |κ⁻/κ⁺| = 0.95 the 32-term truncation error equals the
        // neglected geometric tail
        let g = GridSpec::new(201, -10.0, 10.0, 0.5).unwrap();
        let kp2 = 1.0 / (1.0 + 0.95f64 * 0.95);
        let s = sched(kp2, 0.0);
        let t = 6.0;
        let f = evolve_closed_form(&pulse(), &s, &MediumParams::default(), &g, t).unwrap();
        let series = raman_series(&f, &s, 32).unwrap();
        let long = raman_series(&f, &s, 1200).unwrap();
        let sin_theta = s.eval(t).unwrap().sin_theta();
        for i in (0..g.n_z).step_by(5) {
            let phase = 0.4;
            let direct = raman_pointwise(f.psi_plus[i], f.psi_minus[i], s.kappa_plus(), s.kappa_minus(), sin_theta, phase);
            assert!((long.evaluate(i, phase) - direct).norm() < 1e-8);
            let c1 = series.coefficients[1][i].norm();
            let q = series.ratio.norm();
            let tail_bound = c1 * q.powi(31) / (1.0 - q);
            assert!((series.evaluate(i, phase) - direct).norm() <= tail_bound + 1e-12);
        }
    }
}

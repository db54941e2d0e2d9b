//! Numerical integration of the coupled polariton wave equations
//!
//! ```text
//! (Γ_bc + ∂t) Ψ⁺ + |κ⁺|² v_g ∂z Ψ⁺ =  κ⁺κ⁻* v_g ∂z Ψ⁻
//! (Γ_bc + ∂t) Ψ⁻ − |κ⁺|² v_g ∂z Ψ⁻ = −κ⁺*κ⁻ v_g ∂z Ψ⁺
//! ```
//!
//! Note the right-hand side of the second equation couples to `Ψ⁺`. This is
//! the form satisfied by the closed-form split-pulse solution; the variant
//! with `∂z Ψ⁻` on both sides has no such solution.
//!
//! Writing `Ψ = (Ψ⁺, Ψ⁻)` the system reads `∂tΨ + v_g(t) A ∂zΨ = −Γ_bc Ψ` with
//! a constant matrix `A = [[a, −b], [b*, −a]]`, `a = |κ⁺|²`, `b = κ⁺κ⁻*`.
//! `A² = β² I`, so the characteristic variables `w± = (Ψ ± AΨ/β)/2` are
//! transported rigidly with speeds `±β v_g(t)`. Over a step the transport
//! distance is `β Δr` with `Δr` the exact retardation increment, so the time
//! integration is exact and only the spatial interpolation of the shifted
//! profiles introduces error. For `β = 0` the matrix is nilpotent and the
//! exact propagator is `I − Δr A ∂z`.

use std::collections::VecDeque;

use num_complex::Complex64;

use crate::analytic::{initial_polariton, raman_series, RamanSeries};
use crate::error::{Error, Result};
use crate::field::{InitialPulse, PolaritonField};
use crate::model::{beta_of, CouplingSchedule, GridSpec, MediumParams};
use crate::numerics::{derivative, shift_profile, trapezoid, Interpolation};
use crate::observables::{observables, Observables};

/// Below this splitting factor the nilpotent propagator is used.
const BETA_FLOOR: f64 = 1e-6;

/// Boundary mass (relative to the initial norm) that triggers a warning.
const LEAKAGE_WARN: f64 = 1e-6;

/// Samples per optical period for the σ_ba projection.
const PHASE_SAMPLES: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Scheme {
    /// Semi-Lagrangian shift with four-point cubic interpolation.
    #[default]
    SemiLagrangianCubic,
    /// First-order upwind (linear interpolation), for cross-validation.
    Upwind,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::SemiLagrangianCubic => "semi-lagrangian-cubic",
            Scheme::Upwind => "upwind-1",
        }
    }

    fn interpolation(&self) -> Interpolation {
        match self {
            Scheme::SemiLagrangianCubic => Interpolation::Cubic,
            Scheme::Upwind => Interpolation::Linear,
        }
    }
}

#[derive(Clone, Debug)]
struct HistoryEntry {
    t: f64,
    psi_plus: Vec<Complex64>,
    psi_minus: Vec<Complex64>,
}

#[derive(Clone, Debug)]
pub struct AdiabaticState {
    pub field: PolaritonField,
    pub sched: CouplingSchedule,
    pub medium: MediumParams,
    pub t: f64,
    pub step_count: usize,
    pub scheme: Scheme,
    pub warnings: Vec<String>,
    initial_norm: f64,
    leak_warned: bool,
    history: VecDeque<HistoryEntry>,
}

pub fn init_solver(
    pulse: &InitialPulse,
    sched: &CouplingSchedule,
    medium: &MediumParams,
    grid: &GridSpec,
    scheme: Scheme,
) -> Result<AdiabaticState> {
    grid.validate()?;
    medium.validate()?;
    let field = initial_polariton(pulse, sched, grid)?;
    let mut warnings = Vec::new();
    let margin = (pulse.center - grid.z_min).min(grid.z_max - pulse.center);
    if margin < pulse.support_half_width() {
        warnings.push(format!(
            "pulse center {} is only {margin:.3} L_p from the grid boundary",
            pulse.center
        ));
    }
    let initial_norm = trapezoid(&field.density(), grid.dz());
    Ok(AdiabaticState {
        field,
        sched: sched.clone(),
        medium: medium.clone(),
        t: 0.0,
        step_count: 0,
        scheme,
        warnings,
        initial_norm,
        leak_warned: false,
        history: VecDeque::with_capacity(2),
    })
}

impl AdiabaticState {
    pub fn grid(&self) -> &GridSpec {
        &self.field.grid
    }

    /// Largest characteristic speed factor, `max(β, |κ⁺|²)`.
    fn speed_factor(&self) -> f64 {
        let kp2 = self.sched.max_kappa_plus_sq();
        kp2.max(self.sched.beta())
    }

    /// Step length obeying `speed · Δr ≤ cfl · Δz`, halving as needed.
    fn step_length(&self, remaining: f64) -> Result<f64> {
        let grid = self.grid();
        let limit = grid.cfl * grid.dz();
        let speed = self.speed_factor();
        let v_now = self.sched.eval(self.t)?.v_g;
        let mut dt = if speed * v_now > 0.0 {
            (limit / (speed * v_now)).min(remaining)
        } else {
            remaining
        };
        let r0 = self.sched.retardation(self.t)?;
        while speed * (self.sched.retardation(self.t + dt)? - r0) > limit * (1.0 + 1e-12) {
            dt *= 0.5;
        }
        Ok(dt)
    }

    /// Integrate up to `t_target`.
    pub fn advance(&mut self, t_target: f64) -> Result<()> {
        if !(t_target >= self.t) {
            return Err(Error::Domain(format!(
                "cannot advance backwards from t = {} to {t_target}",
                self.t
            )));
        }
        while self.t < t_target {
            let remaining = t_target - self.t;
            let mut dt = self.step_length(remaining)?;
            if remaining - dt < 1e-12 * t_target.max(1.0) {
                dt = remaining;
            }
            self.step(dt)?;
            if remaining == dt {
                self.t = t_target;
                self.field.t = t_target;
            }
        }
        self.check_boundary();
        Ok(())
    }

    fn step(&mut self, dt: f64) -> Result<()> {
        let t0 = self.t;
        let t1 = t0 + dt;
        let (kp, km) = self.sched.kappa_at(t0 + 0.5 * dt);
        let a = kp.norm_sqr();
        let b = kp * km.conj();
        let beta = beta_of(kp, km);
        let travel = self.sched.retardation(t1)? - self.sched.retardation(t0)?;
        let grid = *self.grid();
        let n = grid.n_z;

        let psi_p = &self.field.psi_plus;
        let psi_m = &self.field.psi_minus;
        let u_p: Vec<Complex64> = psi_p.iter().zip(psi_m).map(|(p, m)| p * a - b * m).collect();
        let u_m: Vec<Complex64> = psi_p.iter().zip(psi_m).map(|(p, m)| b.conj() * p - m * a).collect();

        let mut new_p = vec![Complex64::new(0.0, 0.0); n];
        let mut new_m = vec![Complex64::new(0.0, 0.0); n];
        if beta < BETA_FLOOR {
            let mut d = vec![Complex64::new(0.0, 0.0); n];
            derivative(&u_p, grid.dz(), &mut d);
            for i in 0..n {
                new_p[i] = psi_p[i] - d[i] * travel;
            }
            derivative(&u_m, grid.dz(), &mut d);
            for i in 0..n {
                new_m[i] = psi_m[i] - d[i] * travel;
            }
        } else {
            let cells = beta * travel / grid.dz();
            let interp = self.scheme.interpolation();
            let inv = 0.5 / beta;
            let mut shifted = vec![Complex64::new(0.0, 0.0); n];
            for (psi, u, out) in [(psi_p, &u_p, &mut new_p), (psi_m, &u_m, &mut new_m)] {
                let fwd: Vec<Complex64> = psi.iter().zip(u).map(|(p, q)| p * 0.5 + q * inv).collect();
                let bwd: Vec<Complex64> = psi.iter().zip(u).map(|(p, q)| p * 0.5 - q * inv).collect();
                shift_profile(&fwd, cells, interp, &mut shifted);
                out.copy_from_slice(&shifted);
                shift_profile(&bwd, -cells, interp, &mut shifted);
                for (o, s) in out.iter_mut().zip(&shifted) {
                    *o += s;
                }
            }
        }

        let decay = (-self.medium.gamma_bc_complex() * dt).exp();
        if decay != Complex64::new(1.0, 0.0) {
            for v in new_p.iter_mut().chain(new_m.iter_mut()) {
                *v *= decay;
            }
        }

        if self.history.len() == 2 {
            self.history.pop_back();
        }
        let old_p = std::mem::replace(&mut self.field.psi_plus, new_p);
        let old_m = std::mem::replace(&mut self.field.psi_minus, new_m);
        self.history.push_front(HistoryEntry {
            t: t0,
            psi_plus: old_p,
            psi_minus: old_m,
        });
        self.t = t1;
        self.field.t = t1;
        self.step_count += 1;
        if let Some(i) = self.field.first_non_finite() {
            return Err(Error::NumericBlowup {
                step: self.step_count,
                detail: format!("non-finite polariton amplitude in cell {i} at t = {t1}"),
            });
        }
        Ok(())
    }

    /// Fraction of the initial norm sitting within one pulse length of
    /// either boundary.
    pub fn boundary_mass(&self) -> f64 {
        let grid = self.grid();
        let edge = ((1.0 / grid.dz()).ceil() as usize).min(grid.n_z / 2);
        let density = self.field.density();
        let dz = grid.dz();
        let left = trapezoid(&density[..edge], dz);
        let right = trapezoid(&density[grid.n_z - edge..], dz);
        if self.initial_norm > 0.0 {
            (left + right) / self.initial_norm
        } else {
            0.0
        }
    }

    fn check_boundary(&mut self) {
        let leak = self.boundary_mass();
        if leak > LEAKAGE_WARN && !self.leak_warned {
            self.leak_warned = true;
            self.warnings.push(format!(
                "boundary leakage {leak:.3e} of the initial norm at t = {:.4}",
                self.t
            ));
        }
    }

    pub fn observables(&self) -> Result<Observables> {
        Ok(observables(&self.field, &self.sched.eval(self.t)?))
    }

    /// `∂t (sinθ Ψ±)` at the current time.
    fn time_derivative(&self) -> Result<(Vec<Complex64>, Vec<Complex64>, DerivativeSource)> {
        let sin_now = self.sched.eval(self.t)?.sin_theta();
        let n = self.grid().n_z;
        let scaled = |entry_t: f64, v: &[Complex64]| -> Result<Vec<Complex64>> {
            let s = self.sched.eval(entry_t)?.sin_theta();
            Ok(v.iter().map(|x| x * s).collect())
        };
        let y0p: Vec<Complex64> = self.field.psi_plus.iter().map(|x| x * sin_now).collect();
        let y0m: Vec<Complex64> = self.field.psi_minus.iter().map(|x| x * sin_now).collect();
        match self.history.len() {
            2 => {
                let (e1, e2) = (&self.history[0], &self.history[1]);
                let h1 = self.t - e1.t;
                let h2 = e1.t - e2.t;
                let c0 = 1.0 / h1 + 1.0 / (h1 + h2);
                let c1 = -(h1 + h2) / (h1 * h2);
                let c2 = h1 / (h2 * (h1 + h2));
                let (y1p, y1m) = (scaled(e1.t, &e1.psi_plus)?, scaled(e1.t, &e1.psi_minus)?);
                let (y2p, y2m) = (scaled(e2.t, &e2.psi_plus)?, scaled(e2.t, &e2.psi_minus)?);
                let dp = (0..n).map(|i| y0p[i] * c0 + y1p[i] * c1 + y2p[i] * c2).collect();
                let dm = (0..n).map(|i| y0m[i] * c0 + y1m[i] * c1 + y2m[i] * c2).collect();
                Ok((dp, dm, DerivativeSource::BackwardSecondOrder))
            }
            1 => {
                let e1 = &self.history[0];
                let h = self.t - e1.t;
                let (y1p, y1m) = (scaled(e1.t, &e1.psi_plus)?, scaled(e1.t, &e1.psi_minus)?);
                let dp = (0..n).map(|i| (y0p[i] - y1p[i]) / h).collect();
                let dm = (0..n).map(|i| (y0m[i] - y1m[i]) / h).collect();
                Ok((dp, dm, DerivativeSource::BackwardFirstOrder))
            }
            _ => {
                // no history yet: use the equations of motion
                let (dpsi_p, dpsi_m) = self.rate_of_change()?;
                let h = 1e-6;
                let s_hi = self.sched.eval(self.t + h)?.sin_theta();
                let dsin = if self.t >= h {
                    (s_hi - self.sched.eval(self.t - h)?.sin_theta()) / (2.0 * h)
                } else {
                    (s_hi - sin_now) / h
                };
                let dp = (0..n).map(|i| self.field.psi_plus[i] * dsin + dpsi_p[i] * sin_now).collect();
                let dm = (0..n).map(|i| self.field.psi_minus[i] * dsin + dpsi_m[i] * sin_now).collect();
                Ok((dp, dm, DerivativeSource::EquationOfMotion))
            }
        }
    }

    /// Right-hand side `−v_g A ∂zΨ − Γ_bc Ψ`.
    pub fn rate_of_change(&self) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        let (kp, km) = self.sched.kappa_at(self.t);
        let a = kp.norm_sqr();
        let b = kp * km.conj();
        let v = self.sched.eval(self.t)?.v_g;
        let gamma = self.medium.gamma_bc_complex();
        let grid = self.grid();
        let n = grid.n_z;
        let mut dp = vec![Complex64::new(0.0, 0.0); n];
        let mut dm = vec![Complex64::new(0.0, 0.0); n];
        derivative(&self.field.psi_plus, grid.dz(), &mut dp);
        derivative(&self.field.psi_minus, grid.dz(), &mut dm);
        let plus = (0..n)
            .map(|i| -(dp[i] * a - b * dm[i]) * v - gamma * self.field.psi_plus[i])
            .collect();
        let minus = (0..n)
            .map(|i| -(b.conj() * dp[i] - dm[i] * a) * v - gamma * self.field.psi_minus[i])
            .collect();
        Ok((plus, minus))
    }

    /// Probe fields, Raman harmonics and optical coherences implied by the
    /// current polariton field.
    pub fn reconstruct_fields(&self, raman_terms: usize) -> Result<ReconstructedFields> {
        let sample = self.sched.eval(self.t)?;
        let cos_theta = sample.cos_theta();
        let e_plus: Vec<Complex64> = self.field.psi_plus.iter().map(|p| p * cos_theta).collect();
        let e_minus: Vec<Complex64> = self.field.psi_minus.iter().map(|m| m * cos_theta).collect();
        let energy_density = e_plus
            .iter()
            .zip(&e_minus)
            .map(|(p, m)| p.norm_sqr() + m.norm_sqr())
            .collect();
        let sigma_bc = raman_series(&self.field, &self.sched, raman_terms)?;

        let (dp, dm, derivative_source) = self.time_derivative()?;
        let coupling = self.medium.coupling_strength_sq(self.sched.light_speed()).sqrt();
        let omega = coupling * cos_theta / sample.sin_theta();
        let sigma_ba = if omega > 0.0 {
            let (kp, km) = self.sched.kappa_at(self.t);
            let j = inverse_intensity_harmonics(kp, km);
            let gamma = self.medium.gamma_bc_complex();
            let s = sample.sin_theta();
            let denom = Complex64::new(0.0, omega);
            let n = self.grid().n_z;
            let mut plus = Vec::with_capacity(n);
            let mut minus = Vec::with_capacity(n);
            for i in 0..n {
                let src_p = gamma * self.field.psi_plus[i] * s + dp[i];
                let src_m = gamma * self.field.psi_minus[i] * s + dm[i];
                plus.push(-(src_p * j.zero + src_m * j.minus_two) / denom);
                minus.push(-(src_p * j.plus_two + src_m * j.zero) / denom);
            }
            Some(OpticalCoherence { plus, minus })
        } else {
            None
        };

        Ok(ReconstructedFields {
            e_plus,
            e_minus,
            energy_density,
            sigma_bc,
            sigma_ba,
            derivative_source,
        })
    }
}

/// How `∂t` entering the optical coherence was estimated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivativeSource {
    BackwardSecondOrder,
    /// Only one previous step was available.
    BackwardFirstOrder,
    /// No step taken yet; derived from the equations of motion.
    EquationOfMotion,
}

impl DerivativeSource {
    pub fn is_flagged(&self) -> bool {
        !matches!(self, DerivativeSource::BackwardSecondOrder)
    }
}

/// `e^{±ikz}` components of the scaled optical coherence `√N σ_ba`.
#[derive(Clone, Debug, PartialEq)]
pub struct OpticalCoherence {
    pub plus: Vec<Complex64>,
    pub minus: Vec<Complex64>,
}

#[derive(Clone, Debug)]
pub struct ReconstructedFields {
    pub e_plus: Vec<Complex64>,
    pub e_minus: Vec<Complex64>,
    /// `|E⁺|² + |E⁻|²`.
    pub energy_density: Vec<f64>,
    pub sigma_bc: RamanSeries,
    /// `None` while the coupling field is off.
    pub sigma_ba: Option<OpticalCoherence>,
    pub derivative_source: DerivativeSource,
}

/// Fourier coefficients `J(m) = ⟨e^{imkz} / |κ⁺e^{ikz} + κ⁻e^{−ikz}|²⟩` over
/// one optical period, by midpoint sampling.
#[derive(Clone, Copy, Debug)]
pub(crate) struct InverseIntensity {
    pub zero: Complex64,
    pub plus_two: Complex64,
    pub minus_two: Complex64,
}

pub(crate) fn inverse_intensity_harmonics(kp: Complex64, km: Complex64) -> InverseIntensity {
    let mut acc = [Complex64::new(0.0, 0.0); 3];
    let step = 2.0 * std::f64::consts::PI / PHASE_SAMPLES as f64;
    for j in 0..PHASE_SAMPLES {
        let phase = (j as f64 + 0.5) * step;
        let e = Complex64::from_polar(1.0, phase);
        let intensity = (kp * e + km * e.conj()).norm_sqr();
        let w = 1.0 / intensity;
        let e2 = e * e;
        acc[0] += w;
        acc[1] += e2 * w;
        acc[2] += e2.conj() * w;
    }
    let norm = PHASE_SAMPLES as f64;
    InverseIntensity {
        zero: acc[0] / norm,
        plus_two: acc[1] / norm,
        minus_two: acc[2] / norm,
    }
}

/// Integrate from `t = 0` and return the field at each requested time.
pub fn run_adiabatic(
    pulse: &InitialPulse,
    sched: &CouplingSchedule,
    medium: &MediumParams,
    grid: &GridSpec,
    scheme: Scheme,
    times: &[f64],
) -> Result<(Vec<PolaritonField>, Vec<String>)> {
    let mut state = init_solver(pulse, sched, medium, grid, scheme)?;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        state.advance(t)?;
        out.push(state.field.clone());
    }
    Ok((out, state.warnings))
}

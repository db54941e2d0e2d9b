//! Drift–diffusion reference model for stationary light in a warm vapour.
//!
//! Atomic motion washes out the Raman harmonics, leaving a single polariton
//! amplitude that obeys
//!
//! ```text
//! ∂tΨ = −v_dr(t) ∂zΨ + D(t) ∂z²Ψ − Γ_bc Ψ
//! v_dr = (|κ⁺|² − |κ⁻|²) v_g(t),   D = d_coef · l_a · v_g(t)
//! ```
//!
//! Both coefficients scale with `v_g`, so in the retarded time `r` the
//! operator is constant and the integration runs on uniform `r` steps.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{InitialPulse, PolaritonField};
use crate::model::{CouplingSchedule, GridSpec, MediumParams};
use crate::numerics::TridiagonalLu;

/// Largest retardation step of the implicit scheme.
const MAX_IMPLICIT_STEP: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ThermalScheme {
    #[default]
    CrankNicolson,
    /// Upwind drift with explicit diffusion, limited to `D Δt/Δz² ≤ 0.4`.
    Explicit,
}

impl ThermalScheme {
    pub fn name(&self) -> &'static str {
        match self {
            ThermalScheme::CrankNicolson => "crank-nicolson",
            ThermalScheme::Explicit => "explicit-upwind",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThermalParams {
    /// Dimensionless diffusion strength in units of `l_a v_g`.
    pub d_coef: f64,
    pub scheme: ThermalScheme,
}

impl ThermalParams {
    pub fn new(d_coef: f64, scheme: ThermalScheme) -> Result<Self> {
        let p = Self { d_coef, scheme };
        p.validate()?;
        Ok(p)
    }

    /// `d_coef = 4|κ⁺|²|κ⁻|²`, largest for the standing wave.
    pub fn default_for(sched: &CouplingSchedule) -> Self {
        let kp2 = sched.kappa_plus().norm_sqr();
        let km2 = sched.kappa_minus().norm_sqr();
        Self {
            d_coef: 4.0 * kp2 * km2,
            scheme: ThermalScheme::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d_coef >= 0.0 && self.d_coef.is_finite()) {
            return Err(Error::Config(format!(
                "diffusion coefficient must be non-negative, got {}",
                self.d_coef
            )));
        }
        Ok(())
    }

    /// Drift speed per unit `v_g`.
    pub fn drift_factor(sched: &CouplingSchedule) -> f64 {
        sched.kappa_plus().norm_sqr() - sched.kappa_minus().norm_sqr()
    }

    /// Diffusion coefficient per unit `v_g`.
    pub fn diffusion_factor(&self, medium: &MediumParams) -> f64 {
        self.d_coef * medium.l_a
    }
}

#[derive(Clone, Debug)]
pub struct ThermalRun {
    /// `Ψ± = κ± Ψ` at each requested time.
    pub snapshots: Vec<PolaritonField>,
    /// The single-component amplitude `Ψ` at each requested time.
    pub amplitude: Vec<Vec<Complex64>>,
    pub warnings: Vec<String>,
}

/// Three-point operator `lower·Ψ_{i−1} + diag·Ψ_i + upper·Ψ_{i+1}` per unit
/// retardation.
struct Stencil {
    lower: f64,
    diag: f64,
    upper: f64,
}

fn apply(st: &Stencil, psi: &[Complex64], scale: f64, out: &mut [Complex64]) {
    let n = psi.len();
    for i in 0..n {
        // mirror ghosts give zero gradient at both ends
        let left = if i == 0 { psi[1] } else { psi[i - 1] };
        let right = if i == n - 1 { psi[n - 2] } else { psi[i + 1] };
        out[i] = psi[i] + (left * st.lower + psi[i] * st.diag + right * st.upper) * scale;
    }
}

pub fn run_thermal(
    pulse: &InitialPulse,
    sched: &CouplingSchedule,
    medium: &MediumParams,
    grid: &GridSpec,
    params: &ThermalParams,
    times: &[f64],
) -> Result<ThermalRun> {
    grid.validate()?;
    medium.validate()?;
    params.validate()?;
    if !sched.has_constant_kappa() {
        return Err(Error::Config(
            "the thermal reference needs a fixed coupling-field geometry".into(),
        ));
    }
    let n = grid.n_z;
    let dz = grid.dz();
    let w = ThermalParams::drift_factor(sched);
    let d = params.diffusion_factor(medium);
    let mut psi = pulse.sample(grid);
    let mut warnings = Vec::new();
    let margin = (pulse.center - grid.z_min).min(grid.z_max - pulse.center);
    if margin < pulse.support_half_width() {
        warnings.push(format!("pulse center {} is close to the grid boundary", pulse.center));
    }

    let (dr_max, stencil) = match params.scheme {
        ThermalScheme::CrankNicolson => {
            let drift_limit = if w > 0.0 { grid.cfl * dz / w } else { f64::INFINITY };
            (
                drift_limit.min(MAX_IMPLICIT_STEP),
                Stencil {
                    lower: w / (2.0 * dz) + d / (dz * dz),
                    diag: -2.0 * d / (dz * dz),
                    upper: -w / (2.0 * dz) + d / (dz * dz),
                },
            )
        }
        ThermalScheme::Explicit => {
            let diff_limit = if d > 0.0 { 0.4 * dz * dz / d } else { f64::INFINITY };
            let drift_limit = if w > 0.0 { 0.2 * dz / w } else { f64::INFINITY };
            (
                diff_limit.min(drift_limit).min(MAX_IMPLICIT_STEP),
                Stencil {
                    lower: w / dz + d / (dz * dz),
                    diag: -w / dz - 2.0 * d / (dz * dz),
                    upper: d / (dz * dz),
                },
            )
        }
    };

    let kp = sched.kappa_plus();
    let km = sched.kappa_minus();
    let gamma = medium.gamma_bc_complex();
    let mut snapshots = Vec::with_capacity(times.len());
    let mut amplitude = Vec::with_capacity(times.len());
    let mut t = 0.0;
    let mut scratch = vec![Complex64::new(0.0, 0.0); n];
    for &target in times {
        if target < t {
            return Err(Error::Domain(format!("snapshot times must not decrease ({target} after {t})")));
        }
        let span = sched.retardation(target)? - sched.retardation(t)?;
        if span > 0.0 {
            let steps = (span / dr_max - 1e-9).ceil().max(1.0) as usize;
            let dr = span / steps as f64;
            match params.scheme {
                ThermalScheme::Explicit => {
                    for _ in 0..steps {
                        apply(&stencil, &psi, dr, &mut scratch);
                        std::mem::swap(&mut psi, &mut scratch);
                    }
                }
                ThermalScheme::CrankNicolson => {
                    let h = 0.5 * dr;
                    let c = |v: f64| Complex64::new(v, 0.0);
                    let mut lower = vec![c(-h * stencil.lower); n];
                    let diag = vec![c(1.0 - h * stencil.diag); n];
                    let mut upper = vec![c(-h * stencil.upper); n];
                    upper[0] = c(-h * (stencil.upper + stencil.lower));
                    lower[n - 1] = c(-h * (stencil.upper + stencil.lower));
                    let lu = TridiagonalLu::new(&lower, &diag, &upper);
                    for _ in 0..steps {
                        apply(&stencil, &psi, h, &mut scratch);
                        lu.solve(&mut scratch);
                        std::mem::swap(&mut psi, &mut scratch);
                    }
                }
            }
        }
        let decay = (-gamma * (target - t)).exp();
        for v in psi.iter_mut() {
            *v *= decay;
        }
        t = target;
        if let Some(i) = psi.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NumericBlowup {
                step: snapshots.len(),
                detail: format!("non-finite thermal amplitude in cell {i} at t = {t}"),
            });
        }
        let plus = psi.iter().map(|v| v * kp).collect();
        let minus = psi.iter().map(|v| v * km).collect();
        snapshots.push(PolaritonField::new(*grid, plus, minus, t)?);
        amplitude.push(psi.clone());
    }
    Ok(ThermalRun {
        snapshots,
        amplitude,
        warnings,
    })
}

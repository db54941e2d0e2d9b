//! Medium constants, coupling-field schedules and the simulation grid.
//!
//! All quantities are dimensionless: time is measured in units of the
//! switching time `T_s`, length in units of the stored pulse length `L_p`
//! and velocity in units of the pre-storage group velocity
//! `v_g0 = c cos²θ₀ = L_p / T_s`. In these units the vacuum speed of light
//! is `1 / cos²θ₀`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `|κ⁺|² + |κ⁻|² = 1`.
pub const KAPPA_NORM_TOL: f64 = 1e-12;

/// Static medium constants, all rates in units of `1/T_s`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MediumParams {
    /// Optical coherence decay rate γ_ba.
    pub gamma_ba: f64,
    /// Ground-state (Raman) dephasing rate γ_bc.
    pub gamma_bc: f64,
    /// One-photon probe detuning δ_p.
    pub delta_p: f64,
    /// Two-photon detuning Δ.
    pub delta_2ph: f64,
    /// Resonant absorption length in units of `L_p`.
    pub l_a: f64,
    /// Medium length in units of `L_p`.
    pub length: f64,
}

impl Default for MediumParams {
    fn default() -> Self {
        Self {
            gamma_ba: 100.0,
            gamma_bc: 0.0,
            delta_p: 0.0,
            delta_2ph: 0.0,
            l_a: 0.1,
            length: 20.0,
        }
    }
}

impl MediumParams {
    pub fn new(
        gamma_ba: f64,
        gamma_bc: f64,
        delta_p: f64,
        delta_2ph: f64,
        l_a: f64,
        length: f64,
    ) -> Result<Self> {
        let params = Self {
            gamma_ba,
            gamma_bc,
            delta_p,
            delta_2ph,
            l_a,
            length,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.gamma_ba,
            self.gamma_bc,
            self.delta_p,
            self.delta_2ph,
            self.l_a,
            self.length,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("medium parameters must be finite".into()));
        }
        if self.gamma_ba <= 0.0 {
            return Err(Error::Config(format!(
                "gamma_ba must be positive, got {}",
                self.gamma_ba
            )));
        }
        if self.gamma_bc < 0.0 {
            return Err(Error::Config(format!(
                "gamma_bc must be non-negative, got {}",
                self.gamma_bc
            )));
        }
        if self.l_a <= 0.0 || self.length <= 0.0 {
            return Err(Error::Config(
                "absorption length and medium length must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Γ_ba = γ_ba − iδ_p.
    pub fn gamma_ba_complex(&self) -> Complex64 {
        Complex64::new(self.gamma_ba, -self.delta_p)
    }

    /// Γ_bc = γ_bc − iΔ.
    pub fn gamma_bc_complex(&self) -> Complex64 {
        Complex64::new(self.gamma_bc, -self.delta_2ph)
    }

    /// Collective coupling g²N fixed by the resonant absorption length,
    /// `g²N = γ_ba c / l_a`.
    pub fn coupling_strength_sq(&self, light_speed: f64) -> f64 {
        self.gamma_ba * light_speed / self.l_a
    }
}

/// Tabulated mixing-angle (and optionally coupling-ratio) history.
///
/// Values are linearly interpolated between nodes and held constant after
/// the last node.
#[derive(Clone, Debug, PartialEq)]
pub struct ScheduleTable {
    times: Vec<f64>,
    cos2_theta: Vec<f64>,
    kappa_plus_sq: Option<Vec<f64>>,
    /// Retardation accumulated up to each node.
    cumulative: Vec<f64>,
}

impl ScheduleTable {
    pub fn new(
        times: Vec<f64>,
        cos2_theta: Vec<f64>,
        kappa_plus_sq: Option<Vec<f64>>,
    ) -> Result<Self> {
        if times.len() < 2 || times.len() != cos2_theta.len() {
            return Err(Error::Config(
                "schedule table needs at least two rows of equal length".into(),
            ));
        }
        if times[0] != 0.0 {
            return Err(Error::Config("schedule table must start at t = 0".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config(
                "schedule table times must be strictly increasing".into(),
            ));
        }
        if cos2_theta.iter().any(|c| !(0.0..1.0).contains(c)) {
            return Err(Error::Config("tabulated cos²θ must lie in [0, 1)".into()));
        }
        if let Some(k) = &kappa_plus_sq {
            if k.len() != times.len() {
                return Err(Error::Config(
                    "kappa_plus_sq column length differs from times".into(),
                ));
            }
            if k.iter().any(|v| !(0.5..=1.0).contains(v)) {
                return Err(Error::Config(
                    "tabulated |κ⁺|² must lie in [0.5, 1]".into(),
                ));
            }
        }
        let mut cumulative = Vec::with_capacity(times.len());
        cumulative.push(0.0);
        for i in 1..times.len() {
            let area = 0.5 * (cos2_theta[i] + cos2_theta[i - 1]) * (times[i] - times[i - 1]);
            cumulative.push(cumulative[i - 1] + area);
        }
        Ok(Self {
            times,
            cos2_theta,
            kappa_plus_sq,
            cumulative,
        })
    }

    fn locate(&self, t: f64) -> Option<(usize, f64)> {
        let last = self.times.len() - 1;
        if t >= self.times[last] {
            return None;
        }
        let i = self.times.partition_point(|&x| x <= t) - 1;
        let w = (t - self.times[i]) / (self.times[i + 1] - self.times[i]);
        Some((i, w))
    }

    fn interp(&self, values: &[f64], t: f64) -> f64 {
        match self.locate(t) {
            Some((i, w)) => values[i] + w * (values[i + 1] - values[i]),
            None => *values.last().unwrap(),
        }
    }

    fn max_cos2(&self) -> f64 {
        self.cos2_theta.iter().cloned().fold(0.0, f64::max)
    }

    /// ∫₀ᵗ cos²θ dt′ (exact for the piecewise-linear interpolant).
    fn integral(&self, t: f64) -> f64 {
        match self.locate(t) {
            Some((i, w)) => {
                let h = self.times[i + 1] - self.times[i];
                let c0 = self.cos2_theta[i];
                let ct = c0 + w * (self.cos2_theta[i + 1] - c0);
                self.cumulative[i] + 0.5 * (c0 + ct) * w * h
            }
            None => {
                let last = self.times.len() - 1;
                self.cumulative[last] + self.cos2_theta[last] * (t - self.times[last])
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ScheduleKind {
    /// `cos²θ(t) = cos²θ₀ tanh(t/T_s)`.
    TanhSwitch,
    /// `cos²θ(t) = cos²θ₀`.
    Constant,
    Tabulated(ScheduleTable),
}

impl ScheduleKind {
    pub fn name(&self) -> &'static str {
        match self {
            ScheduleKind::TanhSwitch => "tanh",
            ScheduleKind::Constant => "constant",
            ScheduleKind::Tabulated(_) => "tabulated",
        }
    }
}

/// Mixing-angle quantities at one instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScheduleSample {
    pub cos2_theta: f64,
    pub sin2_theta: f64,
    /// Group velocity in units of `v_g0`.
    pub v_g: f64,
}

impl ScheduleSample {
    pub fn cos_theta(&self) -> f64 {
        self.cos2_theta.sqrt()
    }

    pub fn sin_theta(&self) -> f64 {
        self.sin2_theta.sqrt()
    }
}

/// Time-dependent coupling drive.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingSchedule {
    kappa_plus: Complex64,
    kappa_minus: Complex64,
    cos2_theta0: f64,
    switch_time: f64,
    kind: ScheduleKind,
}

impl CouplingSchedule {
    pub fn new(
        kappa_plus: Complex64,
        kappa_minus: Complex64,
        cos2_theta0: f64,
        kind: ScheduleKind,
    ) -> Result<Self> {
        let norm = kappa_plus.norm_sqr() + kappa_minus.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > KAPPA_NORM_TOL {
            return Err(Error::Config(format!(
                "|κ⁺|² + |κ⁻|² must equal 1, got {norm}"
            )));
        }
        if kappa_plus.norm() < kappa_minus.norm() {
            return Err(Error::Config(
                "the forward coupling component must be the stronger one (|κ⁺| ≥ |κ⁻|)".into(),
            ));
        }
        if !(cos2_theta0 > 0.0 && cos2_theta0 < 1.0) {
            return Err(Error::Config(format!(
                "cos²θ₀ must lie in (0, 1), got {cos2_theta0}"
            )));
        }
        if cos2_theta0 > 0.01 {
            log::warn!("cos²θ₀ = {cos2_theta0} is outside the low group velocity regime");
        }
        if let ScheduleKind::Tabulated(table) = &kind {
            if table.max_cos2() > cos2_theta0 {
                return Err(Error::Config(
                    "tabulated cos²θ exceeds the asymptotic value cos²θ₀".into(),
                ));
            }
        }
        Ok(Self {
            kappa_plus,
            kappa_minus,
            cos2_theta0,
            switch_time: 1.0,
            kind,
        })
    }

    /// Real `κ⁺ = √|κ⁺|²` and `κ⁻ = √(1−|κ⁺|²) e^{−iφ}`, so that
    /// `κ⁺κ⁻* = |κ⁺||κ⁻| e^{iφ}`.
    pub fn from_kappa_plus_sq(
        kappa_plus_sq: f64,
        phi: f64,
        cos2_theta0: f64,
        kind: ScheduleKind,
    ) -> Result<Self> {
        if !(0.5..=1.0).contains(&kappa_plus_sq) {
            return Err(Error::Config(format!(
                "kappa_plus_sq must lie in [0.5, 1], got {kappa_plus_sq}"
            )));
        }
        let kp = Complex64::new(kappa_plus_sq.sqrt(), 0.0);
        let km = Complex64::from_polar((1.0 - kappa_plus_sq).sqrt(), -phi);
        Self::new(kp, km, cos2_theta0, kind)
    }

    pub fn standing_wave(cos2_theta0: f64, kind: ScheduleKind) -> Result<Self> {
        Self::from_kappa_plus_sq(0.5, 0.0, cos2_theta0, kind)
    }

    /// Use a switching time other than the unit time.
    pub fn with_switch_time(mut self, switch_time: f64) -> Result<Self> {
        if !(switch_time > 0.0 && switch_time.is_finite()) {
            return Err(Error::Config("switching time must be positive".into()));
        }
        self.switch_time = switch_time;
        Ok(self)
    }

    pub fn kappa_plus(&self) -> Complex64 {
        self.kappa_plus
    }

    pub fn kappa_minus(&self) -> Complex64 {
        self.kappa_minus
    }

    pub fn cos2_theta0(&self) -> f64 {
        self.cos2_theta0
    }

    pub fn switch_time(&self) -> f64 {
        self.switch_time
    }

    pub fn kind(&self) -> &ScheduleKind {
        &self.kind
    }

    /// Vacuum light speed in units of `v_g0`.
    pub fn light_speed(&self) -> f64 {
        1.0 / self.cos2_theta0
    }

    /// Phase angle φ defined by `κ⁺κ⁻* = |κ⁺||κ⁻| e^{iφ}` (0 when κ⁻ = 0).
    pub fn phi(&self) -> f64 {
        let p = self.kappa_plus * self.kappa_minus.conj();
        if p.norm() == 0.0 {
            0.0
        } else {
            p.arg()
        }
    }

    /// True unless the table carries a time-dependent coupling ratio.
    pub fn has_constant_kappa(&self) -> bool {
        !matches!(&self.kind, ScheduleKind::Tabulated(t) if t.kappa_plus_sq.is_some())
    }

    /// Coupling ratios at time `t`; the phases of the nominal κ± are kept.
    pub fn kappa_at(&self, t: f64) -> (Complex64, Complex64) {
        match &self.kind {
            ScheduleKind::Tabulated(table) if table.kappa_plus_sq.is_some() => {
                let kp2 = table.interp(table.kappa_plus_sq.as_ref().unwrap(), t.max(0.0));
                let kp = Complex64::from_polar(kp2.sqrt(), self.kappa_plus.arg());
                let km = Complex64::from_polar((1.0 - kp2).max(0.0).sqrt(), self.kappa_minus.arg());
                (kp, km)
            }
            _ => (self.kappa_plus, self.kappa_minus),
        }
    }

    /// Largest `|κ⁺|²` the schedule ever reaches.
    pub fn max_kappa_plus_sq(&self) -> f64 {
        match &self.kind {
            ScheduleKind::Tabulated(ScheduleTable {
                kappa_plus_sq: Some(k),
                ..
            }) => k.iter().cloned().fold(0.0, f64::max),
            _ => self.kappa_plus.norm_sqr(),
        }
    }

    /// Mixing-angle quantities at time `t`.
    pub fn eval(&self, t: f64) -> Result<ScheduleSample> {
        if !t.is_finite() {
            return Err(Error::Domain(format!("time must be finite, got {t}")));
        }
        let cos2 = match &self.kind {
            ScheduleKind::TanhSwitch => {
                if t < 0.0 {
                    return Err(Error::Domain(format!(
                        "tanh switch is defined for t ≥ 0, got {t}"
                    )));
                }
                self.cos2_theta0 * (t / self.switch_time).tanh()
            }
            ScheduleKind::Constant => self.cos2_theta0,
            ScheduleKind::Tabulated(table) => {
                if t < 0.0 {
                    return Err(Error::Domain(format!(
                        "tabulated schedule starts at t = 0, got {t}"
                    )));
                }
                table.interp(&table.cos2_theta, t)
            }
        };
        Ok(ScheduleSample {
            cos2_theta: cos2,
            sin2_theta: 1.0 - cos2,
            v_g: cos2 / self.cos2_theta0,
        })
    }

    /// Retardation `r(t) = ∫₀ᵗ c cos²θ dt′` in units of `L_p`.
    pub fn retardation(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!(
                "retardation requires finite t ≥ 0, got {t}"
            )));
        }
        Ok(match &self.kind {
            ScheduleKind::TanhSwitch => self.switch_time * ln_cosh(t / self.switch_time),
            ScheduleKind::Constant => t,
            ScheduleKind::Tabulated(table) => table.integral(t) / self.cos2_theta0,
        })
    }

    /// Largest group velocity (units of `v_g0`) reached on `[t0, t1]`.
    pub fn max_velocity_on(&self, t0: f64, t1: f64) -> f64 {
        match &self.kind {
            ScheduleKind::TanhSwitch => (t1 / self.switch_time).tanh(),
            ScheduleKind::Constant => 1.0,
            ScheduleKind::Tabulated(table) => {
                let mut best = table.interp(&table.cos2_theta, t0).max(table.interp(&table.cos2_theta, t1));
                for (t, c) in table.times.iter().zip(&table.cos2_theta) {
                    if *t > t0 && *t < t1 {
                        best = best.max(*c);
                    }
                }
                best / self.cos2_theta0
            }
        }
    }

    /// Splitting factor β for the nominal coupling ratios.
    pub fn beta(&self) -> f64 {
        beta_of(self.kappa_plus, self.kappa_minus)
    }
}

/// `ln cosh x`, stable for large |x|.
pub fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// `β = √(|κ⁺|²(|κ⁺|² − |κ⁻|²))`.
pub fn beta_of(kappa_plus: Complex64, kappa_minus: Complex64) -> f64 {
    let kp2 = kappa_plus.norm_sqr();
    let km2 = kappa_minus.norm_sqr();
    (kp2 * (kp2 - km2)).max(0.0).sqrt()
}

/// Normalised decomposition of a two-component coupling drive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RabiDecomposition {
    pub kappa_plus: Complex64,
    pub kappa_minus: Complex64,
    pub phi: f64,
    pub omega_total: f64,
}

/// Split `Ω⁺, Ω⁻` into the total Rabi frequency and the ratios κ±.
pub fn kappa_from_rabi(omega_plus: Complex64, omega_minus: Complex64) -> Result<RabiDecomposition> {
    let omega_total = omega_plus.norm().hypot(omega_minus.norm());
    if omega_total == 0.0 {
        return Err(Error::DegenerateDrive);
    }
    let kappa_plus = omega_plus / omega_total;
    let kappa_minus = omega_minus / omega_total;
    let cross = kappa_plus * kappa_minus.conj();
    let phi = if cross.norm() == 0.0 { 0.0 } else { cross.arg() };
    Ok(RabiDecomposition {
        kappa_plus,
        kappa_minus,
        phi,
        omega_total,
    })
}

/// Uniform grid on `[z_min, z_max]` with `n_z` nodes (both ends included).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_z: usize,
    pub z_min: f64,
    pub z_max: f64,
    /// Courant factor.
    pub cfl: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n_z: 1024,
            z_min: -10.0,
            z_max: 10.0,
            cfl: 0.5,
        }
    }
}

impl GridSpec {
    pub fn new(n_z: usize, z_min: f64, z_max: f64, cfl: f64) -> Result<Self> {
        let grid = Self {
            n_z,
            z_min,
            z_max,
            cfl,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_z < 8 {
            return Err(Error::Config(format!(
                "grid needs at least 8 cells, got {}",
                self.n_z
            )));
        }
        if !(self.z_min.is_finite() && self.z_max.is_finite() && self.z_max > self.z_min) {
            return Err(Error::Config("grid bounds must satisfy z_max > z_min".into()));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::Config(format!(
                "Courant factor must lie in (0, 1], got {}",
                self.cfl
            )));
        }
        Ok(())
    }

    pub fn dz(&self) -> f64 {
        (self.z_max - self.z_min) / (self.n_z - 1) as f64
    }

    pub fn z(&self, i: usize) -> f64 {
        self.z_min + i as f64 * self.dz()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n_z).map(|i| self.z(i)).collect()
    }

    pub fn contains(&self, z: f64) -> bool {
        z >= self.z_min && z <= self.z_max
    }
}

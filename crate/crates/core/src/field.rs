//! Stored pulse profiles and gridded polariton fields.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::GridSpec;

#[derive(Clone, Debug, PartialEq)]
pub enum PulseShape {
    /// `Ψ₀ exp(−((z − z₀)/L_p)²)`.
    Gaussian,
    /// Samples `(z, Ψ/Ψ₀)`, linearly interpolated and zero outside the table.
    Tabulated { z: Vec<f64>, values: Vec<Complex64> },
}

/// The polariton profile `Ψ(z, 0)` left in the medium by the storage stage.
#[derive(Clone, Debug, PartialEq)]
pub struct InitialPulse {
    pub amplitude: Complex64,
    pub length: f64,
    pub center: f64,
    pub shape: PulseShape,
}

impl Default for InitialPulse {
    fn default() -> Self {
        Self {
            amplitude: Complex64::new(1.0, 0.0),
            length: 1.0,
            center: 0.0,
            shape: PulseShape::Gaussian,
        }
    }
}

impl InitialPulse {
    pub fn gaussian(amplitude: Complex64, length: f64, center: f64) -> Result<Self> {
        let pulse = Self {
            amplitude,
            length,
            center,
            shape: PulseShape::Gaussian,
        };
        pulse.validate()?;
        Ok(pulse)
    }

    pub fn tabulated(amplitude: Complex64, center: f64, z: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        let pulse = Self {
            amplitude,
            length: 1.0,
            center,
            shape: PulseShape::Tabulated { z, values },
        };
        pulse.validate()?;
        Ok(pulse)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(Error::Config(format!("pulse length must be positive, got {}", self.length)));
        }
        if !(self.center.is_finite() && self.amplitude.re.is_finite() && self.amplitude.im.is_finite()) {
            return Err(Error::Config("pulse amplitude and center must be finite".into()));
        }
        if let PulseShape::Tabulated { z, values } = &self.shape {
            if z.len() < 2 || z.len() != values.len() {
                return Err(Error::Config("tabulated pulse needs ≥ 2 matching samples".into()));
            }
            if z.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(Error::Config("tabulated pulse abscissae must increase".into()));
            }
        }
        Ok(())
    }

    /// `Ψ(z, 0)`.
    pub fn eval(&self, z: f64) -> Complex64 {
        match &self.shape {
            PulseShape::Gaussian => {
                let x = (z - self.center) / self.length;
                self.amplitude * (-x * x).exp()
            }
            PulseShape::Tabulated { z: zs, values } => {
                let x = z - self.center;
                if x < zs[0] || x > zs[zs.len() - 1] {
                    return Complex64::new(0.0, 0.0);
                }
                let i = (zs.partition_point(|&p| p <= x)).clamp(1, zs.len() - 1) - 1;
                let w = (x - zs[i]) / (zs[i + 1] - zs[i]);
                self.amplitude * (values[i] * (1.0 - w) + values[i + 1] * w)
            }
        }
    }

    /// Half-width beyond which the profile is negligible, used for
    /// boundary-distance checks.
    pub fn support_half_width(&self) -> f64 {
        match &self.shape {
            PulseShape::Gaussian => 3.0 * self.length,
            PulseShape::Tabulated { z, .. } => z[0].abs().max(z[z.len() - 1].abs()),
        }
    }

    pub fn sample(&self, grid: &GridSpec) -> Vec<Complex64> {
        (0..grid.n_z).map(|i| self.eval(grid.z(i))).collect()
    }
}

/// Forward and backward polariton components on a uniform grid at time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolaritonField {
    pub grid: GridSpec,
    pub psi_plus: Vec<Complex64>,
    pub psi_minus: Vec<Complex64>,
    pub t: f64,
}

impl PolaritonField {
    pub fn new(grid: GridSpec, psi_plus: Vec<Complex64>, psi_minus: Vec<Complex64>, t: f64) -> Result<Self> {
        let field = Self {
            grid,
            psi_plus,
            psi_minus,
            t,
        };
        field.validate()?;
        Ok(field)
    }

    pub fn zeros(grid: GridSpec, t: f64) -> Self {
        let zero = vec![Complex64::new(0.0, 0.0); grid.n_z];
        Self {
            grid,
            psi_plus: zero.clone(),
            psi_minus: zero,
            t,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.psi_plus.len() != self.grid.n_z || self.psi_minus.len() != self.grid.n_z {
            return Err(Error::Config(format!(
                "field has {}/{} samples but the grid has {} cells",
                self.psi_plus.len(),
                self.psi_minus.len(),
                self.grid.n_z
            )));
        }
        if let Some(i) = self.first_non_finite() {
            return Err(Error::Domain(format!("non-finite polariton sample at cell {i}")));
        }
        Ok(())
    }

    pub fn first_non_finite(&self) -> Option<usize> {
        self.psi_plus
            .iter()
            .zip(&self.psi_minus)
            .position(|(p, m)| !(p.re.is_finite() && p.im.is_finite() && m.re.is_finite() && m.im.is_finite()))
    }

    /// `|Ψ⁺|² + |Ψ⁻|²` per cell.
    pub fn density(&self) -> Vec<f64> {
        self.psi_plus
            .iter()
            .zip(&self.psi_minus)
            .map(|(p, m)| p.norm_sqr() + m.norm_sqr())
            .collect()
    }

    /// Largest pointwise difference in either component.
    pub fn max_abs_diff(&self, other: &PolaritonField) -> f64 {
        self.psi_plus
            .iter()
            .zip(&other.psi_plus)
            .chain(self.psi_minus.iter().zip(&other.psi_minus))
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn scale(&mut self, factor: Complex64) {
        for v in self.psi_plus.iter_mut().chain(self.psi_minus.iter_mut()) {
            *v *= factor;
        }
    }
}

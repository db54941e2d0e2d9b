//! Non-adiabatic Maxwell–Bloch model in a standing-wave coupling field.
//!
//! The coherences are expanded in spatial harmonics of the optical wave
//! vector, `√N σ_ba = Σ S_ba^(m) e^{imkz}` (odd `m`) and
//! `√N σ_bc = Σ S_bc^(n) e^{inkz}` (even `n`). Stored on one interleaved
//! ladder `j ∈ [−2M, 2M]` the coupling field only links neighbouring rungs,
//!
//! ```text
//! dS^(m)/dt = iG E^(m) + iΩ⁺ S^(m−1) + iΩ⁻ S^(m+1) − Γ_ba S^(m)     (m odd)
//! dS^(n)/dt = iΩ⁺* S^(n+1) + iΩ⁻* S^(n−1) − Γ_bc S^(n)               (n even)
//! ```
//!
//! with `G² = g²N = γ_ba c / l_a`, `Ω± = κ± G cotθ(t)` and probe envelopes
//! `E^(±1) = E±`. The probe fields are slaved to the atoms through the
//! quasi-static propagation equations `±c ∂z E± = iG S_ba^(±1)` with zero
//! inflow.
//!
//! Time stepping uses the trapezoidal rule on the coupling and field terms
//! with the decay rates removed by an integrating factor:
//!
//! ```text
//! (I − ½Δt L(t₁)) y₁ = e^{DΔt} (I + ½Δt L(t₀)) y₀
//! ```
//!
//! Because the field terms are global in `z`, each step also solves a
//! two-component boundary-value problem for `(E⁺, E⁻)` on the grid.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{InitialPulse, PolaritonField};
use crate::model::{CouplingSchedule, GridSpec, MediumParams};
use crate::numerics::TridiagonalLu;

pub const DEFAULT_MODES: usize = 8;

/// Below this `cosθ` the polariton is rebuilt from the Raman coherence.
const COS_THETA_FLOOR: f64 = 1e-6;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Forward and backward probe envelopes per grid cell.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldPair {
    pub e_plus: Vec<Complex64>,
    pub e_minus: Vec<Complex64>,
}

impl FieldPair {
    pub fn zeros(n: usize) -> Self {
        Self {
            e_plus: vec![ZERO; n],
            e_minus: vec![ZERO; n],
        }
    }

    /// `|E⁺|² + |E⁻|²`.
    pub fn intensity(&self) -> Vec<f64> {
        self.e_plus
            .iter()
            .zip(&self.e_minus)
            .map(|(p, m)| p.norm_sqr() + m.norm_sqr())
            .collect()
    }
}

/// Harmonic amplitudes of the scaled coherences in every grid cell.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomicState {
    modes: usize,
    n_z: usize,
    data: Vec<Complex64>,
}

impl AtomicState {
    pub fn new(n_z: usize, modes: usize) -> Result<Self> {
        if modes < 2 {
            return Err(Error::Config(format!("mode cutoff must be at least 2, got {modes}")));
        }
        Ok(Self {
            modes,
            n_z,
            data: vec![ZERO; n_z * (4 * modes + 1)],
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn n_z(&self) -> usize {
        self.n_z
    }

    /// Number of ladder rungs, `4M + 1`.
    pub fn width(&self) -> usize {
        4 * self.modes + 1
    }

    fn slot(&self, j: i32) -> usize {
        let m = self.modes as i32;
        assert!((-2 * m..=2 * m).contains(&j), "harmonic {j} outside cutoff {}", self.modes);
        (j + 2 * m) as usize
    }

    /// Harmonic `j` in cell `i`: `S_ba^(j)` for odd `j`, `S_bc^(j)` for even.
    pub fn get(&self, cell: usize, j: i32) -> Complex64 {
        self.data[cell * self.width() + self.slot(j)]
    }

    pub fn set(&mut self, cell: usize, j: i32, value: Complex64) {
        let k = cell * self.width() + self.slot(j);
        self.data[k] = value;
    }

    /// Profile of harmonic `j` across the grid.
    pub fn harmonic(&self, j: i32) -> Vec<Complex64> {
        (0..self.n_z).map(|i| self.get(i, j)).collect()
    }

    pub fn cell(&self, i: usize) -> &[Complex64] {
        let w = self.width();
        &self.data[i * w..(i + 1) * w]
    }

    /// Summed `|S|²` over all cells for the optical (odd) and Raman (even)
    /// harmonics.
    pub fn weights(&self) -> (f64, f64) {
        let w = self.width();
        let mut optical = 0.0;
        let mut raman = 0.0;
        for (k, v) in self.data.iter().enumerate() {
            if (k % w) % 2 == 0 {
                raman += v.norm_sqr();
            } else {
                optical += v.norm_sqr();
            }
        }
        (optical, raman)
    }

    fn first_non_finite(&self) -> Option<(usize, i32)> {
        let w = self.width();
        self.data
            .iter()
            .position(|v| !(v.re.is_finite() && v.im.is_finite()))
            .map(|k| (k / w, (k % w) as i32 - 2 * self.modes as i32))
    }
}

/// Source of the probe fields seen by the atoms.
#[derive(Clone, Debug, PartialEq)]
pub enum FieldDrive {
    /// Fields follow the atoms through the propagation equations.
    SelfConsistent,
    /// Fixed external fields.
    Prescribed(FieldPair),
}

/// Atoms and fields at `t = 0`: the Raman coherence holds the stored
/// excitation, `S_bc^(0) = −Ψ(z, 0)`, and nothing else is excited.
pub fn init_full(
    pulse: &InitialPulse,
    medium: &MediumParams,
    grid: &GridSpec,
    modes: usize,
) -> Result<(AtomicState, FieldPair)> {
    grid.validate()?;
    medium.validate()?;
    pulse.validate()?;
    let mut atoms = AtomicState::new(grid.n_z, modes)?;
    for (i, psi) in pulse.sample(grid).into_iter().enumerate() {
        atoms.set(i, 0, -psi);
    }
    Ok((atoms, FieldPair::zeros(grid.n_z)))
}

/// Quasi-static probe fields generated by the optical coherence, by
/// trapezoidal accumulation from each inflow boundary.
pub fn propagate_fields(atoms: &AtomicState, coupling: f64, light_speed: f64, grid: &GridSpec) -> FieldPair {
    let n = grid.n_z;
    let mu = I * (coupling / light_speed) * (0.5 * grid.dz());
    let mut out = FieldPair::zeros(n);
    for i in 1..n {
        out.e_plus[i] = out.e_plus[i - 1] + mu * (atoms.get(i - 1, 1) + atoms.get(i, 1));
    }
    for i in (0..n - 1).rev() {
        out.e_minus[i] = out.e_minus[i + 1] + mu * (atoms.get(i, -1) + atoms.get(i + 1, -1));
    }
    out
}

/// Default step: resolves both the switching time and the optical decay.
pub fn default_time_step(medium: &MediumParams) -> f64 {
    (1.0f64 / 50.0).min(0.2 / medium.gamma_ba)
}

type Mat2 = [[Complex64; 2]; 2];

fn inv2(m: &Mat2) -> Mat2 {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let r = det.inv();
    [[m[1][1] * r, -m[0][1] * r], [-m[1][0] * r, m[0][0] * r]]
}

fn mul2(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

fn apply2(a: &Mat2, v: [Complex64; 2]) -> [Complex64; 2] {
    [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
}

#[derive(Clone, Debug)]
pub struct FullSolver {
    pub atoms: AtomicState,
    pub fields: FieldPair,
    pub sched: CouplingSchedule,
    pub medium: MediumParams,
    pub grid: GridSpec,
    pub drive: FieldDrive,
    pub t: f64,
    pub step_count: usize,
    pub warnings: Vec<String>,
    coupling: f64,
    rabi_scale: f64,
}

impl FullSolver {
    pub fn new(
        pulse: &InitialPulse,
        sched: &CouplingSchedule,
        medium: &MediumParams,
        grid: &GridSpec,
        modes: usize,
        drive: FieldDrive,
    ) -> Result<Self> {
        let (atoms, fields) = init_full(pulse, medium, grid, modes)?;
        if let FieldDrive::Prescribed(f) = &drive {
            if f.e_plus.len() != grid.n_z || f.e_minus.len() != grid.n_z {
                return Err(Error::Config("prescribed fields do not match the grid".into()));
            }
        }
        let fields = match &drive {
            FieldDrive::SelfConsistent => fields,
            FieldDrive::Prescribed(f) => f.clone(),
        };
        Ok(Self {
            atoms,
            fields,
            sched: sched.clone(),
            medium: medium.clone(),
            grid: *grid,
            drive,
            t: 0.0,
            step_count: 0,
            warnings: Vec::new(),
            coupling: medium.coupling_strength_sq(sched.light_speed()).sqrt(),
            rabi_scale: 1.0,
        })
    }

    /// Collective probe coupling `G = g√N`.
    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    /// `(Ω⁺, Ω⁻)` at time `t`.
    pub fn rabi(&self, t: f64) -> Result<(Complex64, Complex64)> {
        let s = self.sched.eval(t)?;
        let omega = self.rabi_scale * self.coupling * s.cos_theta() / s.sin_theta();
        let (kp, km) = self.sched.kappa_at(t);
        Ok((kp * omega, km * omega))
    }

    /// Sub- and super-diagonal of the ladder coupling matrix.
    fn ladder(&self, t: f64) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        let (op, om) = self.rabi(t)?;
        let w = self.atoms.width();
        let m = self.atoms.modes() as i32;
        let mut lower = vec![ZERO; w];
        let mut upper = vec![ZERO; w];
        for k in 0..w {
            let j = k as i32 - 2 * m;
            let (lo, up) = if j.rem_euclid(2) == 1 {
                (I * op, I * om)
            } else {
                (I * om.conj(), I * op.conj())
            };
            if k > 0 {
                lower[k] = lo;
            }
            if k + 1 < w {
                upper[k] = up;
            }
        }
        Ok((lower, upper))
    }

    /// Advance by one step of length `dt`.
    pub fn step(&mut self, dt: f64) -> Result<()> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Domain(format!("time step must be positive, got {dt}")));
        }
        let t0 = self.t;
        let t1 = t0 + dt;
        let w = self.atoms.width();
        let m = self.atoms.modes() as i32;
        let n = self.grid.n_z;
        let half = 0.5 * dt;
        let plus = (1 + 2 * m) as usize;
        let minus = (2 * m - 1) as usize;

        let (lo0, up0) = self.ladder(t0)?;
        let (lo1, up1) = self.ladder(t1)?;
        let ba_decay = (-self.medium.gamma_ba_complex() * dt).exp();
        let bc_decay = (-self.medium.gamma_bc_complex() * dt).exp();
        let decay: Vec<Complex64> = (0..w).map(|k| if k % 2 == 0 { bc_decay } else { ba_decay }).collect();

        let lower: Vec<Complex64> = lo1.iter().map(|v| -v * half).collect();
        let upper: Vec<Complex64> = up1.iter().map(|v| -v * half).collect();
        let lu = TridiagonalLu::new(&lower, &vec![Complex64::new(1.0, 0.0); w], &upper);

        let source = I * self.coupling * half;
        let mut resp_plus = vec![ZERO; w];
        resp_plus[plus] = source;
        lu.solve(&mut resp_plus);
        let mut resp_minus = vec![ZERO; w];
        resp_minus[minus] = source;
        lu.solve(&mut resp_minus);

        let mut next = vec![ZERO; n * w];
        for i in 0..n {
            let y = self.atoms.cell(i);
            let out = &mut next[i * w..(i + 1) * w];
            for k in 0..w {
                let mut kv = ZERO;
                if k > 0 {
                    kv += lo0[k] * y[k - 1];
                }
                if k + 1 < w {
                    kv += up0[k] * y[k + 1];
                }
                out[k] = y[k] + kv * half;
            }
            out[plus] += source * self.fields.e_plus[i];
            out[minus] += source * self.fields.e_minus[i];
            for (o, d) in out.iter_mut().zip(&decay) {
                *o *= d;
            }
            lu.solve(out);
        }

        let fields = match &self.drive {
            FieldDrive::Prescribed(f) => f.clone(),
            FieldDrive::SelfConsistent => {
                let response = [[resp_plus[plus], resp_minus[plus]], [resp_plus[minus], resp_minus[minus]]];
                let homogeneous_plus: Vec<Complex64> = (0..n).map(|i| next[i * w + plus]).collect();
                let homogeneous_minus: Vec<Complex64> = (0..n).map(|i| next[i * w + minus]).collect();
                self.solve_field_bvp(&response, &homogeneous_plus, &homogeneous_minus)
            }
        };
        for i in 0..n {
            let (ep, em) = (fields.e_plus[i], fields.e_minus[i]);
            let out = &mut next[i * w..(i + 1) * w];
            for k in 0..w {
                out[k] += resp_plus[k] * ep + resp_minus[k] * em;
            }
        }

        self.atoms.data = next;
        self.fields = fields;
        self.t = t1;
        self.step_count += 1;
        if let Some((cell, mode)) = self.atoms.first_non_finite() {
            return Err(Error::NumericBlowup {
                step: self.step_count,
                detail: format!("non-finite coherence in cell {cell}, harmonic {mode} at t = {t1}"),
            });
        }
        Ok(())
    }

    /// Fields consistent with `S^(±1) = a/b + P·(E⁺, E⁻)` in every cell and
    /// the trapezoidal propagation relations with zero inflow.
    fn solve_field_bvp(&self, response: &Mat2, a: &[Complex64], b: &[Complex64]) -> FieldPair {
        let n = self.grid.n_z;
        let one = Complex64::new(1.0, 0.0);
        let mu = I * (self.coupling / self.sched.light_speed()) * (0.5 * self.grid.dz());
        let p = response;
        let row_a = [one - mu * p[0][0], -mu * p[0][1]];
        let row_b = [-mu * p[1][0], one - mu * p[1][1]];
        let lower: Mat2 = [[-one - mu * p[0][0], -mu * p[0][1]], [ZERO, ZERO]];
        let upper: Mat2 = [[ZERO, ZERO], [-mu * p[1][0], -one - mu * p[1][1]]];

        let mut inv_diag: Vec<Mat2> = Vec::with_capacity(n);
        let mut rhs: Vec<[Complex64; 2]> = Vec::with_capacity(n);
        for i in 0..n {
            let mut d: Mat2 = [
                if i == 0 { [one, ZERO] } else { row_a },
                if i == n - 1 { [ZERO, one] } else { row_b },
            ];
            let mut r = [
                if i == 0 { ZERO } else { mu * (a[i - 1] + a[i]) },
                if i == n - 1 { ZERO } else { mu * (b[i] + b[i + 1]) },
            ];
            if i > 0 {
                let factor = mul2(&lower, &inv_diag[i - 1]);
                let fu = mul2(&factor, &upper);
                let fr = apply2(&factor, rhs[i - 1]);
                for rr in 0..2 {
                    r[rr] -= fr[rr];
                    for c in 0..2 {
                        d[rr][c] -= fu[rr][c];
                    }
                }
            }
            inv_diag.push(inv2(&d));
            rhs.push(r);
        }
        let mut out = FieldPair::zeros(n);
        let mut next = [ZERO, ZERO];
        for i in (0..n).rev() {
            let mut r = rhs[i];
            if i + 1 < n {
                let un = apply2(&upper, next);
                r[0] -= un[0];
                r[1] -= un[1];
            }
            next = apply2(&inv_diag[i], r);
            out.e_plus[i] = next[0];
            out.e_minus[i] = next[1];
        }
        out
    }

    /// Advance to `t_target` in equal steps no longer than `dt_max`.
    pub fn advance(&mut self, t_target: f64, dt_max: f64) -> Result<()> {
        let span = t_target - self.t;
        if span < 0.0 {
            return Err(Error::Domain(format!(
                "cannot advance backwards from t = {} to {t_target}",
                self.t
            )));
        }
        if span == 0.0 {
            return Ok(());
        }
        let steps = (span / dt_max - 1e-9).ceil().max(1.0) as usize;
        let dt = span / steps as f64;
        for _ in 0..steps {
            self.step(dt)?;
        }
        self.t = t_target;
        Ok(())
    }

    /// Polariton amplitudes implied by the current state. Returns `true`
    /// alongside when the probe fields were too weak and the Raman
    /// harmonics were used instead.
    pub fn polariton(&self) -> Result<(PolaritonField, bool)> {
        let s = self.sched.eval(self.t)?;
        let cos_theta = s.cos_theta();
        let n = self.grid.n_z;
        if cos_theta > COS_THETA_FLOOR {
            let psi_plus = self.fields.e_plus.iter().map(|e| e / cos_theta).collect();
            let psi_minus = self.fields.e_minus.iter().map(|e| e / cos_theta).collect();
            return Ok((PolaritonField::new(self.grid, psi_plus, psi_minus, self.t)?, false));
        }
        let (kp, km) = self.sched.kappa_at(self.t);
        let q = km / kp;
        let sin_theta = s.sin_theta();
        let mut psi_plus = Vec::with_capacity(n);
        let mut psi_minus = Vec::with_capacity(n);
        for i in 0..n {
            let p = -kp * self.atoms.get(i, 0) / sin_theta;
            psi_plus.push(p);
            psi_minus.push(q * p - kp * self.atoms.get(i, -2) / sin_theta);
        }
        Ok((PolaritonField::new(self.grid, psi_plus, psi_minus, self.t)?, true))
    }

    pub fn snapshot(&self) -> Result<FullSnapshot> {
        let (psi, from_atoms) = self.polariton()?;
        Ok(FullSnapshot {
            t: self.t,
            fields: self.fields.clone(),
            raman_dc: self.atoms.harmonic(0),
            psi,
            psi_from_atoms: from_atoms,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FullSnapshot {
    pub t: f64,
    pub fields: FieldPair,
    /// `S_bc^(0)`.
    pub raman_dc: Vec<Complex64>,
    pub psi: PolaritonField,
    pub psi_from_atoms: bool,
}

#[derive(Clone, Debug)]
pub struct FullRun {
    pub snapshots: Vec<FullSnapshot>,
    pub warnings: Vec<String>,
    pub dt: f64,
    pub final_state: FullSolver,
}

/// Integrate the self-consistent model, emitting a snapshot at each time.
pub fn run_full(
    pulse: &InitialPulse,
    sched: &CouplingSchedule,
    medium: &MediumParams,
    grid: &GridSpec,
    modes: usize,
    times: &[f64],
    dt_max: Option<f64>,
) -> Result<FullRun> {
    let dt = dt_max.unwrap_or_else(|| default_time_step(medium));
    let mut solver = FullSolver::new(pulse, sched, medium, grid, modes, FieldDrive::SelfConsistent)?;
    let mut snapshots = Vec::with_capacity(times.len());
    let mut warned = false;
    for &t in times {
        solver.advance(t, dt)?;
        let snap = solver.snapshot()?;
        if snap.psi_from_atoms && !warned {
            warned = true;
            solver.warnings.push(format!(
                "cosθ below {COS_THETA_FLOOR:e} at t = {t}; polariton rebuilt from the Raman coherence"
            ));
        }
        snapshots.push(snap);
    }
    Ok(FullRun {
        snapshots,
        warnings: solver.warnings.clone(),
        dt,
        final_state: solver,
    })
}

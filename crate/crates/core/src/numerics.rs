//! Small grid utilities shared by the solvers.

use num_complex::Complex64;

/// Trapezoidal quadrature of uniformly spaced samples.
pub fn trapezoid(values: &[f64], dz: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => dz * (values[1..n - 1].iter().sum::<f64>() + 0.5 * (values[0] + values[n - 1])),
    }
}

/// Interpolation used to evaluate a gridded profile between nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Interpolation {
    /// Two-point linear (first-order upwind when used for shifts ≤ one cell).
    Linear,
    /// Four-point Lagrange cubic.
    Cubic,
}

/// Sample `out[i] = f(z_i − shift)` where `shift` is in units of cells and
/// the profile is taken to be zero outside the grid.
pub fn shift_profile(values: &[Complex64], shift: f64, interp: Interpolation, out: &mut [Complex64]) {
    let n = values.len() as isize;
    let at = |k: isize| {
        if k < 0 || k >= n {
            Complex64::new(0.0, 0.0)
        } else {
            values[k as usize]
        }
    };
    let whole = shift.floor();
    // position x = i − whole − frac, between nodes base−1 and base
    let frac = shift - whole;
    let m = whole as isize;
    if frac == 0.0 {
        for (i, o) in out.iter_mut().enumerate() {
            *o = at(i as isize - m);
        }
        return;
    }
    match interp {
        Interpolation::Linear => {
            // x = (i − m − 1) + (1 − frac)
            let w1 = 1.0 - frac;
            for (i, o) in out.iter_mut().enumerate() {
                let base = i as isize - m - 1;
                *o = at(base) * frac + at(base + 1) * w1;
            }
        }
        Interpolation::Cubic => {
            // local coordinate s ∈ (0, 1) measured from node base = i − m − 1
            let s = 1.0 - frac;
            let w_m1 = -s * (s - 1.0) * (s - 2.0) / 6.0;
            let w_0 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
            let w_1 = -(s + 1.0) * s * (s - 2.0) / 2.0;
            let w_2 = (s + 1.0) * s * (s - 1.0) / 6.0;
            for (i, o) in out.iter_mut().enumerate() {
                let base = i as isize - m - 1;
                *o = at(base - 1) * w_m1 + at(base) * w_0 + at(base + 1) * w_1 + at(base + 2) * w_2;
            }
        }
    }
}

/// Fourth-order central first derivative; zero outside the grid.
pub fn derivative(values: &[Complex64], dz: f64, out: &mut [Complex64]) {
    let n = values.len() as isize;
    let at = |k: isize| {
        if k < 0 || k >= n {
            Complex64::new(0.0, 0.0)
        } else {
            values[k as usize]
        }
    };
    let scale = 1.0 / (12.0 * dz);
    for (i, o) in out.iter_mut().enumerate() {
        let i = i as isize;
        *o = (at(i - 2) - at(i - 1) * 8.0 + at(i + 1) * 8.0 - at(i + 2)) * scale;
    }
}

/// Solve a tridiagonal system in place (Thomas algorithm, no pivoting).
///
/// `lower[0]` and `upper[n-1]` are ignored. `rhs` is overwritten with the
/// solution.
pub fn solve_tridiagonal(
    lower: &[Complex64],
    diag: &[Complex64],
    upper: &[Complex64],
    rhs: &mut [Complex64],
) {
    let n = diag.len();
    let mut c_prime = vec![Complex64::new(0.0, 0.0); n];
    let mut denom = diag[0];
    c_prime[0] = upper[0] / denom;
    rhs[0] /= denom;
    for i in 1..n {
        denom = diag[i] - lower[i] * c_prime[i - 1];
        if i < n - 1 {
            c_prime[i] = upper[i] / denom;
        }
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        rhs[i] = rhs[i] - c_prime[i] * rhs[i + 1];
    }
}

/// LU factors of a tridiagonal matrix, reusable for many right-hand sides.
#[derive(Clone, Debug)]
pub struct TridiagonalLu {
    lower: Vec<Complex64>,
    c_prime: Vec<Complex64>,
    inv_denom: Vec<Complex64>,
}

impl TridiagonalLu {
    /// Same storage convention as [`solve_tridiagonal`].
    pub fn new(lower: &[Complex64], diag: &[Complex64], upper: &[Complex64]) -> Self {
        let n = diag.len();
        let mut c_prime = vec![Complex64::new(0.0, 0.0); n];
        let mut inv_denom = vec![Complex64::new(0.0, 0.0); n];
        let mut denom = diag[0];
        for i in 0..n {
            if i > 0 {
                denom = diag[i] - lower[i] * c_prime[i - 1];
            }
            inv_denom[i] = denom.inv();
            if i < n - 1 {
                c_prime[i] = upper[i] * inv_denom[i];
            }
        }
        Self {
            lower: lower.to_vec(),
            c_prime,
            inv_denom,
        }
    }

    pub fn solve(&self, rhs: &mut [Complex64]) {
        let n = rhs.len();
        rhs[0] *= self.inv_denom[0];
        for i in 1..n {
            rhs[i] = (rhs[i] - self.lower[i] * rhs[i - 1]) * self.inv_denom[i];
        }
        for i in (0..n - 1).rev() {
            rhs[i] = rhs[i] - self.c_prime[i] * rhs[i + 1];
        }
    }
}

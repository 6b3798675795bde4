//! Dense brute-force Trotter propagators and measured energy shifts.
//!
//! This is the only place complex arithmetic is used.

use nalgebra::{Complex, DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::analysis::fit_power_law;
use crate::error::{Error, Result};
use crate::fock::{to_dense, SectorBasis};
use crate::hamiltonian::TrotterSequence;

pub type CMatrix = DMatrix<Complex<f64>>;

/// Generic mixing weight used to diagonalize commuting real and imaginary
/// parts together.
const MIX: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// exp(−i t M) for a real symmetric matrix M.
pub fn evolution(m: &DMatrix<f64>, t: f64) -> CMatrix {
    let eig = SymmetricEigen::new(m.clone());
    let q = eig.eigenvectors.map(|x| Complex::new(x, 0.0));
    let phases = eig.eigenvalues.map(|l| Complex::from_polar(1.0, -l * t));
    let scaled = CMatrix::from_fn(q.nrows(), q.ncols(), |i, j| q[(i, j)] * phases[j]);
    scaled * q.transpose()
}

/// Symmetric Trotter step [U_m ⋯ U_1][U_1 ⋯ U_m] with U_α = exp(−i H_α Δt/2).
pub fn trotter_propagator(seq: &TrotterSequence, delta_t: f64, basis: &SectorBasis) -> Result<CMatrix> {
    if !(delta_t > 0.0 && delta_t.is_finite()) {
        return Err(Error::Domain(format!("time step must be positive, got {delta_t}")));
    }
    let dim = basis.dim();
    let halves: Vec<CMatrix> = seq
        .fragments
        .iter()
        .map(|f| Ok(evolution(&to_dense(f, basis)?, delta_t / 2.0)))
        .collect::<Result<_>>()?;
    let mut forward = CMatrix::identity(dim, dim);
    for u in &halves {
        forward *= u;
    }
    let mut backward = CMatrix::identity(dim, dim);
    for u in halves.iter().rev() {
        backward *= u;
    }
    Ok(backward * forward)
}

/// max |(U†U − I)_ij|.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.nrows();
    let p = u.adjoint() * u - CMatrix::identity(n, n);
    p.iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// Eigenphases and real orthonormal eigenvectors of a complex-symmetric
/// unitary U = A + iB (A, B real symmetric and commuting).
fn symmetric_unitary_eigen(u: &CMatrix) -> (Vec<f64>, DMatrix<f64>) {
    let a = u.map(|z| z.re);
    let b = u.map(|z| z.im);
    let a = (&a + a.transpose()) * 0.5;
    let b = (&b + b.transpose()) * 0.5;
    let eig = SymmetricEigen::new(&a + &b * MIX);
    let q = eig.eigenvectors;
    let phases = (0..q.ncols())
        .map(|k| {
            let v = q.column(k);
            let re = v.dot(&(&a * v));
            let im = v.dot(&(&b * v));
            im.atan2(re)
        })
        .collect();
    (phases, q)
}

/// Largest absolute eigenvalue gap tolerance treated as a degeneracy.
const DEGENERACY_TOL: f64 = 1e-8;

/// Measured shift E_eff − E_i of eigenstate `state_index` (ascending order of
/// the Hamiltonian Σ H_α in `basis`), where E_eff = −phase/Δt of the matched
/// eigenvector of U_TS(Δt).
pub fn measured_trotter_shift(
    seq: &TrotterSequence,
    delta_t: f64,
    basis: &SectorBasis,
    state_index: usize,
) -> Result<f64> {
    let h = to_dense(&seq.total(), basis)?;
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    let target = *order
        .get(state_index)
        .ok_or_else(|| Error::Domain(format!("state index {state_index} out of range")))?;
    let energy = eig.eigenvalues[target];
    let scale = eig.eigenvalues.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    if order
        .iter()
        .any(|&k| k != target && (eig.eigenvalues[k] - energy).abs() < DEGENERACY_TOL * scale)
    {
        return Err(Error::Numerical(format!(
            "eigenvalue {energy} is degenerate; the shift is not well defined"
        )));
    }
    if (energy * delta_t).abs() >= std::f64::consts::PI {
        return Err(Error::Domain(format!(
            "|E Δt| = {:.3} ≥ π: phases wrap around; use a smaller time step",
            (energy * delta_t).abs()
        )));
    }
    let psi = eig.eigenvectors.column(target);
    let u = trotter_propagator(seq, delta_t, basis)?;
    let (phases, q) = symmetric_unitary_eigen(&u);
    let (best, overlap) = (0..q.ncols())
        .map(|k| (k, q.column(k).dot(&psi).powi(2)))
        .max_by(|x, y| x.1.total_cmp(&y.1))
        .expect("nonempty");
    if overlap < 0.5 {
        return Err(Error::Numerical(format!(
            "ambiguous eigenvector match (max overlap {overlap:.3})"
        )));
    }
    Ok(-phases[best] / delta_t - energy)
}

/// Comparison of measured shifts with the Δt² prediction ⟨V⟩Δt².
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConsistencyReport {
    /// ⟨ψ|V|ψ⟩ at Δt = 1.
    pub predicted: f64,
    pub delta_ts: Vec<f64>,
    pub shifts: Vec<f64>,
    /// |shift − predicted Δt²|.
    pub residuals: Vec<f64>,
    /// (4 r(Δt) − r(2Δt))/3 with r = shift/Δt², at the Richardson step.
    pub richardson_step: f64,
    pub richardson: f64,
    pub richardson_relative_error: f64,
    /// Log-log slope of the residuals against Δt.
    pub residual_slope: f64,
}

/// Time steps and eigenstate for [`perturbative_consistency`].
#[derive(Debug, Clone, Copy)]
pub struct ConsistencyPlan {
    pub state_index: usize,
    pub richardson_step: f64,
    pub dt_max: f64,
    pub dt_min: f64,
    pub n_points: usize,
}

impl Default for ConsistencyPlan {
    fn default() -> Self {
        ConsistencyPlan {
            state_index: 0,
            richardson_step: 0.025,
            dt_max: 0.1,
            dt_min: 0.01,
            n_points: 5,
        }
    }
}

/// Measure shifts at log-spaced Δt from `dt_max` down to `dt_min` and compare
/// with `predicted` (the Δt = 1 expectation of V in the same eigenstate).
pub fn perturbative_consistency(
    seq: &TrotterSequence,
    basis: &SectorBasis,
    predicted: f64,
    plan: &ConsistencyPlan,
) -> Result<ConsistencyReport> {
    let ConsistencyPlan {
        state_index,
        richardson_step,
        dt_max,
        dt_min,
        n_points,
    } = *plan;
    if n_points < 2 {
        return Err(Error::Config("need at least two time steps".into()));
    }
    let delta_ts: Vec<f64> = (0..n_points)
        .map(|i| dt_max * (dt_min / dt_max).powf(i as f64 / (n_points - 1) as f64))
        .collect();
    let shifts = delta_ts
        .iter()
        .map(|&dt| measured_trotter_shift(seq, dt, basis, state_index))
        .collect::<Result<Vec<_>>>()?;
    let residuals: Vec<f64> = delta_ts
        .iter()
        .zip(&shifts)
        .map(|(dt, s)| (s - predicted * dt * dt).abs())
        .collect();
    let r = |dt: f64| -> Result<f64> { Ok(measured_trotter_shift(seq, dt, basis, state_index)? / (dt * dt)) };
    let richardson = (4.0 * r(richardson_step)? - r(2.0 * richardson_step)?) / 3.0;
    let richardson_relative_error = if predicted != 0.0 {
        ((richardson - predicted) / predicted).abs()
    } else {
        richardson.abs()
    };
    let points: Vec<(f64, f64)> = delta_ts
        .iter()
        .copied()
        .zip(residuals.iter().copied())
        .filter(|(_, y)| *y > 0.0)
        .collect();
    let residual_slope = if points.len() >= 3 {
        fit_power_law(&points)?.exponent
    } else {
        f64::NAN
    };
    Ok(ConsistencyReport {
        predicted,
        delta_ts,
        shifts,
        residuals,
        richardson_step,
        richardson,
        richardson_relative_error,
        residual_slope,
    })
}

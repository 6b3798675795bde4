//! Restarted Lanczos for the lowest eigenpair of a symmetric linear map.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct LanczosOptions {
    pub krylov_dim: usize,
    pub max_restarts: usize,
    /// Absolute bound on ‖Av − θv‖.
    pub residual_tol: f64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions {
            krylov_dim: 80,
            max_restarts: 200,
            residual_tol: 1e-9,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Lowest eigenvalue and unit eigenvector of the symmetric map `matvec`
/// (`matvec(x, y)` writes y = A x). Full reorthogonalization; the start
/// vector is fixed so results are reproducible.
pub fn lowest_eigenpair(
    dim: usize,
    matvec: impl Fn(&[f64], &mut [f64]),
    opts: LanczosOptions,
) -> Result<(f64, Vec<f64>)> {
    if dim == 0 {
        return Err(Error::Domain("empty space".into()));
    }
    let mut start: Vec<f64> = (0..dim)
        .map(|i| 1.0 + 0.1 * ((i as f64 + 1.0) * 0.618_033_988_749_895).fract())
        .collect();
    let mut best = (f64::INFINITY, Vec::new(), f64::INFINITY);
    let mut scratch = vec![0.0; dim];
    for _ in 0..=opts.max_restarts {
        let s = norm(&start);
        start.iter_mut().for_each(|x| *x /= s);
        let k_max = opts.krylov_dim.min(dim);
        let mut basis: Vec<Vec<f64>> = vec![start.clone()];
        let mut alpha = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        for j in 0..k_max {
            matvec(&basis[j], &mut scratch);
            let a = dot(&basis[j], &scratch);
            alpha.push(a);
            let mut w = scratch.clone();
            // two passes of Gram-Schmidt against the whole basis
            for _ in 0..2 {
                for q in &basis {
                    let c = dot(q, &w);
                    w.iter_mut().zip(q).for_each(|(wi, qi)| *wi -= c * qi);
                }
            }
            let b = norm(&w);
            if j + 1 == k_max || b < 1e-13 * a.abs().max(1.0) {
                break;
            }
            beta.push(b);
            w.iter_mut().for_each(|x| *x /= b);
            basis.push(w);
        }
        let k = alpha.len();
        let mut t = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alpha[i];
            if i + 1 < k {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let (imin, _) = eig
            .eigenvalues
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        let coeffs = eig.eigenvectors.column(imin);
        let mut ritz = vec![0.0; dim];
        for (q, c) in basis.iter().zip(coeffs.iter()) {
            ritz.iter_mut().zip(q).for_each(|(r, qi)| *r += c * qi);
        }
        let rn = norm(&ritz);
        ritz.iter_mut().for_each(|x| *x /= rn);
        matvec(&ritz, &mut scratch);
        let theta = dot(&ritz, &scratch);
        let residual = scratch
            .iter()
            .zip(&ritz)
            .map(|(h, v)| (h - theta * v).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual < best.2 {
            best = (theta, ritz.clone(), residual);
        }
        if residual <= opts.residual_tol {
            return Ok((theta, ritz));
        }
        start = ritz;
    }
    Err(Error::Numerical(format!(
        "Lanczos did not converge: residual {:.3e} after {} restarts",
        best.2, opts.max_restarts
    )))
}

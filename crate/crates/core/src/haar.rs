//! Haar-random states and the statistics of ⟨v|V|v⟩ over them.

use nalgebra::{Complex, DMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::NormalOrderedOperator;
use crate::error::{Error, Result};
use crate::fock::{eigen_decomposition, expectation, CiVector, SectorBasis};

/// Samples per independently seeded block.
pub const BLOCK_SIZE: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Ensemble {
    /// Uniform on the real unit sphere (orthogonally invariant).
    Real,
    /// Uniform on the complex unit sphere (unitarily invariant).
    #[default]
    Complex,
}

/// 𝕍(|a_k|²) = 2/(2^N(2^N+1)) − 1/2^{2N} for complex Haar vectors in 2^N dimensions.
pub fn haar_projection_variance(n: i64) -> Result<f64> {
    if n <= 0 {
        return Err(Error::Domain(format!("orbital count must be positive, got {n}")));
    }
    if n > 1000 {
        return Ok(0.0);
    }
    Ok(projection_variance_dim(2f64.powi(n as i32), Ensemble::Complex))
}

/// Variance of one squared component of a Haar vector in dimension d.
pub fn projection_variance_dim(d: f64, ensemble: Ensemble) -> f64 {
    match ensemble {
        Ensemble::Complex => 2.0 / (d * (d + 1.0)) - 1.0 / (d * d),
        Ensemble::Real => 3.0 / (d * (d + 2.0)) - 1.0 / (d * d),
    }
}

/// Exact variance of Σ λ_k |a_k|² (components are negatively correlated, so
/// this differs from Σλ²·𝕍(|a_k|²) unless Σλ = 0 and d is large).
pub fn exact_error_variance(eigenvalues: &[f64], ensemble: Ensemble) -> f64 {
    let d = eigenvalues.len() as f64;
    let s1: f64 = eigenvalues.iter().sum();
    let s2: f64 = eigenvalues.iter().map(|l| l * l).sum();
    match ensemble {
        Ensemble::Complex => (d * s2 - s1 * s1) / (d * d * (d + 1.0)),
        Ensemble::Real => 2.0 * (d * s2 - s1 * s1) / (d * d * (d + 2.0)),
    }
}

fn rng_for_block(seed: u64, block: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block as u64);
    rng
}

/// Normalized vector of independent real Gaussians.
pub fn sample_haar_real<R: rand::Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.0 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Normalized vector of independent complex Gaussians.
pub fn sample_haar_complex<R: rand::Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Complex<f64>> {
    loop {
        let v: Vec<Complex<f64>> = (0..dim)
            .map(|_| Complex::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
            .collect();
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 0.0 {
            return v.into_iter().map(|z| z / n).collect();
        }
    }
}

/// Real Haar vector over a basis.
pub fn sample_haar_vector<R: rand::Rng + ?Sized>(basis: std::sync::Arc<SectorBasis>, rng: &mut R) -> CiVector {
    let amplitudes = sample_haar_real(basis.dim(), rng);
    CiVector::new(basis, amplitudes).expect("finite amplitudes")
}

/// Squared components |a|² of every sample, in the weight basis `weights`:
/// returns Σ_k w_k |a_k|² per sample, in sample order.
pub fn sample_weighted_projections(
    weights: &[f64],
    n_samples: usize,
    seed: u64,
    ensemble: Ensemble,
) -> Vec<f64> {
    let dim = weights.len();
    let blocks = n_samples.div_ceil(BLOCK_SIZE);
    let per_block: Vec<Vec<f64>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = rng_for_block(seed, b);
            let count = BLOCK_SIZE.min(n_samples - b * BLOCK_SIZE);
            (0..count)
                .map(|_| match ensemble {
                    Ensemble::Complex => sample_haar_complex(dim, &mut rng)
                        .iter()
                        .zip(weights)
                        .map(|(z, w)| w * z.norm_sqr())
                        .sum(),
                    Ensemble::Real => sample_haar_real(dim, &mut rng)
                        .iter()
                        .zip(weights)
                        .map(|(x, w)| w * x * x)
                        .sum(),
                })
                .collect()
        })
        .collect();
    per_block.concat()
}

/// Mean, standard error of the mean, variance and standard error of the variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleMoments {
    pub mean: f64,
    pub mean_stderr: f64,
    pub variance: f64,
    pub variance_stderr: f64,
}

pub fn moments(samples: &[f64]) -> SampleMoments {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let sq: Vec<f64> = samples.iter().map(|x| (x - mean).powi(2)).collect();
    let variance = sq.iter().sum::<f64>() / (n - 1.0).max(1.0);
    let sq_mean = sq.iter().sum::<f64>() / n;
    let sq_var = sq.iter().map(|s| (s - sq_mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    SampleMoments {
        mean,
        mean_stderr: (variance / n).sqrt(),
        variance,
        variance_stderr: (sq_var / n).sqrt(),
    }
}

/// Monte Carlo check of the single-component moments of Haar vectors in
/// dimension 2^n (complex ensemble): E|a_k|² and 𝕍|a_k|².
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProjectionCheck {
    pub n: usize,
    pub dim: usize,
    pub component: usize,
    pub n_samples: usize,
    pub seed: u64,
    pub moments: SampleMoments,
    pub expected_mean: f64,
    pub expected_variance: f64,
}

impl ProjectionCheck {
    pub fn mean_z(&self) -> f64 {
        (self.moments.mean - self.expected_mean).abs() / self.moments.mean_stderr
    }

    pub fn variance_z(&self) -> f64 {
        (self.moments.variance - self.expected_variance).abs() / self.moments.variance_stderr
    }
}

pub fn projection_check(n: usize, component: usize, n_samples: usize, seed: u64) -> Result<ProjectionCheck> {
    let dim = 1usize << n;
    if component >= dim {
        return Err(Error::Domain(format!("component {component} outside dimension {dim}")));
    }
    let mut weights = vec![0.0; dim];
    weights[component] = 1.0;
    let samples = sample_weighted_projections(&weights, n_samples, seed, Ensemble::Complex);
    Ok(ProjectionCheck {
        n,
        dim,
        component,
        n_samples,
        seed,
        moments: moments(&samples),
        expected_mean: 1.0 / dim as f64,
        expected_variance: haar_projection_variance(n as i64)?,
    })
}

/// Distribution of ⟨v|V|v⟩ over Haar-random v.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HaarReport {
    pub n_samples: usize,
    pub seed: u64,
    pub block_size: usize,
    pub ensemble: Ensemble,
    pub dim: usize,
    pub moments: SampleMoments,
    pub empirical_std: f64,
    /// Tr(V)/d (zero for error operators).
    pub expected_mean: f64,
    /// Σλ²·𝕍(|a_k|²).
    pub diagonal_variance: f64,
    /// Variance including covariances between components.
    pub exact_variance: f64,
    /// √(Σλ²)/d.
    pub concentration_scale: f64,
    /// empirical std / concentration scale; O(1) when the bound holds.
    pub concentration_ratio: f64,
    pub mean_consistent: bool,
}

/// Sample ⟨v|V|v⟩ = Σ λ_k |⟨v|k⟩|²; sampling in V's eigenbasis is valid by invariance.
pub fn haar_error_distribution(
    eigenvalues: &[f64],
    n_samples: usize,
    seed: u64,
    ensemble: Ensemble,
) -> Result<HaarReport> {
    if eigenvalues.is_empty() {
        return Err(Error::Domain("empty spectrum".into()));
    }
    if n_samples < 2 {
        return Err(Error::Config("need at least two samples".into()));
    }
    let d = eigenvalues.len() as f64;
    let samples = sample_weighted_projections(eigenvalues, n_samples, seed, ensemble);
    let m = moments(&samples);
    let s1: f64 = eigenvalues.iter().sum();
    let s2: f64 = eigenvalues.iter().map(|l| l * l).sum();
    let expected_mean = s1 / d;
    let scale = s2.sqrt() / d;
    let std = m.variance.sqrt();
    Ok(HaarReport {
        n_samples,
        seed,
        block_size: BLOCK_SIZE,
        ensemble,
        dim: eigenvalues.len(),
        moments: m,
        empirical_std: std,
        expected_mean,
        diagonal_variance: s2 * projection_variance_dim(d, ensemble),
        exact_variance: exact_error_variance(eigenvalues, ensemble),
        concentration_scale: scale,
        concentration_ratio: if scale > 0.0 { std / scale } else { 0.0 },
        mean_consistent: (m.mean - expected_mean).abs() <= 3.0 * m.mean_stderr || m.mean_stderr == 0.0 && m.mean == expected_mean,
    })
}

/// ⟨ψ_i|V|ψ_i⟩ over the eigenvectors of H.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenstateDistribution {
    pub energies: Vec<f64>,
    pub errors: Vec<f64>,
    pub std_dev: f64,
    /// Index ranges [start, end) of H eigenvalues equal within tolerance; the
    /// errors inside a cluster depend on the solver's choice of basis.
    pub degenerate_clusters: Vec<(usize, usize)>,
}

pub fn eigenstate_error_distribution(
    v: &NormalOrderedOperator,
    h: &NormalOrderedOperator,
    basis: std::sync::Arc<SectorBasis>,
) -> Result<EigenstateDistribution> {
    let (energies, vectors): (Vec<f64>, DMatrix<f64>) = eigen_decomposition(h, &basis)?;
    let errors = (0..energies.len())
        .map(|i| {
            let psi = CiVector::new(basis.clone(), vectors.column(i).iter().copied().collect())?;
            expectation(v, &psi)
        })
        .collect::<Result<Vec<f64>>>()?;
    let n = errors.len() as f64;
    let mean = errors.iter().sum::<f64>() / n;
    let std_dev = (errors.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / n).sqrt();
    let scale = energies.iter().fold(1.0f64, |m, e| m.max(e.abs()));
    let mut clusters = Vec::new();
    let mut start = 0;
    for i in 1..=energies.len() {
        if i == energies.len() || energies[i] - energies[i - 1] > 1e-8 * scale {
            if i - start > 1 {
                clusters.push((start, i));
            }
            start = i;
        }
    }
    Ok(EigenstateDistribution {
        energies,
        errors,
        std_dev,
        degenerate_clusters: clusters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        assert!((haar_projection_variance(1).unwrap() - 1.0 / 12.0).abs() < 1e-15);
        assert!((haar_projection_variance(2).unwrap() - 3.0 / 80.0).abs() < 1e-15);
        let v20 = haar_projection_variance(20).unwrap() * 4f64.powi(20);
        assert!((v20 - 1.0).abs() < 1e-5);
        assert!(matches!(haar_projection_variance(0), Err(Error::Domain(_))));
        // diag(+1, −1): Σλ²·𝕍 = 1/6 but the true variance is 1/3
        assert!((exact_error_variance(&[1.0, -1.0], Ensemble::Complex) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn zero_operator_samples_are_zero() {
        let r = haar_error_distribution(&[0.0; 8], 100, 1, Ensemble::Complex).unwrap();
        assert_eq!(r.moments.mean, 0.0);
        assert_eq!(r.moments.variance, 0.0);
        assert!(r.mean_consistent);
    }

    #[test]
    fn two_level_distribution() {
        let r = haar_error_distribution(&[1.0, -1.0], 100_000, 3, Ensemble::Complex).unwrap();
        assert!(r.moments.mean.abs() <= 3.0 * r.moments.mean_stderr);
        assert!((r.moments.variance - 1.0 / 3.0).abs() <= 3.0 * r.moments.variance_stderr);
        assert!((r.diagonal_variance - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn real_ensemble_variance() {
        let d = 6;
        let mut w = vec![0.0; d];
        w[2] = 1.0;
        let m = moments(&sample_weighted_projections(&w, 50_000, 5, Ensemble::Real));
        let want = projection_variance_dim(d as f64, Ensemble::Real);
        assert!((want - 2.0 * (d as f64 - 1.0) / ((d * d) as f64 * (d as f64 + 2.0))).abs() < 1e-15);
        assert!((m.variance - want).abs() <= 3.0 * m.variance_stderr);
    }

    #[test]
    fn seeded_and_thread_independent() {
        let w = [0.5, -0.25, 1.0, 0.0];
        let a = sample_weighted_projections(&w, 10_000, 42, Ensemble::Complex);
        let b = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| sample_weighted_projections(&w, 10_000, 42, Ensemble::Complex));
        assert_eq!(a, b);
        assert_ne!(a, sample_weighted_projections(&w, 10_000, 43, Ensemble::Complex));
    }

    fn ks_statistic(a: &mut [f64], b: &mut [f64]) -> f64 {
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        let (mut i, mut j, mut d) = (0, 0, 0.0f64);
        while i < a.len() && j < b.len() {
            if a[i] <= b[j] {
                i += 1;
            } else {
                j += 1;
            }
            d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
        }
        d
    }

    #[test]
    fn rotation_invariance() {
        // |⟨v|k⟩|² for a basis vector k and for k' = (e0 + e1 + e2 + e3)/2
        let n = 10_000;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut first = Vec::with_capacity(n);
        let mut second = Vec::with_capacity(n);
        for _ in 0..n {
            let v = sample_haar_complex(4, &mut rng);
            first.push(v[1].norm_sqr());
            let w = sample_haar_complex(4, &mut rng);
            let s: Complex<f64> = w.iter().sum::<Complex<f64>>() * 0.5;
            second.push(s.norm_sqr());
        }
        let d = ks_statistic(&mut first, &mut second);
        // two-sample critical value at the 1% level
        let crit = 1.628 * ((2 * n) as f64 / (n * n) as f64).sqrt();
        assert!(d < crit, "{d} ≥ {crit}");
    }

    #[test]
    fn eigenstate_errors_for_diagonal_operators() {
        use crate::algebra::TermKey;
        use std::sync::Arc;
        let mut h = NormalOrderedOperator::zero(2);
        let mut v = NormalOrderedOperator::zero(2);
        h.add_term(TermKey::from_indices(&[0], &[0]).unwrap().0, 1.0);
        h.add_term(TermKey::from_indices(&[1], &[1]).unwrap().0, 2.0);
        v.add_term(TermKey::from_indices(&[0], &[0]).unwrap().0, 0.5);
        v.add_term(TermKey::from_indices(&[1], &[1]).unwrap().0, -0.5);
        let d = eigenstate_error_distribution(&v, &h, Arc::new(SectorBasis::full(2).unwrap())).unwrap();
        // states |00⟩, |01⟩, |10⟩, |11⟩ with energies 0, 1, 2, 3
        assert_eq!(d.energies, vec![0.0, 1.0, 2.0, 3.0]);
        assert_eq!(d.errors, vec![0.0, 0.5, -0.5, 0.0]);
        assert!(d.degenerate_clusters.is_empty());
    }
}

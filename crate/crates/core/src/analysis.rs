//! End-to-end error analyses: error/norm ratios, ansatz estimates, orbital
//! marginals and power-law fits.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{bits, NormalOrderedOperator};
use crate::ci::{ci_ground_state_of, CiTruncation};
use crate::error::{Error, Result, StageExt};
use crate::fock::{expectation, ground_state_with, spectral_norm_with, CiVector, SectorBasis, SolverOptions};
use crate::hamiltonian::{
    build_trotter_sequence, MolecularSystem, OrderingStrategy, SCHEMA_VERSION,
};
use crate::stateprep::{prep_cost, StatePrepCost, DEFAULT_SUPPORT_THRESHOLD};
use crate::trotter::{build_error_operator, estimate_trotter_number, ErrorOperator, InvariantReport};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub r_squared: f64,
}

/// Least-squares line through (ln x, ln y): y ≈ prefactor · x^exponent.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < 3 {
        return Err(Error::Domain(format!("need at least 3 points, got {}", points.len())));
    }
    if let Some((x, y)) = points.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())) {
        return Err(Error::Domain(format!("power-law data must be positive, got ({x}, {y})")));
    }
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    if sxx <= 1e-300 {
        return Err(Error::Numerical("singular fit: all x values are equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = lx.iter().zip(&ly).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Ok(PowerLawFit {
        exponent: slope,
        prefactor: intercept.exp(),
        r_squared,
    })
}

/// Symmetric N×N matrix of summed |coefficients| per orbital pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalMatrix {
    pub n: usize,
    /// Row-major.
    pub values: Vec<f64>,
}

impl MarginalMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.values.chunks(self.n.max(1)).map(|r| r.iter().sum()).collect()
    }

    /// Orbital with the largest row sum (first on ties).
    pub fn dominant_orbital(&self) -> Option<usize> {
        let sums = self.row_sums();
        (0..self.n).fold(None, |best: Option<usize>, i| match best {
            Some(b) if sums[b] >= sums[i] => Some(b),
            _ => Some(i),
        })
    }

    /// Σ_{i≤j} M[i][j].
    pub fn upper_total(&self) -> f64 {
        (0..self.n).flat_map(|i| (i..self.n).map(move |j| (i, j))).map(|(i, j)| self.get(i, j)).sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# orbital marginals of |coefficient| (hartree), {} x {} symmetric, row i column j\n", self.n, self.n);
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| format!("{:e}", self.get(i, j))).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Bin |coefficient| of every term over the orbital pairs it touches. A term
/// adds its full magnitude to every unordered pair {i, j} of distinct orbitals
/// in its index set, and to (i, i) for each orbital carrying both a creation
/// and an annihilation.
pub fn orbital_marginals(op: &NormalOrderedOperator) -> MarginalMatrix {
    let n = op.n_orbitals();
    let mut values = vec![0.0; n * n];
    for (key, c) in op.sorted_terms() {
        let a = c.abs();
        let support: Vec<usize> = bits(key.support()).collect();
        for (x, &i) in support.iter().enumerate() {
            for &j in &support[x + 1..] {
                values[i * n + j] += a;
                values[j * n + i] += a;
            }
        }
        for i in bits(key.creations & key.annihilations) {
            values[i * n + i] += a;
        }
    }
    MarginalMatrix { n, values }
}

/// ⟨ψ_CI|V|ψ_CI⟩ with ψ_CI zero-padded into `sector`.
pub fn ansatz_error(ci_vector: &CiVector, v: &ErrorOperator, sector: Arc<SectorBasis>) -> Result<f64> {
    expectation(&v.op, &ci_vector.embed(sector)?)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalysisOptions {
    pub ordering: OrderingStrategy,
    pub delta_t: f64,
    pub ci_levels: Vec<usize>,
    pub target_delta: f64,
    pub time: f64,
    /// Spectral norm over the full Fock space rather than the n-electron sector.
    pub full_fock: bool,
    /// Include a state-preparation cost for the CISD vector at this error.
    pub prep_delta: Option<f64>,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            ordering: OrderingStrategy::default(),
            delta_t: 1.0,
            ci_levels: vec![0, 2],
            target_delta: 1e-3,
            time: 1.0,
            full_fock: false,
            prep_delta: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnsatzEntry {
    pub level: usize,
    pub label: String,
    pub dimension: usize,
    /// Variational energy including core energy (hartree).
    pub energy: f64,
    /// ⟨ψ_CI|V|ψ_CI⟩ (hartree at the report's Δt).
    pub error: f64,
    /// |exact − ansatz| / |exact|; absent when the exact error is zero.
    pub residual_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrotterNumber {
    pub time: f64,
    pub target_delta: f64,
    pub mu: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorAnalysisReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub molecule: String,
    pub basis: String,
    pub basis_kind: String,
    pub fixture_sha256: Option<String>,
    pub n_spin_orbitals: usize,
    pub n_electrons: usize,
    pub z_max: Option<u32>,
    pub ordering: String,
    pub delta_t: f64,
    /// Space of the spectral norm: `sector` or `full-fock`.
    pub norm_space: String,
    pub n_fragments: usize,
    pub n_hamiltonian_terms: usize,
    pub n_error_terms: usize,
    pub error_one_norm: f64,
    pub ground_energy: f64,
    /// Signed ⟨ψ₀|V|ψ₀⟩.
    pub ground_state_error: f64,
    pub ground_state_error_abs: f64,
    pub spectral_norm: f64,
    /// |⟨ψ₀|V|ψ₀⟩| / ‖V‖.
    pub ratio: f64,
    pub ansatz: Vec<AnsatzEntry>,
    pub trotter_number: TrotterNumber,
    pub invariants: InvariantReport,
    pub seeds: Vec<u64>,
    pub prep_cost: Option<StatePrepCost>,
}

impl ErrorAnalysisReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// Everything an analysis computes, for callers that need more than the report.
pub struct Analysis {
    pub report: ErrorAnalysisReport,
    pub hamiltonian: NormalOrderedOperator,
    pub error_operator: ErrorOperator,
    pub sector: Arc<SectorBasis>,
    pub ground_state: CiVector,
}

pub fn analyze(sys: &MolecularSystem, options: &AnalysisOptions) -> Result<ErrorAnalysisReport> {
    Ok(analyze_full(sys, options)?.report)
}

pub fn analyze_full(sys: &MolecularSystem, options: &AnalysisOptions) -> Result<Analysis> {
    let solver = SolverOptions::default();
    let seq = build_trotter_sequence(sys, options.ordering);
    let h = seq.total();
    let v = build_error_operator(&seq, options.delta_t).stage("error operator")?;
    let invariants = v.invariants();
    let sector = Arc::new(
        SectorBasis::sector(sys.n_spin_orbitals, sys.n_electrons).stage("basis")?,
    );
    let (e0, psi0) = ground_state_with(&h, sector.clone(), solver).stage("ground state")?;
    let err = expectation(&v.op, &psi0).stage("ground-state error")?;
    let norm_space = if options.full_fock {
        Arc::new(SectorBasis::full(sys.n_spin_orbitals).stage("basis")?)
    } else {
        sector.clone()
    };
    let norm = spectral_norm_with(&v.op, norm_space, solver).stage("spectral norm")?;
    let ratio = if norm > 0.0 { err.abs() / norm } else { 0.0 };

    let mut ansatz = Vec::new();
    let mut cisd_vector = None;
    for &level in &options.ci_levels {
        let trunc = CiTruncation::new(sys, level).stage("ci truncation")?;
        let sol = ci_ground_state_of(&h, sys.core_energy, &trunc, solver).stage("ci ground state")?;
        let error = ansatz_error(&sol.vector, &v, sector.clone()).stage("ansatz error")?;
        ansatz.push(AnsatzEntry {
            level,
            label: trunc.label(),
            dimension: sol.vector.basis.dim(),
            energy: sol.energy,
            error,
            residual_fraction: (err != 0.0).then(|| (err - error).abs() / err.abs()),
        });
        if level == 2 {
            cisd_vector = Some(sol.vector);
        }
    }
    // Δt² coefficient of the ground-state shift
    let unit_error = err.abs() / (options.delta_t * options.delta_t);
    let mu = estimate_trotter_number(unit_error, options.time, options.target_delta).stage("trotter number")?;
    let prep = match options.prep_delta {
        None => None,
        Some(delta) => {
            let vector = match cisd_vector {
                Some(v) => v,
                None => {
                    let level = 2.min(sys.n_spin_orbitals - sys.n_electrons);
                    let trunc = CiTruncation::new(sys, level).stage("ci truncation")?;
                    ci_ground_state_of(&h, sys.core_energy, &trunc, solver).stage("ci ground state")?.vector
                }
            };
            Some(
                prep_cost(sys.n_spin_orbitals, sys.n_electrons, delta, Some(&vector), DEFAULT_SUPPORT_THRESHOLD)
                    .stage("state preparation")?,
            )
        }
    };
    let report = ErrorAnalysisReport {
        schema_version: SCHEMA_VERSION,
        tool_version: TOOL_VERSION.into(),
        molecule: sys.metadata.label.clone(),
        basis: sys.metadata.basis.clone(),
        basis_kind: sys.metadata.basis_kind.label().into(),
        fixture_sha256: None,
        n_spin_orbitals: sys.n_spin_orbitals,
        n_electrons: sys.n_electrons,
        z_max: sys.metadata.z_max,
        ordering: options.ordering.label().into(),
        delta_t: options.delta_t,
        norm_space: if options.full_fock { "full-fock" } else { "sector" }.into(),
        n_fragments: seq.len(),
        n_hamiltonian_terms: h.len(),
        n_error_terms: v.op.len(),
        error_one_norm: v.op.one_norm(),
        ground_energy: e0 + sys.core_energy,
        ground_state_error: err,
        ground_state_error_abs: err.abs(),
        spectral_norm: norm,
        ratio,
        ansatz,
        trotter_number: TrotterNumber {
            time: options.time,
            target_delta: options.target_delta,
            mu,
        },
        invariants,
        seeds: Vec::new(),
        prep_cost: prep,
    };
    Ok(Analysis {
        report,
        hamiltonian: h,
        error_operator: v,
        sector,
        ground_state: psi0,
    })
}

/// One value per line after a `#` header.
pub fn values_csv(header: &str, values: &[f64]) -> String {
    let mut out = format!("# {header}\n");
    for v in values {
        out.push_str(&format!("{v:e}\n"));
    }
    out
}

/// Fraction of eigenvalues within `fraction` × spectral radius of zero.
pub fn near_zero_fraction(spectrum: &[f64], fraction: f64) -> f64 {
    let radius = spectrum.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if spectrum.is_empty() {
        return 0.0;
    }
    let count = spectrum.iter().filter(|x| x.abs() <= fraction * radius).count();
    count as f64 / spectrum.len() as f64
}

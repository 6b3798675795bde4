//! Clifford+T cost model for preparing CISD states.
//!
//! A state with D nonzero amplitudes is prepared by D + 1 reductions, each
//! costing at most 22k + 64(N − 3) T gates, where k is the least denominator
//! exponent needed to reach preparation error δ.

use serde::{Deserialize, Serialize};

use crate::algebra::binomial;
use crate::error::{Error, Result};
use crate::fock::CiVector;
use crate::hamiltonian::MolecularSystem;

/// Amplitudes with magnitude at or below this do not count toward D.
pub const DEFAULT_SUPPORT_THRESHOLD: f64 = 1e-10;

/// Smallest register the construction is stated for.
pub const MIN_CONSTRUCTION_ORBITALS: usize = 5;

/// Constant C in t_count ≤ C (D L + N D), L = max(1, log₂(D/δ)).
pub const ENVELOPE_CONSTANT: f64 = 160.0;

/// 1 + C(n,1)C(N−n,1) + C(n,2)C(N−n,2).
pub fn cisd_support_dimension(n_orbitals: usize, n_electrons: usize) -> Result<u128> {
    if n_electrons > n_orbitals {
        return Err(Error::Domain(format!(
            "{n_electrons} electrons do not fit in {n_orbitals} spin orbitals"
        )));
    }
    let virt = n_orbitals - n_electrons;
    Ok(1 + binomial(n_electrons, 1) * binomial(virt, 1) + binomial(n_electrons, 2) * binomial(virt, 2))
}

/// k = ⌈¼[1 + log₂((D+2)/(√(1+δ) − 1)²)]⌉, at least 1.
pub fn select_k(d: u128, delta: f64) -> Result<u32> {
    if d == 0 {
        return Err(Error::Domain("support dimension must be at least 1".into()));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Domain(format!("preparation error must be positive, got {delta}")));
    }
    // √(1+δ) − 1 without cancellation
    let s = delta / ((1.0 + delta).sqrt() + 1.0);
    let x = 0.25 * (1.0 + ((d as f64 + 2.0) / (s * s)).log2());
    Ok(x.ceil().max(1.0) as u32)
}

/// 2(D+2)2^{−4k} + 2√(2(D+2))2^{−2k}: the error bound reached at exponent k.
pub fn kliuchnikov_bound(d: u128, k: u32) -> f64 {
    let dp = d as f64 + 2.0;
    2.0 * dp * 2f64.powi(-4 * k as i32) + 2.0 * (2.0 * dp).sqrt() * 2f64.powi(-2 * k as i32)
}

/// (22k + 64(N − 3))(D + 1).
pub fn t_count_cisd(n_orbitals: usize, d: u128, k: u32) -> Result<u128> {
    if n_orbitals < MIN_CONSTRUCTION_ORBITALS {
        return Err(Error::Domain(format!(
            "the construction needs N ≥ {MIN_CONSTRUCTION_ORBITALS}, got {n_orbitals}"
        )));
    }
    if d == 0 || k == 0 {
        return Err(Error::Domain("D and k must be at least 1".into()));
    }
    Ok((22 * k as u128 + 64 * (n_orbitals as u128 - 3)) * (d + 1))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatePrepCost {
    pub support_dimension: u128,
    /// `amplitudes` when D was counted from a state vector, else `cisd-count`.
    pub support_source: String,
    pub support_threshold: f64,
    pub n_spin_orbitals: usize,
    /// Register size used in the cost formulas (N, or the minimum of 5 when
    /// N is smaller).
    pub construction_orbitals: usize,
    pub padded_register: bool,
    pub delta: f64,
    pub k: u32,
    pub t_count: u128,
    pub qubit_count: usize,
    /// Fewer than two zero amplitudes remain in the 2^N embedding, so the
    /// construction may need one more qubit.
    pub extra_qubit_possible: bool,
    pub kliuchnikov_bound: f64,
    pub envelope: f64,
    pub within_envelope: bool,
}

/// Cost of preparing the CISD state of `sys` to error `delta`. D is counted
/// from `amplitudes` when given, otherwise the CISD configuration count.
pub fn prep_cost_report(
    sys: &MolecularSystem,
    delta: f64,
    amplitudes: Option<&CiVector>,
) -> Result<StatePrepCost> {
    prep_cost(sys.n_spin_orbitals, sys.n_electrons, delta, amplitudes, DEFAULT_SUPPORT_THRESHOLD)
}

pub fn prep_cost(
    n_orbitals: usize,
    n_electrons: usize,
    delta: f64,
    amplitudes: Option<&CiVector>,
    threshold: f64,
) -> Result<StatePrepCost> {
    let (d, source) = match amplitudes {
        Some(v) => (v.support(threshold).max(1) as u128, "amplitudes"),
        None => (cisd_support_dimension(n_orbitals, n_electrons)?, "cisd-count"),
    };
    let k = select_k(d, delta)?;
    let n_eff = n_orbitals.max(MIN_CONSTRUCTION_ORBITALS);
    let t_count = t_count_cisd(n_eff, d, k)?;
    let l = (d as f64 / delta).log2().max(1.0);
    let envelope = ENVELOPE_CONSTANT * (d as f64 * l + n_eff as f64 * d as f64);
    let zeros = if n_orbitals >= 127 {
        u128::MAX
    } else {
        (1u128 << n_orbitals).saturating_sub(d)
    };
    Ok(StatePrepCost {
        support_dimension: d,
        support_source: source.into(),
        support_threshold: threshold,
        n_spin_orbitals: n_orbitals,
        construction_orbitals: n_eff,
        padded_register: n_eff != n_orbitals,
        delta,
        k,
        t_count,
        qubit_count: n_eff + 4,
        extra_qubit_possible: zeros < 2,
        kliuchnikov_bound: kliuchnikov_bound(d, k),
        envelope,
        within_envelope: (t_count as f64) <= envelope,
    })
}

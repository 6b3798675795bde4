//! Leading-order error operator of the symmetric (second-order) Trotter formula.

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::algebra::{merge_maps, NormalOrderedOperator, TermKey, DEFAULT_DROP_TOLERANCE};
use crate::error::{Error, Result};
use crate::hamiltonian::{OrderingStrategy, TrotterSequence};

/// Number of fixed work units for the outer commutator sum. Independent of the
/// thread count so results do not depend on it.
const OUTER_CHUNKS: usize = 64;

/// V such that the symmetric Trotter step U(Δt) = exp(−iΔt(H + V + O(Δt⁴))).
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorOperator {
    pub op: NormalOrderedOperator,
    pub delta_t: f64,
    pub ordering: OrderingStrategy,
    pub n_fragments: usize,
}

/// Invariant residuals of an error operator, each relative to Σ|coefficients|.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub one_norm: f64,
    pub trace: f64,
    pub hermitian_defect: f64,
    pub number_commutator: f64,
}

impl InvariantReport {
    /// True when every residual is within `rel` × Σ|coefficients|.
    pub fn within(&self, rel: f64) -> bool {
        let bound = rel * self.one_norm;
        self.trace.abs() <= bound
            && self.hermitian_defect <= bound
            && self.number_commutator <= bound
    }
}

impl ErrorOperator {
    /// The same operator at another time step (coefficients scale as Δt²).
    pub fn at_delta_t(&self, delta_t: f64) -> ErrorOperator {
        let s = delta_t / self.delta_t;
        ErrorOperator {
            op: self.op.scaled(s * s),
            delta_t,
            ..self.clone()
        }
    }

    pub fn invariants(&self) -> InvariantReport {
        let n = self.op.n_orbitals();
        let number = NormalOrderedOperator::number_operator(n);
        let comm = self
            .op
            .commutator_raw(&number)
            .expect("same orbital count");
        InvariantReport {
            one_norm: self.op.one_norm(),
            trace: self.op.trace_full(),
            hermitian_defect: self.op.hermitian_defect(),
            number_commutator: comm.max_abs_coefficient(),
        }
    }
}

/// Build V for the fragment sequence H_1 … H_m:
///
/// V = (Δt²/12) Σ_β Σ_{γ<β} Σ_{α≤β} (1 − δ_αβ/2) [H_α, [H_β, H_γ]].
///
/// With C_β = [H_β, Σ_{γ<β} H_γ] the sum regroups as
/// Σ_α [H_α, ½C_α + Σ_{β>α} C_β], so each inner commutator is formed once.
pub fn build_error_operator(seq: &TrotterSequence, delta_t: f64) -> Result<ErrorOperator> {
    if !(delta_t > 0.0 && delta_t.is_finite()) {
        return Err(Error::Domain(format!("time step must be positive, got {delta_t}")));
    }
    let n = seq.n_orbitals;
    let m = seq.fragments.len();
    let frags: Vec<Vec<(TermKey, f64)>> = seq.fragments.iter().map(|f| f.sorted_terms()).collect();

    // C_β for every β, in parallel; each is a deterministic sequential sum.
    let inner: Vec<FxHashMap<TermKey, f64>> = (0..m)
        .into_par_iter()
        .map(|beta| {
            let mut c = NormalOrderedOperator::zero(n);
            let hb = &seq.fragments[beta];
            for gamma in 0..beta {
                c.accumulate_commutator(hb, &seq.fragments[gamma], 1.0);
            }
            let mut map = c.into_map();
            map.retain(|_, v| *v != 0.0);
            map
        })
        .collect();

    // Outer sum over α in fixed chunks. Chunk j covers α ∈ [lo_j, hi_j) and
    // needs the suffix Σ_{β≥hi_j} C_β as its starting point.
    let chunk = m.div_ceil(OUTER_CHUNKS).max(1);
    let bounds: Vec<(usize, usize)> = (0..m).step_by(chunk).map(|lo| (lo, (lo + chunk).min(m))).collect();
    let mut suffixes = vec![FxHashMap::default(); bounds.len()];
    {
        let mut running: FxHashMap<TermKey, f64> = FxHashMap::default();
        for (j, &(lo, hi)) in bounds.iter().enumerate().rev() {
            suffixes[j] = running.clone();
            for c in inner[lo..hi].iter().rev() {
                add_map(&mut running, c, 1.0);
            }
        }
    }
    let partials: Vec<FxHashMap<TermKey, f64>> = bounds
        .par_iter()
        .zip(suffixes.into_par_iter())
        .map(|(&(lo, hi), mut suffix)| {
            let mut out = NormalOrderedOperator::zero(n);
            for alpha in (lo..hi).rev() {
                let ha = NormalOrderedOperator::from_sorted(n, &frags[alpha]);
                add_map(&mut suffix, &inner[alpha], 0.5);
                let target = NormalOrderedOperator::from_map(n, std::mem::take(&mut suffix));
                out.accumulate_commutator(&ha, &target, 1.0);
                suffix = target.into_map();
                add_map(&mut suffix, &inner[alpha], 0.5);
            }
            out.into_map()
        })
        .collect();
    let scale = delta_t * delta_t / 12.0;
    let mut op = NormalOrderedOperator::from_map(n, merge_maps(partials)).scaled(scale);
    op.prune(DEFAULT_DROP_TOLERANCE);
    Ok(ErrorOperator {
        op,
        delta_t,
        ordering: seq.ordering,
        n_fragments: m,
    })
}

fn add_map(into: &mut FxHashMap<TermKey, f64>, from: &FxHashMap<TermKey, f64>, scale: f64) {
    let mut entries: Vec<_> = from.iter().collect();
    entries.sort_unstable_by(|a, b| a.0.cmp(b.0));
    for (k, v) in entries {
        *into.entry(*k).or_insert(0.0) += scale * v;
    }
}

/// μ = ⌈t √(ε/δ)⌉ (at least 1), where ε = |⟨V⟩| at Δt = 1.
pub fn estimate_trotter_number(error_expectation: f64, time: f64, delta: f64) -> Result<u64> {
    if !(error_expectation >= 0.0 && error_expectation.is_finite()) {
        return Err(Error::Domain(format!(
            "error expectation must be a non-negative magnitude, got {error_expectation}"
        )));
    }
    if !(time > 0.0 && time.is_finite()) {
        return Err(Error::Domain(format!("evolution time must be positive, got {time}")));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Domain(format!("target error must be positive, got {delta}")));
    }
    let x = time * (error_expectation / delta).sqrt();
    // values within rounding noise of an integer are not bumped to the next one
    let nearest = x.round();
    let mu = if (x - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest
    } else {
        x.ceil()
    };
    if mu >= u64::MAX as f64 {
        return Err(Error::Domain("Trotter number overflows".into()));
    }
    Ok((mu as u64).max(1))
}

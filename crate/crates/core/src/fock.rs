//! Occupation-number bases, matrix-free operator action and eigensolvers.
//!
//! Bit p of a state is spin orbital p. A ladder operator on orbital p picks up
//! the sign (−1)^(number of occupied orbitals below p); strings act right to
//! left.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::algebra::{binomial, NormalOrderedOperator, TermKey};
use crate::error::{Error, Result};
use crate::lanczos::{lowest_eigenpair, LanczosOptions};

/// Largest dimension [`to_dense`] will materialize.
pub const DEFAULT_DENSE_LIMIT: usize = 16384;

/// Largest dimension solved by dense diagonalization in [`ground_state`] and
/// [`spectral_norm`]; larger spaces use Lanczos.
pub const DEFAULT_DENSE_EIGEN_LIMIT: usize = 1024;

/// Relative Hermiticity tolerance for eigen-solvers.
const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OccupationState {
    pub bits: u64,
}

impl OccupationState {
    pub fn new(bits: u64) -> Self {
        OccupationState { bits }
    }

    pub fn n_electrons(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_occupied(&self, p: usize) -> bool {
        self.bits >> p & 1 == 1
    }

    /// Ket string with orbital 0 rightmost, e.g. `|0011⟩`.
    pub fn ket(&self, n_orbitals: usize) -> String {
        let digits: String = (0..n_orbitals)
            .rev()
            .map(|p| if self.is_occupied(p) { '1' } else { '0' })
            .collect();
        format!("|{digits}⟩")
    }
}

impl fmt::Display for OccupationState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#b}", self.bits)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    /// All 2^N states.
    Full,
    /// Every state with the given electron count.
    Sector(usize),
    /// A chosen set of states; operators act as their projection onto it.
    Subset,
}

/// Ordered list of occupation states spanning the space operators act on.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorBasis {
    n_orbitals: usize,
    kind: BasisKind,
    states: Vec<u64>,
    index: FxHashMap<u64, usize>,
}

impl SectorBasis {
    /// The full Fock space (index equals the state bits).
    pub fn full(n_orbitals: usize) -> Result<Self> {
        if n_orbitals > 30 {
            return Err(Error::Resource(format!(
                "full Fock space of {n_orbitals} spin orbitals is too large"
            )));
        }
        Ok(SectorBasis {
            n_orbitals,
            kind: BasisKind::Full,
            states: (0..1u64 << n_orbitals).collect(),
            index: FxHashMap::default(),
        })
    }

    /// All states with `n_electrons` set bits, ascending.
    pub fn sector(n_orbitals: usize, n_electrons: usize) -> Result<Self> {
        if n_electrons > n_orbitals || n_orbitals > crate::algebra::MAX_ORBITALS {
            return Err(Error::Domain(format!(
                "no sector with {n_electrons} electrons in {n_orbitals} spin orbitals"
            )));
        }
        let count = binomial(n_orbitals, n_electrons);
        if count > 1 << 28 {
            return Err(Error::Resource(format!("sector dimension {count} is too large")));
        }
        let mut states = Vec::with_capacity(count as usize);
        if n_electrons == 0 {
            states.push(0);
        } else {
            let mut s: u64 = (1u64 << n_electrons) - 1;
            let limit = if n_orbitals == 64 { u64::MAX } else { 1u64 << n_orbitals };
            loop {
                states.push(s);
                // next combination with the same popcount (Gosper)
                let c = s & s.wrapping_neg();
                let r = s.wrapping_add(c);
                if r == 0 {
                    break;
                }
                let next = (((r ^ s) >> 2) / c) | r;
                if next >= limit || next < s {
                    break;
                }
                s = next;
            }
        }
        Ok(Self::with_index(n_orbitals, BasisKind::Sector(n_electrons), states))
    }

    /// Arbitrary states (deduplicated and sorted).
    pub fn subset(n_orbitals: usize, mut states: Vec<u64>) -> Result<Self> {
        states.sort_unstable();
        states.dedup();
        if let Some(&max) = states.last() {
            if n_orbitals < 64 && max >> n_orbitals != 0 {
                return Err(Error::Structural(format!(
                    "state {max:#b} uses orbitals beyond {n_orbitals}"
                )));
            }
        }
        Ok(Self::with_index(n_orbitals, BasisKind::Subset, states))
    }

    fn with_index(n_orbitals: usize, kind: BasisKind, states: Vec<u64>) -> Self {
        let index = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        SectorBasis {
            n_orbitals,
            kind,
            states,
            index,
        }
    }

    pub fn n_orbitals(&self) -> usize {
        self.n_orbitals
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[u64] {
        &self.states
    }

    pub fn state(&self, i: usize) -> OccupationState {
        OccupationState::new(self.states[i])
    }

    pub fn position(&self, state: u64) -> Option<usize> {
        match self.kind {
            BasisKind::Full => ((state as usize) < self.states.len()).then_some(state as usize),
            _ => self.index.get(&state).copied(),
        }
    }

    /// Whether every state has the same electron count (so only
    /// number-conserving operators are allowed).
    pub fn fixed_number(&self) -> bool {
        !matches!(self.kind, BasisKind::Full)
    }

    pub fn label(&self) -> String {
        match self.kind {
            BasisKind::Full => format!("full Fock space (N={})", self.n_orbitals),
            BasisKind::Sector(n) => format!("sector N={}, n={n}", self.n_orbitals),
            BasisKind::Subset => format!("subset of {} states (N={})", self.dim(), self.n_orbitals),
        }
    }
}

/// Real amplitudes over a basis.
#[derive(Debug, Clone, PartialEq)]
pub struct CiVector {
    pub basis: Arc<SectorBasis>,
    pub amplitudes: Vec<f64>,
}

impl CiVector {
    pub fn new(basis: Arc<SectorBasis>, amplitudes: Vec<f64>) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::Structural(format!(
                "{} amplitudes for a basis of dimension {}",
                amplitudes.len(),
                basis.dim()
            )));
        }
        if amplitudes.iter().any(|a| !a.is_finite()) {
            return Err(Error::Numerical("non-finite amplitude".into()));
        }
        Ok(CiVector { basis, amplitudes })
    }

    /// Unit vector on one basis state.
    pub fn basis_state(basis: Arc<SectorBasis>, state: u64) -> Result<Self> {
        let i = basis
            .position(state)
            .ok_or_else(|| Error::Domain(format!("state {state:#b} not in basis")))?;
        let mut amplitudes = vec![0.0; basis.dim()];
        amplitudes[i] = 1.0;
        Ok(CiVector { basis, amplitudes })
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::Numerical("cannot normalize the zero vector".into()));
        }
        Ok(CiVector {
            basis: self.basis.clone(),
            amplitudes: self.amplitudes.iter().map(|a| a / n).collect(),
        })
    }

    pub fn dot(&self, other: &CiVector) -> f64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a * b).sum()
    }

    /// Re-express in a larger basis, zero outside this vector's states.
    pub fn embed(&self, target: Arc<SectorBasis>) -> Result<Self> {
        let mut amplitudes = vec![0.0; target.dim()];
        for (s, a) in self.basis.states().iter().zip(&self.amplitudes) {
            let i = target
                .position(*s)
                .ok_or_else(|| Error::Domain(format!("state {s:#b} missing from target basis")))?;
            amplitudes[i] = *a;
        }
        Ok(CiVector {
            basis: target,
            amplitudes,
        })
    }

    /// Number of amplitudes with magnitude above `threshold`.
    pub fn support(&self, threshold: f64) -> usize {
        self.amplitudes.iter().filter(|a| a.abs() > threshold).count()
    }
}

/// Operator prepared for repeated action: terms of the adjoint grouped by
/// annihilation mask, so each output row gathers its inputs.
struct Compiled {
    groups: FxHashMap<u64, Vec<(u64, f64)>>,
    max_ann: u32,
}

#[inline]
fn below(p: usize) -> u64 {
    (1u64 << p) - 1
}

/// Apply a†[cre] a[ann] (canonical order) to `state`; `None` if it vanishes.
#[inline]
pub(crate) fn act(key: TermKey, state: u64) -> Option<(u64, f64)> {
    if state & key.annihilations != key.annihilations {
        return None;
    }
    let mut s = state;
    let mut odd = 0u32;
    // rightmost annihilator has the smallest index
    let mut a = key.annihilations;
    while a != 0 {
        let p = a.trailing_zeros() as usize;
        odd += (s & below(p)).count_ones();
        s &= !(1u64 << p);
        a &= a - 1;
    }
    if s & key.creations != 0 {
        return None;
    }
    let mut c = key.creations;
    while c != 0 {
        let p = c.trailing_zeros() as usize;
        odd += (s & below(p)).count_ones();
        s |= 1u64 << p;
        c &= c - 1;
    }
    Some((s, if odd & 1 == 0 { 1.0 } else { -1.0 }))
}

fn compile(op: &NormalOrderedOperator, basis: &SectorBasis) -> Result<Compiled> {
    if op.n_orbitals() != basis.n_orbitals() {
        return Err(Error::Structural(format!(
            "operator on {} spin orbitals applied in a basis over {}",
            op.n_orbitals(),
            basis.n_orbitals()
        )));
    }
    if basis.fixed_number() && !op.conserves_number() {
        return Err(Error::Domain(
            "operator does not conserve particle number but the basis has a fixed electron count"
                .into(),
        ));
    }
    let mut groups: FxHashMap<u64, Vec<(u64, f64)>> = FxHashMap::default();
    let mut max_ann = 0;
    for (key, c) in op.sorted_terms() {
        let (adj, sign) = key.adjoint();
        max_ann = max_ann.max(adj.n_annihilations());
        groups
            .entry(adj.annihilations)
            .or_default()
            .push((adj.creations, sign * c));
    }
    Ok(Compiled { groups, max_ann })
}

impl Compiled {
    /// ⟨row|op|·⟩ contributions: calls `f(column_state, value)`.
    #[inline]
    fn row(&self, state: u64, mut f: impl FnMut(u64, f64)) {
        let mut visit = |ann: u64| {
            if let Some(list) = self.groups.get(&ann) {
                for &(cre, c) in list {
                    if let Some((t, sign)) = act(
                        TermKey {
                            creations: cre,
                            annihilations: ann,
                        },
                        state,
                    ) {
                        f(t, sign * c);
                    }
                }
            }
        };
        if (state.count_ones() as usize) < 20 && (1usize << state.count_ones()) <= 4 * self.groups.len() {
            // enumerate submasks of the occupied set
            let mut sub = state;
            loop {
                if sub.count_ones() <= self.max_ann {
                    visit(sub);
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & state;
            }
        } else {
            let mut masks: Vec<u64> = self.groups.keys().copied().filter(|a| state & a == *a).collect();
            masks.sort_unstable();
            for ann in masks {
                visit(ann);
            }
        }
    }
}

fn apply_compiled(c: &Compiled, basis: &SectorBasis, v: &[f64]) -> Vec<f64> {
    let row = |&state: &u64| {
        let mut acc = 0.0;
        c.row(state, |t, value| {
            if let Some(j) = basis.position(t) {
                acc += value * v[j];
            }
        });
        acc
    };
    if basis.dim() >= 256 {
        basis.states().par_iter().map(row).collect()
    } else {
        basis.states().iter().map(row).collect()
    }
}

/// w = op · v (projected onto the basis for subset bases).
pub fn apply(op: &NormalOrderedOperator, v: &CiVector) -> Result<CiVector> {
    let c = compile(op, &v.basis)?;
    Ok(CiVector {
        basis: v.basis.clone(),
        amplitudes: apply_compiled(&c, &v.basis, &v.amplitudes),
    })
}

/// Matrix with M[i][j] = ⟨i|op|j⟩.
pub fn to_dense(op: &NormalOrderedOperator, basis: &SectorBasis) -> Result<DMatrix<f64>> {
    to_dense_limited(op, basis, DEFAULT_DENSE_LIMIT)
}

pub fn to_dense_limited(
    op: &NormalOrderedOperator,
    basis: &SectorBasis,
    limit: usize,
) -> Result<DMatrix<f64>> {
    let dim = basis.dim();
    if dim > limit {
        return Err(Error::Resource(format!(
            "dimension {dim} exceeds the dense limit {limit}"
        )));
    }
    let c = compile(op, basis)?;
    let rows: Vec<Vec<(usize, f64)>> = basis
        .states()
        .par_iter()
        .map(|&state| {
            let mut entries = Vec::new();
            c.row(state, |t, value| {
                if let Some(j) = basis.position(t) {
                    entries.push((j, value));
                }
            });
            entries
        })
        .collect();
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    for (i, entries) in rows.into_iter().enumerate() {
        for (j, value) in entries {
            m[(i, j)] += value;
        }
    }
    Ok(m)
}

fn check_hermitian(op: &NormalOrderedOperator) -> Result<()> {
    let defect = op.hermitian_defect();
    if defect > HERMITIAN_TOL * op.max_abs_coefficient().max(1.0) {
        return Err(Error::Domain(format!(
            "operator is not Hermitian (defect {defect:.3e})"
        )));
    }
    Ok(())
}

/// Fix the overall sign: largest-magnitude component positive.
fn fix_sign(v: &mut [f64]) {
    let (mut best, mut idx) = (0.0, 0);
    for (i, x) in v.iter().enumerate() {
        if x.abs() > best + 1e-12 {
            best = x.abs();
            idx = i;
        }
    }
    if v.get(idx).is_some_and(|x| *x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub dense_eigen_limit: usize,
    pub dense_limit: usize,
    pub lanczos: LanczosOptions,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            dense_eigen_limit: DEFAULT_DENSE_EIGEN_LIMIT,
            dense_limit: DEFAULT_DENSE_LIMIT,
            lanczos: LanczosOptions::default(),
        }
    }
}

/// Lowest eigenpair of a Hermitian operator in `basis`.
pub fn ground_state(op: &NormalOrderedOperator, basis: Arc<SectorBasis>) -> Result<(f64, CiVector)> {
    ground_state_with(op, basis, SolverOptions::default())
}

pub fn ground_state_with(
    op: &NormalOrderedOperator,
    basis: Arc<SectorBasis>,
    opts: SolverOptions,
) -> Result<(f64, CiVector)> {
    check_hermitian(op)?;
    let dim = basis.dim();
    if dim == 0 {
        return Err(Error::Domain("empty basis".into()));
    }
    let (energy, mut vector) = if dim <= opts.dense_eigen_limit {
        let m = to_dense_limited(op, &basis, opts.dense_limit)?;
        let eig = SymmetricEigen::new(m);
        let (i, e) = eig
            .eigenvalues
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        (e, eig.eigenvectors.column(i).iter().copied().collect::<Vec<_>>())
    } else {
        let c = compile(op, &basis)?;
        lowest_eigenpair(dim, |x, y| y.copy_from_slice(&apply_compiled(&c, &basis, x)), opts.lanczos)?
    };
    fix_sign(&mut vector);
    let v = CiVector::new(basis, vector)?.normalized()?;
    Ok((energy, v))
}

/// ⟨v|op|v⟩ for the normalized v, with |1 − ‖v‖| (the applied correction).
pub fn expectation_with_norm(op: &NormalOrderedOperator, v: &CiVector) -> Result<(f64, f64)> {
    let n = v.norm();
    if n == 0.0 {
        return Err(Error::Numerical("expectation in the zero vector".into()));
    }
    let w = apply(op, v)?;
    Ok((v.dot(&w) / (n * n), (1.0 - n).abs()))
}

pub fn expectation(op: &NormalOrderedOperator, v: &CiVector) -> Result<f64> {
    Ok(expectation_with_norm(op, v)?.0)
}

/// max |λ| over the basis.
pub fn spectral_norm(op: &NormalOrderedOperator, basis: Arc<SectorBasis>) -> Result<f64> {
    spectral_norm_with(op, basis, SolverOptions::default())
}

pub fn spectral_norm_with(
    op: &NormalOrderedOperator,
    basis: Arc<SectorBasis>,
    opts: SolverOptions,
) -> Result<f64> {
    check_hermitian(op)?;
    if op.is_empty() {
        return Ok(0.0);
    }
    if basis.dim() <= opts.dense_eigen_limit {
        let spec = spectrum_checked(op, &basis, opts.dense_limit)?;
        return Ok(spec.iter().fold(0.0, |m, x| m.max(x.abs())));
    }
    let (low, _) = ground_state_with(op, basis.clone(), opts)?;
    let (neg_high, _) = ground_state_with(&op.scaled(-1.0), basis, opts)?;
    Ok(low.abs().max(neg_high.abs()))
}

/// All eigenvalues, ascending.
pub fn full_spectrum(op: &NormalOrderedOperator, basis: &SectorBasis) -> Result<Vec<f64>> {
    check_hermitian(op)?;
    spectrum_checked(op, basis, DEFAULT_DENSE_LIMIT)
}

fn spectrum_checked(op: &NormalOrderedOperator, basis: &SectorBasis, limit: usize) -> Result<Vec<f64>> {
    let m = to_dense_limited(op, basis, limit)?;
    let mut values: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Eigen-decomposition (ascending eigenvalues, eigenvectors as columns).
pub fn eigen_decomposition(op: &NormalOrderedOperator, basis: &SectorBasis) -> Result<(Vec<f64>, DMatrix<f64>)> {
    check_hermitian(op)?;
    let m = to_dense(op, basis)?;
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::<f64>::zeros(m_dim(&eig), order.len());
    for (col, &i) in order.iter().enumerate() {
        let mut v: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
        fix_sign(&mut v);
        vectors.set_column(col, &nalgebra::DVector::from_vec(v));
    }
    Ok((values, vectors))
}

fn m_dim(eig: &SymmetricEigen<f64, nalgebra::Dyn>) -> usize {
    eig.eigenvectors.nrows()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{normal_order, LadderOp, LadderTerm};

    fn key(cre: &[usize], ann: &[usize]) -> (TermKey, f64) {
        TermKey::from_indices(cre, ann).unwrap()
    }

    /// Sequential right-to-left ladder application with the parity rule.
    fn raw_apply(ops: &[LadderOp], state: u64) -> Option<(u64, f64)> {
        let mut s = state;
        let mut sign = 1.0;
        for op in ops.iter().rev() {
            let p = op.orbital;
            let occ = s >> p & 1 == 1;
            if op.is_creation() == occ {
                return None;
            }
            if (s & below(p)).count_ones() % 2 == 1 {
                sign = -sign;
            }
            s ^= 1 << p;
        }
        Some((s, sign))
    }

    #[test]
    fn sector_enumeration() {
        let b = SectorBasis::sector(4, 2).unwrap();
        assert_eq!(b.states(), &[0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100]);
        assert_eq!(SectorBasis::sector(12, 4).unwrap().dim(), 495);
        assert_eq!(SectorBasis::sector(3, 0).unwrap().states(), &[0]);
        assert_eq!(SectorBasis::sector(3, 3).unwrap().states(), &[7]);
    }

    #[test]
    fn hop_sign() {
        // a1† a0 |01⟩ = +|10⟩
        let (k, s) = key(&[1], &[0]);
        assert_eq!(act(k, 0b01), Some((0b10, s)));
        let op = NormalOrderedOperator::from_index_terms(2, [(&[1usize][..], &[0usize][..], 1.0)]).unwrap();
        let basis = Arc::new(SectorBasis::full(2).unwrap());
        let v = CiVector::basis_state(basis, 0b01).unwrap();
        assert_eq!(apply(&op, &v).unwrap().amplitudes, vec![0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn number_operator_dense() {
        let m = to_dense(&NormalOrderedOperator::number_operator(2), &SectorBasis::full(2).unwrap()).unwrap();
        assert_eq!(m, DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.0, 1.0, 1.0, 2.0])));
    }

    #[test]
    fn normal_order_matches_raw_application() {
        // every length-≤4 string on 3 orbitals
        let n = 3;
        let alphabet: Vec<LadderOp> = (0..n)
            .flat_map(|p| [LadderOp::create(p), LadderOp::annihilate(p)])
            .collect();
        let mut strings: Vec<Vec<LadderOp>> = vec![vec![]];
        let mut frontier = strings.clone();
        for _ in 0..4 {
            frontier = frontier
                .iter()
                .flat_map(|s| alphabet.iter().map(move |op| [s.clone(), vec![*op]].concat()))
                .collect();
            strings.extend(frontier.iter().cloned());
        }
        let basis = SectorBasis::full(n).unwrap();
        for ops in strings {
            let no = normal_order(&LadderTerm::new(1.0, ops.clone()), n).unwrap();
            let m = to_dense(&no, &basis).unwrap();
            for s in 0..1u64 << n {
                let mut col = vec![0.0; 1 << n];
                if let Some((t, sign)) = raw_apply(&ops, s) {
                    col[t as usize] = sign;
                }
                for (t, want) in col.iter().enumerate() {
                    assert_eq!(m[(t, s as usize)], *want, "{ops:?} on {s:#b}");
                }
            }
        }
    }

    #[test]
    fn nilpotent_and_identity() {
        let basis = Arc::new(SectorBasis::full(2).unwrap());
        let v = CiVector::new(basis, vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let t = LadderTerm::new(1.0, vec![LadderOp::annihilate(0), LadderOp::annihilate(0)]);
        let zero = normal_order(&t, 2).unwrap();
        assert!(apply(&zero, &v).unwrap().amplitudes.iter().all(|a| *a == 0.0));
        let id = NormalOrderedOperator::identity(2, 1.0);
        assert_eq!(apply(&id, &v).unwrap(), v);
    }

    #[test]
    fn sector_rejects_non_conserving() {
        let op = NormalOrderedOperator::from_index_terms(2, [(&[1usize][..], &[][..], 1.0)]).unwrap();
        let basis = Arc::new(SectorBasis::sector(2, 1).unwrap());
        let v = CiVector::basis_state(basis, 1).unwrap();
        assert!(matches!(apply(&op, &v), Err(Error::Domain(_))));
    }

    #[test]
    fn spectra_and_norms() {
        let mut op = NormalOrderedOperator::zero(2);
        op.add_term(key(&[0], &[0]).0, -3.0);
        op.add_term(key(&[1], &[1]).0, 1.0);
        let basis = Arc::new(SectorBasis::sector(2, 1).unwrap());
        assert_eq!(full_spectrum(&op, &basis).unwrap(), vec![-3.0, 1.0]);
        assert_eq!(spectral_norm(&op, basis.clone()).unwrap(), 3.0);
        let (e, v) = ground_state(&op, basis).unwrap();
        assert_eq!(e, -3.0);
        assert_eq!(v.amplitudes, vec![1.0, 0.0]);
        assert_eq!(
            spectral_norm(&NormalOrderedOperator::zero(2), Arc::new(SectorBasis::full(2).unwrap())).unwrap(),
            0.0
        );
    }

    #[test]
    fn non_hermitian_rejected() {
        let op = NormalOrderedOperator::from_index_terms(2, [(&[1usize][..], &[0usize][..], 1.0)]).unwrap();
        let basis = Arc::new(SectorBasis::sector(2, 1).unwrap());
        assert!(matches!(ground_state(&op, basis), Err(Error::Domain(_))));
    }

    #[test]
    fn lanczos_agrees_with_dense() {
        let sys = crate::hamiltonian::MolecularSystem::random(4, 4, 1);
        let h = sys.hamiltonian(0.0);
        let basis = Arc::new(SectorBasis::sector(8, 4).unwrap());
        let dense = ground_state(&h, basis.clone()).unwrap();
        let opts = SolverOptions {
            dense_eigen_limit: 0,
            ..SolverOptions::default()
        };
        let iter = ground_state_with(&h, basis.clone(), opts).unwrap();
        assert!((dense.0 - iter.0).abs() < 1e-10);
        assert!(dense.1.dot(&iter.1).abs() > 1.0 - 1e-8);
        let n_dense = spectral_norm(&h, basis.clone()).unwrap();
        let n_iter = spectral_norm_with(&h, basis, opts).unwrap();
        assert!((n_dense - n_iter).abs() < 1e-8 * n_dense);
    }
}

//! Second-quantized fermionic operator algebra.
//!
//! Operators are stored as sparse sums of normal-ordered terms. A term is
//! identified by its [`TermKey`]: the set of orbitals carrying a creation
//! operator and the set carrying an annihilation operator. The operator string
//! a key stands for is fixed by convention: creations first, each group in
//! strictly descending orbital order,
//!
//! ```text
//! a†_{c1} a†_{c2} … a_{d1} a_{d2} …     c1 > c2 > …,  d1 > d2 > …
//! ```
//!
//! so a repeated index inside a group can never be stored (it is the zero
//! operator by the exclusion principle). Orbital sets are `u64` masks, which
//! caps the number of spin orbitals at [`MAX_ORBITALS`].

use std::fmt;

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_ORBITALS: usize = 64;

/// Coefficients below this magnitude are removed after accumulation passes.
pub const DEFAULT_DROP_TOLERANCE: f64 = 1e-12;

/// Terms per parallel work unit in operator products.
const PRODUCT_CHUNK: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LadderKind {
    Creation,
    Annihilation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LadderOp {
    pub orbital: usize,
    pub kind: LadderKind,
}

impl LadderOp {
    pub fn create(orbital: usize) -> Self {
        LadderOp {
            orbital,
            kind: LadderKind::Creation,
        }
    }

    pub fn annihilate(orbital: usize) -> Self {
        LadderOp {
            orbital,
            kind: LadderKind::Annihilation,
        }
    }

    pub fn is_creation(&self) -> bool {
        self.kind == LadderKind::Creation
    }
}

/// A scalar times an arbitrary (not necessarily ordered) product of ladder operators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderTerm {
    pub coeff: f64,
    pub ops: Vec<LadderOp>,
}

impl LadderTerm {
    pub fn new(coeff: f64, ops: Vec<LadderOp>) -> Self {
        LadderTerm { coeff, ops }
    }

    pub fn identity(coeff: f64) -> Self {
        LadderTerm {
            coeff,
            ops: Vec::new(),
        }
    }

    /// Hermitian conjugate: reversed string with every operator daggered.
    pub fn adjoint(&self) -> Self {
        let ops = self
            .ops
            .iter()
            .rev()
            .map(|op| LadderOp {
                orbital: op.orbital,
                kind: match op.kind {
                    LadderKind::Creation => LadderKind::Annihilation,
                    LadderKind::Annihilation => LadderKind::Creation,
                },
            })
            .collect();
        LadderTerm {
            coeff: self.coeff,
            ops,
        }
    }
}

#[inline]
fn bit(p: usize) -> u64 {
    1u64 << p
}

/// Mask of orbitals strictly below `p`.
#[inline]
fn below(p: usize) -> u64 {
    bit(p) - 1
}

/// Mask of orbitals strictly above `p`.
#[inline]
fn above(p: usize) -> u64 {
    !(below(p) | bit(p))
}

#[inline]
fn parity(exponent: u32) -> f64 {
    if exponent & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Iterate set bits in ascending order.
pub(crate) fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let p = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(p)
        }
    })
}

/// Number of inversions when the descending string `left` is followed by the
/// descending string `right` and the whole is sorted descending.
#[inline]
fn merge_inversions(left: u64, right: u64) -> u32 {
    bits(right)
        .map(|v| (left & below(v)).count_ones())
        .sum()
}

/// Canonical identity of a normal-ordered term.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize,
)]
pub struct TermKey {
    pub creations: u64,
    pub annihilations: u64,
}

impl TermKey {
    pub const IDENTITY: TermKey = TermKey {
        creations: 0,
        annihilations: 0,
    };

    /// Canonicalize a creation list followed by an annihilation list (each in
    /// the given order). Returns the key and the permutation sign, or `None`
    /// when an index repeats inside a group.
    pub fn from_indices(creations: &[usize], annihilations: &[usize]) -> Option<(TermKey, f64)> {
        let (c, sc) = sort_descending(creations)?;
        let (a, sa) = sort_descending(annihilations)?;
        Some((
            TermKey {
                creations: c,
                annihilations: a,
            },
            sc * sa,
        ))
    }

    pub fn creation_indices(&self) -> Vec<usize> {
        let mut v: Vec<usize> = bits(self.creations).collect();
        v.reverse();
        v
    }

    pub fn annihilation_indices(&self) -> Vec<usize> {
        let mut v: Vec<usize> = bits(self.annihilations).collect();
        v.reverse();
        v
    }

    pub fn n_creations(&self) -> u32 {
        self.creations.count_ones()
    }

    pub fn n_annihilations(&self) -> u32 {
        self.annihilations.count_ones()
    }

    /// Total number of ladder operators in the term.
    pub fn len(&self) -> u32 {
        self.n_creations() + self.n_annihilations()
    }

    pub fn is_empty(&self) -> bool {
        self.creations == 0 && self.annihilations == 0
    }

    pub fn is_diagonal(&self) -> bool {
        self.creations == self.annihilations
    }

    pub fn conserves_number(&self) -> bool {
        self.n_creations() == self.n_annihilations()
    }

    /// Union of all orbitals the term touches.
    pub fn support(&self) -> u64 {
        self.creations | self.annihilations
    }

    /// Highest orbital index referenced, if any.
    pub fn max_orbital(&self) -> Option<usize> {
        let s = self.support();
        (s != 0).then(|| 63 - s.leading_zeros() as usize)
    }

    /// Key of the Hermitian conjugate together with the reordering sign.
    pub fn adjoint(&self) -> (TermKey, f64) {
        let c = self.n_creations();
        let a = self.n_annihilations();
        let sign = parity((c * c.saturating_sub(1) + a * a.saturating_sub(1)) / 2);
        (
            TermKey {
                creations: self.annihilations,
                annihilations: self.creations,
            },
            sign,
        )
    }

    /// The diagonal term a†[S] a[S] equals `sign * Π n_p`; returns that sign.
    pub fn diagonal_sign(&self) -> f64 {
        let k = self.n_creations();
        parity(k * k.saturating_sub(1) / 2)
    }

    pub fn to_ops(&self) -> Vec<LadderOp> {
        self.creation_indices()
            .into_iter()
            .map(LadderOp::create)
            .chain(
                self.annihilation_indices()
                    .into_iter()
                    .map(LadderOp::annihilate),
            )
            .collect()
    }
}

impl fmt::Display for TermKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for p in self.creation_indices() {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "a{p}†")?;
            first = false;
        }
        for p in self.annihilation_indices() {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "a{p}")?;
            first = false;
        }
        Ok(())
    }
}

fn sort_descending(indices: &[usize]) -> Option<(u64, f64)> {
    let mut mask = 0u64;
    let mut inversions = 0u32;
    for (i, &p) in indices.iter().enumerate() {
        debug_assert!(p < MAX_ORBITALS);
        if mask & bit(p) != 0 {
            return None;
        }
        mask |= bit(p);
        inversions += indices[..i].iter().filter(|&&q| q < p).count() as u32;
    }
    Some((mask, parity(inversions)))
}

/// Normal-ordered product of two canonical terms, reported term by term via
/// Wick contraction of `a[A1] a†[C2]` in the middle of the product.
#[inline]
pub(crate) fn multiply_keys(lhs: TermKey, rhs: TermKey, mut emit: impl FnMut(TermKey, f64)) {
    let x = lhs.annihilations;
    let y = rhs.creations;
    let common = x & y;
    let mut sub = common;
    loop {
        // contract every orbital in `sub`
        let mut xs = x;
        let mut ys = y;
        let mut exponent = 0u32;
        for k in bits(sub) {
            exponent += (xs & below(k)).count_ones() + (ys & above(k)).count_ones();
            xs &= !bit(k);
            ys &= !bit(k);
        }
        if lhs.creations & ys == 0 && xs & rhs.annihilations == 0 {
            exponent += xs.count_ones() * ys.count_ones();
            exponent += merge_inversions(lhs.creations, ys);
            exponent += merge_inversions(xs, rhs.annihilations);
            emit(
                TermKey {
                    creations: lhs.creations | ys,
                    annihilations: xs | rhs.annihilations,
                },
                parity(exponent),
            );
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & common;
    }
}

/// Whether two terms trivially (anti)commute to zero in a commutator: disjoint
/// supports with at least one even-length string.
#[inline]
fn commute_trivially(a: TermKey, b: TermKey) -> bool {
    a.support() & b.support() == 0 && (a.len() * b.len()).is_multiple_of(2)
}

/// Sparse sum of normal-ordered fermionic terms with real coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalOrderedOperator {
    n_orbitals: usize,
    terms: FxHashMap<TermKey, f64>,
}

impl NormalOrderedOperator {
    pub fn zero(n_orbitals: usize) -> Self {
        assert!(
            n_orbitals <= MAX_ORBITALS,
            "at most {MAX_ORBITALS} spin orbitals are supported"
        );
        NormalOrderedOperator {
            n_orbitals,
            terms: FxHashMap::default(),
        }
    }

    pub fn identity(n_orbitals: usize, coeff: f64) -> Self {
        let mut op = Self::zero(n_orbitals);
        op.add_term(TermKey::IDENTITY, coeff);
        op
    }

    /// Σ_p a_p† a_p.
    pub fn number_operator(n_orbitals: usize) -> Self {
        let mut op = Self::zero(n_orbitals);
        for p in 0..n_orbitals {
            op.add_term(
                TermKey {
                    creations: bit(p),
                    annihilations: bit(p),
                },
                1.0,
            );
        }
        op
    }

    /// Build from `(creations, annihilations, coeff)` triples, each group given
    /// in arbitrary order; signs from canonical reordering are applied.
    pub fn from_index_terms<'a>(
        n_orbitals: usize,
        terms: impl IntoIterator<Item = (&'a [usize], &'a [usize], f64)>,
    ) -> Result<Self> {
        let mut op = Self::zero(n_orbitals);
        for (cre, ann, coeff) in terms {
            check_indices(n_orbitals, cre.iter().chain(ann))?;
            if let Some((key, sign)) = TermKey::from_indices(cre, ann) {
                op.add_term(key, sign * coeff);
            }
        }
        op.prune(0.0);
        Ok(op)
    }

    pub fn n_orbitals(&self) -> usize {
        self.n_orbitals
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, key: &TermKey) -> f64 {
        self.terms.get(key).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TermKey, &f64)> {
        self.terms.iter()
    }

    /// Terms sorted by key; the stable order used for serialization and reports.
    pub fn sorted_terms(&self) -> Vec<(TermKey, f64)> {
        let mut v: Vec<_> = self.terms.iter().map(|(k, c)| (*k, *c)).collect();
        v.sort_unstable_by_key(|a| a.0);
        v
    }

    /// Raw accumulation; no pruning.
    pub fn add_term(&mut self, key: TermKey, coeff: f64) {
        debug_assert!(key.max_orbital().is_none_or(|p| p < self.n_orbitals));
        *self.terms.entry(key).or_insert(0.0) += coeff;
    }

    pub fn add_scaled(&mut self, other: &NormalOrderedOperator, scale: f64) {
        for (k, c) in other.terms.iter() {
            self.add_term(*k, scale * c);
        }
    }

    pub fn scaled(&self, scale: f64) -> Self {
        NormalOrderedOperator {
            n_orbitals: self.n_orbitals,
            terms: self.terms.iter().map(|(k, c)| (*k, c * scale)).collect(),
        }
    }

    /// Remove terms with |coeff| ≤ `tol` (exact zeros are always removed).
    pub fn prune(&mut self, tol: f64) {
        self.terms.retain(|_, c| c.abs() > tol && c.is_finite() || c.is_nan());
    }

    pub fn pruned(mut self, tol: f64) -> Self {
        self.prune(tol);
        self
    }

    /// Σ |coeff|.
    pub fn one_norm(&self) -> f64 {
        self.terms.values().map(|c| c.abs()).sum()
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn all_finite(&self) -> bool {
        self.terms.values().all(|c| c.is_finite())
    }

    pub fn conserves_number(&self) -> bool {
        self.terms.keys().all(TermKey::conserves_number)
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.n_orbitals);
        for (k, c) in self.terms.iter() {
            let (adj, sign) = k.adjoint();
            out.add_term(adj, sign * c);
        }
        out
    }

    /// max over keys of |coeff(key) − coeff(adjoint key)| (with the reordering
    /// sign of the adjoint); zero for Hermitian operators.
    pub fn hermitian_defect(&self) -> f64 {
        self.terms
            .iter()
            .map(|(k, c)| {
                let (adj, sign) = k.adjoint();
                (c - sign * self.coefficient(&adj)).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Same as [`hermitian_defect`](Self::hermitian_defect) but for C† = −C.
    pub fn antihermitian_defect(&self) -> f64 {
        self.terms
            .iter()
            .map(|(k, c)| {
                let (adj, sign) = k.adjoint();
                (c + sign * self.coefficient(&adj)).abs()
            })
            .fold(0.0, f64::max)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.n_orbitals != other.n_orbitals {
            return Err(Error::Structural(format!(
                "operands act on {} and {} spin orbitals",
                self.n_orbitals, other.n_orbitals
            )));
        }
        Ok(())
    }

    /// Operator product, normal ordered and pruned at the default tolerance.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        Ok(self.multiply_raw(other)?.pruned(DEFAULT_DROP_TOLERANCE))
    }

    /// Operator product without pruning (exact zeros only).
    pub fn multiply_raw(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = product_sum(self, other, 1.0, false);
        out.prune(0.0);
        Ok(out)
    }

    /// `[self, other]`, pruned at the default tolerance.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        Ok(self.commutator_raw(other)?.pruned(DEFAULT_DROP_TOLERANCE))
    }

    pub fn commutator_raw(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = product_sum(self, other, 1.0, true);
        out.prune(0.0);
        Ok(out)
    }

    /// Accumulate `scale * [a, b]` into `self` without pruning.
    pub(crate) fn accumulate_commutator(&mut self, a: &Self, b: &Self, scale: f64) {
        for (ka, ca) in a.terms.iter() {
            for (kb, cb) in b.terms.iter() {
                accumulate_commutator_keys(&mut self.terms, *ka, *kb, scale * ca * cb);
            }
        }
    }

    /// Trace over the full 2^N-dimensional Fock space.
    pub fn trace_full(&self) -> f64 {
        let n = self.n_orbitals as i32;
        self.terms
            .iter()
            .filter(|(k, _)| k.is_diagonal())
            .map(|(k, c)| c * k.diagonal_sign() * 2f64.powi(n - k.n_creations() as i32))
            .sum()
    }

    /// Trace over the sector with `n_electrons` particles.
    pub fn trace_sector(&self, n_electrons: usize) -> f64 {
        self.terms
            .iter()
            .filter(|(k, _)| k.is_diagonal())
            .map(|(k, c)| {
                let r = k.n_creations() as usize;
                if r > n_electrons {
                    0.0
                } else {
                    c * k.diagonal_sign()
                        * binomial(self.n_orbitals - r, n_electrons - r) as f64
                }
            })
            .sum()
    }

    pub(crate) fn into_map(self) -> FxHashMap<TermKey, f64> {
        self.terms
    }

    pub(crate) fn from_sorted(n_orbitals: usize, terms: &[(TermKey, f64)]) -> Self {
        NormalOrderedOperator {
            n_orbitals,
            terms: terms.iter().copied().collect(),
        }
    }

    pub(crate) fn from_map(n_orbitals: usize, terms: FxHashMap<TermKey, f64>) -> Self {
        NormalOrderedOperator { n_orbitals, terms }
    }

    pub fn to_serialized(&self) -> Vec<SerializedTerm> {
        self.sorted_terms()
            .into_iter()
            .map(|(k, coeff)| SerializedTerm {
                creations: k.creation_indices(),
                annihilations: k.annihilation_indices(),
                coeff,
            })
            .collect()
    }

    pub fn from_serialized(n_orbitals: usize, terms: &[SerializedTerm]) -> Result<Self> {
        Self::from_index_terms(
            n_orbitals,
            terms
                .iter()
                .map(|t| (t.creations.as_slice(), t.annihilations.as_slice(), t.coeff)),
        )
    }
}

impl fmt::Display for NormalOrderedOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.sorted_terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, c)) in terms.iter().enumerate() {
            if i > 0 {
                write!(f, " {} ", if *c < 0.0 { '-' } else { '+' })?;
                write!(f, "{} {}", c.abs(), k)?;
            } else {
                write!(f, "{c} {k}")?;
            }
        }
        Ok(())
    }
}

/// One term in list form, as used in JSON files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SerializedTerm {
    pub creations: Vec<usize>,
    pub annihilations: Vec<usize>,
    pub coeff: f64,
}

#[inline]
fn accumulate_commutator_keys(
    out: &mut FxHashMap<TermKey, f64>,
    ka: TermKey,
    kb: TermKey,
    coeff: f64,
) {
    if commute_trivially(ka, kb) {
        return;
    }
    multiply_keys(ka, kb, |k, s| *out.entry(k).or_insert(0.0) += s * coeff);
    multiply_keys(kb, ka, |k, s| *out.entry(k).or_insert(0.0) -= s * coeff);
}

/// Σ over term pairs of `a·b` (or `[a, b]`), parallel over fixed chunks of the
/// larger operand and merged in chunk order so the result does not depend on
/// the thread count.
fn product_sum(
    a: &NormalOrderedOperator,
    b: &NormalOrderedOperator,
    scale: f64,
    commutator: bool,
) -> NormalOrderedOperator {
    let lhs = a.sorted_terms();
    let rhs = b.sorted_terms();
    let work = |chunk: &[(TermKey, f64)]| {
        let mut out = FxHashMap::default();
        for (ka, ca) in chunk {
            for (kb, cb) in &rhs {
                let c = scale * ca * cb;
                if commutator {
                    accumulate_commutator_keys(&mut out, *ka, *kb, c);
                } else {
                    multiply_keys(*ka, *kb, |k, s| *out.entry(k).or_insert(0.0) += s * c);
                }
            }
        }
        out
    };
    let partials: Vec<FxHashMap<TermKey, f64>> = if lhs.len() * rhs.len() < 4096 {
        vec![work(&lhs)]
    } else {
        lhs.par_chunks(PRODUCT_CHUNK).map(work).collect()
    };
    NormalOrderedOperator::from_map(a.n_orbitals, merge_maps(partials))
}

/// Merge partial sums in the given order.
pub(crate) fn merge_maps(partials: Vec<FxHashMap<TermKey, f64>>) -> FxHashMap<TermKey, f64> {
    let mut iter = partials.into_iter();
    let mut acc = iter.next().unwrap_or_default();
    for part in iter {
        let mut entries: Vec<_> = part.into_iter().collect();
        entries.sort_unstable_by_key(|x| x.0);
        for (k, c) in entries {
            *acc.entry(k).or_insert(0.0) += c;
        }
    }
    acc
}

fn check_indices<'a>(n_orbitals: usize, indices: impl Iterator<Item = &'a usize>) -> Result<()> {
    for &p in indices {
        if p >= n_orbitals {
            return Err(Error::Structural(format!(
                "orbital index {p} out of range for {n_orbitals} spin orbitals"
            )));
        }
    }
    Ok(())
}

/// Rewrite an arbitrary ladder string as a sum of canonical normal-ordered
/// terms using {a_p, a_q†} = δ_pq.
///
/// Works through a queue of partially ordered strings: the first adjacent
/// `a_p a_q†` pair found is swapped (sign flip), and when `p == q` the
/// contracted string is queued as well.
pub fn normal_order(term: &LadderTerm, n_orbitals: usize) -> Result<NormalOrderedOperator> {
    check_indices(n_orbitals, term.ops.iter().map(|op| &op.orbital))?;
    if !term.coeff.is_finite() {
        return Err(Error::Structural("non-finite coefficient".into()));
    }
    let mut out = NormalOrderedOperator::zero(n_orbitals);
    let mut queue: Vec<(f64, Vec<LadderOp>)> = vec![(term.coeff, term.ops.clone())];
    while let Some((coeff, ops)) = queue.pop() {
        let swap_at = ops
            .windows(2)
            .position(|w| !w[0].is_creation() && w[1].is_creation());
        match swap_at {
            None => {
                let split = ops.iter().take_while(|op| op.is_creation()).count();
                let cre: Vec<usize> = ops[..split].iter().map(|op| op.orbital).collect();
                let ann: Vec<usize> = ops[split..].iter().map(|op| op.orbital).collect();
                if let Some((key, sign)) = TermKey::from_indices(&cre, &ann) {
                    out.add_term(key, sign * coeff);
                }
            }
            Some(i) => {
                if ops[i].orbital == ops[i + 1].orbital {
                    let mut contracted = ops.clone();
                    contracted.drain(i..i + 2);
                    queue.push((coeff, contracted));
                }
                let mut swapped = ops;
                swapped.swap(i, i + 1);
                queue.push((-coeff, swapped));
            }
        }
    }
    out.prune(0.0);
    Ok(out)
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(n: usize, cre: &[usize], ann: &[usize], c: f64) -> NormalOrderedOperator {
        NormalOrderedOperator::from_index_terms(n, [(cre, ann, c)]).unwrap()
    }

    fn term(ops: &[(usize, bool)]) -> LadderTerm {
        LadderTerm::new(
            1.0,
            ops.iter()
                .map(|&(p, dag)| {
                    if dag {
                        LadderOp::create(p)
                    } else {
                        LadderOp::annihilate(p)
                    }
                })
                .collect(),
        )
    }

    #[test]
    fn worked_example_normal_order() {
        // a2 a1 a1† a3† = a1† a3† a2 a1 − a3† a2 (checked against 16×16 matrices)
        let t = term(&[(2, false), (1, false), (1, true), (3, true)]);
        let got = normal_order(&t, 4).unwrap();
        let mut want = op(4, &[1, 3], &[2, 1], 1.0);
        want.add_scaled(&op(4, &[3], &[2], -1.0), 1.0);
        assert_eq!(got, want);
        assert_eq!(got.len(), 2);
    }

    #[test]
    fn worked_example_multiply() {
        let lhs = op(4, &[], &[2, 1], 1.0);
        let rhs = op(4, &[1, 3], &[], 1.0);
        let got = lhs.multiply(&rhs).unwrap();
        let t = term(&[(2, false), (1, false), (1, true), (3, true)]);
        assert_eq!(got, normal_order(&t, 4).unwrap());
    }

    #[test]
    fn fixed_point_and_contraction() {
        let t = term(&[(1, true), (2, false)]);
        assert_eq!(normal_order(&t, 3).unwrap(), op(3, &[1], &[2], 1.0));
        // a1 a1† = 1 − a1† a1
        let t = term(&[(1, false), (1, true)]);
        let mut want = NormalOrderedOperator::identity(2, 1.0);
        want.add_term(
            TermKey {
                creations: 2,
                annihilations: 2,
            },
            -1.0,
        );
        assert_eq!(normal_order(&t, 2).unwrap(), want);
    }

    #[test]
    fn exclusion_principle() {
        let a = op(3, &[1], &[], 1.0);
        assert!(a.multiply(&a).unwrap().is_empty());
        let t = term(&[(0, false), (0, false)]);
        assert!(normal_order(&t, 1).unwrap().is_empty());
    }

    #[test]
    fn identity_is_neutral() {
        let x = op(4, &[3, 0], &[2, 1], 0.7);
        let id = NormalOrderedOperator::identity(4, 1.0);
        assert_eq!(id.multiply(&x).unwrap(), x);
        assert_eq!(x.multiply(&id).unwrap(), x);
    }

    #[test]
    fn small_commutators() {
        // [a1† a1, a1† a2] = a1† a2
        let n1 = op(3, &[1], &[1], 1.0);
        let hop = op(3, &[1], &[2], 1.0);
        assert_eq!(n1.commutator(&hop).unwrap(), hop);
        let x = op(2, &[1], &[0], 1.0);
        assert!(x.commutator(&x).unwrap().is_empty());
        // [a0† a1, a1† a0] = n0 − n1
        let fwd = op(2, &[0], &[1], 1.0);
        let back = op(2, &[1], &[0], 1.0);
        let mut want = op(2, &[0], &[0], 1.0);
        want.add_scaled(&op(2, &[1], &[1], 1.0), -1.0);
        assert_eq!(fwd.commutator(&back).unwrap(), want);
    }

    #[test]
    fn traces() {
        assert_eq!(NormalOrderedOperator::identity(3, 1.5).trace_full(), 12.0);
        assert_eq!(op(2, &[1], &[1], 1.0).trace_full(), 2.0);
        // n0 n1 in sector n=1 has zero trace, in n=2 trace 1
        let nn = op(3, &[0, 1], &[1, 0], 1.0);
        assert_eq!(nn.trace_sector(1), 0.0);
        assert_eq!(nn.trace_sector(2), 1.0);
        assert_eq!(nn.trace_full(), 2.0);
    }

    #[test]
    fn adjoint_round_trip() {
        let x = op(5, &[4, 1], &[3, 0], 0.25);
        assert_eq!(x.adjoint().adjoint(), x);
        let mut h = x.clone();
        h.add_scaled(&x.adjoint(), 1.0);
        assert_eq!(h.hermitian_defect(), 0.0);
        assert!(x.hermitian_defect() > 0.0);
    }

    #[test]
    fn out_of_range_index_is_structural() {
        let t = term(&[(5, true)]);
        assert!(matches!(normal_order(&t, 4), Err(Error::Structural(_))));
        let a = NormalOrderedOperator::zero(3);
        let b = NormalOrderedOperator::zero(4);
        assert!(matches!(a.multiply(&b), Err(Error::Structural(_))));
    }

    #[test]
    fn display_uses_canonical_strings() {
        let x = op(4, &[1, 3], &[1, 2], 1.0);
        assert_eq!(x.to_string(), "1 a3† a1† a2 a1");
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(12, 4), 495);
        assert_eq!(binomial(3, 5), 0);
    }
}

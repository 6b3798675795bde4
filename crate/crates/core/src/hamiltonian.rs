//! Molecular integrals, FCIDUMP ingestion and Trotter fragment sequences.

use std::cmp::Ordering as CmpOrdering;
use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{NormalOrderedOperator, SerializedTerm, TermKey, DEFAULT_DROP_TOLERANCE};
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Integrals (and fragments) smaller than this are treated as absent.
pub const DEFAULT_TERM_DROP: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OrbitalBasis {
    Local,
    Canonical,
    Natural,
    #[default]
    Unspecified,
}

impl OrbitalBasis {
    pub fn label(&self) -> &'static str {
        match self {
            OrbitalBasis::Local => "local",
            OrbitalBasis::Canonical => "canonical",
            OrbitalBasis::Natural => "natural",
            OrbitalBasis::Unspecified => "unspecified",
        }
    }
}

impl fmt::Display for OrbitalBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for OrbitalBasis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "local" => Ok(OrbitalBasis::Local),
            "canonical" => Ok(OrbitalBasis::Canonical),
            "natural" => Ok(OrbitalBasis::Natural),
            "unspecified" => Ok(OrbitalBasis::Unspecified),
            other => Err(Error::Config(format!(
                "unknown orbital basis `{other}` (expected local, canonical or natural)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct SystemMetadata {
    pub label: String,
    pub basis: String,
    pub basis_kind: OrbitalBasis,
    pub z_max: Option<u32>,
}

/// Physicist-notation two-electron integral over spin orbitals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoElectronIntegral {
    pub p: usize,
    pub q: usize,
    pub r: usize,
    pub s: usize,
    pub value: f64,
}

impl TwoElectronIntegral {
    fn index(&self) -> [usize; 4] {
        [self.p, self.q, self.r, self.s]
    }
}

/// Second-quantized electronic Hamiltonian data over spin orbitals.
///
/// `h1` is row-major N×N; `h2` lists every nonzero h_pqrs (all symmetry copies),
/// sorted by index. The operator is
/// H = Σ h_pq a_p† a_q + ½ Σ h_pqrs a_p† a_q† a_r a_s; `core_energy` is a
/// scalar offset kept out of the operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MolecularSystem {
    pub n_spin_orbitals: usize,
    pub n_electrons: usize,
    pub h1: Vec<f64>,
    pub h2: Vec<TwoElectronIntegral>,
    pub core_energy: f64,
    pub metadata: SystemMetadata,
}

#[derive(Serialize, Deserialize)]
struct SystemDocument {
    schema_version: u32,
    system: MolecularSystem,
}

impl MolecularSystem {
    /// Build from spatial-orbital integrals: `h1` is n×n, `eri` is the
    /// chemist-notation (ij|kl) array of length n⁴ (row-major).
    pub fn from_spatial(
        h1_spatial: &[f64],
        eri_chemist: &[f64],
        n_spatial: usize,
        n_electrons: usize,
        core_energy: f64,
    ) -> Result<Self> {
        let n = n_spatial;
        if h1_spatial.len() != n * n || eri_chemist.len() != n * n * n * n {
            return Err(Error::Structural("integral arrays do not match orbital count".into()));
        }
        let big = 2 * n;
        let mut h1 = vec![0.0; big * big];
        for p in 0..big {
            for q in 0..big {
                if p % 2 == q % 2 {
                    h1[p * big + q] = h1_spatial[(p / 2) * n + q / 2];
                }
            }
        }
        let eri = |i: usize, j: usize, k: usize, l: usize| eri_chemist[((i * n + j) * n + k) * n + l];
        let mut h2 = Vec::new();
        for p in 0..big {
            for q in 0..big {
                for r in 0..big {
                    for s in 0..big {
                        if p % 2 != s % 2 || q % 2 != r % 2 {
                            continue;
                        }
                        // h_pqrs = (ps|qr)
                        let value = eri(p / 2, s / 2, q / 2, r / 2);
                        if value != 0.0 {
                            h2.push(TwoElectronIntegral { p, q, r, s, value });
                        }
                    }
                }
            }
        }
        let sys = MolecularSystem {
            n_spin_orbitals: big,
            n_electrons,
            h1,
            h2,
            core_energy,
            metadata: SystemMetadata::default(),
        };
        sys.validate()?;
        Ok(sys)
    }

    pub fn with_metadata(mut self, metadata: SystemMetadata) -> Self {
        self.metadata = metadata;
        self
    }

    pub fn h1(&self, p: usize, q: usize) -> f64 {
        self.h1[p * self.n_spin_orbitals + q]
    }

    pub fn h2(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let key = [p, q, r, s];
        self.h2
            .binary_search_by(|e| e.index().cmp(&key))
            .map(|i| self.h2[i].value)
            .unwrap_or(0.0)
    }

    /// Check the structural and symmetry invariants.
    pub fn validate(&self) -> Result<()> {
        let n = self.n_spin_orbitals;
        if n == 0 || n > crate::algebra::MAX_ORBITALS {
            return Err(Error::Validation(format!("unsupported spin-orbital count {n}")));
        }
        if self.n_electrons > n {
            return Err(Error::Validation(format!(
                "{} electrons do not fit in {n} spin orbitals",
                self.n_electrons
            )));
        }
        if self.h1.len() != n * n {
            return Err(Error::Validation("h1 is not N×N".into()));
        }
        if !self.core_energy.is_finite() || self.h1.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("non-finite one-electron data".into()));
        }
        for p in 0..n {
            for q in 0..p {
                if (self.h1(p, q) - self.h1(q, p)).abs() >= 1e-10 {
                    return Err(Error::Validation(format!("h1 not symmetric at ({p},{q})")));
                }
            }
        }
        if !self.h2.windows(2).all(|w| w[0].index() < w[1].index()) {
            return Err(Error::Validation("two-electron entries not sorted/unique".into()));
        }
        for e in &self.h2 {
            if e.index().iter().any(|&i| i >= n) {
                return Err(Error::Validation(format!("two-electron index out of range: {:?}", e.index())));
            }
            if !e.value.is_finite() {
                return Err(Error::Validation("non-finite two-electron integral".into()));
            }
            let swapped = self.h2(e.q, e.p, e.s, e.r);
            let reversed = self.h2(e.s, e.r, e.q, e.p);
            let tol = 1e-10 * e.value.abs().max(1.0);
            if (swapped - e.value).abs() > tol || (reversed - e.value).abs() > tol {
                return Err(Error::Validation(format!(
                    "two-electron symmetry violated at {:?}",
                    e.index()
                )));
            }
        }
        Ok(())
    }

    /// The electronic Hamiltonian as a normal-ordered operator (core energy
    /// excluded). Integrals and final coefficients with magnitude ≤ `drop` are
    /// omitted.
    pub fn hamiltonian(&self, drop: f64) -> NormalOrderedOperator {
        let n = self.n_spin_orbitals;
        let mut op = NormalOrderedOperator::zero(n);
        for p in 0..n {
            for q in 0..n {
                let v = self.h1(p, q);
                if v.abs() > drop {
                    let (key, sign) = TermKey::from_indices(&[p], &[q]).expect("distinct");
                    op.add_term(key, sign * v);
                }
            }
        }
        for e in &self.h2 {
            if e.value.abs() <= drop {
                continue;
            }
            if let Some((key, sign)) = TermKey::from_indices(&[e.p, e.q], &[e.r, e.s]) {
                op.add_term(key, 0.5 * sign * e.value);
            }
        }
        op.pruned(drop.max(DEFAULT_DROP_TOLERANCE))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&SystemDocument {
            schema_version: SCHEMA_VERSION,
            system: self.clone(),
        })?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SystemDocument = serde_json::from_str(text)?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(Error::Validation(format!(
                "unsupported schema version {}",
                doc.schema_version
            )));
        }
        doc.system.validate()?;
        Ok(doc.system)
    }

    /// Random spin-adapted system with eightfold-symmetric integrals, for tests
    /// and examples. Magnitudes are O(1) hartree.
    pub fn random(n_spatial: usize, n_electrons: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = n_spatial;
        let mut h1 = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v = rng.random_range(-1.0..1.0);
                h1[i * n + j] = v;
                h1[j * n + i] = v;
            }
        }
        let mut eri = vec![0.0; n * n * n * n];
        for i in 0..n {
            for j in 0..=i {
                for k in 0..n {
                    for l in 0..=k {
                        if i * (i + 1) / 2 + j < k * (k + 1) / 2 + l {
                            continue;
                        }
                        let v = rng.random_range(-0.5..0.5);
                        set_eightfold(&mut eri, n, [i, j, k, l], v);
                    }
                }
            }
        }
        MolecularSystem::from_spatial(&h1, &eri, n, n_electrons, 0.0)
            .expect("random integrals are valid")
            .with_metadata(SystemMetadata {
                label: format!("random-{n_spatial}-{seed}"),
                basis: "synthetic".into(),
                ..SystemMetadata::default()
            })
    }
}

fn set_eightfold(eri: &mut [f64], n: usize, [i, j, k, l]: [usize; 4], v: f64) {
    for (a, b, c, d) in [
        (i, j, k, l),
        (j, i, k, l),
        (i, j, l, k),
        (j, i, l, k),
        (k, l, i, j),
        (l, k, i, j),
        (k, l, j, i),
        (l, k, j, i),
    ] {
        eri[((a * n + b) * n + c) * n + d] = v;
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Parse an FCIDUMP file: `&FCI NORB=…, NELEC=…, MS2=…, … &END` followed by
/// `value i j k l` records with 1-based spatial indices in chemist notation.
pub fn parse_fcidump(text: &str) -> Result<MolecularSystem> {
    let mut header = String::new();
    let mut body_start = None;
    let mut started = false;
    for (idx, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if !started {
            if trimmed.is_empty() {
                continue;
            }
            if !trimmed.to_ascii_uppercase().starts_with("&FCI") {
                return Err(parse_err(idx + 1, "expected `&FCI` namelist header"));
            }
            started = true;
            header.push_str(&trimmed[4..]);
        } else {
            header.push(' ');
            header.push_str(trimmed);
        }
        let upper = header.to_ascii_uppercase();
        if let Some(end) = upper.find("&END").or_else(|| upper.rfind('/')) {
            header.truncate(end);
            body_start = Some(idx + 1);
            break;
        }
    }
    let body_start = body_start.ok_or_else(|| {
        parse_err(text.lines().count().max(1), "unterminated namelist header (missing &END)")
    })?;
    let fields = parse_namelist(&header).map_err(|m| parse_err(body_start, m))?;
    let get = |name: &str| -> std::result::Result<Option<i64>, Error> {
        match fields.get(name) {
            None => Ok(None),
            Some(values) => {
                let first = values
                    .first()
                    .ok_or_else(|| parse_err(body_start, format!("{name} has no value")))?;
                first
                    .parse::<i64>()
                    .map(Some)
                    .map_err(|_| parse_err(body_start, format!("{name}={first} is not an integer")))
            }
        }
    };
    let norb = get("NORB")?.ok_or_else(|| parse_err(body_start, "header lacks NORB"))?;
    let nelec = get("NELEC")?.ok_or_else(|| parse_err(body_start, "header lacks NELEC"))?;
    let ms2 = get("MS2")?.unwrap_or(0);
    if norb <= 0 || norb > (crate::algebra::MAX_ORBITALS / 2) as i64 {
        return Err(parse_err(body_start, format!("NORB={norb} out of supported range")));
    }
    if nelec < 0 || nelec > 2 * norb {
        return Err(Error::Validation(format!("NELEC={nelec} incompatible with NORB={norb}")));
    }
    if (nelec - ms2).rem_euclid(2) != 0 {
        return Err(Error::Validation(format!(
            "NELEC={nelec} is inconsistent with MS2={ms2}"
        )));
    }
    let n = norb as usize;
    let mut h1 = vec![0.0; n * n];
    let mut eri = vec![0.0; n * n * n * n];
    let mut core = 0.0;
    for (idx, line) in text.lines().enumerate().skip(body_start) {
        let lineno = idx + 1;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if tokens.len() != 5 {
            return Err(parse_err(lineno, format!("expected 5 fields, found {}", tokens.len())));
        }
        let value: f64 = tokens[0]
            .replace(['D', 'd'], "e")
            .parse()
            .map_err(|_| parse_err(lineno, format!("`{}` is not a number", tokens[0])))?;
        if !value.is_finite() {
            return Err(parse_err(lineno, "non-finite integral"));
        }
        let mut ix = [0usize; 4];
        for (slot, tok) in ix.iter_mut().zip(&tokens[1..]) {
            let v: i64 = tok
                .parse()
                .map_err(|_| parse_err(lineno, format!("`{tok}` is not an orbital index")))?;
            if v < 0 || v > norb {
                return Err(parse_err(lineno, format!("orbital index {v} outside 0..={norb}")));
            }
            *slot = v as usize;
        }
        match ix {
            [0, 0, 0, 0] => core = value,
            [i, j, 0, 0] if i > 0 && j > 0 => {
                h1[(i - 1) * n + (j - 1)] = value;
                h1[(j - 1) * n + (i - 1)] = value;
            }
            [i, j, k, l] if i > 0 && j > 0 && k > 0 && l > 0 => {
                set_eightfold(&mut eri, n, [i - 1, j - 1, k - 1, l - 1], value);
            }
            // orbital energies (`e i 0 0 0`) carry no Hamiltonian information
            [i, 0, 0, 0] if i > 0 => {}
            _ => {
                return Err(parse_err(lineno, format!("unrecognized index pattern {ix:?}")));
            }
        }
    }
    MolecularSystem::from_spatial(&h1, &eri, n, nelec as usize, core)
}

fn parse_namelist(header: &str) -> std::result::Result<HashMap<String, Vec<String>>, String> {
    // glue `KEY = value` into `KEY=value`, then split on commas and blanks
    let mut text = String::with_capacity(header.len());
    for part in header.split('=') {
        if !text.is_empty() {
            text = text.trim_end().to_string();
            text.push('=');
            text.push_str(part.trim_start());
        } else {
            text.push_str(part);
        }
    }
    let mut fields: HashMap<String, Vec<String>> = HashMap::new();
    let mut current: Option<String> = None;
    for token in text.split(|c: char| c == ',' || c.is_whitespace()) {
        if token.is_empty() {
            continue;
        }
        if let Some((key, value)) = token.split_once('=') {
            let key = key.to_ascii_uppercase();
            let entry = fields.entry(key.clone()).or_default();
            if !value.is_empty() {
                entry.push(value.to_string());
            }
            current = Some(key);
        } else if let Some(key) = &current {
            fields.get_mut(key).expect("current key").push(token.to_string());
        } else {
            return Err(format!("unexpected token `{token}` in header"));
        }
    }
    Ok(fields)
}

pub fn read_fcidump(path: &Path) -> Result<MolecularSystem> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_fcidump(&text)
}

/// How fragments are ordered in the Trotter product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum OrderingStrategy {
    /// One-body fragments, then two-body, each in lexicographic index order.
    #[serde(rename = "lexicographic")]
    Lexicographic,
    /// Largest coefficient first; ties broken lexicographically.
    #[serde(rename = "magnitude-descending")]
    MagnitudeDescending,
    /// Diagonal (number-operator) fragments first, then the rest, each part
    /// lexicographic.
    #[default]
    #[serde(rename = "diagonal-first")]
    DiagonalFirst,
}

impl OrderingStrategy {
    pub const ALL: [OrderingStrategy; 3] = [
        OrderingStrategy::Lexicographic,
        OrderingStrategy::MagnitudeDescending,
        OrderingStrategy::DiagonalFirst,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            OrderingStrategy::Lexicographic => "lexicographic",
            OrderingStrategy::MagnitudeDescending => "magnitude-descending",
            OrderingStrategy::DiagonalFirst => "diagonal-first",
        }
    }
}

impl fmt::Display for OrderingStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for OrderingStrategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        OrderingStrategy::ALL
            .into_iter()
            .find(|o| o.label() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown ordering `{s}` (expected lexicographic, magnitude-descending or diagonal-first)"
                ))
            })
    }
}

/// Ordered Hermitian fragments H_α whose sum is the Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct TrotterSequence {
    pub n_orbitals: usize,
    pub fragments: Vec<NormalOrderedOperator>,
    pub ordering: OrderingStrategy,
}

#[derive(Serialize, Deserialize)]
struct SequenceDocument {
    schema_version: u32,
    n_spin_orbitals: usize,
    ordering: OrderingStrategy,
    fragments: Vec<Vec<SerializedTerm>>,
}

struct Group {
    keys: Vec<(TermKey, f64)>,
    label: Vec<usize>,
    body: u32,
    diagonal: bool,
    magnitude: f64,
}

fn key_label(k: &TermKey) -> Vec<usize> {
    let mut v: Vec<usize> = crate::algebra::bits(k.creations).collect();
    v.extend(crate::algebra::bits(k.annihilations));
    v
}

impl TrotterSequence {
    pub fn len(&self) -> usize {
        self.fragments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fragments.is_empty()
    }

    /// Σ_α H_α.
    pub fn total(&self) -> NormalOrderedOperator {
        let mut h = NormalOrderedOperator::zero(self.n_orbitals);
        for f in &self.fragments {
            h.add_scaled(f, 1.0);
        }
        h.pruned(0.0)
    }

    /// Same fragments, different order.
    pub fn reordered(&self, order: &[usize]) -> Self {
        TrotterSequence {
            n_orbitals: self.n_orbitals,
            fragments: order.iter().map(|&i| self.fragments[i].clone()).collect(),
            ordering: self.ordering,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&SequenceDocument {
            schema_version: SCHEMA_VERSION,
            n_spin_orbitals: self.n_orbitals,
            ordering: self.ordering,
            fragments: self.fragments.iter().map(|f| f.to_serialized()).collect(),
        })?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SequenceDocument = serde_json::from_str(text)?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(Error::Validation(format!(
                "unsupported schema version {}",
                doc.schema_version
            )));
        }
        let fragments = doc
            .fragments
            .iter()
            .map(|f| NormalOrderedOperator::from_serialized(doc.n_spin_orbitals, f))
            .collect::<Result<_>>()?;
        Ok(TrotterSequence {
            n_orbitals: doc.n_spin_orbitals,
            fragments,
            ordering: doc.ordering,
        })
    }
}

/// Split the Hamiltonian into Hermitian fragments, one per term together
/// with its adjoint partner, ordered by `strategy`.
pub fn build_trotter_sequence(sys: &MolecularSystem, strategy: OrderingStrategy) -> TrotterSequence {
    sequence_from_operator(&sys.hamiltonian(DEFAULT_TERM_DROP), strategy)
}

/// Fragment an arbitrary Hermitian operator as in [`build_trotter_sequence`].
pub fn sequence_from_operator(h: &NormalOrderedOperator, strategy: OrderingStrategy) -> TrotterSequence {
    let terms = h.sorted_terms();
    let mut taken = rustc_hash::FxHashSet::default();
    let mut groups = Vec::new();
    for (key, coeff) in &terms {
        if taken.contains(key) {
            continue;
        }
        taken.insert(*key);
        let mut keys = vec![(*key, *coeff)];
        let (adj, _) = key.adjoint();
        if adj != *key {
            let c = h.coefficient(&adj);
            if c != 0.0 {
                taken.insert(adj);
                keys.push((adj, c));
            }
        }
        let label = keys.iter().map(|(k, _)| key_label(k)).min().expect("nonempty");
        groups.push(Group {
            label,
            body: key.n_creations().max(key.n_annihilations()),
            diagonal: key.is_diagonal(),
            magnitude: keys.iter().fold(0.0, |m, (_, c)| m.max(c.abs())),
            keys,
        });
    }
    let lexical = |a: &Group, b: &Group| (a.body, &a.label).cmp(&(b.body, &b.label));
    match strategy {
        OrderingStrategy::Lexicographic => groups.sort_by(lexical),
        OrderingStrategy::DiagonalFirst => {
            groups.sort_by(|a, b| (!a.diagonal).cmp(&!b.diagonal).then_with(|| lexical(a, b)))
        }
        OrderingStrategy::MagnitudeDescending => groups.sort_by(|a, b| {
            b.magnitude
                .partial_cmp(&a.magnitude)
                .unwrap_or(CmpOrdering::Equal)
                .then_with(|| lexical(a, b))
        }),
    }
    let n = h.n_orbitals();
    let fragments = groups
        .into_iter()
        .map(|g| {
            let mut f = NormalOrderedOperator::zero(n);
            for (k, c) in g.keys {
                f.add_term(k, c);
            }
            f
        })
        .collect();
    TrotterSequence {
        n_orbitals: n,
        fragments,
        ordering: strategy,
    }
}

/// One entry of a fixture manifest.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixtureEntry {
    pub file: String,
    pub label: String,
    pub basis: String,
    pub basis_kind: OrbitalBasis,
    pub z_max: u32,
    #[serde(default)]
    pub geometry_angstrom: String,
}

impl FixtureEntry {
    pub fn metadata(&self) -> SystemMetadata {
        SystemMetadata {
            label: self.label.clone(),
            basis: self.basis.clone(),
            basis_kind: self.basis_kind,
            z_max: Some(self.z_max),
        }
    }

    /// Parse the fixture file (relative to `dir`) and attach the manifest metadata.
    pub fn load(&self, dir: &Path) -> Result<MolecularSystem> {
        Ok(read_fcidump(&dir.join(&self.file))?.with_metadata(self.metadata()))
    }
}

pub fn read_manifest(path: &Path) -> Result<Vec<FixtureEntry>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

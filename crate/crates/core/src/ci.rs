//! Hartree-Fock reference and truncated configuration interaction.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{binomial, NormalOrderedOperator};
use crate::error::{Error, Result};
use crate::fock::{ground_state_with, CiVector, OccupationState, SectorBasis, SolverOptions};
use crate::hamiltonian::{MolecularSystem, DEFAULT_TERM_DROP};

/// Excitation level k relative to a reference determinant
/// (0 = reference only, 1 = CIS, 2 = CISD, …).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CiTruncation {
    pub level: usize,
    pub reference: u64,
}

impl CiTruncation {
    /// Level `level` from the Hartree-Fock determinant of `sys`.
    pub fn new(sys: &MolecularSystem, level: usize) -> Result<Self> {
        Self::with_reference(sys.n_spin_orbitals, hartree_fock_state(sys)?, level)
    }

    pub fn with_reference(n_orbitals: usize, reference: OccupationState, level: usize) -> Result<Self> {
        let n = reference.n_electrons();
        if n_orbitals < 64 && reference.bits >> n_orbitals != 0 {
            return Err(Error::Structural("reference uses orbitals beyond N".into()));
        }
        if level > n_orbitals - n {
            return Err(Error::Domain(format!(
                "excitation level {level} exceeds N − n = {}",
                n_orbitals - n
            )));
        }
        Ok(CiTruncation {
            level,
            reference: reference.bits,
        })
    }

    /// Full CI for the reference's electron count.
    pub fn full(sys: &MolecularSystem) -> Result<Self> {
        Self::new(sys, sys.n_spin_orbitals - sys.n_electrons)
    }

    pub fn label(&self) -> String {
        match self.level {
            0 => "HF".into(),
            1 => "CIS".into(),
            2 => "CISD".into(),
            3 => "CISDT".into(),
            4 => "CISDTQ".into(),
            k => format!("CI level {k}"),
        }
    }
}

/// Lowest n spin orbitals occupied.
pub fn hartree_fock_state(sys: &MolecularSystem) -> Result<OccupationState> {
    hartree_fock_bits(sys.n_spin_orbitals, sys.n_electrons)
}

pub fn hartree_fock_bits(n_orbitals: usize, n_electrons: usize) -> Result<OccupationState> {
    if n_electrons > n_orbitals {
        return Err(Error::Domain(format!(
            "{n_electrons} electrons do not fit in {n_orbitals} spin orbitals"
        )));
    }
    let bits = if n_electrons == 64 { u64::MAX } else { (1u64 << n_electrons) - 1 };
    Ok(OccupationState::new(bits))
}

/// Configurations within `level` particle-hole excitations of the reference.
pub fn excitation_basis(trunc: &CiTruncation, n_orbitals: usize) -> Result<SectorBasis> {
    let n = trunc.reference.count_ones() as usize;
    let sector = SectorBasis::sector(n_orbitals, n)?;
    let states = sector
        .states()
        .iter()
        .copied()
        .filter(|s| (s & !trunc.reference).count_ones() as usize <= trunc.level)
        .collect();
    SectorBasis::subset(n_orbitals, states)
}

/// Σ_{j≤k} C(n, j) C(N − n, j).
pub fn excitation_count(n_orbitals: usize, n_electrons: usize, level: usize) -> u128 {
    (0..=level)
        .map(|j| binomial(n_electrons, j) * binomial(n_orbitals - n_electrons, j))
        .sum()
}

#[derive(Debug, Clone)]
pub struct CiSolution {
    pub truncation: CiTruncation,
    /// Electronic energy plus the system's core energy (hartree).
    pub energy: f64,
    pub vector: CiVector,
}

/// Variational ground state of H projected onto the truncated space.
pub fn ci_ground_state(sys: &MolecularSystem, trunc: &CiTruncation) -> Result<CiSolution> {
    let h = sys.hamiltonian(DEFAULT_TERM_DROP);
    ci_ground_state_of(&h, sys.core_energy, trunc, SolverOptions::default())
}

pub fn ci_ground_state_of(
    h: &NormalOrderedOperator,
    core_energy: f64,
    trunc: &CiTruncation,
    opts: SolverOptions,
) -> Result<CiSolution> {
    let basis = Arc::new(excitation_basis(trunc, h.n_orbitals())?);
    let (e, vector) = ground_state_with(h, basis, opts)?;
    Ok(CiSolution {
        truncation: *trunc,
        energy: e + core_energy,
        vector,
    })
}

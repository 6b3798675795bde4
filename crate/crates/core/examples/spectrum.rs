//! Error-operator eigenvalues: trace, spread and the peak about zero.
//!
//!     cargo run --release --example spectrum [fixture.fcidump]

use std::path::PathBuf;
use std::sync::Arc;

use trotterr::analysis::near_zero_fraction;
use trotterr::fock::{full_spectrum, SectorBasis};
use trotterr::hamiltonian::{build_trotter_sequence, read_fcidump, MolecularSystem, OrderingStrategy};
use trotterr::trotter::build_error_operator;

fn main() -> trotterr::error::Result<()> {
    let sys = match std::env::args().nth(1) {
        Some(path) => read_fcidump(&PathBuf::from(path))?,
        None => MolecularSystem::random(3, 3, 4),
    };
    let v = build_error_operator(&build_trotter_sequence(&sys, OrderingStrategy::default()), 1.0)?;
    for basis in [
        SectorBasis::full(sys.n_spin_orbitals)?,
        SectorBasis::sector(sys.n_spin_orbitals, sys.n_electrons)?,
    ] {
        let basis = Arc::new(basis);
        let values = full_spectrum(&v.op, &basis)?;
        let radius = values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        println!(
            "{:<20} dim={:<5} trace={:+.2e} radius={:.4e} within 1%: {:.1}%  within 10%: {:.1}%",
            basis.label(),
            values.len(),
            values.iter().sum::<f64>(),
            radius,
            100.0 * near_zero_fraction(&values, 0.01),
            100.0 * near_zero_fraction(&values, 0.1)
        );
    }
    Ok(())
}

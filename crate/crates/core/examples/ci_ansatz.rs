//! Truncated CI energies and ansatz error estimates.
//!
//!     cargo run --release --example ci_ansatz [fixture.fcidump]

use std::path::PathBuf;

use trotterr::analysis::{analyze, AnalysisOptions};
use trotterr::hamiltonian::{read_fcidump, MolecularSystem};

fn main() -> trotterr::error::Result<()> {
    let sys = match std::env::args().nth(1) {
        Some(path) => read_fcidump(&PathBuf::from(path))?,
        None => MolecularSystem::random(4, 4, 2),
    };
    let max = sys.n_spin_orbitals - sys.n_electrons;
    let opts = AnalysisOptions { ci_levels: (0..=max.min(4)).collect(), ..AnalysisOptions::default() };
    let r = analyze(&sys, &opts)?;
    println!("exact: E={:.8} <V>={:+.6e}", r.ground_energy, r.ground_state_error);
    for a in &r.ansatz {
        println!(
            "{:<7} dim={:<5} E={:.8} <V>={:+.6e} remaining={}",
            a.label,
            a.dimension,
            a.energy,
            a.error,
            a.residual_fraction.map_or("-".into(), |f| format!("{:.1}%", 100.0 * f))
        );
    }
    Ok(())
}

//! Compare the measured ground-state Trotter shift with ⟨ψ₀|V|ψ₀⟩Δt².
//!
//!     cargo run --example trotter_oracle [fixture.fcidump]

use std::path::PathBuf;
use std::sync::Arc;

use trotterr::fock::{expectation, ground_state, SectorBasis};
use trotterr::hamiltonian::{build_trotter_sequence, read_fcidump, MolecularSystem, OrderingStrategy};
use trotterr::oracle::{perturbative_consistency, ConsistencyPlan};
use trotterr::trotter::build_error_operator;

fn main() -> trotterr::error::Result<()> {
    let sys = match std::env::args().nth(1) {
        Some(path) => read_fcidump(&PathBuf::from(path))?,
        None => MolecularSystem::random(3, 2, 7),
    };
    let seq = build_trotter_sequence(&sys, OrderingStrategy::default());
    let v = build_error_operator(&seq, 1.0)?;
    let basis = Arc::new(SectorBasis::sector(sys.n_spin_orbitals, sys.n_electrons)?);
    let (_, psi) = ground_state(&seq.total(), basis.clone())?;
    let predicted = expectation(&v.op, &psi)?;

    let report = perturbative_consistency(&seq, &basis, predicted, &ConsistencyPlan::default())?;
    println!("predicted <V> at dt=1: {predicted:.10}");
    println!("{:>10} {:>16} {:>16}", "dt", "shift/dt^2", "residual");
    for ((dt, s), r) in report.delta_ts.iter().zip(&report.shifts).zip(&report.residuals) {
        println!("{dt:>10.4} {:>16.10} {r:>16.3e}", s / (dt * dt));
    }
    println!(
        "richardson at dt={}: {:.10} (relative error {:.2e})",
        report.richardson_step, report.richardson, report.richardson_relative_error
    );
    println!("residual slope: {:.3}", report.residual_slope);
    Ok(())
}

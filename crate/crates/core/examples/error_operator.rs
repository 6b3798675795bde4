//! Build the leading-order Trotter error operator and check its invariants.
//!
//!     cargo run --release --example error_operator [fixture.fcidump]

use std::path::PathBuf;

use trotterr::hamiltonian::{build_trotter_sequence, read_fcidump, MolecularSystem, OrderingStrategy};
use trotterr::trotter::{build_error_operator, estimate_trotter_number};

fn main() -> trotterr::error::Result<()> {
    let sys = match std::env::args().nth(1) {
        Some(path) => read_fcidump(&PathBuf::from(path))?,
        None => MolecularSystem::random(3, 2, 1),
    };
    for ordering in OrderingStrategy::ALL {
        let seq = build_trotter_sequence(&sys, ordering);
        let v = build_error_operator(&seq, 1.0)?;
        let inv = v.invariants();
        println!(
            "{:<22} fragments={:<4} terms={:<6} |V|_1={:.6e} trace={:.1e} herm={:.1e} [N,V]={:.1e}",
            ordering.label(),
            seq.len(),
            v.op.len(),
            inv.one_norm,
            inv.trace,
            inv.hermitian_defect,
            inv.number_commutator
        );
    }
    let v = build_error_operator(&build_trotter_sequence(&sys, OrderingStrategy::default()), 1.0)?;
    println!("largest terms:");
    let mut terms = v.op.sorted_terms();
    terms.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()));
    for (key, c) in terms.iter().take(5) {
        println!("  {c:+.6e}  {key}");
    }
    println!("trotter steps for 1 mHa over t=10 at unit error: {}", estimate_trotter_number(1.0, 10.0, 1e-3)?);
    Ok(())
}

//! Which orbital pairs carry the error-operator weight.
//!
//!     cargo run --release --example orbital_marginals [fixture.fcidump]

use std::path::PathBuf;

use trotterr::analysis::orbital_marginals;
use trotterr::hamiltonian::{build_trotter_sequence, read_fcidump, MolecularSystem, OrderingStrategy};
use trotterr::trotter::build_error_operator;

fn main() -> trotterr::error::Result<()> {
    let sys = match std::env::args().nth(1) {
        Some(path) => read_fcidump(&PathBuf::from(path))?,
        None => MolecularSystem::random(3, 2, 9),
    };
    let v = build_error_operator(&build_trotter_sequence(&sys, OrderingStrategy::default()), 1.0)?;
    let m = orbital_marginals(&v.op);
    for i in 0..m.n {
        let row: Vec<String> = (0..m.n).map(|j| format!("{:8.2e}", m.get(i, j))).collect();
        println!("{i:>3} | {}", row.join(" "));
    }
    println!("row sums: {:?}", m.row_sums().iter().map(|s| format!("{s:.3e}")).collect::<Vec<_>>());
    println!("dominant orbital: {:?}", m.dominant_orbital());
    Ok(())
}

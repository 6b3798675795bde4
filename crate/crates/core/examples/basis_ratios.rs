//! Error/norm ratios for every shipped fixture under each fragment ordering.
//!
//!     cargo run --release --example basis_ratios

use std::path::Path;
use std::time::Instant;

use trotterr::analysis::{analyze, AnalysisOptions};
use trotterr::hamiltonian::{read_manifest, OrderingStrategy};

fn main() -> trotterr::error::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    println!("{:<10} {:<10} {:<22} {:>12} {:>12} {:>8} {:>8}", "molecule", "basis", "ordering", "|<V>|", "||V||", "ratio", "secs");
    for entry in read_manifest(&dir.join("manifest.json"))? {
        let sys = entry.load(&dir)?;
        for ordering in OrderingStrategy::ALL {
            let start = Instant::now();
            let opts = AnalysisOptions { ordering, ci_levels: vec![], ..AnalysisOptions::default() };
            let r = analyze(&sys, &opts)?;
            println!(
                "{:<10} {:<10} {:<22} {:>12.4e} {:>12.4e} {:>8.4} {:>8.2}",
                r.molecule,
                r.basis_kind,
                r.ordering,
                r.ground_state_error_abs,
                r.spectral_norm,
                r.ratio,
                start.elapsed().as_secs_f64()
            );
        }
    }
    Ok(())
}

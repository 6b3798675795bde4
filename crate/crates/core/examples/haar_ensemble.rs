//! Haar-random projections and the error distribution over random states.

use std::sync::Arc;

use trotterr::fock::{full_spectrum, SectorBasis};
use trotterr::haar::{haar_error_distribution, haar_projection_variance, projection_check, Ensemble};
use trotterr::hamiltonian::{build_trotter_sequence, MolecularSystem, OrderingStrategy};
use trotterr::trotter::build_error_operator;

fn main() -> trotterr::error::Result<()> {
    for n in 2..=4 {
        let c = projection_check(n, 0, 100_000, 11)?;
        println!(
            "N={n}: mean z={:+.2} variance z={:+.2} (closed-form variance {:.6})",
            c.mean_z(),
            c.variance_z(),
            haar_projection_variance(n as i64)?
        );
    }

    let sys = MolecularSystem::random(3, 2, 5);
    let seq = build_trotter_sequence(&sys, OrderingStrategy::default());
    let v = build_error_operator(&seq, 1.0)?;
    let basis = Arc::new(SectorBasis::full(sys.n_spin_orbitals)?);
    let spectrum = full_spectrum(&v.op, &basis)?;
    for ensemble in [Ensemble::Complex, Ensemble::Real] {
        let r = haar_error_distribution(&spectrum, 50_000, 3, ensemble)?;
        println!(
            "{ensemble:?}: mean {:+.2e} ± {:.1e}, variance {:.4e} (exact {:.4e}, diagonal-only {:.4e})",
            r.moments.mean, r.moments.mean_stderr, r.moments.variance, r.exact_variance, r.diagonal_variance
        );
    }
    Ok(())
}

//! T-counts for preparing CISD states.

use trotterr::stateprep::{cisd_support_dimension, prep_cost, select_k, t_count_cisd, DEFAULT_SUPPORT_THRESHOLD};

fn main() -> trotterr::error::Result<()> {
    let k = select_k(2, 0.01)?;
    println!("D=2, δ=0.01: k={k}, T-count on 5 orbitals {}", t_count_cisd(5, 2, k)?);
    println!("{:>4} {:>4} {:>8} {:>3} {:>12} {:>7}", "N", "n", "D", "k", "T-count", "qubits");
    for (n_orb, n_el) in [(8, 2), (12, 4), (20, 10), (40, 10)] {
        let c = prep_cost(n_orb, n_el, 1e-3, None, DEFAULT_SUPPORT_THRESHOLD)?;
        assert_eq!(c.support_dimension, cisd_support_dimension(n_orb, n_el)?);
        println!(
            "{n_orb:>4} {n_el:>4} {:>8} {:>3} {:>12} {:>7}",
            c.support_dimension, c.k, c.t_count, c.qubit_count
        );
    }
    Ok(())
}

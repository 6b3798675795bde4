//! Fit y = c·x^p in log space to noisy synthetic Z⁶ data.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trotterr::analysis::fit_power_law;

fn main() -> trotterr::error::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let points: Vec<(f64, f64)> = (1..=9)
        .map(|z| {
            let z = z as f64;
            (z, 1e-3 * z.powi(6) * (1.0 + rng.random_range(-0.2..0.2)))
        })
        .collect();
    let fit = fit_power_law(&points)?;
    println!("exponent {:.3}, prefactor {:.3e}, r² {:.4}", fit.exponent, fit.prefactor, fit.r_squared);
    Ok(())
}

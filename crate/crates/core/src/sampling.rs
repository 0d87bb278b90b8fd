//! Seeded random probes used by the property checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::prob::Distribution;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Draw from the flat Dirichlet on the `n`-simplex.
pub fn random_distribution<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Distribution {
    let w: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    Distribution::normalized(w).expect("exponential draws are positive")
}

/// Flat Dirichlet draw whose coordinates outside `support` are zero.
pub fn random_on_support<R: Rng + ?Sized>(rng: &mut R, n: usize, support: &[usize]) -> Distribution {
    let mut w = vec![0.0; n];
    for &i in support {
        w[i] = -(1.0 - rng.gen::<f64>()).ln();
    }
    Distribution::normalized(w).expect("support is nonempty")
}

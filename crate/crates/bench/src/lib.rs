//! Input generators shared by the benchmarks.

use ndarray::Array2;
use rand::Rng;

use ir2_core::{rng_from_seed, Sample};

/// `n` rows of `p` uniform covariates with a noisy response on the first one.
pub fn uniform_sample(n: usize, p: usize, seed: u64) -> Sample {
    let mut rng = rng_from_seed(seed);
    let x = Array2::from_shape_fn((n, p), |_| rng.random::<f64>());
    let y = (0..n)
        .map(|i| x[[i, 0]] + 0.3 * rng.random::<f64>())
        .collect();
    Sample::new(y, x).expect("finite values")
}

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::Matrix;
use crate::error::{invalid, Result};

/// Generator used throughout the crate.
pub type Rng = ChaCha8Rng;

/// Generator for substream `stream` of `seed`. Distinct streams of one seed
/// never overlap.
pub fn seeded_rng(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a base seed with a list of tags (replicate index, dimension, role…)
/// into a child seed.
pub fn derive_seed(seed: u64, tags: &[u64]) -> u64 {
    tags.iter().fold(splitmix64(seed), |acc, t| splitmix64(acc ^ splitmix64(*t)))
}

/// Fills a `rows x cols` matrix with i.i.d. `N(0, variance)` entries drawn
/// from `rng`.
pub fn gaussian_matrix_with(rng: &mut Rng, rows: usize, cols: usize, variance: f64) -> Result<Matrix> {
    check_gaussian_args(rows, cols, variance)?;
    let sd = variance.sqrt();
    Ok(Matrix::from_fn(rows, cols, |_, _| {
        let z: f64 = rng.sample(StandardNormal);
        sd * z
    }))
}

/// Seeded i.i.d. Gaussian matrix with mean 0 and the given variance.
pub fn sample_gaussian_matrix(rows: usize, cols: usize, variance: f64, seed: u64) -> Result<Matrix> {
    gaussian_matrix_with(&mut seeded_rng(seed, 0), rows, cols, variance)
}

fn check_gaussian_args(rows: usize, cols: usize, variance: f64) -> Result<()> {
    if rows == 0 || cols == 0 {
        return invalid(format!("gaussian matrix needs positive dimensions, got {rows}x{cols}"));
    }
    if !(variance > 0.0 && variance.is_finite()) {
        return invalid(format!("variance must be positive and finite, got {variance}"));
    }
    Ok(())
}

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{design_matrix, BilevelEnsemble};
use crate::error::{invalid, Result};

/// Samples the `B x d` random-feature weight matrix. Row `k` holds
/// `sqrt(lambda_k)` times standard normals drawn from the ChaCha stream `k` of
/// `seed`, so the matrix does not depend on evaluation order and the first
/// `d` columns are shared between widths.
pub fn sample_rfs_weights(ensemble: &BilevelEnsemble, d: usize, seed: u64) -> Result<DMatrix<f64>> {
    if d == 0 {
        return Err(invalid("random-feature width d must be at least 1"));
    }
    let b = ensemble.feature_count;
    let weights = ensemble.weights();
    let mut w = DMatrix::zeros(b, d);
    for (k, lambda) in weights.iter().enumerate() {
        let scale = lambda.sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        for j in 0..d {
            let z: f64 = rng.sample(StandardNormal);
            w[(k, j)] = scale * z;
        }
    }
    Ok(w)
}

/// Random-feature design matrix `Phi = M W` for the given points.
pub fn rfs_design_matrix(points: &[f64], weights: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    Ok(design_matrix(points, weights.nrows())? * weights)
}

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{spd_solve, Basis, CoefficientVector, DEFAULT_MAX_CONDITION};
use crate::error::Result;
use crate::featurelift::{
    fourier_map_into, rfs_design_matrix, sample_rfs_weights, BilevelEnsemble, TrainingSet,
};

/// Random-feature interpolator and its effective Fourier coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RfsSolution {
    pub width: usize,
    pub seed: u64,
    /// Coefficients in random-feature space.
    pub beta: Vec<f64>,
    /// Effective Fourier coefficients `W beta`.
    pub alpha_eff: Vec<f64>,
    /// Column-major `B x d` weight matrix.
    pub weights: Vec<f64>,
    /// False when `d < n` and `beta` is the least-squares fit instead.
    pub interpolates: bool,
}

/// Minimum-norm interpolator in random-feature space. For `d < n` the system
/// is overdetermined and the least-squares solution is returned instead.
pub fn solve_rfs(
    ensemble: &BilevelEnsemble,
    train: &TrainingSet,
    d: usize,
    seed: u64,
) -> Result<RfsSolution> {
    let w = sample_rfs_weights(ensemble, d, seed)?;
    let phi = rfs_design_matrix(&train.points, &w)?;
    let y = DVector::from_column_slice(&train.labels);
    let interpolates = d >= train.len();
    let beta = if interpolates {
        let gram = &phi * phi.transpose();
        phi.transpose() * spd_solve(gram, &y, DEFAULT_MAX_CONDITION)?
    } else {
        let gram = phi.transpose() * &phi;
        spd_solve(gram, &(phi.transpose() * y), DEFAULT_MAX_CONDITION)?
    };
    let alpha_eff = &w * &beta;
    Ok(RfsSolution {
        width: d,
        seed,
        beta: beta.iter().copied().collect(),
        alpha_eff: alpha_eff.iter().copied().collect(),
        weights: w.as_slice().to_vec(),
        interpolates,
    })
}

impl RfsSolution {
    pub fn feature_count(&self) -> usize {
        self.alpha_eff.len()
    }

    pub fn weight_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_column_slice(self.feature_count(), self.width, &self.weights)
    }

    /// Evaluates through the effective Fourier coefficients.
    pub fn eval(&self, x: f64) -> f64 {
        let mut phi = vec![0.0; self.feature_count()];
        fourier_map_into(x, &mut phi);
        phi.iter().zip(&self.alpha_eff).map(|(p, a)| p * a).sum()
    }

    /// Evaluates in random-feature space as `<beta, W^T phi(x)>`.
    pub fn eval_feature_space(&self, x: f64) -> f64 {
        let b = self.feature_count();
        let mut phi = vec![0.0; b];
        fourier_map_into(x, &mut phi);
        (0..self.width)
            .map(|j| {
                let col = &self.weights[j * b..(j + 1) * b];
                let feature: f64 = col.iter().zip(&phi).map(|(w, p)| w * p).sum();
                self.beta[j] * feature
            })
            .sum()
    }

    pub fn coefficients(&self) -> CoefficientVector {
        CoefficientVector::new(self.alpha_eff.clone(), Basis::Fourier)
    }
}

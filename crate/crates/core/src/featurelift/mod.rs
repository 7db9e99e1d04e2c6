//! Weighting ensembles, feature maps and training-set generators.

mod ensemble;
mod fourier;
mod legendre;
mod rfs;
mod trainset;

pub use ensemble::{adjusted_feature_count, build_ensemble, BilevelEnsemble};
pub use fourier::{alias_indices, design_matrix, fourier_map, fourier_map_into};
pub use legendre::{
    legendre_design_matrix, legendre_map, legendre_map_into, LEGENDRE_MAX_FEATURES,
};
pub use rfs::{rfs_design_matrix, sample_rfs_weights};
pub use trainset::{make_training_set, Layout, LayoutKind, TrainingSet};

use serde::{Deserialize, Serialize};

/// Which lifted feature family a model uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureFamily {
    Fourier {
        features: usize,
    },
    Legendre {
        features: usize,
    },
    Rfs {
        features: usize,
        width: usize,
        seed: u64,
    },
}

impl FeatureFamily {
    pub fn feature_count(&self) -> usize {
        match *self {
            FeatureFamily::Fourier { features }
            | FeatureFamily::Legendre { features }
            | FeatureFamily::Rfs { features, .. } => features,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FeatureFamily::Fourier { .. } => "fourier",
            FeatureFamily::Legendre { .. } => "legendre",
            FeatureFamily::Rfs { .. } => "rfs",
        }
    }
}

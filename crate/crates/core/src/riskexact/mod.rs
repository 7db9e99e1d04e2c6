//! Learned-function evaluation, zero crossings, exact risks and the closed-form
//! theory quantities (envelope, k* bounds, risk bounds, phase transition,
//! critical survival, quadratic lobes).

mod dirichlet;
mod function;
mod optim;
mod report;
mod risk;
mod roots;
mod theory;

pub use dirichlet::{dirichlet_envelope, dirichlet_kernel, dirichlet_lobe_minimum, DirichletForm};
pub use function::LearnedFunction;
pub use optim::{golden_max, golden_min};
pub use report::{exact_risk_report, RiskReport};
pub use risk::{adversarial_risk, classification_risk, padded_intervals};
pub use roots::{
    crossing_lobes, exact_zero_crossings, find_zero_crossings, find_zero_crossings_fn,
    ZeroCrossingSet, MAX_BISECTION_STEPS,
};
pub use theory::{
    bilevel_predictions, critical_survival, k_star_bounds, quadratic_lobe, risk_bounds,
    BilevelPrediction, CriticalSurvival, KStarBounds, QuadraticLobe, Regime, RegimeRow, RiskBounds,
    DIP_CONSTANT, HAND_SURVIVAL_THRESHOLD,
};

//! Likelihood-based estimation of Pauli expectations from parity counts.

mod bootstrap;
mod dataset;
mod likelihood;
mod mle;

pub use bootstrap::{bootstrap, replicate_moments, rmse_stats, BootstrapSummary};
pub use dataset::{ParityDataset, ParityRecord};
pub use likelihood::{chebyshev_parity_probability, chebyshev_t, log_likelihood, ParityOutcome, PROBABILITY_FLOOR};
pub use mle::{
    direct_estimate, mle_estimate, EstimationMethod, EstimationResult, Estimator, LambdaAxis,
    LikelihoodTable, MleGrid,
};

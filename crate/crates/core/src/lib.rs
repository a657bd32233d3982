//! Robust amplitude estimation (RAE) toolkit.
//!
//! The crate covers the full inference loop for estimating Pauli expectation
//! values on a noisy state-preparation circuit:
//!
//! - [`pauli`]: Pauli algebra, the minimal-basis H₂ Hamiltonians, ansätze and
//!   a dense-matrix reference oracle.
//! - [`simulator`]: exact density-matrix evolution of RAE circuits under
//!   global depolarizing noise, parity probabilities and seeded sampling.
//! - [`schedule`]: layer schedules (linear, exponential, polynomial and the
//!   noise-robust sequence) together with their query cost.
//! - [`inference`]: Chebyshev likelihood, exhaustive grid MLE, the depth-0
//!   direct estimator and bootstrap statistics.
//! - [`fisher`]: Fisher information, Cramér-Rao bounds, the direct-sampling
//!   error model and the advantage criterion.
//! - [`lambda_fit`]: weighted least-squares extraction of the noise rate from
//!   measured likelihood curves.
//! - [`energy`]: combination of per-term estimates into energies and
//!   RMSE-versus-queries sweeps.

pub mod energy;
pub mod error;
pub mod fisher;
pub mod inference;
pub mod lambda_fit;
pub mod pauli;
pub mod rng;
pub mod schedule;
pub mod simulator;

pub use energy::{
    combine_energy, direct_baseline, rmse_sweep, EnergyEstimate, ScheduleFamily, SweepConfig,
    SweepRow, SweepTable, TermEstimate, TermSweepRow, CHEMICAL_ACCURACY,
};
pub use error::{RaeError, Result};
pub use fisher::{
    advantage_verdict, crb_rmse, crb_rmse_known_lambda, direct_mse_model, fisher_matrix,
    AdvantageVerdict, FisherMatrix,
};
pub use inference::{
    bootstrap, chebyshev_parity_probability, direct_estimate, log_likelihood, mle_estimate,
    rmse_stats, BootstrapSummary, EstimationMethod, EstimationResult, Estimator, LambdaAxis,
    LikelihoodTable, MleGrid, ParityDataset, ParityOutcome, ParityRecord,
};
pub use lambda_fit::{fit_lambda, lambda_profile, CurvePoint, LambdaFit, LambdaProfile, LikelihoodCurve};
pub use pauli::{
    analytic_expectation, dense_matrix, exact_expectation, exact_ground_energy,
    h2_one_qubit_hamiltonian, h2_two_qubit_hamiltonian, AnsatzKind, AnsatzSpec,
    HamiltonianDocument, Pauli, PauliString, PauliSum, PauliTerm,
};
pub use schedule::{
    eis, l_max_fisher, lis, noise_robust_schedule, nris_condition, polynomial, query_cost,
    LayerSchedule, NoiseRobustPlan, NrisBranch,
};
pub use simulator::{
    apply_depolarizing, apply_grover_layer, parity_distribution, prepare_noisy_ansatz,
    sample_parities, DensityMatrix, RaeCircuit,
};

/// Version tag written into every JSON document produced by this crate.
pub const FORMAT_VERSION: u32 = 1;

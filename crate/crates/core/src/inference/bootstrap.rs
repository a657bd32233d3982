use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{RaeError, Result};
use crate::inference::mle::{Estimator, LikelihoodTable};
use crate::inference::ParityDataset;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapSummary {
    pub m_replicates: usize,
    pub mse: f64,
    pub var_mse: f64,
    pub rmse: f64,
    pub sigma_rmse: f64,
    /// Set when `rmse = 0`; `sigma_rmse` is then reported as 0.
    pub sigma_undefined: bool,
}

/// Per-replicate generator: one ChaCha stream per replicate index.
fn replicate_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn resample_counts(ds: &ParityDataset, rng: &mut ChaCha8Rng) -> Result<Vec<u64>> {
    ds.records
        .iter()
        .map(|r| {
            let p = r.e_even as f64 / r.n_shots as f64;
            let dist = Binomial::new(r.n_shots, p).map_err(|e| RaeError::domain(format!("binomial: {e}")))?;
            Ok(dist.sample(rng))
        })
        .collect()
}

/// Bootstrap replicates of `Π̂`.
///
/// Every record's count is redrawn as `Binomial(n, e/n)` and the estimator
/// is re-run. Replicate `i` uses stream `i` of the seeded generator, so the
/// output is identical for any thread count.
pub fn bootstrap(ds: &ParityDataset, m: usize, estimator: &Estimator, seed: u64) -> Result<Vec<f64>> {
    if m == 0 {
        return Err(RaeError::domain("bootstrap needs at least one replicate"));
    }
    ds.validate()?;
    estimator.check(ds)?;
    match estimator {
        Estimator::Grid(grid) => {
            let table = LikelihoodTable::for_dataset(ds, grid)?;
            (0..m)
                .into_par_iter()
                .map_init(Vec::new, |values, i| {
                    let counts = resample_counts(ds, &mut replicate_rng(seed, i))?;
                    let mut replica = ds.clone();
                    for (r, e) in replica.records.iter_mut().zip(counts) {
                        r.e_even = e;
                    }
                    Ok(table.estimate(&replica, values)?.pi_hat)
                })
                .collect()
        }
        Estimator::Direct => {
            let r0 = *ds
                .record(0)
                .ok_or_else(|| RaeError::Precondition("direct estimate needs an L = 0 record".into()))?;
            let depth_zero = ParityDataset {
                records: vec![r0],
                ..ds.clone()
            };
            (0..m)
                .into_par_iter()
                .map(|i| {
                    let e = resample_counts(&depth_zero, &mut replicate_rng(seed, i))?[0];
                    Ok((2.0 * e as f64 - r0.n_shots as f64) / r0.n_shots as f64)
                })
                .collect()
        }
    }
}

/// Mean and population variance `(1/M)Σ(x - x̄)²`.
pub fn replicate_moments(replicates: &[f64]) -> (f64, f64) {
    let m = replicates.len() as f64;
    let mean = replicates.iter().sum::<f64>() / m;
    let var = replicates.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / m;
    (mean, var)
}

/// MSE of the replicates about `pi_ref`, the variance of the squared error
/// and the propagated uncertainty `σ = √Var(MSE)/(2·RMSE)`.
pub fn rmse_stats(replicates: &[f64], pi_ref: f64) -> Result<BootstrapSummary> {
    if replicates.is_empty() {
        return Err(RaeError::domain("rmse_stats needs at least one replicate"));
    }
    let m = replicates.len() as f64;
    let sq: Vec<f64> = replicates.iter().map(|x| (x - pi_ref).powi(2)).collect();
    let mse = sq.iter().sum::<f64>() / m;
    let var_mse = sq.iter().map(|s| (s - mse).powi(2)).sum::<f64>() / m;
    let rmse = mse.sqrt();
    let sigma_undefined = rmse == 0.0;
    let sigma_rmse = if sigma_undefined { 0.0 } else { var_mse.sqrt() / (2.0 * rmse) };
    Ok(BootstrapSummary {
        m_replicates: replicates.len(),
        mse,
        var_mse,
        rmse,
        sigma_rmse,
        sigma_undefined,
    })
}

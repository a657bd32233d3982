//! Energies from per-term estimates and RMSE-versus-queries sweeps.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{RaeError, Result};
use crate::fisher::{advantage_verdict, crb_rmse, direct_mse_model, AdvantageVerdict};
use crate::inference::{
    bootstrap, replicate_moments, rmse_stats, BootstrapSummary, Estimator, EstimationMethod, MleGrid,
    ParityDataset, ParityRecord,
};
use crate::pauli::{term_references, AnsatzSpec, PauliString, PauliSum};
use crate::rng::{derive_seed, label};
use crate::schedule::{eis, lis, noise_robust_schedule, polynomial, query_cost, LayerSchedule};
use crate::simulator::{parity_distribution, sample_even_count, RaeCircuit};

/// Chemical accuracy in Hartree.
pub const CHEMICAL_ACCURACY: f64 = 1.6e-3;

/// Seed-path tag separating bootstrap streams from data streams.
const BOOTSTRAP_TAG: u64 = 0xB0_07;

/// Estimate of one Pauli expectation with its error budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TermEstimate {
    pub pi_hat: f64,
    pub variance: f64,
    pub bias: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyEstimate {
    pub energy: f64,
    pub variance: f64,
    pub bias: f64,
    pub rmse: f64,
    pub n_queries_per_term: u64,
    pub l_max: u32,
}

/// Linear combination of independent term estimates.
///
/// Returns `n_queries_per_term = 0` and `l_max = 0`; callers that know the
/// cost fill them in.
pub fn combine_energy(h: &PauliSum, estimates: &BTreeMap<PauliString, TermEstimate>) -> Result<EnergyEstimate> {
    let missing: Vec<String> = h
        .non_identity_terms()
        .filter(|t| !estimates.contains_key(&t.word))
        .map(|t| t.word.word())
        .collect();
    if !missing.is_empty() {
        return Err(RaeError::MissingTerms(missing));
    }
    let (mut energy, mut variance, mut bias) = (h.identity_coefficient(), 0.0, 0.0);
    for t in h.non_identity_terms() {
        let e = &estimates[&t.word];
        energy += t.coeff * e.pi_hat;
        variance += t.coeff * t.coeff * e.variance;
        bias += t.coeff * e.bias;
    }
    Ok(EnergyEstimate {
        energy,
        variance,
        bias,
        rmse: (bias * bias + variance).sqrt(),
        n_queries_per_term: 0,
        l_max: 0,
    })
}

/// Analytic direct-sampling energy: each term measured `n_queries` times on
/// the noisy ansatz.
pub fn direct_baseline(h: &PauliSum, ansatz: &AnsatzSpec, lambda: f64, n_queries: u64) -> Result<EnergyEstimate> {
    if !(lambda >= 0.0) {
        return Err(RaeError::domain(format!("λ must be ≥ 0, got {lambda}")));
    }
    if n_queries == 0 {
        return Err(RaeError::domain("n_queries must be at least 1"));
    }
    let shrink = (-lambda / 2.0).exp();
    let estimates = term_references(h, ansatz)?
        .into_iter()
        .map(|(word, pi)| {
            let est = TermEstimate {
                pi_hat: shrink * pi,
                variance: (1.0 - (-lambda).exp() * pi * pi) / n_queries as f64,
                bias: (shrink - 1.0) * pi,
            };
            (word, est)
        })
        .collect();
    let mut e = combine_energy(h, &estimates)?;
    e.n_queries_per_term = n_queries;
    Ok(e)
}

/// Layer-schedule family swept by [`rmse_sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ScheduleFamily {
    Lis,
    Eis,
    Polynomial { degree: u32 },
    /// Noise-robust depths for the term's reference value, truncated at the
    /// sweep index.
    NoiseRobust { c: f64 },
}

impl ScheduleFamily {
    /// Schedule for sweep index `i`. For the linear and noise-robust
    /// families the index is the maximum depth.
    pub fn schedule(&self, i: u32, n_s: u64, pi_ref: f64, lambda: f64) -> Result<LayerSchedule> {
        match *self {
            ScheduleFamily::Lis => lis(i, n_s),
            ScheduleFamily::Eis => eis(i, n_s),
            ScheduleFamily::Polynomial { degree } => polynomial(degree, i, n_s),
            ScheduleFamily::NoiseRobust { c } => {
                let plan = noise_robust_schedule(pi_ref.clamp(-1.0, 1.0), lambda, c, n_s)?;
                Ok(plan
                    .schedule
                    .truncated(i)
                    .unwrap_or(LayerSchedule::new(vec![0], n_s)?))
            }
        }
    }
}

/// Sampled dataset for one term; record seeds depend on `(term, L)` only,
/// so datasets for nested schedules share their common records.
pub fn simulate_term_dataset(
    ansatz: &AnsatzSpec,
    target: &PauliString,
    lambda: f64,
    schedule: &LayerSchedule,
    seed: u64,
) -> Result<ParityDataset> {
    let term = label(&target.word());
    let records = schedule
        .layers()
        .iter()
        .map(|&l| {
            let circuit = RaeCircuit::new(*ansatz, target.clone(), l, lambda)?;
            let p = parity_distribution(&circuit)?;
            let n = schedule.shots_per_layer();
            let e = sample_even_count(p, n, derive_seed(seed, &[term, l as u64]))?;
            Ok(ParityRecord {
                layers: l,
                n_shots: n,
                e_even: e,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ParityDataset::new(target.clone(), records)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub hamiltonian: PauliSum,
    pub ansatz: AnsatzSpec,
    pub lambda: f64,
    pub family: ScheduleFamily,
    /// Sweep indices, e.g. `0..=8` for a linear sweep up to depth 8.
    pub indices: Vec<u32>,
    pub n_shots: u64,
    pub m_bootstrap: usize,
    pub seed: u64,
    pub grid: MleGrid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermSweepRow {
    pub index: u32,
    pub term: PauliString,
    pub layers: Vec<u32>,
    pub l_max: u32,
    pub n_queries: u64,
    pub pi_ref: f64,
    pub pi_hat: f64,
    pub lambda_hat: f64,
    pub method: EstimationMethod,
    pub bias: f64,
    pub variance: f64,
    pub summary: BootstrapSummary,
    /// `None` when the Fisher matrix is singular or `|Π| = 1`.
    pub crb: Option<f64>,
    pub direct_rmse: f64,
    pub verdict: AdvantageVerdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub index: u32,
    pub l_max: u32,
    pub n_queries: u64,
    pub energy: EnergyEstimate,
    pub direct: EnergyEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub terms: Vec<TermSweepRow>,
}

fn term_row(cfg: &SweepConfig, index: u32, term: &PauliString, pi_ref: f64) -> Result<TermSweepRow> {
    let schedule = cfg.family.schedule(index, cfg.n_shots, pi_ref, cfg.lambda)?;
    let ds = simulate_term_dataset(&cfg.ansatz, term, cfg.lambda, &schedule, cfg.seed)?;
    let estimator = Estimator::auto(&ds, &cfg.grid);
    let full = estimator.estimate(&ds)?;
    let boot_seed = derive_seed(cfg.seed, &[label(&term.word()), index as u64, BOOTSTRAP_TAG]);
    let replicates = bootstrap(&ds, cfg.m_bootstrap, &estimator, boot_seed)?;
    let (mean, variance) = replicate_moments(&replicates);
    let summary = rmse_stats(&replicates, pi_ref)?;
    let n_queries = query_cost(&schedule);
    let crb = crb_rmse(pi_ref, cfg.lambda, &schedule).ok();
    let mse_direct = direct_mse_model(pi_ref, cfg.lambda, n_queries)?;
    Ok(TermSweepRow {
        index,
        term: term.clone(),
        layers: schedule.layers().to_vec(),
        l_max: schedule.max_layer(),
        n_queries,
        pi_ref,
        pi_hat: full.pi_hat,
        lambda_hat: full.lambda_hat,
        method: full.method,
        bias: mean - pi_ref,
        variance,
        summary,
        crb,
        direct_rmse: mse_direct.sqrt(),
        verdict: advantage_verdict(summary.rmse, summary.sigma_rmse, crb.unwrap_or(0.0), mse_direct),
    })
}

/// Simulates, estimates and bootstraps every term at every sweep index, then
/// combines the terms into energy rows. Query counts are per term.
pub fn rmse_sweep(cfg: &SweepConfig) -> Result<SweepTable> {
    if cfg.indices.is_empty() {
        return Err(RaeError::domain("sweep needs at least one index"));
    }
    let refs = term_references(&cfg.hamiltonian, &cfg.ansatz)?;
    let jobs: Vec<(u32, &PauliString, f64)> = cfg
        .indices
        .iter()
        .flat_map(|&i| refs.iter().map(move |(w, &p)| (i, w, p)))
        .collect();
    let terms = jobs
        .par_iter()
        .map(|&(i, w, p)| term_row(cfg, i, w, p))
        .collect::<Result<Vec<_>>>()?;

    let rows = cfg
        .indices
        .iter()
        .map(|&i| {
            let at: Vec<&TermSweepRow> = terms.iter().filter(|t| t.index == i).collect();
            let estimates = at
                .iter()
                .map(|t| {
                    let est = TermEstimate {
                        pi_hat: t.pi_hat,
                        variance: t.variance,
                        bias: t.bias,
                    };
                    (t.term.clone(), est)
                })
                .collect();
            let mut energy = combine_energy(&cfg.hamiltonian, &estimates)?;
            // Uniform allocation: report the largest per-term cost.
            let n_queries = at.iter().map(|t| t.n_queries).max().unwrap_or(0);
            let l_max = at.iter().map(|t| t.l_max).max().unwrap_or(0);
            energy.n_queries_per_term = n_queries;
            energy.l_max = l_max;
            let mut direct = direct_baseline(&cfg.hamiltonian, &cfg.ansatz, cfg.lambda, n_queries)?;
            direct.l_max = l_max;
            Ok(SweepRow {
                index: i,
                l_max,
                n_queries,
                energy,
                direct,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable { rows, terms })
}

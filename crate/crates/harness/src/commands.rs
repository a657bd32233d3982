use std::collections::BTreeSet;
use std::path::PathBuf;

use rae_core::energy::simulate_term_dataset;
use rae_core::fisher::information_per_query;
use rae_core::lambda_fit::{simulate_curve, unit_interval_grid, LambdaProfile};
use rae_core::pauli::term_references;
use rae_core::rng::{derive_seed, label};
use rae_core::{
    advantage_verdict, bootstrap, crb_rmse, crb_rmse_known_lambda, direct_mse_model, l_max_fisher,
    lambda_profile, noise_robust_schedule, query_cost, rmse_stats, rmse_sweep, AdvantageVerdict,
    BootstrapSummary, EstimationMethod, EstimationResult, Estimator, LayerSchedule, LikelihoodCurve,
    NrisBranch, ParityDataset, PauliString, ScheduleFamily, SweepConfig, SweepTable,
};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{num, opt, Writer};

fn read(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Depth index passed to the schedule family; the noise-robust family is
/// uncapped unless `i_max` is given.
fn schedule_index(cfg: &ExperimentConfig, family: &ScheduleFamily) -> u32 {
    match (family, cfg.i_max) {
        (ScheduleFamily::NoiseRobust { .. }, None) => u32::MAX,
        _ => cfg.i_max(),
    }
}

pub fn generate(cfg: &ExperimentConfig, timestamp: bool) -> Result<(), CliError> {
    let (h, ansatz) = cfg.load_hamiltonian()?;
    let family = cfg.family()?;
    let writer = Writer::new(cfg, "generate", timestamp)?;
    let hash = cfg.hash();
    for (word, pi_ref) in term_references(&h, &ansatz)? {
        let schedule = family.schedule(schedule_index(cfg, &family), cfg.n_shots, pi_ref, cfg.lambda)?;
        let ds = simulate_term_dataset(&ansatz, &word, cfg.lambda, &schedule, cfg.seed)?
            .with_metadata("config_hash", hash.clone())
            .with_metadata("tool_version", crate::output::TOOL_VERSION)
            .with_metadata("seed", cfg.seed)
            .with_metadata("lambda", cfg.lambda)
            .with_metadata("theta", ansatz.theta)
            .with_metadata("hamiltonian", cfg.hamiltonian.clone())
            .with_metadata("schedule", cfg.schedule.clone())
            .with_metadata("pi_ref", pi_ref);
        let mut text = ds.to_json()?;
        text.push('\n');
        let path = writer.path(&format!("{}.json", word.word()));
        crate::output::write_file(&path, text.as_bytes())?;
        println!("{}  L = {:?}  -> {}", word, schedule.layers(), path.display());
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
struct TermResult {
    file: String,
    term: PauliString,
    estimate: EstimationResult,
    routed_to_direct: bool,
    pi_ref: f64,
    pi_ref_source: &'static str,
    bootstrap: BootstrapSummary,
    n_queries: u64,
    crb: Option<f64>,
    direct_rmse: f64,
    verdict: AdvantageVerdict,
}

pub fn estimate(cfg: &ExperimentConfig, files: &[PathBuf], force: bool, timestamp: bool) -> Result<(), CliError> {
    if files.is_empty() {
        return Err(CliError::config("estimate: no dataset files given"));
    }
    let datasets = files
        .iter()
        .map(|f| {
            ParityDataset::from_json(&read(f)?)
                .map_err(|e| CliError::data(format!("{}: {e}", f.display())))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let provenance: BTreeSet<String> = datasets
        .iter()
        .map(|d| {
            d.metadata
                .get("config_hash")
                .and_then(|v| v.as_str())
                .unwrap_or("unknown")
                .to_string()
        })
        .collect();
    if provenance.len() > 1 && !force {
        return Err(CliError::data(format!(
            "datasets come from {} different configurations; pass --force to combine them",
            provenance.len()
        )));
    }
    let grid = cfg.grid().map_err(|e| CliError::config(format!("grid: {e}")))?;
    let writer = Writer::new(cfg, "estimate", timestamp)?;
    let mut results = Vec::new();
    for (file, ds) in files.iter().zip(&datasets) {
        let estimator = Estimator::auto(ds, &grid);
        let est = estimator.estimate(ds)?;
        let routed = est.method == EstimationMethod::Direct;
        let m = cfg.m_bootstrap(ds.pauli.n_qubits());
        let seed = derive_seed(cfg.seed, &[label(&ds.pauli.word())]);
        let replicates = bootstrap(ds, m, &estimator, seed)?;
        let (pi_ref, source) = match ds.metadata.get("pi_ref").and_then(|v| v.as_f64()) {
            Some(p) => (p, "metadata"),
            None => (est.pi_hat, "estimate"),
        };
        let summary = rmse_stats(&replicates, pi_ref)?;
        let lambda = ds
            .metadata
            .get("lambda")
            .and_then(|v| v.as_f64())
            .unwrap_or(est.lambda_hat);
        let n_queries: u64 = ds.records.iter().map(|r| (2 * r.layers as u64 + 1) * r.n_shots).sum();
        let crb = ds
            .schedule()
            .and_then(|s| crb_rmse(pi_ref, lambda, &s).ok());
        let mse_direct = direct_mse_model(pi_ref, lambda, n_queries)?;
        let verdict = advantage_verdict(summary.rmse, summary.sigma_rmse, crb.unwrap_or(0.0), mse_direct);
        println!(
            "{:<4} {}  pi_hat = {:.6}  lambda_hat = {:.4}  rmse = {:.3e} ± {:.1e}  crb = {}  direct = {:.3e}  {:?}",
            ds.pauli.word(),
            if routed { "direct estimate (depth-0 data only)" } else { "grid MLE" },
            est.pi_hat,
            est.lambda_hat,
            summary.rmse,
            summary.sigma_rmse,
            crb.map(|c| format!("{c:.3e}")).unwrap_or_else(|| "n/a".into()),
            mse_direct.sqrt(),
            verdict
        );
        results.push(TermResult {
            file: file.display().to_string(),
            term: ds.pauli.clone(),
            estimate: est,
            routed_to_direct: routed,
            pi_ref,
            pi_ref_source: source,
            bootstrap: summary,
            n_queries,
            crb,
            direct_rmse: mse_direct.sqrt(),
            verdict,
        });
    }
    let path = writer.json("estimate.json", &results)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepTable, CliError> {
    let (h, ansatz) = cfg.load_hamiltonian()?;
    let family = cfg.family()?;
    let sweep = SweepConfig {
        hamiltonian: h.clone(),
        ansatz,
        lambda: cfg.lambda,
        family,
        indices: (0..=cfg.i_max()).collect(),
        n_shots: cfg.n_shots,
        m_bootstrap: cfg.m_bootstrap(h.n_qubits()),
        seed: cfg.seed,
        grid: cfg.grid().map_err(|e| CliError::config(format!("grid: {e}")))?,
    };
    Ok(rmse_sweep(&sweep)?)
}

pub fn sweep(cfg: &ExperimentConfig, timestamp: bool) -> Result<(), CliError> {
    let table = run_sweep(cfg)?;
    let writer = Writer::new(cfg, "sweep", timestamp)?;
    let header = [
        "term", "l_max", "n_queries", "pi_ref", "pi_hat", "lambda_hat", "method", "rmse", "sigma_rmse", "bias",
        "variance", "crb", "direct_rmse", "verdict",
    ];
    let rows: Vec<Vec<String>> = table
        .terms
        .iter()
        .map(|t| {
            vec![
                t.term.word(),
                t.l_max.to_string(),
                t.n_queries.to_string(),
                num(t.pi_ref),
                num(t.pi_hat),
                num(t.lambda_hat),
                format!("{:?}", t.method),
                num(t.summary.rmse),
                num(t.summary.sigma_rmse),
                num(t.bias),
                num(t.variance),
                opt(t.crb),
                num(t.direct_rmse),
                format!("{:?}", t.verdict),
            ]
        })
        .collect();
    for t in &table.terms {
        println!(
            "{:<4} L_max = {:>3}  N_q = {:>9}  rmse = {:.3e}  crb = {:>9}  direct = {:.3e}  {:?}",
            t.term.word(),
            t.l_max,
            t.n_queries,
            t.summary.rmse,
            t.crb.map(|c| format!("{c:.3e}")).unwrap_or_else(|| "n/a".into()),
            t.direct_rmse,
            t.verdict
        );
    }
    writer.csv("sweep.csv", &header, &rows)?;
    let path = writer.json("sweep.json", &table)?;
    println!("wrote {}", path.display());
    Ok(())
}

pub fn energy(cfg: &ExperimentConfig, timestamp: bool) -> Result<(), CliError> {
    let table = run_sweep(cfg)?;
    let writer = Writer::new(cfg, "energy", timestamp)?;
    let header = [
        "l_max", "n_queries", "rmse", "bias", "variance", "energy", "direct_rmse", "direct_bias", "direct_variance",
    ];
    let rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|r| {
            vec![
                r.l_max.to_string(),
                r.n_queries.to_string(),
                num(r.energy.rmse),
                num(r.energy.bias),
                num(r.energy.variance),
                num(r.energy.energy),
                num(r.direct.rmse),
                num(r.direct.bias),
                num(r.direct.variance),
            ]
        })
        .collect();
    println!("{:>6} {:>10} {:>12} {:>12}", "L_max", "N_q", "rmse [Ha]", "direct [Ha]");
    for r in &table.rows {
        let mark = if r.energy.rmse < rae_core::CHEMICAL_ACCURACY { "  *" } else { "" };
        println!(
            "{:>6} {:>10} {:>12.4e} {:>12.4e}{mark}",
            r.l_max, r.n_queries, r.energy.rmse, r.direct.rmse
        );
    }
    writer.csv("energy.csv", &header, &rows)?;
    let path = writer.json("energy.json", &table)?;
    println!("wrote {}  (* below chemical accuracy)", path.display());
    Ok(())
}

pub fn fit_lambda(cfg: &ExperimentConfig, files: &[PathBuf], timestamp: bool) -> Result<(), CliError> {
    let writer = Writer::new(cfg, "fit-lambda", timestamp)?;
    let curves = if files.is_empty() {
        let depths = 1..=cfg.i_max.unwrap_or(5);
        depths
            .map(|l| {
                let seed = derive_seed(cfg.seed, &[l as u64]);
                let curve = simulate_curve(l, cfg.lambda, &unit_interval_grid(), cfg.n_shots, seed)?;
                let mut text = curve.to_json()?;
                text.push('\n');
                crate::output::write_file(&writer.path(&format!("curves/L{l}.json")), text.as_bytes())?;
                Ok(curve)
            })
            .collect::<Result<Vec<_>, CliError>>()?
    } else {
        files
            .iter()
            .map(|f| {
                LikelihoodCurve::from_json(&read(f)?).map_err(|e| CliError::data(format!("{}: {e}", f.display())))
            })
            .collect::<Result<Vec<_>, _>>()?
    };
    let profile: LambdaProfile = lambda_profile(&curves)?;
    let rows: Vec<Vec<String>> = profile
        .rows
        .iter()
        .map(|r| vec![r.layers.to_string(), num(r.lambda), num(r.delta_lambda)])
        .collect();
    let cells: Vec<String> = profile
        .rows
        .iter()
        .map(|r| format!("L={}: {:.4}({:.4})", r.layers, r.lambda, r.delta_lambda))
        .collect();
    println!("{}", cells.join("  "));
    println!(
        "max relative variation {:.1}%{}",
        100.0 * profile.max_relative_variation,
        if profile.unstable { " (unstable)" } else { "" }
    );
    writer.csv("lambda_fit.csv", &["L", "lambda", "delta_lambda"], &rows)?;
    writer.json("lambda_fit.json", &profile)?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
struct CrbPoint {
    layers: Vec<u32>,
    n_queries: u64,
    crb: Option<f64>,
    crb_known_lambda: Option<f64>,
    direct_rmse: f64,
    information_per_query: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
struct SchedulePlan {
    pi: f64,
    lambda: f64,
    layers: Vec<u32>,
    shots_per_layer: u64,
    query_cost: u64,
    l_max_fisher: Option<f64>,
    branch: Option<NrisBranch>,
    crb_curve: Vec<CrbPoint>,
}

pub fn schedule(cfg: &ExperimentConfig, timestamp: bool) -> Result<(), CliError> {
    let pi = cfg
        .pi
        .ok_or_else(|| CliError::config("pi: the schedule command needs a prior --pi"))?;
    let family = cfg.family()?;
    let (schedule, branch) = match family {
        ScheduleFamily::NoiseRobust { c } => {
            let plan = noise_robust_schedule(pi, cfg.lambda, c, cfg.n_shots)?;
            let s = match cfg.i_max {
                Some(cap) => plan.schedule.truncated(cap).unwrap_or(plan.schedule),
                None => plan.schedule,
            };
            (s, Some(plan.branch))
        }
        other => (other.schedule(cfg.i_max(), cfg.n_shots, pi, cfg.lambda)?, None),
    };
    let l_max_f = l_max_fisher(cfg.lambda).ok();
    let crb_curve = (1..=schedule.len())
        .map(|k| {
            let prefix = LayerSchedule::new(schedule.layers()[..k].to_vec(), cfg.n_shots)?;
            let n_queries = query_cost(&prefix);
            Ok(CrbPoint {
                layers: prefix.layers().to_vec(),
                n_queries,
                crb: crb_rmse(pi, cfg.lambda, &prefix).ok(),
                crb_known_lambda: crb_rmse_known_lambda(pi, cfg.lambda, &prefix).ok(),
                direct_rmse: direct_mse_model(pi, cfg.lambda, n_queries)?.sqrt(),
                information_per_query: information_per_query(pi, cfg.lambda, &prefix).ok(),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    println!("layers      {:?}", schedule.layers());
    if let Some(b) = branch {
        println!("branch      {b:?}");
    }
    if let Some(l) = l_max_f {
        println!("L_max(I)    {l:.3}");
    }
    println!("query cost  {}", query_cost(&schedule));
    println!("{:>6} {:>10} {:>12} {:>12}", "L_max", "N_q", "crb", "direct");
    for p in &crb_curve {
        println!(
            "{:>6} {:>10} {:>12} {:>12.4e}",
            p.layers.last().copied().unwrap_or(0),
            p.n_queries,
            p.crb.map(|c| format!("{c:.4e}")).unwrap_or_else(|| "singular".into()),
            p.direct_rmse
        );
    }
    let rows: Vec<Vec<String>> = crb_curve
        .iter()
        .map(|p| {
            vec![
                p.layers.last().copied().unwrap_or(0).to_string(),
                p.n_queries.to_string(),
                opt(p.crb),
                opt(p.crb_known_lambda),
                num(p.direct_rmse),
            ]
        })
        .collect();
    let writer = Writer::new(cfg, "schedule", timestamp)?;
    writer.csv(
        "schedule.csv",
        &["l_max", "n_queries", "crb", "crb_known_lambda", "direct_rmse"],
        &rows,
    )?;
    writer.json(
        "schedule.json",
        SchedulePlan {
            pi,
            lambda: cfg.lambda,
            layers: schedule.layers().to_vec(),
            shots_per_layer: schedule.shots_per_layer(),
            query_cost: query_cost(&schedule),
            l_max_fisher: l_max_f,
            branch,
            crb_curve,
        },
    )?;
    Ok(())
}

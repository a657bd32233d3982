use std::path::{Path, PathBuf};

use rae_core::{
    h2_one_qubit_hamiltonian, h2_two_qubit_hamiltonian, AnsatzKind, AnsatzSpec, HamiltonianDocument, MleGrid,
    PauliSum, ScheduleFamily,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Resolved experiment settings. Field order is the hashing order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// `one_qubit`, `two_qubit` or a path to a Hamiltonian JSON document.
    pub hamiltonian: String,
    /// Ansatz angle; the optimal angle for the Hamiltonian when absent.
    pub theta: Option<f64>,
    pub lambda: f64,
    /// `lis`, `eis`, `poly(d)` or `nris`.
    pub schedule: String,
    /// Maximum sweep index; for `nris` an optional depth cap.
    pub i_max: Option<u32>,
    pub n_shots: u64,
    /// Bootstrap replicates; 15000 for one qubit and 10000 otherwise when absent.
    pub m_bootstrap: Option<usize>,
    pub seed: u64,
    pub grid_pi: usize,
    pub grid_lambda: usize,
    pub lambda_max: f64,
    pub refine: bool,
    /// Noise-robust schedule hyperparameter.
    pub c: f64,
    /// Prior guess of the expectation value for `schedule`.
    pub pi: Option<f64>,
    #[serde(skip)]
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            hamiltonian: "two_qubit".into(),
            theta: None,
            lambda: 0.045,
            schedule: "lis".into(),
            i_max: None,
            n_shots: 8192,
            m_bootstrap: None,
            seed: 0,
            grid_pi: 10_000,
            grid_lambda: 100,
            lambda_max: 0.5,
            refine: false,
            c: 1.0,
            pi: None,
            out: PathBuf::from("rae-out"),
        }
    }
}

/// Flag values; `None` leaves the config file (or default) in place.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub hamiltonian: Option<String>,
    pub theta: Option<f64>,
    pub lambda: Option<f64>,
    pub schedule: Option<String>,
    pub i_max: Option<u32>,
    pub n_shots: Option<u64>,
    pub m_bootstrap: Option<usize>,
    pub seed: Option<u64>,
    pub grid_pi: Option<usize>,
    pub grid_lambda: Option<usize>,
    pub lambda_max: Option<f64>,
    pub refine: bool,
    pub c: Option<f64>,
    pub pi: Option<f64>,
    pub out: Option<PathBuf>,
}

pub const DEFAULT_I_MAX: u32 = 8;

impl ExperimentConfig {
    /// Defaults, then the config file, then flags. The seed falls back to
    /// `RAE_SEED` when neither the file nor a flag sets it.
    pub fn resolve(file: Option<&Path>, flags: Overrides, env_seed: Option<String>) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        let mut seed_set = false;
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
            let mut value: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| CliError::config(format!("config {}: {e}", path.display())))?;
            seed_set = value.get("seed").is_some();
            if let Some(out) = value.as_object_mut().and_then(|o| o.remove("out")) {
                let out = out
                    .as_str()
                    .ok_or_else(|| CliError::config("out: must be a path string"))?;
                cfg.out = PathBuf::from(out);
            }
            let mut merged = serde_json::to_value(&cfg).expect("config serializes");
            if let (Some(base), Some(over)) = (merged.as_object_mut(), value.as_object()) {
                for (k, v) in over {
                    base.insert(k.clone(), v.clone());
                }
            }
            let out = std::mem::take(&mut cfg.out);
            cfg = serde_json::from_value(merged)
                .map_err(|e| CliError::config(format!("config {}: {e}", path.display())))?;
            cfg.out = out;
        }
        macro_rules! apply {
            ($($field:ident),*) => {$(
                if let Some(v) = flags.$field {
                    cfg.$field = v;
                }
            )*};
        }
        apply!(hamiltonian, lambda, schedule, n_shots, grid_pi, grid_lambda, lambda_max, c);
        if flags.theta.is_some() {
            cfg.theta = flags.theta;
        }
        if flags.i_max.is_some() {
            cfg.i_max = flags.i_max;
        }
        if flags.m_bootstrap.is_some() {
            cfg.m_bootstrap = flags.m_bootstrap;
        }
        if flags.pi.is_some() {
            cfg.pi = flags.pi;
        }
        if flags.refine {
            cfg.refine = true;
        }
        if let Some(out) = flags.out {
            cfg.out = out;
        }
        match flags.seed {
            Some(s) => cfg.seed = s,
            None if !seed_set => {
                if let Some(text) = env_seed {
                    cfg.seed = text
                        .trim()
                        .parse()
                        .map_err(|_| CliError::config(format!("RAE_SEED={text:?} is not an unsigned integer")))?;
                }
            }
            None => {}
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(CliError::config(format!("lambda: must be finite and ≥ 0, got {}", self.lambda)));
        }
        if self.n_shots == 0 {
            return Err(CliError::config("n_shots: must be positive"));
        }
        if self.m_bootstrap == Some(0) {
            return Err(CliError::config("m_bootstrap: must be positive"));
        }
        if let Some(t) = self.theta {
            if !t.is_finite() {
                return Err(CliError::config("theta: must be finite"));
            }
        }
        if !(self.c > 0.0) {
            return Err(CliError::config(format!("c: must be positive, got {}", self.c)));
        }
        if let Some(p) = self.pi {
            if !(-1.0..=1.0).contains(&p) {
                return Err(CliError::config(format!("pi: must lie in [-1, 1], got {p}")));
            }
        }
        self.grid().map_err(|e| CliError::config(format!("grid: {e}")))?;
        self.family()?;
        self.load_hamiltonian()?;
        Ok(())
    }

    pub fn grid(&self) -> rae_core::Result<MleGrid> {
        Ok(MleGrid::new(self.grid_pi, self.grid_lambda, self.lambda_max)?.with_refinement(self.refine))
    }

    pub fn family(&self) -> Result<ScheduleFamily, CliError> {
        parse_schedule(&self.schedule, self.c)
    }

    pub fn i_max(&self) -> u32 {
        self.i_max.unwrap_or(DEFAULT_I_MAX)
    }

    pub fn load_hamiltonian(&self) -> Result<(PauliSum, AnsatzSpec), CliError> {
        let (h, kind, ansatz) = match self.hamiltonian.as_str() {
            "one_qubit" => (h2_one_qubit_hamiltonian(), AnsatzKind::OneQubitRy, None),
            "two_qubit" => (h2_two_qubit_hamiltonian(), AnsatzKind::TwoQubitUcc, None),
            path => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::config(format!("hamiltonian: cannot read {path}: {e}")))?;
                let doc = HamiltonianDocument::from_json(&text)
                    .map_err(|e| CliError::config(format!("hamiltonian: {path}: {e}")))?;
                let kind = match doc.hamiltonian.n_qubits() {
                    1 => AnsatzKind::OneQubitRy,
                    2 => AnsatzKind::TwoQubitUcc,
                    n => {
                        return Err(CliError::config(format!(
                            "hamiltonian: {path}: no built-in ansatz for {n} qubits"
                        )))
                    }
                };
                (doc.hamiltonian, kind, doc.ansatz)
            }
        };
        let mut ansatz = ansatz.unwrap_or_else(|| AnsatzSpec::h2_optimal(kind));
        if let Some(t) = self.theta {
            ansatz.theta = t;
        }
        Ok((h, ansatz))
    }

    pub fn m_bootstrap(&self, n_qubits: usize) -> usize {
        self.m_bootstrap.unwrap_or(if n_qubits == 1 { 15_000 } else { 10_000 })
    }

    /// Hex SHA-256 of the canonical JSON form (the output path is excluded).
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&canonical))
    }
}

pub fn parse_schedule(text: &str, c: f64) -> Result<ScheduleFamily, CliError> {
    let t = text.trim().to_ascii_lowercase();
    let arg = |prefix: &str| -> Option<String> {
        let rest = t.strip_prefix(prefix)?;
        let rest = rest.strip_prefix(['(', ':']).unwrap_or(rest);
        Some(rest.trim_end_matches(')').to_string())
    };
    match t.as_str() {
        "lis" => Ok(ScheduleFamily::Lis),
        "eis" => Ok(ScheduleFamily::Eis),
        "nris" => Ok(ScheduleFamily::NoiseRobust { c }),
        _ => {
            if let Some(d) = arg("poly") {
                let degree = d
                    .parse()
                    .map_err(|_| CliError::config(format!("schedule: bad polynomial degree in {text:?}")))?;
                Ok(ScheduleFamily::Polynomial { degree })
            } else if let Some(c) = arg("nris") {
                let c = c
                    .parse()
                    .map_err(|_| CliError::config(format!("schedule: bad hyperparameter in {text:?}")))?;
                Ok(ScheduleFamily::NoiseRobust { c })
            } else {
                Err(CliError::config(format!(
                    "schedule: expected lis, eis, poly(d) or nris(c), got {text:?}"
                )))
            }
        }
    }
}

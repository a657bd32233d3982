use serde::{Deserialize, Serialize};

use crate::error::{RaeError, Result};
use crate::inference::likelihood::{chebyshev_t, log_likelihood, PROBABILITY_FLOOR};
use crate::inference::ParityDataset;

/// Values of two grid points closer than this count as tied.
const TIE_TOLERANCE: f64 = 1e-9;

/// How the noise rate enters the grid search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaAxis {
    /// `points` uniform values on `[0, max]`.
    Range { max: f64, points: usize },
    /// λ held fixed; the search is one-dimensional in Π.
    Pinned(f64),
}

/// Uniform search grid over `(Π, λ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MleGrid {
    pub pi_points: usize,
    pub lambda: LambdaAxis,
    /// Inset of the Π range from ±1.
    pub epsilon: f64,
    /// Polish the grid maximum with a bounded local search inside the
    /// neighbouring cells.
    #[serde(default)]
    pub refine: bool,
}

impl Default for MleGrid {
    fn default() -> Self {
        Self {
            pi_points: 10_000,
            lambda: LambdaAxis::Range {
                max: 0.5,
                points: 100,
            },
            epsilon: 1e-9,
            refine: false,
        }
    }
}

impl MleGrid {
    pub fn new(pi_points: usize, lambda_points: usize, lambda_max: f64) -> Result<Self> {
        let grid = Self {
            pi_points,
            lambda: LambdaAxis::Range {
                max: lambda_max,
                points: lambda_points,
            },
            ..Self::default()
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn pinned(pi_points: usize, lambda: f64) -> Result<Self> {
        let grid = Self {
            pi_points,
            lambda: LambdaAxis::Pinned(lambda),
            ..Self::default()
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn with_refinement(mut self, refine: bool) -> Self {
        self.refine = refine;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.pi_points < 2 {
            return Err(RaeError::domain("the Π axis needs at least two points"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(RaeError::domain(format!("epsilon {} outside (0, 0.5)", self.epsilon)));
        }
        match self.lambda {
            LambdaAxis::Range { max, points } => {
                if points < 2 || !(max > 0.0) || !max.is_finite() {
                    return Err(RaeError::domain(format!(
                        "λ axis needs ≥ 2 points on a non-degenerate range, got {points} on [0, {max}]"
                    )));
                }
            }
            LambdaAxis::Pinned(v) => {
                if !(v >= 0.0) || !v.is_finite() {
                    return Err(RaeError::domain(format!("pinned λ must be finite and ≥ 0, got {v}")));
                }
            }
        }
        Ok(())
    }

    pub fn lambda_pinned(&self) -> bool {
        matches!(self.lambda, LambdaAxis::Pinned(_))
    }

    pub fn pi_range(&self) -> (f64, f64) {
        (-1.0 + self.epsilon, 1.0 - self.epsilon)
    }

    pub fn lambda_range(&self) -> (f64, f64) {
        match self.lambda {
            LambdaAxis::Range { max, .. } => (0.0, max),
            LambdaAxis::Pinned(v) => (v, v),
        }
    }

    pub fn pi_values(&self) -> Vec<f64> {
        linspace(self.pi_range(), self.pi_points)
    }

    pub fn lambda_values(&self) -> Vec<f64> {
        match self.lambda {
            LambdaAxis::Range { max, points } => linspace((0.0, max), points),
            LambdaAxis::Pinned(v) => vec![v],
        }
    }

    /// Spacing of the Π axis.
    pub fn pi_step(&self) -> f64 {
        let (lo, hi) = self.pi_range();
        (hi - lo) / (self.pi_points - 1) as f64
    }
}

fn linspace((lo, hi): (f64, f64), n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i + 1 == n { hi } else { lo + step * i as f64 })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimationMethod {
    GridMle,
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimationResult {
    pub pi_hat: f64,
    pub lambda_hat: f64,
    pub log_likelihood_max: f64,
    /// Another, non-adjacent grid point ties the maximum within 1e-9.
    pub degenerate_maximum: bool,
    pub method: EstimationMethod,
}

/// Log-likelihood terms precomputed on a grid for a fixed set of
/// `(L, n_shots)` records.
///
/// For counts `e` the grid value is `base + Σ_r e_r·delta_r`, so repeated
/// evaluations (bootstrap replicates, datasets sharing a schedule) cost one
/// multiply-add per grid point and record.
#[derive(Debug, Clone)]
pub struct LikelihoodTable {
    grid: MleGrid,
    pi_values: Vec<f64>,
    lambda_values: Vec<f64>,
    layers: Vec<u32>,
    shots: Vec<u64>,
    /// `ln P(even) - ln P(odd)`, indexed `[(i·nλ + j)·r + k]`.
    delta: Vec<f64>,
    /// `Σ_k n_k ln P(odd)`, indexed `[i·nλ + j]`.
    base: Vec<f64>,
}

/// Location and diagnostics of the grid maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridMaximum {
    pub pi_index: usize,
    pub lambda_index: usize,
    pub value: f64,
    pub degenerate: bool,
}

impl LikelihoodTable {
    /// Builds the table for the records of `ds`.
    pub fn for_dataset(ds: &ParityDataset, grid: &MleGrid) -> Result<Self> {
        let layers: Vec<u32> = ds.records.iter().map(|r| r.layers).collect();
        let shots: Vec<u64> = ds.records.iter().map(|r| r.n_shots).collect();
        Self::new(grid, &layers, &shots)
    }

    pub fn new(grid: &MleGrid, layers: &[u32], shots: &[u64]) -> Result<Self> {
        grid.validate()?;
        if layers.is_empty() || layers.len() != shots.len() {
            return Err(RaeError::Precondition(
                "likelihood table needs one shot count per non-empty layer list".into(),
            ));
        }
        let pi_values = grid.pi_values();
        let lambda_values = grid.lambda_values();
        let r = layers.len();
        let n_lambda = lambda_values.len();

        // damping[j·r + k] = e^{-λ_j (L_k + 1/2)}
        let damping: Vec<f64> = lambda_values
            .iter()
            .flat_map(|&lam| layers.iter().map(move |&l| (-lam * (l as f64 + 0.5)).exp()))
            .collect();

        let mut delta = vec![0.0; pi_values.len() * n_lambda * r];
        let mut base = vec![0.0; pi_values.len() * n_lambda];
        let mut cheb = vec![0.0; r];
        for (i, &pi) in pi_values.iter().enumerate() {
            for (k, &l) in layers.iter().enumerate() {
                cheb[k] = chebyshev_t(2 * l + 1, pi);
            }
            for j in 0..n_lambda {
                let cell = i * n_lambda + j;
                let mut acc = 0.0;
                for k in 0..r {
                    let signal = damping[j * r + k] * cheb[k];
                    let even = (0.5 * (1.0 + signal)).clamp(PROBABILITY_FLOOR, 1.0 - PROBABILITY_FLOOR);
                    let odd = (0.5 * (1.0 - signal)).clamp(PROBABILITY_FLOOR, 1.0 - PROBABILITY_FLOOR);
                    let ln_odd = odd.ln();
                    delta[cell * r + k] = even.ln() - ln_odd;
                    acc += shots[k] as f64 * ln_odd;
                }
                base[cell] = acc;
            }
        }
        Ok(Self {
            grid: *grid,
            pi_values,
            lambda_values,
            layers: layers.to_vec(),
            shots: shots.to_vec(),
            delta,
            base,
        })
    }

    pub fn grid(&self) -> &MleGrid {
        &self.grid
    }

    pub fn pi_values(&self) -> &[f64] {
        &self.pi_values
    }

    pub fn lambda_values(&self) -> &[f64] {
        &self.lambda_values
    }

    /// True when `ds` has exactly the records this table was built for.
    pub fn matches(&self, ds: &ParityDataset) -> bool {
        ds.records.len() == self.layers.len()
            && ds
                .records
                .iter()
                .zip(self.layers.iter().zip(&self.shots))
                .all(|(r, (&l, &n))| r.layers == l && r.n_shots == n)
    }

    /// Fills `values` with the log-likelihood at every grid point.
    pub fn evaluate_into(&self, counts: &[u64], values: &mut Vec<f64>) {
        assert_eq!(counts.len(), self.layers.len(), "one count per record");
        let r = counts.len();
        let e: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
        values.clear();
        values.extend(self.base.iter().enumerate().map(|(cell, &b)| {
            let row = &self.delta[cell * r..cell * r + r];
            b + row.iter().zip(&e).map(|(d, c)| d * c).sum::<f64>()
        }));
    }

    /// Grid argmax for the given even counts.
    ///
    /// Exact ties resolve to the smallest Π index, then the smallest λ index.
    pub fn argmax(&self, counts: &[u64], values: &mut Vec<f64>) -> GridMaximum {
        self.evaluate_into(counts, values);
        let n_lambda = self.lambda_values.len();
        let (mut best_cell, mut best) = (0usize, f64::NEG_INFINITY);
        for (cell, &v) in values.iter().enumerate() {
            if v > best {
                best = v;
                best_cell = cell;
            }
        }
        let (bi, bj) = (best_cell / n_lambda, best_cell % n_lambda);
        let degenerate = values.iter().enumerate().any(|(cell, &v)| {
            let (i, j) = (cell / n_lambda, cell % n_lambda);
            best - v < TIE_TOLERANCE && (i.abs_diff(bi) > 1 || j.abs_diff(bj) > 1)
        });
        GridMaximum {
            pi_index: bi,
            lambda_index: bj,
            value: best,
            degenerate,
        }
    }

    /// Full estimate for `ds`, including optional refinement.
    pub fn estimate(&self, ds: &ParityDataset, values: &mut Vec<f64>) -> Result<EstimationResult> {
        if !self.matches(ds) {
            return Err(RaeError::Precondition(
                "dataset records do not match the likelihood table".into(),
            ));
        }
        let counts: Vec<u64> = ds.records.iter().map(|r| r.e_even).collect();
        let max = self.argmax(&counts, values);
        let mut result = EstimationResult {
            pi_hat: self.pi_values[max.pi_index],
            lambda_hat: self.lambda_values[max.lambda_index],
            log_likelihood_max: max.value,
            degenerate_maximum: max.degenerate,
            method: EstimationMethod::GridMle,
        };
        if self.grid.refine {
            self.refine(ds, &max, &mut result);
        }
        Ok(result)
    }

    fn refine(&self, ds: &ParityDataset, max: &GridMaximum, result: &mut EstimationResult) {
        let neighbours = |values: &[f64], idx: usize| {
            let lo = values[idx.saturating_sub(1)];
            let hi = values[(idx + 1).min(values.len() - 1)];
            (lo, hi)
        };
        let pi_bounds = neighbours(&self.pi_values, max.pi_index);
        let lambda_bounds = neighbours(&self.lambda_values, max.lambda_index);
        let (mut pi, mut lambda) = (result.pi_hat, result.lambda_hat);
        let sweeps = if self.grid.lambda_pinned() { 1 } else { 6 };
        for _ in 0..sweeps {
            pi = golden_max(|x| log_likelihood(ds, x, lambda), pi_bounds);
            if !self.grid.lambda_pinned() {
                lambda = golden_max(|y| log_likelihood(ds, pi, y), lambda_bounds);
            }
        }
        let value = log_likelihood(ds, pi, lambda);
        if value >= result.log_likelihood_max {
            result.pi_hat = pi;
            result.lambda_hat = lambda;
            result.log_likelihood_max = value;
        }
    }
}

/// Golden-section search for the maximum of a unimodal function on `[lo, hi]`.
fn golden_max(f: impl Fn(f64) -> f64, (mut lo, mut hi): (f64, f64)) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    if hi <= lo {
        return lo;
    }
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if hi - lo <= 1e-13 * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    let mid = 0.5 * (lo + hi);
    [lo, mid, hi]
        .into_iter()
        .max_by(|a, b| f(*a).total_cmp(&f(*b)))
        .unwrap_or(mid)
}

fn check_identifiable(ds: &ParityDataset, grid: &MleGrid) -> Result<()> {
    if ds.is_empty() {
        return Err(RaeError::Precondition("dataset has no records".into()));
    }
    if ds.depth_zero_only() && !grid.lambda_pinned() {
        return Err(RaeError::Unidentifiable(
            "depth-0 data cannot separate Π from λ; pin λ or use direct_estimate".into(),
        ));
    }
    Ok(())
}

/// Exhaustive grid maximum-likelihood estimate of `(Π, λ)`.
pub fn mle_estimate(ds: &ParityDataset, grid: &MleGrid) -> Result<EstimationResult> {
    check_identifiable(ds, grid)?;
    let table = LikelihoodTable::for_dataset(ds, grid)?;
    table.estimate(ds, &mut Vec::new())
}

/// Depth-0 estimate with λ pinned to zero: `Π̂ = (2e₀ - N_s)/N_s`.
pub fn direct_estimate(ds: &ParityDataset) -> Result<EstimationResult> {
    let r = ds
        .record(0)
        .ok_or_else(|| RaeError::Precondition("direct estimate needs an L = 0 record".into()))?;
    let pi_hat = (2.0 * r.e_even as f64 - r.n_shots as f64) / r.n_shots as f64;
    let depth_zero = ParityDataset {
        records: vec![*r],
        ..ds.clone()
    };
    Ok(EstimationResult {
        pi_hat,
        lambda_hat: 0.0,
        log_likelihood_max: log_likelihood(&depth_zero, pi_hat, 0.0),
        degenerate_maximum: false,
        method: EstimationMethod::Direct,
    })
}

/// Estimation route used by the bootstrap and the pipelines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    Grid(MleGrid),
    Direct,
}

impl From<MleGrid> for Estimator {
    fn from(grid: MleGrid) -> Self {
        Estimator::Grid(grid)
    }
}

impl Estimator {
    /// Grid MLE, or the direct estimate when the data are depth-0 only and
    /// the grid leaves λ free.
    pub fn auto(ds: &ParityDataset, grid: &MleGrid) -> Self {
        if ds.depth_zero_only() && !grid.lambda_pinned() {
            Estimator::Direct
        } else {
            Estimator::Grid(*grid)
        }
    }

    pub fn estimate(&self, ds: &ParityDataset) -> Result<EstimationResult> {
        match self {
            Estimator::Grid(grid) => mle_estimate(ds, grid),
            Estimator::Direct => direct_estimate(ds),
        }
    }

    pub(crate) fn check(&self, ds: &ParityDataset) -> Result<()> {
        match self {
            Estimator::Grid(grid) => check_identifiable(ds, grid),
            Estimator::Direct => ds
                .record(0)
                .map(|_| ())
                .ok_or_else(|| RaeError::Precondition("direct estimate needs an L = 0 record".into())),
        }
    }
}

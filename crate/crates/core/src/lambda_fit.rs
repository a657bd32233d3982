//! Noise-rate extraction from measured likelihood curves.
//!
//! A curve is the even-parity frequency at a fixed depth `L` recorded for a
//! set of known expectation values `Π`. The noise rate is the weighted
//! least-squares fit of the damped Chebyshev model to those points.

use serde::{Deserialize, Serialize};

use crate::error::{RaeError, Result};
use crate::inference::chebyshev_t;
use crate::pauli::{AnsatzSpec, PauliString};
use crate::rng::derive_seed;
use crate::simulator::{parity_distribution, sample_even_count, RaeCircuit};
use crate::FORMAT_VERSION;

/// Upper end of the λ search interval.
pub const DEFAULT_LAMBDA_MAX: f64 = 3.0;
/// Relative variation above which a profile is flagged unstable.
pub const DEFAULT_INSTABILITY_THRESHOLD: f64 = 0.2;

const GOLDEN_ITERATIONS: usize = 200;
const POLISH_ITERATIONS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub pi: f64,
    pub p_even: f64,
    pub std_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LikelihoodCurve {
    #[serde(default = "format_version")]
    pub version: u32,
    #[serde(rename = "L")]
    pub layers: u32,
    pub points: Vec<CurvePoint>,
}

fn format_version() -> u32 {
    FORMAT_VERSION
}

impl LikelihoodCurve {
    pub fn new(layers: u32, points: Vec<CurvePoint>) -> Result<Self> {
        let curve = Self {
            version: FORMAT_VERSION,
            layers,
            points,
        };
        curve.validate()?;
        Ok(curve)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.len() < 3 {
            return Err(RaeError::Schema(format!(
                "curve at L = {} has {} points, need at least 3",
                self.layers,
                self.points.len()
            )));
        }
        for (i, p) in self.points.iter().enumerate() {
            if !(-1.0..=1.0).contains(&p.pi) || !(0.0..=1.0).contains(&p.p_even) {
                return Err(RaeError::Schema(format!("point {i}: pi or p_even out of range")));
            }
            if !(p.std_err > 0.0) || !p.std_err.is_finite() {
                return Err(RaeError::Schema(format!("point {i}: std_err must be positive")));
            }
        }
        let mut pis: Vec<f64> = self.points.iter().map(|p| p.pi).collect();
        pis.sort_by(f64::total_cmp);
        if pis.windows(2).any(|w| w[0] == w[1]) {
            return Err(RaeError::Schema(format!("curve at L = {} repeats a Π value", self.layers)));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let curve: Self = serde_json::from_str(text)?;
        if curve.version != FORMAT_VERSION {
            return Err(RaeError::Schema(format!("unsupported curve version {}", curve.version)));
        }
        curve.validate()?;
        Ok(curve)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaFit {
    pub lambda: f64,
    pub delta_lambda: f64,
    pub chi2: f64,
    pub dof: usize,
    pub iterations: usize,
}

/// Weighted residual model at one λ: `(χ², Σw·J², Σw·J·r)` with
/// `J = ∂P/∂λ` and `r = p̂ - P`.
struct Model<'a> {
    curve: &'a LikelihoodCurve,
    half_depth: f64,
    cheb: Vec<f64>,
}

impl<'a> Model<'a> {
    fn new(curve: &'a LikelihoodCurve) -> Self {
        let k = 2 * curve.layers + 1;
        Self {
            curve,
            half_depth: curve.layers as f64 + 0.5,
            cheb: curve.points.iter().map(|p| chebyshev_t(k, p.pi)).collect(),
        }
    }

    fn terms(&self, lambda: f64) -> (f64, f64, f64) {
        let damping = (-lambda * self.half_depth).exp();
        let (mut chi2, mut jj, mut jr) = (0.0, 0.0, 0.0);
        for (p, &t) in self.curve.points.iter().zip(&self.cheb) {
            let w = 1.0 / (p.std_err * p.std_err);
            let r = p.p_even - 0.5 * (1.0 + damping * t);
            let j = -0.5 * self.half_depth * damping * t;
            chi2 += w * r * r;
            jj += w * j * j;
            jr += w * j * r;
        }
        (chi2, jj, jr)
    }

    fn chi2(&self, lambda: f64) -> f64 {
        self.terms(lambda).0
    }
}

pub fn fit_lambda(curve: &LikelihoodCurve) -> Result<LambdaFit> {
    fit_lambda_bounded(curve, DEFAULT_LAMBDA_MAX)
}

/// Minimizes `Σ (p̂ - P_L(even | Π, λ))²/σ²` over `λ ∈ [0, lambda_max]`.
///
/// Golden-section search brackets the minimum and Gauss-Newton steps polish
/// it. `delta_lambda` is the linearized standard error, scaled by the reduced
/// chi-square of the fit.
pub fn fit_lambda_bounded(curve: &LikelihoodCurve, lambda_max: f64) -> Result<LambdaFit> {
    curve.validate()?;
    if !(lambda_max > 0.0) {
        return Err(RaeError::domain(format!("lambda_max must be positive, got {lambda_max}")));
    }
    let model = Model::new(curve);
    let total_weight: f64 = curve.points.iter().map(|p| p.std_err.powi(-2)).sum();
    if model.terms(0.0).1 <= 1e-12 * total_weight {
        return Err(RaeError::Unidentifiable(format!(
            "curve at L = {} carries no information about λ",
            curve.layers
        )));
    }

    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut lo, mut hi) = (0.0, lambda_max);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (model.chi2(x1), model.chi2(x2));
    let mut iterations = 0;
    while hi - lo > 1e-12 && iterations < GOLDEN_ITERATIONS {
        iterations += 1;
        if f1 > f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = model.chi2(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = model.chi2(x1);
        }
    }
    let mut lambda = [lo, 0.5 * (lo + hi), hi]
        .into_iter()
        .min_by(|a, b| model.chi2(*a).total_cmp(&model.chi2(*b)))
        .unwrap_or(lo);
    if lo <= 1e-12 && model.chi2(0.0) <= model.chi2(lambda) {
        lambda = 0.0;
    }

    let mut converged = false;
    for _ in 0..POLISH_ITERATIONS {
        iterations += 1;
        let (chi2, jj, jr) = model.terms(lambda);
        if jj <= 0.0 {
            converged = true;
            break;
        }
        let candidate = (lambda + jr / jj).clamp(0.0, lambda_max);
        if (candidate - lambda).abs() <= 1e-14 * (1.0 + lambda) {
            converged = true;
            break;
        }
        if model.chi2(candidate) > chi2 {
            // The golden-section point is already optimal to working precision.
            converged = true;
            break;
        }
        lambda = candidate;
    }
    let (chi2, jj, _) = model.terms(lambda);
    if !converged {
        return Err(RaeError::NonConvergence {
            iterations,
            residual: chi2,
        });
    }
    if lambda >= lambda_max * (1.0 - 1e-9) {
        return Err(RaeError::Unidentifiable(format!(
            "fit for L = {} ran into λ_max = {lambda_max}; the curve is flat",
            curve.layers
        )));
    }
    let dof = curve.points.len() - 1;
    let delta_lambda = if jj > 0.0 { ((chi2 / dof as f64) / jj).sqrt() } else { 0.0 };
    Ok(LambdaFit {
        lambda,
        delta_lambda,
        chi2,
        dof,
        iterations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    #[serde(rename = "L")]
    pub layers: u32,
    pub lambda: f64,
    pub delta_lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaProfile {
    pub rows: Vec<ProfileRow>,
    pub max_relative_variation: f64,
    pub unstable: bool,
}

/// `(max - min)/min` of a set of noise rates.
pub fn relative_variation(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if values.is_empty() || max == min {
        0.0
    } else if min <= 0.0 {
        f64::INFINITY
    } else {
        (max - min) / min
    }
}

pub fn lambda_profile(curves: &[LikelihoodCurve]) -> Result<LambdaProfile> {
    lambda_profile_with_threshold(curves, DEFAULT_INSTABILITY_THRESHOLD)
}

/// Fits every curve and reports how much λ drifts with depth.
pub fn lambda_profile_with_threshold(curves: &[LikelihoodCurve], threshold: f64) -> Result<LambdaProfile> {
    let mut depths: Vec<u32> = curves.iter().map(|c| c.layers).collect();
    depths.sort_unstable();
    if depths.windows(2).any(|w| w[0] == w[1]) {
        return Err(RaeError::domain("lambda_profile needs curves at distinct depths"));
    }
    let mut rows = curves
        .iter()
        .map(|c| {
            let fit = fit_lambda(c)?;
            Ok(ProfileRow {
                layers: c.layers,
                lambda: fit.lambda,
                delta_lambda: fit.delta_lambda,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| r.layers);
    let lambdas: Vec<f64> = rows.iter().map(|r| r.lambda).collect();
    let max_relative_variation = relative_variation(&lambdas);
    Ok(LambdaProfile {
        rows,
        max_relative_variation,
        unstable: max_relative_variation > threshold,
    })
}

/// Binomial standard error, floored at `1/n` so saturated points keep a
/// finite weight.
fn binomial_std_err(p: f64, n: u64) -> f64 {
    let n = n as f64;
    (p * (1.0 - p) / n).sqrt().max(1.0 / n)
}

/// Noiseless curve: exact model probabilities with binomial error bars for
/// `n_shots` shots.
pub fn model_curve(layers: u32, lambda: f64, pis: &[f64], n_shots: u64) -> Result<LikelihoodCurve> {
    let k = 2 * layers + 1;
    let damping = (-lambda * (layers as f64 + 0.5)).exp();
    let points = pis
        .iter()
        .map(|&pi| {
            let p = 0.5 * (1.0 + damping * chebyshev_t(k, pi));
            CurvePoint {
                pi,
                p_even: p,
                std_err: binomial_std_err(p, n_shots),
            }
        })
        .collect();
    LikelihoodCurve::new(layers, points)
}

/// Curve measured on the two-qubit ansatz for the `XX` term, sweeping the
/// angle so that `⟨XX⟩` takes each requested value.
pub fn simulate_curve(layers: u32, lambda: f64, pis: &[f64], n_shots: u64, seed: u64) -> Result<LikelihoodCurve> {
    let target: PauliString = "XX".parse()?;
    let points = pis
        .iter()
        .enumerate()
        .map(|(i, &pi)| {
            if !(-1.0..=1.0).contains(&pi) {
                return Err(RaeError::domain(format!("Π = {pi} outside [-1, 1]")));
            }
            // ⟨XX⟩ = -sin θ on the two-qubit ansatz.
            let ansatz = AnsatzSpec::two_qubit(-pi.asin());
            let circuit = RaeCircuit::new(ansatz, target.clone(), layers, lambda)?;
            let p = parity_distribution(&circuit)?;
            let e = sample_even_count(p, n_shots, derive_seed(seed, &[layers as u64, i as u64]))?;
            let p_hat = e as f64 / n_shots as f64;
            Ok(CurvePoint {
                pi,
                p_even: p_hat,
                std_err: binomial_std_err(p_hat, n_shots),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    LikelihoodCurve::new(layers, points)
}

/// Ten evenly spaced values on `[0, 1]`.
pub fn unit_interval_grid() -> Vec<f64> {
    (0..10).map(|i| i as f64 / 9.0).collect()
}

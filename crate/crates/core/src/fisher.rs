//! Fisher information of the layered parity likelihood, Cramér-Rao bounds
//! and the direct-sampling error model.

use serde::{Deserialize, Serialize};

use crate::error::{RaeError, Result};
use crate::schedule::{query_cost, LayerSchedule};

/// Relative determinant threshold below which the matrix counts as singular.
pub const SINGULARITY_THRESHOLD: f64 = 1e-14;

/// Symmetric 2×2 Fisher matrix over `(Π, λ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FisherMatrix {
    pub i11: f64,
    pub i12: f64,
    pub i22: f64,
    /// Determinant, accumulated pairwise over layers so that a single-layer
    /// schedule gives exactly zero.
    pub det: f64,
}

impl FisherMatrix {
    pub fn is_singular(&self) -> bool {
        !(self.det > SINGULARITY_THRESHOLD * self.i11 * self.i22)
    }

    /// `[[I⁻¹₁₁, I⁻¹₁₂], [I⁻¹₂₁, I⁻¹₂₂]]` via the adjugate.
    pub fn inverse(&self) -> Option<[[f64; 2]; 2]> {
        if self.is_singular() {
            return None;
        }
        let d = self.det;
        Some([[self.i22 / d, -self.i12 / d], [-self.i12 / d, self.i11 / d]])
    }
}

/// One layer's contribution as `ω·(u, v)(u, v)ᵀ`.
struct LayerTerm {
    weight: f64,
    u: f64,
    v: f64,
}

fn layer_terms(pi: f64, lambda: f64, schedule: &LayerSchedule) -> Result<Vec<LayerTerm>> {
    if !(pi.abs() < 1.0) {
        return Err(RaeError::domain(format!("Fisher information needs |Π| < 1, got {pi}")));
    }
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(RaeError::domain(format!("λ must be finite and ≥ 0, got {lambda}")));
    }
    let n_s = schedule.shots_per_layer() as f64;
    let phi = pi.acos();
    let root = (1.0 - pi * pi).sqrt();
    schedule
        .layers()
        .iter()
        .map(|&l| {
            let k = 2.0 * l as f64 + 1.0;
            let (s, t) = (k * phi).sin_cos();
            // e^{λk} - T² written as expm1(λk) + sin² to keep precision near λ = 0.
            let denom = (lambda * k).exp_m1() + s * s;
            if denom <= 0.0 {
                return Err(RaeError::domain(format!(
                    "Fisher information diverges at Π = {pi}, λ = {lambda}, L = {l}"
                )));
            }
            Ok(LayerTerm {
                weight: n_s / denom,
                u: k * s / root,
                v: -(l as f64 + 0.5) * t,
            })
        })
        .collect()
}

/// Fisher matrix of the product likelihood over `schedule`.
pub fn fisher_matrix(pi: f64, lambda: f64, schedule: &LayerSchedule) -> Result<FisherMatrix> {
    let terms = layer_terms(pi, lambda, schedule)?;
    let (mut i11, mut i12, mut i22) = (0.0, 0.0, 0.0);
    for t in &terms {
        i11 += t.weight * t.u * t.u;
        i12 += t.weight * t.u * t.v;
        i22 += t.weight * t.v * t.v;
    }
    // Cauchy–Binet: det Σ ωₐ xₐxₐᵀ = Σ_{a<b} ωₐω_b (uₐv_b - vₐu_b)².
    let mut det = 0.0;
    for (a, ta) in terms.iter().enumerate() {
        for tb in &terms[a + 1..] {
            let cross = ta.u * tb.v - ta.v * tb.u;
            det += ta.weight * tb.weight * cross * cross;
        }
    }
    Ok(FisherMatrix { i11, i12, i22, det })
}

/// Cramér-Rao lower bound on the RMSE of `Π̂` with λ unknown.
pub fn crb_rmse(pi: f64, lambda: f64, schedule: &LayerSchedule) -> Result<f64> {
    let f = fisher_matrix(pi, lambda, schedule)?;
    let inv = f.inverse().ok_or_else(|| {
        RaeError::Unidentifiable(format!(
            "Fisher matrix is singular for schedule {:?}: Π and λ cannot both be identified",
            schedule.layers()
        ))
    })?;
    Ok(inv[0][0].sqrt())
}

/// Cramér-Rao bound on `Π̂` when λ is known, `1/√I₁₁`.
pub fn crb_rmse_known_lambda(pi: f64, lambda: f64, schedule: &LayerSchedule) -> Result<f64> {
    let f = fisher_matrix(pi, lambda, schedule)?;
    if !(f.i11 > 0.0) {
        return Err(RaeError::Unidentifiable(format!(
            "no information about Π at Π = {pi} for schedule {:?}",
            schedule.layers()
        )));
    }
    Ok(1.0 / f.i11.sqrt())
}

/// `I₁₁` per ansatz query.
pub fn information_per_query(pi: f64, lambda: f64, schedule: &LayerSchedule) -> Result<f64> {
    Ok(fisher_matrix(pi, lambda, schedule)?.i11 / query_cost(schedule) as f64)
}

/// Mean squared error of averaging `n_queries` direct measurements of the
/// noisy ansatz: squared depolarizing bias plus binomial variance.
pub fn direct_mse_model(pi: f64, lambda: f64, n_queries: u64) -> Result<f64> {
    if n_queries == 0 {
        return Err(RaeError::domain("n_queries must be at least 1"));
    }
    if !(lambda >= 0.0) {
        return Err(RaeError::domain(format!("λ must be ≥ 0, got {lambda}")));
    }
    let bias = (1.0 - (-lambda / 2.0).exp()) * pi;
    let variance = (1.0 - (-lambda).exp() * pi * pi) / n_queries as f64;
    Ok(bias * bias + variance)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AdvantageVerdict {
    Advantage,
    NoAdvantage,
    Inconclusive,
}

/// Default width of the decision band in units of `sigma_rmse`.
pub const VERDICT_BAND: f64 = 2.0;

pub fn advantage_verdict(rmse_rae: f64, sigma_rmse: f64, crb: f64, mse_direct: f64) -> AdvantageVerdict {
    advantage_verdict_with_band(rmse_rae, sigma_rmse, crb, mse_direct, VERDICT_BAND)
}

/// Compares an empirical RMSE with the direct-sampling RMSE at equal cost,
/// requiring a margin of `k·sigma_rmse` either way.
pub fn advantage_verdict_with_band(
    rmse_rae: f64,
    sigma_rmse: f64,
    crb: f64,
    mse_direct: f64,
    k: f64,
) -> AdvantageVerdict {
    let direct = mse_direct.sqrt();
    if crb <= rmse_rae && rmse_rae + k * sigma_rmse < direct {
        AdvantageVerdict::Advantage
    } else if rmse_rae - k * sigma_rmse > direct {
        AdvantageVerdict::NoAdvantage
    } else {
        AdvantageVerdict::Inconclusive
    }
}

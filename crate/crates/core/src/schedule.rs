//! Layer schedules and their ansatz-query cost.

use serde::{Deserialize, Serialize};

use crate::error::{RaeError, Result};

/// Grover depths sampled with a fixed number of shots each.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSchedule")]
pub struct LayerSchedule {
    layers: Vec<u32>,
    shots_per_layer: u64,
}

#[derive(Deserialize)]
struct RawSchedule {
    layers: Vec<u32>,
    shots_per_layer: u64,
}

impl TryFrom<RawSchedule> for LayerSchedule {
    type Error = RaeError;

    fn try_from(raw: RawSchedule) -> Result<Self> {
        LayerSchedule::new(raw.layers, raw.shots_per_layer)
    }
}

impl LayerSchedule {
    /// Validates a strictly increasing, non-empty list of depths.
    pub fn new(layers: Vec<u32>, shots_per_layer: u64) -> Result<Self> {
        if layers.is_empty() {
            return Err(RaeError::domain("a layer schedule needs at least one depth"));
        }
        if shots_per_layer == 0 {
            return Err(RaeError::domain("shots_per_layer must be positive"));
        }
        if layers.windows(2).any(|w| w[0] >= w[1]) {
            return Err(RaeError::domain(format!(
                "layer depths must be strictly increasing: {layers:?}"
            )));
        }
        Ok(Self {
            layers,
            shots_per_layer,
        })
    }

    /// Sorts and merges repeated depths before validating.
    pub fn from_unsorted(mut layers: Vec<u32>, shots_per_layer: u64) -> Result<Self> {
        layers.sort_unstable();
        layers.dedup();
        Self::new(layers, shots_per_layer)
    }

    pub fn layers(&self) -> &[u32] {
        &self.layers
    }

    pub fn shots_per_layer(&self) -> u64 {
        self.shots_per_layer
    }

    pub fn max_layer(&self) -> u32 {
        *self.layers.last().expect("non-empty")
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Keeps depths `≤ l_max`; `None` if nothing survives.
    pub fn truncated(&self, l_max: u32) -> Option<Self> {
        let kept: Vec<u32> = self.layers.iter().copied().filter(|&l| l <= l_max).collect();
        Self::new(kept, self.shots_per_layer).ok()
    }
}

/// Linear sequence `Lᵢ = i`.
pub fn lis(i_max: u32, n_s: u64) -> Result<LayerSchedule> {
    LayerSchedule::new((0..=i_max).collect(), n_s)
}

/// Exponential sequence `Lᵢ = ⌊2^{i-1}⌋`.
pub fn eis(i_max: u32, n_s: u64) -> Result<LayerSchedule> {
    if i_max > 32 {
        return Err(RaeError::domain(format!("i_max {i_max} overflows the exponential sequence")));
    }
    let layers = (0..=i_max).map(|i| if i == 0 { 0 } else { 1u32 << (i - 1) });
    LayerSchedule::from_unsorted(layers.collect(), n_s)
}

/// Polynomial sequence `Lᵢ = i^d`.
pub fn polynomial(d: u32, i_max: u32, n_s: u64) -> Result<LayerSchedule> {
    if d == 0 {
        return Err(RaeError::domain("polynomial degree must be ≥ 1"));
    }
    let layers = (0..=i_max)
        .map(|i| {
            i.checked_pow(d)
                .ok_or_else(|| RaeError::domain(format!("{i}^{d} overflows")))
        })
        .collect::<Result<Vec<_>>>()?;
    LayerSchedule::from_unsorted(layers, n_s)
}

/// Depth at which the envelope of the noisy Fisher information peaks,
/// `1/λ + 1/2`.
pub fn l_max_fisher(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(RaeError::domain(format!(
            "the Fisher envelope has no maximum for lambda = {lambda}"
        )));
    }
    Ok(1.0 / lambda + 0.5)
}

/// `sin²((2L+1)·acos Π)`: equals one where the depth sits on a Fisher maximum.
pub fn nris_condition(pi: f64, layers: u32) -> f64 {
    let k = 2.0 * layers as f64 + 1.0;
    (k * pi.clamp(-1.0, 1.0).acos()).sin().powi(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NrisBranch {
    /// `Π` within `cλ` of 0 or ±1: exponential sequence up to the envelope peak.
    Exponential,
    /// Depths filtered by the sin² condition.
    Filtered,
    /// Filtering left no depth beyond 0; linear sequence used instead.
    LinearFallback,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseRobustPlan {
    pub schedule: LayerSchedule,
    pub branch: NrisBranch,
    pub l_max_fisher: f64,
}

/// Noise-robust incremental sequence for a prior guess of `Π`.
///
/// Depth 0 is always included so the schedule stays identifiable for the
/// joint `(Π, λ)` fit.
pub fn noise_robust_schedule(pi_prior: f64, lambda: f64, c: f64, n_s: u64) -> Result<NoiseRobustPlan> {
    if !(-1.0..=1.0).contains(&pi_prior) {
        return Err(RaeError::domain(format!("prior {pi_prior} outside [-1, 1]")));
    }
    if !(c > 0.0) {
        return Err(RaeError::domain(format!("hyperparameter c must be positive, got {c}")));
    }
    let l_max = l_max_fisher(lambda)?;
    let cap = l_max.floor() as u32;
    let threshold = c * lambda;
    let magnitude = pi_prior.abs();

    if magnitude < threshold || 1.0 - magnitude < threshold {
        let mut layers = vec![0u32];
        let mut next = 1u32;
        while next <= cap {
            layers.push(next);
            next *= 2;
        }
        return Ok(NoiseRobustPlan {
            schedule: LayerSchedule::new(layers, n_s)?,
            branch: NrisBranch::Exponential,
            l_max_fisher: l_max,
        });
    }

    let mut layers: Vec<u32> = (0..=cap)
        .filter(|&l| (l as f64) < l_max && nris_condition(pi_prior, l) > 1.0 - threshold)
        .collect();
    if layers.first() != Some(&0) {
        layers.insert(0, 0);
    }
    if layers.len() < 2 {
        return Ok(NoiseRobustPlan {
            schedule: lis(cap, n_s)?,
            branch: NrisBranch::LinearFallback,
            l_max_fisher: l_max,
        });
    }
    Ok(NoiseRobustPlan {
        schedule: LayerSchedule::new(layers, n_s)?,
        branch: NrisBranch::Filtered,
        l_max_fisher: l_max,
    })
}

/// Total ansatz calls `Σ (2L+1)·N_s`: each layer adds one `A` and one `A†`.
pub fn query_cost(s: &LayerSchedule) -> u64 {
    s.layers()
        .iter()
        .map(|&l| (2 * l as u64 + 1) * s.shots_per_layer())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_sequence() {
        assert_eq!(lis(4, 8192).unwrap().layers(), &[0, 1, 2, 3, 4]);
        assert_eq!(lis(0, 8192).unwrap().layers(), &[0]);
        assert_eq!(lis(8, 8192).unwrap().len(), 9);
    }

    #[test]
    fn exponential_sequence() {
        assert_eq!(eis(4, 8192).unwrap().layers(), &[0, 1, 2, 4, 8]);
        assert_eq!(eis(1, 8192).unwrap().layers(), &[0, 1]);
        assert_eq!(eis(0, 8192).unwrap().layers(), &[0]);
    }

    #[test]
    fn polynomial_sequence() {
        assert_eq!(polynomial(1, 4, 7).unwrap(), lis(4, 7).unwrap());
        assert_eq!(polynomial(2, 3, 7).unwrap().layers(), &[0, 1, 4, 9]);
        assert_eq!(polynomial(3, 2, 7).unwrap().layers(), &[0, 1, 8]);
        assert!(polynomial(0, 2, 7).is_err());
    }

    #[test]
    fn linear_and_exponential_differ() {
        for i_max in 3..10 {
            let l = lis(i_max, 1).unwrap();
            let e = eis(i_max, 1).unwrap();
            assert!(!e.layers().iter().all(|x| l.layers().contains(x)));
        }
    }

    #[test]
    fn schedule_validation() {
        assert!(LayerSchedule::new(vec![], 1).is_err());
        assert!(LayerSchedule::new(vec![0, 2, 1], 1).is_err());
        assert!(LayerSchedule::new(vec![0, 1], 0).is_err());
        let merged = LayerSchedule::from_unsorted(vec![2, 0, 2, 1], 5).unwrap();
        assert_eq!(merged.layers(), &[0, 1, 2]);
        assert_eq!(merged.shots_per_layer(), 5);
        let json = serde_json::to_string(&merged).unwrap();
        assert_eq!(json, r#"{"layers":[0,1,2],"shots_per_layer":5}"#);
        assert!(serde_json::from_str::<LayerSchedule>(r#"{"layers":[1,1],"shots_per_layer":5}"#).is_err());
    }

    #[test]
    fn fisher_envelope_peak() {
        let l = l_max_fisher(0.045).unwrap();
        assert!((l - 22.7222).abs() < 1e-3);
        assert!((l_max_fisher(0.18).unwrap() - 6.0556).abs() < 1e-3);
        assert_eq!(l_max_fisher(1.0).unwrap(), 1.5);
        assert!(l_max_fisher(0.0).is_err());
        assert!(l_max_fisher(-0.1).is_err());
    }

    #[test]
    fn nris_near_unity_uses_exponential_branch() {
        let plan = noise_robust_schedule(0.999, 0.045, 1.0, 8192).unwrap();
        assert_eq!(plan.branch, NrisBranch::Exponential);
        assert_eq!(plan.schedule.layers(), &[0, 1, 2, 4, 8, 16]);
        // Π = 0 always falls inside the |Π| < cλ band.
        let plan = noise_robust_schedule(0.0, 0.1, 1.0, 8192).unwrap();
        assert_eq!(plan.branch, NrisBranch::Exponential);
    }

    #[test]
    fn nris_filtered_members_satisfy_condition() {
        let (pi, lambda, c) = (-0.2238, 0.045, 1.0);
        let plan = noise_robust_schedule(pi, lambda, c, 8192).unwrap();
        assert_eq!(plan.branch, NrisBranch::Filtered);
        let layers = plan.schedule.layers();
        assert_eq!(layers[0], 0);
        for &l in &layers[1..] {
            assert!(nris_condition(pi, l) > 1.0 - c * lambda, "L = {l}");
            assert!((l as f64) < plan.l_max_fisher);
        }
        // Every excluded depth below the cap violates the condition.
        for l in 1..23u32 {
            if !layers.contains(&l) {
                assert!(nris_condition(pi, l) <= 1.0 - c * lambda, "L = {l}");
            }
        }
        assert!(layers.iter().all(|&l| l < 23));
    }

    #[test]
    fn nris_degenerate_filter_falls_back_to_linear() {
        // With c·λ tiny nothing passes the threshold apart from exact hits.
        let plan = noise_robust_schedule(0.5, 0.5, 1e-6, 10).unwrap();
        assert_eq!(plan.branch, NrisBranch::LinearFallback);
        assert_eq!(plan.schedule.layers(), &[0, 1, 2]);
    }

    #[test]
    fn query_cost_counts_ansatz_calls() {
        assert_eq!(query_cost(&lis(0, 8192).unwrap()), 8192);
        assert_eq!(query_cost(&lis(1, 8192).unwrap()), 32768);
        assert_eq!(query_cost(&lis(2, 1).unwrap()), 9);
        assert_eq!(query_cost(&eis(3, 1).unwrap()), 1 + 3 + 5 + 9);
    }
}

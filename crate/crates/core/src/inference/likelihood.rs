use crate::inference::ParityDataset;

/// Probabilities are clamped to `[ε, 1-ε]` before taking logarithms.
pub const PROBABILITY_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParityOutcome {
    Even,
    Odd,
}

/// Chebyshev polynomial of the first kind, `T_n(x) = cos(n·acos x)`, on `[-1, 1]`.
pub fn chebyshev_t(n: u32, x: f64) -> f64 {
    (n as f64 * x.clamp(-1.0, 1.0).acos()).cos()
}

/// `P_L(d | Π, λ) = ½(1 ± e^{-λ(L+1/2)}·T_{2L+1}(Π))`, clamped away from 0 and 1.
pub fn chebyshev_parity_probability(pi: f64, lambda: f64, layers: u32, d: ParityOutcome) -> f64 {
    let damping = (-lambda * (layers as f64 + 0.5)).exp();
    let signal = damping * chebyshev_t(2 * layers + 1, pi);
    let p = match d {
        ParityOutcome::Even => 0.5 * (1.0 + signal),
        ParityOutcome::Odd => 0.5 * (1.0 - signal),
    };
    p.clamp(PROBABILITY_FLOOR, 1.0 - PROBABILITY_FLOOR)
}

/// Log of the product likelihood over all records.
pub fn log_likelihood(ds: &ParityDataset, pi: f64, lambda: f64) -> f64 {
    ds.records
        .iter()
        .map(|r| {
            let even = chebyshev_parity_probability(pi, lambda, r.layers, ParityOutcome::Even);
            let odd = chebyshev_parity_probability(pi, lambda, r.layers, ParityOutcome::Odd);
            r.e_even as f64 * even.ln() + (r.n_shots - r.e_even) as f64 * odd.ln()
        })
        .sum()
}

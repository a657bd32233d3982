//! Exact density-matrix simulation of RAE circuits under global depolarizing
//! noise.
//!
//! The ansatz is followed by a depolarizing channel of fidelity `e^{-λ/2}` and
//! every Grover layer `U = R_A·P` by one of fidelity `e^{-λ}`, so an `L`-layer
//! circuit carries the total damping `e^{-λ(L+1/2)}`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand_distr::{Binomial, Distribution};

use crate::error::{RaeError, Result};
use crate::pauli::{AnsatzSpec, Pauli, PauliString, MAX_DENSE_QUBITS};
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    data: DMatrix<Complex64>,
    n_qubits: usize,
}

impl DensityMatrix {
    pub fn from_matrix(data: DMatrix<Complex64>) -> Result<Self> {
        let dim = data.nrows();
        if dim != data.ncols() || !dim.is_power_of_two() || dim < 2 {
            return Err(RaeError::domain(format!(
                "density matrix must be 2ⁿ×2ⁿ, got {}×{}",
                data.nrows(),
                data.ncols()
            )));
        }
        let n_qubits = dim.trailing_zeros() as usize;
        if n_qubits > MAX_DENSE_QUBITS {
            return Err(RaeError::TooManyQubits {
                n: n_qubits,
                max: MAX_DENSE_QUBITS,
            });
        }
        Ok(Self { data, n_qubits })
    }

    pub fn pure(ansatz: &AnsatzSpec) -> Self {
        let psi = ansatz.state();
        Self {
            data: &psi * psi.adjoint(),
            n_qubits: ansatz.n_qubits(),
        }
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        Self {
            data: DMatrix::identity(dim, dim).scale(1.0 / dim as f64),
            n_qubits,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn trace(&self) -> Complex64 {
        self.data.trace()
    }

    /// `Tr[ρ·P]`.
    pub fn expectation(&self, p: &PauliString) -> f64 {
        (&self.data * p.matrix()).trace().re
    }

    /// Largest entry of `ρ - ρ†`.
    pub fn hermiticity_error(&self) -> f64 {
        (&self.data - self.data.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.data + self.data.adjoint()).scale(0.5);
        SymmetricEigen::new(herm).eigenvalues.iter().copied().collect()
    }

    /// Checks Hermiticity, unit trace and positivity within `tol`.
    pub fn is_physical(&self, tol: f64) -> bool {
        self.hermiticity_error() < tol
            && (self.trace() - Complex64::new(1.0, 0.0)).norm() < tol
            && self.eigenvalues().iter().all(|&e| e > -1e-10)
    }

    /// Outcome probabilities in the computational basis.
    pub fn basis_probabilities(&self) -> Vec<f64> {
        (0..self.dim()).map(|k| self.data[(k, k)].re).collect()
    }

    fn conjugate(&self, u: &DMatrix<Complex64>) -> Self {
        Self {
            data: u * &self.data * u.adjoint(),
            n_qubits: self.n_qubits,
        }
    }
}

/// One RAE circuit: ansatz, target string, Grover depth and noise rate.
#[derive(Debug, Clone, PartialEq)]
pub struct RaeCircuit {
    pub ansatz: AnsatzSpec,
    pub target: PauliString,
    pub layers: u32,
    pub lambda: f64,
}

impl RaeCircuit {
    pub fn new(ansatz: AnsatzSpec, target: PauliString, layers: u32, lambda: f64) -> Result<Self> {
        if target.is_identity() {
            return Err(RaeError::domain("the target string must not be the identity"));
        }
        if target.n_qubits() != ansatz.n_qubits() {
            return Err(RaeError::domain(format!(
                "target {target} does not match the {}-qubit ansatz",
                ansatz.n_qubits()
            )));
        }
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(RaeError::domain(format!("lambda must be finite and ≥ 0, got {lambda}")));
        }
        Ok(Self {
            ansatz,
            target,
            layers,
            lambda,
        })
    }

    /// Grover iterate `U = R_A·P` with `R_A = A·R₀·A†`.
    pub fn grover_iterate(&self) -> DMatrix<Complex64> {
        let a = self.ansatz.unitary();
        let dim = a.nrows();
        let mut r0 = DMatrix::<Complex64>::identity(dim, dim).scale(-1.0);
        r0[(0, 0)] = Complex64::new(1.0, 0.0);
        let reflection = &a * r0 * a.adjoint();
        reflection * self.target.matrix()
    }
}

/// `p·ρ + (1-p)·I/2ⁿ`.
pub fn apply_depolarizing(rho: &DensityMatrix, fidelity: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&fidelity) {
        return Err(RaeError::domain(format!("fidelity {fidelity} outside [0, 1]")));
    }
    let dim = rho.dim();
    let mixed = DMatrix::<Complex64>::identity(dim, dim).scale((1.0 - fidelity) / dim as f64);
    Ok(DensityMatrix {
        data: rho.data.scale(fidelity) + mixed,
        n_qubits: rho.n_qubits,
    })
}

/// The ansatz state after its own depolarizing step of fidelity `e^{-λ/2}`.
pub fn prepare_noisy_ansatz(ansatz: &AnsatzSpec, lambda: f64) -> Result<DensityMatrix> {
    if lambda.is_nan() || lambda < 0.0 {
        return Err(RaeError::domain(format!("lambda must be ≥ 0, got {lambda}")));
    }
    apply_depolarizing(&DensityMatrix::pure(ansatz), (-lambda / 2.0).exp())
}

/// One noisy Grover layer: `ρ ↦ E_{e^{-λ}}(U ρ U†)`.
pub fn apply_grover_layer(rho: &DensityMatrix, circuit: &RaeCircuit) -> Result<DensityMatrix> {
    if rho.n_qubits() != circuit.ansatz.n_qubits() {
        return Err(RaeError::domain(format!(
            "state has {} qubits, circuit acts on {}",
            rho.n_qubits(),
            circuit.ansatz.n_qubits()
        )));
    }
    apply_depolarizing(&rho.conjugate(&circuit.grover_iterate()), (-circuit.lambda).exp())
}

/// The state `ρ_L` at the end of the Grover sequence, before measurement.
pub fn final_state(circuit: &RaeCircuit) -> Result<DensityMatrix> {
    let u = circuit.grover_iterate();
    let layer_fidelity = (-circuit.lambda).exp();
    let mut rho = prepare_noisy_ansatz(&circuit.ansatz, circuit.lambda)?;
    for _ in 0..circuit.layers {
        rho = apply_depolarizing(&rho.conjugate(&u), layer_fidelity)?;
    }
    Ok(rho)
}

/// Basis change mapping `P` onto a `Z`-type string on its support.
pub fn context_selection(p: &PauliString) -> DMatrix<Complex64> {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let hadamard = DMatrix::from_row_slice(2, 2, &[h, h, h, -h]);
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    let s_dag = DMatrix::from_row_slice(2, 2, &[l, o, o, Complex64::new(0.0, -1.0)]);
    p.ops()
        .iter()
        .rev()
        .map(|op| match op {
            Pauli::I | Pauli::Z => DMatrix::identity(2, 2),
            Pauli::X => hadamard.clone(),
            Pauli::Y => &hadamard * &s_dag,
        })
        .fold(DMatrix::identity(1, 1), |acc, m| acc.kronecker(&m))
}

/// Probability of even parity over the support of the target string.
///
/// The final state is rotated by the context-selection gates and the parity is
/// read off the computational-basis distribution, so this equals
/// `½(1 + Tr[ρ_L P])`.
pub fn parity_distribution(circuit: &RaeCircuit) -> Result<f64> {
    let rho = final_state(circuit)?;
    let measured = rho.conjugate(&context_selection(&circuit.target));
    let mask: usize = circuit.target.support().iter().map(|&q| 1usize << q).sum();
    let even: f64 = measured
        .basis_probabilities()
        .iter()
        .enumerate()
        .filter(|(k, _)| (k & mask).count_ones() % 2 == 0)
        .map(|(_, &prob)| prob)
        .sum();
    Ok(even.clamp(0.0, 1.0))
}

/// Number of even parities in `n_shots` draws, deterministic in `seed`.
pub fn sample_parities(circuit: &RaeCircuit, n_shots: u64, seed: u64) -> Result<u64> {
    let p = parity_distribution(circuit)?;
    sample_even_count(p, n_shots, seed)
}

/// Binomial draw of even-parity counts for a known probability.
pub fn sample_even_count(p_even: f64, n_shots: u64, seed: u64) -> Result<u64> {
    if n_shots == 0 {
        return Err(RaeError::domain("n_shots must be at least 1"));
    }
    let dist = Binomial::new(n_shots, p_even.clamp(0.0, 1.0))
        .map_err(|e| RaeError::domain(format!("binomial: {e}")))?;
    Ok(dist.sample(&mut rng_from_seed(seed)))
}

//! Pauli strings, weighted Pauli sums and the minimal-basis H₂ problems.
//!
//! Qubits are numbered from right to left: in the written word `"XZ"` the `Z`
//! acts on qubit 0 and the `X` on qubit 1. In dense matrices qubit `q` is bit
//! `q` of the basis-state index, i.e. `P_{n-1} ⊗ … ⊗ P_0`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{RaeError, Result};
use crate::FORMAT_VERSION;

/// Largest register the dense oracle accepts.
pub const MAX_DENSE_QUBITS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    /// The 2×2 matrix of this operator.
    pub fn matrix(self) -> DMatrix<Complex64> {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let entries = match self {
            Pauli::I => [l, o, o, l],
            Pauli::X => [o, l, l, o],
            Pauli::Y => [o, -i, i, o],
            Pauli::Z => [l, o, o, -l],
        };
        DMatrix::from_row_slice(2, 2, &entries)
    }
}

/// A phase-free tensor product of single-qubit Paulis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    /// `ops[q]` acts on qubit `q`.
    ops: Vec<Pauli>,
}

impl PauliString {
    /// Builds a string from per-qubit operators, `ops[q]` acting on qubit `q`.
    pub fn from_qubit_ops(ops: Vec<Pauli>) -> Result<Self> {
        if ops.is_empty() {
            return Err(RaeError::domain("a Pauli string needs at least one qubit"));
        }
        Ok(Self { ops })
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self {
            ops: vec![Pauli::I; n_qubits.max(1)],
        }
    }

    /// Single-qubit operator `p` on qubit `q` of an `n`-qubit register.
    pub fn single(n_qubits: usize, qubit: usize, p: Pauli) -> Self {
        let mut ops = vec![Pauli::I; n_qubits];
        ops[qubit] = p;
        Self { ops }
    }

    pub fn n_qubits(&self) -> usize {
        self.ops.len()
    }

    pub fn op(&self, qubit: usize) -> Pauli {
        self.ops[qubit]
    }

    pub fn ops(&self) -> &[Pauli] {
        &self.ops
    }

    pub fn is_identity(&self) -> bool {
        self.ops.iter().all(|&p| p == Pauli::I)
    }

    /// Qubits on which the string acts non-trivially.
    pub fn support(&self) -> Vec<usize> {
        (0..self.ops.len())
            .filter(|&q| self.ops[q] != Pauli::I)
            .collect()
    }

    /// Word written with qubit 0 rightmost.
    pub fn word(&self) -> String {
        self.ops.iter().rev().map(|p| p.symbol()).collect()
    }

    /// Dense `2ⁿ × 2ⁿ` matrix.
    pub fn matrix(&self) -> DMatrix<Complex64> {
        self.ops
            .iter()
            .rev()
            .fold(DMatrix::identity(1, 1), |acc, p| acc.kronecker(&p.matrix()))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.word())
    }
}

impl FromStr for PauliString {
    type Err = RaeError;

    fn from_str(s: &str) -> Result<Self> {
        let ops = s
            .trim()
            .chars()
            .rev()
            .map(|c| {
                Pauli::from_symbol(c)
                    .ok_or_else(|| RaeError::Schema(format!("invalid Pauli letter {c:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_qubit_ops(ops)
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.word())
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let word = String::deserialize(deserializer)?;
        word.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    pub coeff: f64,
    pub word: PauliString,
}

/// A real-weighted sum of Pauli strings, coefficients in Hartree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPauliSum")]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
}

#[derive(Deserialize)]
struct RawPauliSum {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
}

impl TryFrom<RawPauliSum> for PauliSum {
    type Error = RaeError;

    fn try_from(raw: RawPauliSum) -> Result<Self> {
        PauliSum::new(raw.n_qubits, raw.terms.into_iter().map(|t| (t.coeff, t.word)))
    }
}

impl PauliSum {
    /// Builds a sum, merging repeated strings and keeping first-seen order.
    pub fn new(n_qubits: usize, terms: impl IntoIterator<Item = (f64, PauliString)>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(RaeError::domain("a Pauli sum needs at least one qubit"));
        }
        let mut merged: Vec<PauliTerm> = Vec::new();
        for (coeff, word) in terms {
            if word.n_qubits() != n_qubits {
                return Err(RaeError::domain(format!(
                    "term {word} has {} qubits, expected {n_qubits}",
                    word.n_qubits()
                )));
            }
            if !coeff.is_finite() {
                return Err(RaeError::domain(format!("non-finite coefficient on {word}")));
            }
            match merged.iter_mut().find(|t| t.word == word) {
                Some(t) => t.coeff += coeff,
                None => merged.push(PauliTerm { coeff, word }),
            }
        }
        Ok(Self {
            n_qubits,
            terms: merged,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn coefficient(&self, word: &PauliString) -> Option<f64> {
        self.terms.iter().find(|t| &t.word == word).map(|t| t.coeff)
    }

    /// Coefficient of the all-identity string, zero if absent.
    pub fn identity_coefficient(&self) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.word.is_identity())
            .map(|t| t.coeff)
            .sum()
    }

    pub fn non_identity_terms(&self) -> impl Iterator<Item = &PauliTerm> {
        self.terms.iter().filter(|t| !t.word.is_identity())
    }

    /// Returns a copy with every coefficient multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            n_qubits: self.n_qubits,
            terms: self
                .terms
                .iter()
                .map(|t| PauliTerm {
                    coeff: t.coeff * s,
                    word: t.word.clone(),
                })
                .collect(),
        }
    }

    /// Returns a copy with `shift` added to the identity coefficient.
    pub fn shifted(&self, shift: f64) -> Self {
        let mut terms: Vec<(f64, PauliString)> =
            self.terms.iter().map(|t| (t.coeff, t.word.clone())).collect();
        terms.push((shift, PauliString::identity(self.n_qubits)));
        Self::new(self.n_qubits, terms).expect("shifted sum shares the register")
    }
}

fn word(s: &str) -> PauliString {
    s.parse().expect("static Pauli word")
}

/// One-qubit H₂ Hamiltonian `a + b·X₀ + c·Z₀`.
pub fn h2_one_qubit_hamiltonian() -> PauliSum {
    PauliSum::new(
        1,
        [(-0.329, word("I")), (0.181, word("X")), (-0.788, word("Z"))],
    )
    .expect("static Hamiltonian")
}

/// Two-qubit tapered H₂ Hamiltonian
/// `a + b·Z₀ + c·Z₁ + d·Z₀Z₁ + e·X₀X₁ + f·Y₀Y₁`.
pub fn h2_two_qubit_hamiltonian() -> PauliSum {
    PauliSum::new(
        2,
        [
            (0.2388, word("II")),
            (0.3466, word("IZ")),
            (-0.4439, word("ZI")),
            (0.5736, word("ZZ")),
            (0.09075, word("XX")),
            (0.09075, word("YY")),
        ],
    )
    .expect("static Hamiltonian")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnsatzKind {
    /// `exp(-iθ/2·Y₀)|0⟩`.
    OneQubitRy,
    /// `exp(-iθ/2·X₁Y₀)|01⟩`.
    TwoQubitUcc,
}

impl AnsatzKind {
    pub fn n_qubits(self) -> usize {
        match self {
            AnsatzKind::OneQubitRy => 1,
            AnsatzKind::TwoQubitUcc => 2,
        }
    }
}

impl fmt::Display for AnsatzKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AnsatzKind::OneQubitRy => "one_qubit_ry",
            AnsatzKind::TwoQubitUcc => "two_qubit_ucc",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub kind: AnsatzKind,
    pub theta: f64,
}

impl AnsatzSpec {
    pub const H2_ONE_QUBIT_THETA: f64 = -6.5095;
    pub const H2_TWO_QUBIT_THETA: f64 = -6.0575;

    pub fn new(kind: AnsatzKind, theta: f64) -> Self {
        Self { kind, theta }
    }

    pub fn one_qubit(theta: f64) -> Self {
        Self::new(AnsatzKind::OneQubitRy, theta)
    }

    pub fn two_qubit(theta: f64) -> Self {
        Self::new(AnsatzKind::TwoQubitUcc, theta)
    }

    /// The optimised angles used for the H₂ problems.
    pub fn h2_optimal(kind: AnsatzKind) -> Self {
        match kind {
            AnsatzKind::OneQubitRy => Self::one_qubit(Self::H2_ONE_QUBIT_THETA),
            AnsatzKind::TwoQubitUcc => Self::two_qubit(Self::H2_TWO_QUBIT_THETA),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.kind.n_qubits()
    }

    /// State-preparation unitary `A` acting on `|0…0⟩`.
    ///
    /// For the UCC ansatz this includes the `X₀` flip onto the `|01⟩`
    /// reference, so `R_A = A·R₀·A†` reflects about the prepared state.
    pub fn unitary(&self) -> DMatrix<Complex64> {
        let (c, s) = ((self.theta / 2.0).cos(), (self.theta / 2.0).sin());
        match self.kind {
            AnsatzKind::OneQubitRy => {
                let m = [c, -s, s, c].map(|v| Complex64::new(v, 0.0));
                DMatrix::from_row_slice(2, 2, &m)
            }
            AnsatzKind::TwoQubitUcc => {
                let generator = word("XY").matrix();
                let rotation = DMatrix::<Complex64>::identity(4, 4).scale(c)
                    - generator * Complex64::new(0.0, s);
                rotation * word("IX").matrix()
            }
        }
    }

    /// The ideal prepared state `|A⟩`.
    pub fn state(&self) -> DVector<Complex64> {
        self.unitary().column(0).into_owned()
    }
}

/// Closed-form `⟨A|P|A⟩` for the ansatz/term pairs with a known expression.
///
/// Any other pair yields [`RaeError::NoClosedForm`]; callers should fall back
/// to [`exact_expectation`].
pub fn analytic_expectation(ansatz: &AnsatzSpec, p: &PauliString) -> Result<f64> {
    if p.n_qubits() != ansatz.n_qubits() {
        return Err(RaeError::domain(format!(
            "{p} has {} qubits but the {} ansatz has {}",
            p.n_qubits(),
            ansatz.kind,
            ansatz.n_qubits()
        )));
    }
    if p.is_identity() {
        return Ok(1.0);
    }
    let theta = ansatz.theta;
    let value = match (ansatz.kind, p.word().as_str()) {
        (AnsatzKind::OneQubitRy, "Z") => Some(theta.cos()),
        (AnsatzKind::OneQubitRy, "X") => Some(theta.sin()),
        (AnsatzKind::TwoQubitUcc, "IZ") => Some(-theta.cos()),
        (AnsatzKind::TwoQubitUcc, "ZI") => Some(theta.cos()),
        (AnsatzKind::TwoQubitUcc, "XX") | (AnsatzKind::TwoQubitUcc, "YY") => Some(-theta.sin()),
        _ => None,
    };
    value.ok_or_else(|| RaeError::NoClosedForm {
        ansatz: ansatz.kind.to_string(),
        pauli: p.word(),
    })
}

/// `⟨A|P|A⟩` evaluated with dense matrices.
pub fn exact_expectation(ansatz: &AnsatzSpec, p: &PauliString) -> Result<f64> {
    if p.n_qubits() != ansatz.n_qubits() {
        return Err(RaeError::domain(format!(
            "{p} does not match the {}-qubit ansatz",
            ansatz.n_qubits()
        )));
    }
    let psi = ansatz.state();
    let value = (psi.adjoint() * p.matrix() * &psi)[(0, 0)];
    Ok(value.re)
}

/// Dense Hermitian matrix `Σ cᵢ Pᵢ`.
pub fn dense_matrix(h: &PauliSum) -> Result<DMatrix<Complex64>> {
    if h.n_qubits() > MAX_DENSE_QUBITS {
        return Err(RaeError::TooManyQubits {
            n: h.n_qubits(),
            max: MAX_DENSE_QUBITS,
        });
    }
    let dim = 1usize << h.n_qubits();
    Ok(h.terms().iter().fold(DMatrix::zeros(dim, dim), |acc, t| {
        acc + t.word.matrix().scale(t.coeff)
    }))
}

/// Smallest eigenvalue of [`dense_matrix`].
pub fn exact_ground_energy(h: &PauliSum) -> Result<f64> {
    let m = dense_matrix(h)?;
    let eig = SymmetricEigen::new(m);
    Ok(eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TermEntry {
    coeff: f64,
    word: String,
}

/// Versioned JSON document holding a Hamiltonian and, optionally, its ansatz.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianDocument {
    pub hamiltonian: PauliSum,
    pub ansatz: Option<AnsatzSpec>,
}

#[derive(Serialize, Deserialize)]
struct RawHamiltonianDocument {
    version: u32,
    n_qubits: usize,
    terms: Vec<TermEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ansatz: Option<AnsatzSpec>,
}

impl HamiltonianDocument {
    pub fn to_json(&self) -> Result<String> {
        let raw = RawHamiltonianDocument {
            version: FORMAT_VERSION,
            n_qubits: self.hamiltonian.n_qubits(),
            terms: self
                .hamiltonian
                .terms()
                .iter()
                .map(|t| TermEntry {
                    coeff: t.coeff,
                    word: t.word.word(),
                })
                .collect(),
            ansatz: self.ansatz,
        };
        Ok(serde_json::to_string_pretty(&raw)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawHamiltonianDocument = serde_json::from_str(text)?;
        if raw.version != FORMAT_VERSION {
            return Err(RaeError::Schema(format!(
                "unsupported Hamiltonian document version {}",
                raw.version
            )));
        }
        let terms = raw
            .terms
            .into_iter()
            .map(|t| Ok((t.coeff, t.word.parse::<PauliString>()?)))
            .collect::<Result<Vec<_>>>()?;
        let hamiltonian = PauliSum::new(raw.n_qubits, terms)?;
        if let Some(a) = raw.ansatz {
            if a.n_qubits() != raw.n_qubits {
                return Err(RaeError::Schema(format!(
                    "ansatz {} does not act on {} qubits",
                    a.kind, raw.n_qubits
                )));
            }
        }
        Ok(Self {
            hamiltonian,
            ansatz: raw.ansatz,
        })
    }
}

/// Exact ansatz expectation for every non-identity term, keyed by string.
pub fn term_references(h: &PauliSum, ansatz: &AnsatzSpec) -> Result<BTreeMap<PauliString, f64>> {
    h.non_identity_terms()
        .map(|t| Ok((t.word.clone(), exact_expectation(ansatz, &t.word)?)))
        .collect()
}

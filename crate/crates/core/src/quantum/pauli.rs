use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::density::DensityMatrix;
use super::linalg::{CMatrix, C64};
use super::state::PureState;
use crate::error::{Error, Result};

/// Single-qubit Pauli label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    fn flips(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    fn phases(self) -> bool {
        matches!(self, Pauli::Y | Pauli::Z)
    }

    fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// A tensor product of single-qubit Paulis. Qubit 0 is the most significant
/// index bit. The Hermitian operator is used for expectations; conjugation of
/// density matrices is phase-free.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PauliString {
    labels: Vec<Pauli>,
}

/// Bit masks describing a Pauli string's action on basis states:
/// `P|y⟩ = i^{#Y} (−1)^{popcount(y & z)} |y ⊕ x⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PauliMasks {
    pub x: usize,
    pub z: usize,
    pub y_count: usize,
}

impl PauliMasks {
    fn sign(&self, y: usize) -> f64 {
        if (y & self.z).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    fn global_phase(&self) -> C64 {
        match self.y_count % 4 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        }
    }
}

impl PauliString {
    pub fn new(labels: Vec<Pauli>) -> Self {
        Self { labels }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            labels: vec![Pauli::I; n],
        }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[Pauli] {
        &self.labels
    }

    pub fn is_identity(&self) -> bool {
        self.labels.iter().all(|p| *p == Pauli::I)
    }

    /// The `index`-th string in lexicographic order over `I < X < Y < Z`.
    pub fn from_index(n: usize, mut index: usize) -> Self {
        let mut labels = vec![Pauli::I; n];
        for slot in labels.iter_mut().rev() {
            *slot = Pauli::ALL[index % 4];
            index /= 4;
        }
        Self { labels }
    }

    /// All `4^n` strings in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = PauliString> {
        (0..1usize << (2 * n)).map(move |i| PauliString::from_index(n, i))
    }

    /// Uniform sample from the projective Pauli group on `n` qubits.
    pub fn sample<R: RngCore + ?Sized>(n: usize, rng: &mut R) -> Self {
        let labels = (0..n).map(|_| Pauli::ALL[rng.random_range(0..4)]).collect();
        Self { labels }
    }

    /// Consecutive blocks of `block` qubits.
    pub fn blocks(&self, block: usize) -> Result<Vec<PauliString>> {
        if block == 0 || self.n() % block != 0 {
            return Err(Error::shape(
                format!("length divisible by {block}"),
                self.n(),
            ));
        }
        Ok(self
            .labels
            .chunks(block)
            .map(|c| PauliString::new(c.to_vec()))
            .collect())
    }

    /// `I^{⊗lead} ⊗ P`.
    pub fn with_leading_identity(&self, lead: usize) -> PauliString {
        let mut labels = vec![Pauli::I; lead];
        labels.extend_from_slice(&self.labels);
        PauliString { labels }
    }

    pub fn masks(&self) -> PauliMasks {
        let n = self.n();
        let mut m = PauliMasks {
            x: 0,
            z: 0,
            y_count: 0,
        };
        for (q, p) in self.labels.iter().enumerate() {
            let bit = 1usize << (n - 1 - q);
            if p.flips() {
                m.x |= bit;
            }
            if p.phases() {
                m.z |= bit;
            }
            if *p == Pauli::Y {
                m.y_count += 1;
            }
        }
        m
    }

    fn check_qubits(&self, n: usize) -> Result<()> {
        if self.n() != n {
            return Err(Error::shape(format!("{}-qubit operand", self.n()), n));
        }
        Ok(())
    }

    /// `P|ψ⟩`, including the `i^{#Y}` phase.
    pub fn apply_state(&self, psi: &PureState) -> Result<PureState> {
        self.check_qubits(psi.n())?;
        let m = self.masks();
        let phase = m.global_phase();
        let src = psi.amplitudes();
        let mut out = DVector::zeros(src.len());
        for (y, a) in src.iter().enumerate() {
            out[y ^ m.x] = phase * *a * m.sign(y);
        }
        Ok(PureState::from_vector_unchecked(psi.n(), out))
    }

    /// `P M P†` for any square matrix on `n` qubits.
    pub fn conjugate_matrix(&self, mat: &CMatrix) -> Result<CMatrix> {
        let dim = mat.nrows();
        if !dim.is_power_of_two() || mat.ncols() != dim {
            return Err(Error::shape("square power-of-two matrix", format!("{}x{}", mat.nrows(), mat.ncols())));
        }
        self.check_qubits(dim.trailing_zeros() as usize)?;
        let m = self.masks();
        let mut out = CMatrix::zeros(dim, dim);
        for b in 0..dim {
            let sb = m.sign(b);
            for a in 0..dim {
                out[(a ^ m.x, b ^ m.x)] = mat[(a, b)] * (m.sign(a) * sb);
            }
        }
        Ok(out)
    }

    /// `P ρ P†`.
    pub fn apply_density(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        Ok(DensityMatrix::from_matrix_unchecked(
            self.conjugate_matrix(rho.matrix())?,
        ))
    }

    /// `Tr(P A)` for the Hermitian operator `P`.
    pub fn expectation(&self, mat: &CMatrix) -> Result<C64> {
        let dim = mat.nrows();
        self.check_qubits(dim.trailing_zeros() as usize)?;
        let m = self.masks();
        let phase = m.global_phase();
        // P[y ⊕ x, y] = phase · sign(y), so Tr(PA) = Σ_y P[y⊕x, y] A[y, y⊕x].
        let mut acc = C64::new(0.0, 0.0);
        for y in 0..dim {
            acc += mat[(y, y ^ m.x)] * m.sign(y);
        }
        Ok(acc * phase)
    }

    /// `target += coeff · P`.
    pub fn accumulate(&self, target: &mut CMatrix, coeff: f64) -> Result<()> {
        let dim = target.nrows();
        self.check_qubits(dim.trailing_zeros() as usize)?;
        let m = self.masks();
        let phase = m.global_phase();
        for y in 0..dim {
            target[(y ^ m.x, y)] += phase * (coeff * m.sign(y));
        }
        Ok(())
    }

    /// Dense matrix of the Hermitian operator.
    pub fn to_matrix(&self) -> CMatrix {
        let dim = 1usize << self.n();
        let mut out = CMatrix::zeros(dim, dim);
        self.accumulate(&mut out, 1.0)
            .expect("dimension matches by construction");
        out
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.labels {
            write!(f, "{}", p.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let labels = s
            .chars()
            .map(|c| match c {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::Codec(format!("invalid Pauli label {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { labels })
    }
}

impl TryFrom<String> for PauliString {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<PauliString> for String {
    fn from(p: PauliString) -> String {
        p.to_string()
    }
}

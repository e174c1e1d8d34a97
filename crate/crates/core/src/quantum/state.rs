use nalgebra::DVector;
use rand::RngCore;

use super::linalg::{CMatrix, C64, TOLERANCE};
use crate::error::{Error, Result};

/// A normalized pure state on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n: usize,
    amps: DVector<C64>,
}

pub(crate) fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::shape("power-of-two dimension", dim));
    }
    Ok(dim.trailing_zeros() as usize)
}

impl PureState {
    /// Builds a state from amplitudes; the vector must already be normalized.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let n = qubits_for_dim(amplitudes.len())?;
        let amps = DVector::from_vec(amplitudes);
        let norm = amps.norm();
        if (norm - 1.0).abs() > TOLERANCE {
            return Err(Error::Numeric(format!("state norm {norm} differs from 1")));
        }
        Ok(Self { n, amps })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let n = qubits_for_dim(amplitudes.len())?;
        let mut amps = DVector::from_vec(amplitudes);
        let norm = amps.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Numeric("cannot normalize a zero vector".into()));
        }
        amps.unscale_mut(norm);
        Ok(Self { n, amps })
    }

    pub(crate) fn from_vector_unchecked(n: usize, amps: DVector<C64>) -> Self {
        debug_assert_eq!(amps.len(), 1usize << n);
        Self { n, amps }
    }

    /// Computational basis state `|index⟩` on `n` qubits.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n;
        if index >= dim {
            return Err(Error::domain(format!("basis index {index} out of range for {n} qubits")));
        }
        let mut amps = DVector::zeros(dim);
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::shape(self.dim(), other.dim()));
        }
        Ok(self.amps.dotc(&other.amps))
    }

    /// `|⟨self|other⟩|²`.
    pub fn overlap_sq(&self, other: &PureState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// The projector `|ψ⟩⟨ψ|` as a raw matrix.
    pub fn outer(&self) -> CMatrix {
        &self.amps * self.amps.adjoint()
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        let amps = self.amps.kronecker(&other.amps);
        PureState {
            n: self.n + other.n,
            amps,
        }
    }

    /// `|ψ⟩^⊗t`.
    pub fn tensor_power(&self, t: usize) -> Result<PureState> {
        if t == 0 {
            return Err(Error::domain("tensor power needs t ≥ 1"));
        }
        let mut out = self.clone();
        for _ in 1..t {
            out = out.tensor(self);
        }
        Ok(out)
    }
}

/// Haar-random pure state: a normalized i.i.d. standard complex Gaussian vector.
pub fn haar_sample<R: RngCore + ?Sized>(n: usize, rng: &mut R) -> Result<PureState> {
    use rand_distr::{Distribution, StandardNormal};
    if n == 0 {
        return Err(Error::domain("Haar sampling needs n ≥ 1"));
    }
    let dim = 1usize << n;
    let mut amps = Vec::with_capacity(dim);
    for _ in 0..dim {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        amps.push(C64::new(re, im));
    }
    PureState::normalized(amps)
}

use super::linalg::{
    ensure_same_shape, ensure_square, hermitian_eigenvalues, is_hermitian, CMatrix, C64, TOLERANCE,
};
use super::state::{qubits_for_dim, PureState};
use crate::error::{Error, Result};

/// A Hermitian, positive semidefinite, unit-trace matrix on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    m: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and PSD-ness (eigenvalues ≥ −1e-9).
    pub fn new(m: CMatrix) -> Result<Self> {
        let dim = ensure_square(&m, "density matrix")?;
        let n = qubits_for_dim(dim)?;
        if !is_hermitian(&m, TOLERANCE) {
            return Err(Error::Numeric("matrix is not Hermitian".into()));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TOLERANCE || tr.im.abs() > TOLERANCE {
            return Err(Error::Numeric(format!("trace {tr} differs from 1")));
        }
        let min = hermitian_eigenvalues(&m).first().copied().unwrap_or(0.0);
        if min < -TOLERANCE {
            return Err(Error::Numeric(format!("negative eigenvalue {min}")));
        }
        Ok(Self { n, m })
    }

    /// Wraps a matrix that is a density matrix by construction.
    pub(crate) fn from_matrix_unchecked(m: CMatrix) -> Self {
        let n = m.nrows().trailing_zeros() as usize;
        debug_assert!(m.nrows().is_power_of_two() && m.is_square());
        Self { n, m }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self {
            n: psi.n(),
            m: psi.outer(),
        }
    }

    pub fn maximally_mixed(n: usize) -> Self {
        let dim = 1usize << n;
        Self {
            n,
            m: CMatrix::identity(dim, dim).unscale(dim as f64),
        }
    }

    /// Convex combination `Σ wᵢ ρᵢ`; weights must be nonnegative and sum to 1.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::domain("mixture of zero states"))?;
        let dim = first.1.dim();
        let mut total = 0.0;
        let mut m = CMatrix::zeros(dim, dim);
        for (w, rho) in parts {
            if *w < 0.0 {
                return Err(Error::domain(format!("negative mixture weight {w}")));
            }
            ensure_same_shape(&m, &rho.m)?;
            m += rho.m.scale(*w);
            total += w;
        }
        if (total - 1.0).abs() > TOLERANCE {
            return Err(Error::domain(format!("mixture weights sum to {total}")));
        }
        Ok(Self { n: first.1.n, m })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.m.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            n: self.n + other.n,
            m: self.m.kronecker(&other.m),
        }
    }

    /// Traces out the leading `k` qubits (the most significant index bits).
    pub fn partial_trace_leading(&self, k: usize) -> Result<DensityMatrix> {
        if k > self.n {
            return Err(Error::domain(format!(
                "cannot trace {k} qubits out of {}",
                self.n
            )));
        }
        let rest = 1usize << (self.n - k);
        let lead = 1usize << k;
        let mut out = CMatrix::zeros(rest, rest);
        for a in 0..lead {
            let off = a * rest;
            out += self.m.view((off, off), (rest, rest));
        }
        Ok(DensityMatrix {
            n: self.n - k,
            m: out,
        })
    }
}

/// `⟨ψ|ρ|ψ⟩`.
pub fn fidelity_overlap(psi: &PureState, rho: &DensityMatrix) -> Result<f64> {
    if psi.dim() != rho.dim() {
        return Err(Error::shape(rho.dim(), psi.dim()));
    }
    let v = psi.amplitudes();
    let value: C64 = v.dotc(&(rho.matrix() * v));
    Ok(value.re)
}

/// Trace distance `½ Σ |λᵢ(ρ − σ)|`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    trace_distance_hermitian(rho.matrix(), sigma.matrix())
}

/// Trace distance between two Hermitian matrices of the same shape.
pub fn trace_distance_hermitian(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    ensure_same_shape(a, b)?;
    ensure_square(a, "matrix")?;
    let diff = a - b;
    Ok(0.5 * hermitian_eigenvalues(&diff).iter().map(|v| v.abs()).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::haar_sample;
    use crate::rng::SimRng;
    use proptest::prelude::*;

    fn random_density(n: usize, rank: usize, rng: &mut SimRng) -> DensityMatrix {
        let dim = 1usize << n;
        let mut m = CMatrix::zeros(dim, dim);
        for _ in 0..rank {
            m += haar_sample(n, rng).unwrap().outer();
        }
        DensityMatrix::new(m.unscale(rank as f64)).unwrap()
    }

    #[test]
    fn orthogonal_and_identical_states() {
        let zero = DensityMatrix::from_pure(&PureState::basis(1, 0).unwrap());
        let one = DensityMatrix::from_pure(&PureState::basis(1, 1).unwrap());
        assert!(trace_distance(&zero, &zero).unwrap().abs() < 1e-12);
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-12);
        let two = DensityMatrix::maximally_mixed(2);
        assert!(matches!(trace_distance(&zero, &two), Err(Error::Shape { .. })));
    }

    #[test]
    fn orthogonal_mixture_distance_equals_its_weight() {
        // ρ₂ = αρ₁ + βρ₁⊥ with ρ₁ρ₁⊥ = 0 gives TD(ρ₁, ρ₂) = β.
        let mut rng = SimRng::from_seed(1);
        let psi = haar_sample(3, &mut rng).unwrap();
        let rho1 = DensityMatrix::from_pure(&psi);
        let dim = 8;
        let perp = (CMatrix::identity(dim, dim) - psi.outer()).unscale((dim - 1) as f64);
        let perp = DensityMatrix::new(perp).unwrap();
        for i in 0..=20 {
            let beta = i as f64 / 20.0;
            let rho2 = DensityMatrix::mixture(&[(1.0 - beta, &rho1), (beta, &perp)]).unwrap();
            let td = trace_distance(&rho1, &rho2).unwrap();
            assert!((td - beta).abs() < 1e-9, "beta {beta} td {td}");
        }
    }

    #[test]
    fn validation_rejects_non_states() {
        let mut m = CMatrix::identity(2, 2);
        assert!(DensityMatrix::new(m.clone()).is_err());
        m[(1, 1)] = C64::new(-0.5, 0.0);
        m[(0, 0)] = C64::new(1.5, 0.0);
        assert!(DensityMatrix::new(m).is_err());
        let mut h = CMatrix::identity(2, 2).unscale(2.0);
        h[(0, 1)] = C64::new(0.0, 0.1);
        assert!(DensityMatrix::new(h).is_err());
    }

    #[test]
    fn partial_trace_of_product() {
        let mut rng = SimRng::from_seed(2);
        let a = random_density(1, 2, &mut rng);
        let b = random_density(2, 3, &mut rng);
        let traced = a.tensor(&b).partial_trace_leading(1).unwrap();
        let diff = crate::quantum::max_abs_diff(traced.matrix(), b.matrix()).unwrap();
        assert!(diff < 1e-12);
    }

    #[test]
    fn frobenius_closeness_bounds_overlap_shift() {
        // ⟨ψ|M₀|ψ⟩ ≤ α and ‖M₀ − M₁‖_F² ≤ β imply ⟨ψ|M₁|ψ⟩ ≤ α + √β + √((2 − 2α)β).
        let mut rng = SimRng::from_seed(9);
        for _ in 0..100 {
            let m0 = random_density(2, 2, &mut rng);
            let m1 = random_density(2, 2, &mut rng);
            let psi = haar_sample(2, &mut rng).unwrap();
            let alpha = fidelity_overlap(&psi, &m0).unwrap();
            let beta = crate::quantum::frobenius_sq(m0.matrix(), m1.matrix()).unwrap();
            if beta + 2.0 * alpha >= 1.0 {
                continue;
            }
            let bound = alpha + beta.sqrt() + ((2.0 - 2.0 * alpha) * beta).sqrt();
            assert!(fidelity_overlap(&psi, &m1).unwrap() <= bound + 1e-12);
        }
    }

    proptest! {
        #[test]
        fn trace_distance_is_a_metric(seed in any::<u64>()) {
            let mut rng = SimRng::from_seed(seed);
            let a = random_density(2, 2, &mut rng);
            let b = random_density(2, 1, &mut rng);
            let c = random_density(2, 3, &mut rng);
            let ab = trace_distance(&a, &b).unwrap();
            let ba = trace_distance(&b, &a).unwrap();
            let bc = trace_distance(&b, &c).unwrap();
            let ac = trace_distance(&a, &c).unwrap();
            prop_assert!((ab - ba).abs() < 1e-9);
            prop_assert!(ac <= ab + bc + 1e-9);
            prop_assert!(trace_distance(&a, &a).unwrap().abs() < 1e-9);
            prop_assert!(ab <= 1.0 + 1e-9);
        }

        #[test]
        fn frobenius_expansion_holds(seed in any::<u64>()) {
            let mut rng = SimRng::from_seed(seed);
            let a = random_density(2, 2, &mut rng);
            let b = random_density(2, 2, &mut rng);
            let direct = crate::quantum::frobenius_sq(a.matrix(), b.matrix()).unwrap();
            let cross = crate::quantum::hs_inner(a.matrix(), b.matrix()).unwrap().re;
            let expanded = a.purity() + b.purity() - 2.0 * cross;
            prop_assert!(direct >= 0.0);
            prop_assert!((direct - expanded).abs() < 1e-9);
        }
    }

    #[test]
    fn frobenius_of_pure_pair() {
        let zero = PureState::basis(1, 0).unwrap().outer();
        let one = PureState::basis(1, 1).unwrap().outer();
        assert!((crate::quantum::frobenius_sq(&zero, &one).unwrap() - 2.0).abs() < 1e-12);
        let mut rng = SimRng::from_seed(4);
        let a = haar_sample(3, &mut rng).unwrap();
        let b = haar_sample(3, &mut rng).unwrap();
        let f = crate::quantum::frobenius_sq(&a.outer(), &b.outer()).unwrap();
        assert!((f - (2.0 - 2.0 * a.overlap_sq(&b).unwrap())).abs() < 1e-12);
    }
}

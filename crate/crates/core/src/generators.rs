//! Binary-phase state generators built from a keyed PRF.
//!
//! The PRFS output on `(k, x)` is the binary-phase state whose phase
//! function is `y ↦ F₂(k_x, y)` under the subkey `k_x = F₁(k, x)`.
//! The ancilla and uncompute registers of a circuit realization leave the
//! output density matrix unchanged and are not materialized.

use nalgebra::DVector;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prf::{prf_bit, prf_eval, BitString, PrfKey, PrfSpec, PrfVariant};
use crate::quantum::{fidelity_overlap, sample_binomial, CMatrix, DensityMatrix, PureState, C64};

/// Largest output size a generator will materialize.
pub const MAX_OUTPUT_QUBITS: usize = 12;

const TAG_SUBKEY: u32 = 1;
const TAG_PHASE: u32 = 2;
const TAG_ABORT: u32 = 3;

/// `(λ, d, n)`: key bits, input bits, output qubits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub lambda: usize,
    pub d: usize,
    pub n: usize,
}

impl GeneratorParams {
    pub fn new(lambda: usize, d: usize, n: usize) -> Result<Self> {
        if lambda == 0 || d == 0 || n == 0 {
            return Err(Error::domain("generator parameters must all be at least 1"));
        }
        if n > MAX_OUTPUT_QUBITS {
            return Err(Error::Resource {
                what: "generator output",
                requested: 1u128 << n,
                cap: 1 << MAX_OUTPUT_QUBITS,
            });
        }
        Ok(Self { lambda, d, n })
    }
}

/// `2^{-n/2} Σ_x (−1)^{phase(x)} |x⟩`.
pub fn binary_phase_state(phase: impl Fn(usize) -> bool, n: usize) -> PureState {
    let dim = 1usize << n;
    let amp = 1.0 / (dim as f64).sqrt();
    let amps = DVector::from_fn(dim, |x, _| C64::new(if phase(x) { -amp } else { amp }, 0.0));
    PureState::from_vector_unchecked(n, amps)
}

/// Binary-phase state from a sign bitmask: bit `x` set means phase `−1` on `|x⟩`.
pub fn sign_pattern_state(pattern: u64, n: usize) -> PureState {
    binary_phase_state(|x| (pattern >> x) & 1 == 1, n)
}

/// Per-`(k, x)` success probability of a generator with recognizable abort.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AbortModel {
    Constant { eta: f64 },
    /// `η(k, x) = floor + (1 − floor)·u(k, x)` with `u` a keyed hash in `[0, 1)`.
    Keyed { seed: u64, floor: f64 },
}

impl AbortModel {
    pub const NEVER: AbortModel = AbortModel::Constant { eta: 1.0 };

    pub fn validate(&self) -> Result<()> {
        let v = match self {
            AbortModel::Constant { eta } => *eta,
            AbortModel::Keyed { floor, .. } => *floor,
        };
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::domain(format!("abort probability parameter {v} outside [0, 1]")));
        }
        Ok(())
    }

    pub fn eta(&self, key: &PrfKey, x: &BitString) -> Result<f64> {
        self.validate()?;
        match *self {
            AbortModel::Constant { eta } => Ok(eta),
            AbortModel::Keyed { seed, floor } => {
                let spec = PrfSpec::new(PrfVariant::Mixer { seed }, x.len().max(1), 53, TAG_ABORT)?;
                let x = if x.is_empty() { BitString::zeros(1) } else { x.clone() };
                let u = prf_eval(&spec, key, &x)?.to_u64()? as f64 / (1u64 << 53) as f64;
                Ok(floor + (1.0 - floor) * u)
            }
        }
    }
}

/// `|⊥⟩ = |1⟩ ⊗ |0^n⟩` on `n + 1` qubits.
pub fn abort_state(n: usize) -> PureState {
    PureState::basis(n + 1, 1usize << n).expect("index within range")
}

/// Output of the abort-wrapped generator.
#[derive(Clone, Debug)]
pub struct AbortOutput {
    pub eta: f64,
    /// `η |0⟩⟨0| ⊗ |ψ⟩⟨ψ| + (1 − η) |⊥⟩⟨⊥|` on `n + 1` qubits.
    pub pre_trace: DensityMatrix,
    /// The same state with the flag qubit traced out.
    pub traced: DensityMatrix,
}

/// A PRS/PRFS generator over a chosen PRF variant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub params: GeneratorParams,
    pub variant: PrfVariant,
}

impl Generator {
    pub fn new(params: GeneratorParams, variant: PrfVariant) -> Self {
        Self { params, variant }
    }

    fn subkey_spec(&self) -> PrfSpec {
        PrfSpec {
            variant: self.variant,
            input_bits: self.params.d,
            output_bits: self.params.lambda,
            tag: TAG_SUBKEY,
        }
    }

    fn phase_spec(&self) -> PrfSpec {
        PrfSpec {
            variant: self.variant,
            input_bits: self.params.n,
            output_bits: 1,
            tag: TAG_PHASE,
        }
    }

    fn check_key(&self, key: &PrfKey) -> Result<()> {
        if key.lambda() != self.params.lambda {
            return Err(Error::domain(format!(
                "key has {} bits, expected {}",
                key.lambda(),
                self.params.lambda
            )));
        }
        Ok(())
    }

    /// Sign bitmask of the PRS phase function under `key`; requires `n ≤ 6`.
    pub fn sign_pattern(&self, key: &PrfKey) -> Result<u64> {
        self.check_key(key)?;
        let n = self.params.n;
        if n > 6 {
            return Err(Error::domain("sign patterns are limited to n ≤ 6"));
        }
        let spec = self.phase_spec();
        let mut pattern = 0u64;
        for y in 0..1usize << n {
            if prf_bit(&spec, key, &BitString::from_u64(y as u64, n))? {
                pattern |= 1 << y;
            }
        }
        Ok(pattern)
    }

    /// `|ψ_k⟩ = 2^{-n/2} Σ_y (−1)^{F(k, y)} |y⟩`.
    pub fn prs(&self, key: &PrfKey) -> Result<PureState> {
        self.check_key(key)?;
        let n = self.params.n;
        let spec = self.phase_spec();
        let signs = (0..1usize << n)
            .map(|y| prf_bit(&spec, key, &BitString::from_u64(y as u64, n)))
            .collect::<Result<Vec<bool>>>()?;
        Ok(binary_phase_state(|y| signs[y], n))
    }

    /// `k_x = F₁(k, x)` as a `λ`-bit key.
    pub fn subkey(&self, key: &PrfKey, x: &BitString) -> Result<PrfKey> {
        self.check_key(key)?;
        Ok(PrfKey::new(prf_eval(&self.subkey_spec(), key, x)?))
    }

    /// `|ψ_{k,x}⟩`: the PRS state under subkey `k_x`.
    pub fn prfs(&self, key: &PrfKey, x: &BitString) -> Result<PureState> {
        self.prs(&self.subkey(key, x)?)
    }

    pub fn abort_wrapped(&self, key: &PrfKey, x: &BitString, model: &AbortModel) -> Result<AbortOutput> {
        let eta = model.eta(key, x)?;
        let psi = self.prfs(key, x)?;
        Ok(abort_mixture(&psi, eta))
    }

    /// Exact acceptance probability `⟨ψ_{k,x}|ρ|ψ_{k,x}⟩` of the state tester,
    /// plus the number of accepting runs among `shots`.
    pub fn test<R: RngCore + ?Sized>(
        &self,
        key: &PrfKey,
        x: &BitString,
        rho: &DensityMatrix,
        shots: u64,
        rng: &mut R,
    ) -> Result<(f64, u64)> {
        let psi = self.prfs(key, x)?;
        let p = fidelity_overlap(&psi, rho)?;
        Ok((p, sample_binomial(p.clamp(0.0, 1.0), shots, rng)?))
    }

    /// Acceptance probability of the product tester on a `t·n`-qubit state.
    pub fn test_product(&self, pairs: &[(PrfKey, BitString)], rho: &DensityMatrix) -> Result<f64> {
        let (first, rest) = pairs
            .split_first()
            .ok_or_else(|| Error::domain("product tester needs at least one pair"))?;
        let mut psi = self.prfs(&first.0, &first.1)?;
        for (k, x) in rest {
            psi = psi.tensor(&self.prfs(k, x)?);
        }
        fidelity_overlap(&psi, rho)
    }
}

/// The abort mixture for an arbitrary success state `ψ` and weight `η`.
pub fn abort_mixture(psi: &PureState, eta: f64) -> AbortOutput {
    let n = psi.n();
    let dim = 1usize << n;
    let mut pre = CMatrix::zeros(2 * dim, 2 * dim);
    pre.view_mut((0, 0), (dim, dim)).copy_from(&psi.outer().scale(eta));
    pre[(dim, dim)] = C64::new(1.0 - eta, 0.0);
    let mut traced = psi.outer().scale(eta);
    traced[(0, 0)] += C64::new(1.0 - eta, 0.0);
    AbortOutput {
        eta,
        pre_trace: DensityMatrix::from_matrix_unchecked(pre),
        traced: DensityMatrix::from_matrix_unchecked(traced),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{haar_sample, max_abs_diff};
    use crate::rng::SimRng;

    fn generator(lambda: usize, d: usize, n: usize) -> Generator {
        Generator::new(
            GeneratorParams::new(lambda, d, n).unwrap(),
            PrfVariant::Mixer { seed: 0x0123 },
        )
    }

    #[test]
    fn fixed_phase_states() {
        let plus = binary_phase_state(|_| false, 2);
        for a in plus.amplitudes().iter() {
            assert!((a.re - 0.5).abs() < 1e-15);
        }
        let minus = binary_phase_state(|x| x & 1 == 1, 1);
        let s = 1.0 / 2f64.sqrt();
        assert!((minus.amplitudes()[0].re - s).abs() < 1e-15);
        assert!((minus.amplitudes()[1].re + s).abs() < 1e-15);
    }

    #[test]
    fn random_phase_pairs_average_to_inverse_dimension() {
        // Exhaustive over all 2^4 × 2^4 sign-pattern pairs at n = 2.
        let mut total = 0.0;
        for a in 0..16u64 {
            let sa = sign_pattern_state(a, 2);
            for b in 0..16u64 {
                total += sa.overlap_sq(&sign_pattern_state(b, 2)).unwrap();
            }
        }
        assert!((total / 256.0 - 0.25).abs() < 1e-12);
    }

    #[test]
    fn generated_states_have_flat_amplitudes() {
        let g = generator(8, 2, 3);
        let mut rng = SimRng::from_seed(4);
        for _ in 0..20 {
            let k = PrfKey::random(8, &mut rng);
            let x = BitString::random(2, &mut rng);
            let psi = g.prfs(&k, &x).unwrap();
            let flat = psi.amplitudes()[0].re.abs();
            assert!((flat * flat - 1.0 / 8.0).abs() < 1e-15);
            for a in psi.amplitudes().iter() {
                assert_eq!(a.re.abs(), flat);
                assert_eq!(a.im, 0.0);
            }
            assert_eq!(psi, g.prfs(&k, &x).unwrap());
            assert_eq!(psi, g.prs(&g.subkey(&k, &x).unwrap()).unwrap());
        }
    }

    #[test]
    fn distinct_keys_give_near_orthogonal_states() {
        let g = generator(16, 4, 3);
        let mut rng = SimRng::from_seed(5);
        let mut prs_mean = 0.0;
        let mut prfs_mean = 0.0;
        for _ in 0..1000 {
            let a = PrfKey::random(16, &mut rng);
            let b = PrfKey::random(16, &mut rng);
            prs_mean += g.prs(&a).unwrap().overlap_sq(&g.prs(&b).unwrap()).unwrap();
            let x = BitString::from_u64(1, 4);
            let y = BitString::from_u64(2, 4);
            prfs_mean += g.prfs(&a, &x).unwrap().overlap_sq(&g.prfs(&a, &y).unwrap()).unwrap();
        }
        assert!((prs_mean / 1000.0 - 0.125).abs() < 0.02);
        assert!((prfs_mean / 1000.0 - 0.125).abs() < 0.02);
    }

    #[test]
    fn constant_zero_prf_gives_uniform_superposition() {
        let g = Generator::new(GeneratorParams::new(4, 1, 2).unwrap(), PrfVariant::ConstantZero);
        let psi = g.prs(&PrfKey::from_index(4, 9)).unwrap();
        assert_eq!(psi, binary_phase_state(|_| false, 2));
    }

    #[test]
    fn key_length_is_checked() {
        let g = generator(8, 2, 3);
        assert!(g.prs(&PrfKey::from_index(7, 0)).is_err());
        assert!(g.prfs(&PrfKey::from_index(8, 0), &BitString::zeros(3)).is_err());
    }

    #[test]
    fn abort_wrapper_extremes_and_purity() {
        let g = generator(8, 2, 2);
        let k = PrfKey::from_index(8, 17);
        let x = BitString::from_u64(1, 2);
        let psi = g.prfs(&k, &x).unwrap();
        let zero_psi = PureState::basis(1, 0).unwrap().tensor(&psi);

        let full = g.abort_wrapped(&k, &x, &AbortModel::NEVER).unwrap();
        assert!(max_abs_diff(full.pre_trace.matrix(), &zero_psi.outer()).unwrap() < 1e-15);

        let dead = g.abort_wrapped(&k, &x, &AbortModel::Constant { eta: 0.0 }).unwrap();
        assert_eq!(dead.pre_trace.matrix(), &abort_state(2).outer());

        let mid = g.abort_wrapped(&k, &x, &AbortModel::Constant { eta: 0.75 }).unwrap();
        assert!((mid.pre_trace.purity() - 0.625).abs() < 1e-12);
        DensityMatrix::new(mid.pre_trace.matrix().clone()).unwrap();
        DensityMatrix::new(mid.traced.matrix().clone()).unwrap();
        let traced = mid.pre_trace.partial_trace_leading(1).unwrap();
        assert!(max_abs_diff(traced.matrix(), mid.traced.matrix()).unwrap() < 1e-15);

        assert!(g.abort_wrapped(&k, &x, &AbortModel::Constant { eta: 1.5 }).is_err());
    }

    #[test]
    fn abort_state_is_orthogonal_to_success_branch() {
        let mut rng = SimRng::from_seed(6);
        for n in 1..5 {
            let psi = haar_sample(n, &mut rng).unwrap();
            let branch = PureState::basis(1, 0).unwrap().tensor(&psi);
            assert_eq!(abort_state(n).inner(&branch).unwrap(), C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn keyed_abort_schedule_stays_in_range() {
        let model = AbortModel::Keyed { seed: 3, floor: 0.4 };
        let mut seen = Vec::new();
        for i in 0..50 {
            let eta = model.eta(&PrfKey::from_index(8, i), &BitString::from_u64(i, 3)).unwrap();
            assert!((0.4..=1.0).contains(&eta));
            seen.push(eta);
        }
        assert!(seen.iter().any(|e| (e - seen[0]).abs() > 1e-6));
    }

    #[test]
    fn tester_matches_overlap() {
        let g = generator(8, 2, 3);
        let mut rng = SimRng::from_seed(7);
        let k = PrfKey::random(8, &mut rng);
        let x = BitString::from_u64(0, 2);
        let own = DensityMatrix::from_pure(&g.prfs(&k, &x).unwrap());
        let (p, hits) = g.test(&k, &x, &own, 100, &mut rng).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
        assert_eq!(hits, 100);
        let (p, _) = g.test(&k, &x, &DensityMatrix::maximally_mixed(3), 0, &mut rng).unwrap();
        assert!((p - 0.125).abs() < 1e-12);

        let rho = DensityMatrix::from_pure(&haar_sample(3, &mut rng).unwrap());
        let (p, _) = g.test(&k, &x, &rho, 0, &mut rng).unwrap();
        let direct = fidelity_overlap(&g.prfs(&k, &x).unwrap(), &rho).unwrap();
        assert!((p - direct).abs() < 1e-12);
    }

    #[test]
    fn other_inputs_overlap_at_inverse_dimension() {
        let g = generator(12, 3, 3);
        let mut rng = SimRng::from_seed(8);
        let mut mean = 0.0;
        let trials = 500;
        for _ in 0..trials {
            let k = PrfKey::random(12, &mut rng);
            let other = DensityMatrix::from_pure(&g.prfs(&k, &BitString::from_u64(5, 3)).unwrap());
            mean += g.test(&k, &BitString::from_u64(2, 3), &other, 0, &mut rng).unwrap().0;
        }
        assert!((mean / trials as f64 - 0.125).abs() < 0.02);
    }

    #[test]
    fn product_tester_factorizes() {
        let g = generator(8, 2, 2);
        let mut rng = SimRng::from_seed(9);
        let pairs: Vec<(PrfKey, BitString)> = (0..3)
            .map(|_| (PrfKey::random(8, &mut rng), BitString::random(2, &mut rng)))
            .collect();
        let factors: Vec<DensityMatrix> = (0..3)
            .map(|_| {
                let a = haar_sample(2, &mut rng).unwrap().outer();
                let b = haar_sample(2, &mut rng).unwrap().outer();
                DensityMatrix::new((a + b).unscale(2.0)).unwrap()
            })
            .collect();
        let product = factors[1..].iter().fold(factors[0].clone(), |acc, f| acc.tensor(f));
        let joint = g.test_product(&pairs, &product).unwrap();
        let separate: f64 = pairs
            .iter()
            .zip(&factors)
            .map(|((k, x), f)| g.test(k, x, f, 0, &mut rng).unwrap().0)
            .product();
        assert!((joint - separate).abs() < 1e-9);

        let pure = pairs
            .iter()
            .map(|(k, x)| DensityMatrix::from_pure(&g.prfs(k, x).unwrap()))
            .reduce(|a, b| a.tensor(&b))
            .unwrap();
        assert!((g.test_product(&pairs, &pure).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn product_tester_vanishes_on_an_orthogonal_factor() {
        let g = generator(8, 2, 2);
        let k = PrfKey::from_index(8, 1);
        let x = BitString::from_u64(0, 2);
        let psi = g.prfs(&k, &x).unwrap();
        // Flip the sign on half the amplitudes of a flat real state to get an orthogonal one.
        let flipped = binary_phase_state(
            |y| (psi.amplitudes()[y].re < 0.0) ^ (y & 1 == 1),
            2,
        );
        assert!(psi.overlap_sq(&flipped).unwrap() < 1e-15);
        let rho = DensityMatrix::from_pure(&psi).tensor(&DensityMatrix::from_pure(&flipped));
        let v = g.test_product(&[(k.clone(), x.clone()), (k, x)], &rho).unwrap();
        assert!(v.abs() < 1e-15);
    }
}

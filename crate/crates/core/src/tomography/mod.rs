//! Pauli-expectation tomography and its majority-boosted variant.
//!
//! The base estimator spends `s` copies on each non-identity Pauli `Q`,
//! estimating `Tr(Qρ)` by `2·(#(+1 outcomes))/s − 1`, and returns
//! `M = (1/N) Σ_Q est_Q · Q` with the identity coefficient fixed to 1. The
//! estimates are independent and unbiased with variance at most `1/s`, so
//! `E‖M − ρ‖_F² = (1/N) Σ_Q Var(est_Q) < N/s` on a budget of `s·N²` copies.

mod codec;
mod verifiable;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use codec::{
    decode_tomograph, encode_tomograph, read_tomograph, write_tomograph, TomographBlob, TomographMeta,
};
pub use verifiable::{
    AbortCheck, ChannelFirstInput, ChannelSecondInput, FirstScheme, Instantiation, SecondScheme,
    TomographyBudget, Verdict, VerifiableParams, DESK_DIVISOR,
};

use crate::error::{Error, Result};
use crate::quantum::{frobenius_sq, sample_binomial, CMatrix, DensityMatrix, PauliString};
use crate::rng::SimRng;

/// Classical estimate of a density matrix.
///
/// `matrix` is Hermitian but need not be PSD or unit trace. An aborted
/// tomograph carries the zero matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "TomographBlob", try_from = "TomographBlob")]
pub struct Tomograph {
    pub matrix: CMatrix,
    /// Copies per observable (`s`).
    pub s: u64,
    /// Number of boosting repetitions, 1 for a base run.
    pub lambda: usize,
    /// Total copies consumed.
    pub copies: u128,
    pub aborted: bool,
}

impl Tomograph {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn aborted(dim: usize, s: u64, lambda: usize, copies: u128) -> Self {
        Self {
            matrix: CMatrix::zeros(dim, dim),
            s,
            lambda,
            copies,
            aborted: true,
        }
    }

    /// `‖M − ρ‖_F²`.
    pub fn error_sq(&self, rho: &DensityMatrix) -> Result<f64> {
        frobenius_sq(&self.matrix, rho.matrix())
    }
}

/// Noise model of a tomography run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TomographyMode {
    /// Infinite-shot limit: the estimate equals the state exactly.
    Analytic,
    /// Finite shots drawn from the exact outcome distributions.
    Sampled,
}

/// Anything that can produce base-tomography estimates.
pub trait EstimateSource: Sync {
    fn dim(&self) -> usize;

    /// One base estimate with `s` copies per observable; `run` is the
    /// repetition index inside a boosted call.
    fn estimate(&self, run: usize, s: u64, rng: &mut SimRng) -> Result<CMatrix>;
}

impl EstimateSource for DensityMatrix {
    fn dim(&self) -> usize {
        DensityMatrix::dim(self)
    }

    fn estimate(&self, _run: usize, s: u64, rng: &mut SimRng) -> Result<CMatrix> {
        Ok(tomography_base(self, s, rng)?.matrix)
    }
}

/// Number of `+1` outcomes when measuring `Q` on `s` copies of `ρ`.
fn pauli_outcomes(q: &PauliString, rho: &DensityMatrix, s: u64, rng: &mut SimRng) -> Result<u64> {
    let expectation = q.expectation(rho.matrix())?.re;
    sample_binomial(((1.0 + expectation) / 2.0).clamp(0.0, 1.0), s, rng)
}

/// Base tomography with `s` copies per Pauli observable (`s·N²` in total,
/// counting the identity's share).
pub fn tomography_base(rho: &DensityMatrix, s: u64, rng: &mut SimRng) -> Result<Tomograph> {
    if s == 0 {
        return Err(Error::domain("tomography needs s ≥ 1"));
    }
    let n = rho.n();
    let dim = rho.dim();
    let mut m = CMatrix::zeros(dim, dim);
    for q in PauliString::all(n) {
        let est = if q.is_identity() {
            1.0
        } else {
            2.0 * pauli_outcomes(&q, rho, s, rng)? as f64 / s as f64 - 1.0
        };
        q.accumulate(&mut m, est / dim as f64)?;
    }
    Ok(Tomograph {
        matrix: m,
        s,
        lambda: 1,
        copies: s as u128 * (dim * dim) as u128,
        aborted: false,
    })
}

/// Index of the first estimate with a strict majority of estimates
/// (itself included) within squared Frobenius distance `radius`.
pub fn majority_cluster(estimates: &[CMatrix], radius: f64) -> Result<Option<usize>> {
    let k = estimates.len();
    for i in 0..k {
        let mut close = 0;
        for e in estimates {
            if frobenius_sq(&estimates[i], e)? <= radius {
                close += 1;
            }
        }
        if 2 * close > k {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

/// Boosted tomography: `λ` base runs with `4s` copies per observable each;
/// returns the first run backed by a majority cluster of radius `4N/s`, or
/// an aborted tomograph when none exists.
pub fn tomography_boosted<S: EstimateSource + ?Sized>(
    source: &S,
    budget: &TomographyBudget,
    rng: &mut SimRng,
) -> Result<Tomograph> {
    if source.dim() != budget.n_dim {
        return Err(Error::shape(budget.n_dim, source.dim()));
    }
    let master = SimRng::from_seed(rng.next_seed());
    let per_run = 4 * budget.s;
    let estimates = (0..budget.lambda)
        .into_par_iter()
        .map(|i| source.estimate(i, per_run, &mut master.fork(i as u64)))
        .collect::<Result<Vec<_>>>()?;
    let radius = 4.0 * budget.epsilon();
    Ok(match majority_cluster(&estimates, radius)? {
        Some(i) => Tomograph {
            matrix: estimates[i].clone(),
            s: budget.s,
            lambda: budget.lambda,
            copies: budget.copies,
            aborted: false,
        },
        None => Tomograph::aborted(budget.n_dim, budget.s, budget.lambda, budget.copies),
    })
}

/// Boosted tomography in the chosen mode. Analytic mode returns `ρ` itself.
pub fn tomograph_state(
    rho: &DensityMatrix,
    budget: &TomographyBudget,
    mode: TomographyMode,
    rng: &mut SimRng,
) -> Result<Tomograph> {
    match mode {
        TomographyMode::Analytic => {
            if rho.dim() != budget.n_dim {
                return Err(Error::shape(budget.n_dim, rho.dim()));
            }
            Ok(Tomograph {
                matrix: rho.matrix().clone(),
                s: budget.s,
                lambda: budget.lambda,
                copies: budget.copies,
                aborted: false,
            })
        }
        TomographyMode::Sampled => tomography_boosted(rho, budget, rng),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{haar_sample, is_hermitian, PureState, C64};

    fn zero_state() -> DensityMatrix {
        DensityMatrix::from_pure(&PureState::basis(1, 0).unwrap())
    }

    #[test]
    fn base_estimate_contract() {
        let rho = zero_state();
        let mut rng = SimRng::from_seed(1);
        let s = 10_000;
        let mut within = 0;
        for _ in 0..100 {
            let m = tomography_base(&rho, s, &mut rng).unwrap();
            assert!(is_hermitian(&m.matrix, 1e-12));
            assert_eq!(m.copies, 4 * s as u128);
            if m.error_sq(&rho).unwrap() <= 2.0 * 2.0 / s as f64 {
                within += 1;
            }
        }
        assert!(within >= 95, "{within}");
        assert!(tomography_base(&rho, 0, &mut rng).is_err());
    }

    #[test]
    fn mean_error_at_two_qubits() {
        let mut rng = SimRng::from_seed(2);
        let rho = DensityMatrix::from_pure(&haar_sample(2, &mut rng).unwrap());
        let s = 4096;
        let trials = 200;
        let mean: f64 = (0..trials)
            .map(|_| tomography_base(&rho, s, &mut rng).unwrap().error_sq(&rho).unwrap())
            .sum::<f64>()
            / trials as f64;
        assert!(mean <= 1.5 * 4.0 / s as f64, "{mean}");
    }

    #[test]
    fn estimator_is_unbiased() {
        let mut rng = SimRng::from_seed(3);
        let a = haar_sample(1, &mut rng).unwrap().outer();
        let b = haar_sample(1, &mut rng).unwrap().outer();
        let rho = DensityMatrix::new(a * C64::new(0.7, 0.0) + b * C64::new(0.3, 0.0)).unwrap();
        let s = 64;
        let runs: Vec<CMatrix> = (0..2000)
            .map(|_| tomography_base(&rho, s, &mut rng).unwrap().matrix)
            .collect();
        for r in 0..2 {
            for c in 0..2 {
                for part in [|z: C64| z.re, |z: C64| z.im] {
                    let vals: Vec<f64> = runs.iter().map(|m| part(m[(r, c)])).collect();
                    let mean = vals.iter().sum::<f64>() / 2000.0;
                    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 1999.0;
                    let se = (var / 2000.0).sqrt();
                    let target = part(rho.matrix()[(r, c)]);
                    // 4σ per component keeps the family-wise false alarm rate below 1e-3.
                    assert!((mean - target).abs() <= 4.0 * se + 1e-12, "({r},{c}) {mean} vs {target}");
                }
            }
        }
    }

    #[test]
    fn markov_tail() {
        let mut rng = SimRng::from_seed(4);
        let rho = DensityMatrix::from_pure(&haar_sample(2, &mut rng).unwrap());
        let s = 256;
        let eps = 4.0 / s as f64;
        let trials = 400;
        let far = (0..trials)
            .filter(|_| tomography_base(&rho, 4 * s, &mut rng).unwrap().error_sq(&rho).unwrap() >= eps)
            .count();
        assert!((far as f64 / trials as f64) <= 0.25 + 0.05);
    }

    #[test]
    fn boosted_success_rate() {
        let rho = zero_state();
        let budget = TomographyBudget::new(2, 2048, 16).unwrap();
        let mut rng = SimRng::from_seed(5);
        let mut good = 0;
        for _ in 0..100 {
            let m = tomography_boosted(&rho, &budget, &mut rng).unwrap();
            assert!(!m.aborted);
            if m.error_sq(&rho).unwrap() <= 9.0 * 2.0 / 2048.0 {
                good += 1;
            }
        }
        assert!(good >= 99);
    }

    #[test]
    fn analytic_mode_is_exact_and_boosted_picks_first_run() {
        let mut rng = SimRng::from_seed(6);
        let rho = DensityMatrix::from_pure(&haar_sample(2, &mut rng).unwrap());
        let budget = TomographyBudget::new(4, 64, 5).unwrap();
        let m = tomograph_state(&rho, &budget, TomographyMode::Analytic, &mut rng).unwrap();
        assert_eq!(&m.matrix, rho.matrix());
        let same = vec![rho.matrix().clone(); 5];
        assert_eq!(majority_cluster(&same, 0.0).unwrap(), Some(0));
    }

    struct Alternating;

    impl EstimateSource for Alternating {
        fn dim(&self) -> usize {
            2
        }

        fn estimate(&self, run: usize, _s: u64, _rng: &mut SimRng) -> Result<CMatrix> {
            let mut m = CMatrix::zeros(2, 2);
            m[(run % 2, run % 2)] = C64::new(1.0, 0.0);
            Ok(m)
        }
    }

    #[test]
    fn split_estimates_abort() {
        let budget = TomographyBudget::new(2, 1024, 8).unwrap();
        let mut rng = SimRng::from_seed(7);
        let m = tomography_boosted(&Alternating, &budget, &mut rng).unwrap();
        assert!(m.aborted);
        assert_eq!(m.matrix, CMatrix::zeros(2, 2));
    }
}

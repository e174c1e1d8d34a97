//! Unconditional distinguishers against generators with short outputs.
//!
//! Two cases. If outputs are noticeably mixed, repeated SWAP tests catch
//! them while never rejecting a pure (Haar) input. If outputs are pure, at
//! most `2^λ` states `|ψ_k⟩^{⊗t}` span a subspace of dimension `≤ 2^λ`
//! inside the symmetric subspace, and projecting onto that span accepts
//! generator outputs with certainty but Haar states with probability at
//! most `2^λ / C(2^n + t − 1, t)`.
//!
//! The projector is never formed: with `Φ` the matrix whose columns are
//! `|ψ_k⟩^{⊗t}`, acceptance is `v† (Φ†Φ)⁺ v` where `v = Φ†|θ⟩^{⊗t}` and
//! both factors reduce to powers of base-dimension inner products.

use nalgebra::DVector;
use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{AbortModel, Generator};
use crate::prf::{BitString, PrfKey};
use crate::quantum::{
    frobenius_norm_sq, haar_sample, hermitian_pseudo_inverse, sample_binomial, swap_test_accept_prob,
    sym_dim, CMatrix, PureState, C64,
};
use crate::rng::SimRng;

/// Relative eigenvalue cutoff of the Gram pseudo-inverse.
pub const GRAM_RANK_CUTOFF: f64 = 1e-8;
/// Largest allowed `‖G G⁺ G − G‖_F`.
pub const GRAM_RESIDUAL_TOLERANCE: f64 = 1e-6;
/// Largest key length whose key space the Gram attack enrolls.
pub const MAX_ENROLLED_KEY_BITS: usize = 14;

/// Smallest `t ≤ max_t` with `6 · 2^λ ≤ C(2^n + t − 1, t)`.
pub fn choose_t(lambda: usize, n: usize, max_t: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::domain("choose_t needs n ≥ 1"));
    }
    let target = BigUint::from(6u32) << lambda;
    let n_dim = 1usize
        .checked_shl(n as u32)
        .filter(|_| n < usize::BITS as usize)
        .ok_or_else(|| Error::domain(format!("n = {n} too large")))?;
    (1..=max_t)
        .find(|&t| sym_dim(n_dim, t) >= target)
        .ok_or_else(|| Error::Infeasible(format!("no t ≤ {max_t} satisfies the rank inequality")))
}

/// Projection onto the span of `{|ψ_k⟩^{⊗t}}` through the Gram matrix.
#[derive(Clone, Debug)]
pub struct GramOracle {
    states: Vec<PureState>,
    t: usize,
    gram: CMatrix,
    pinv: CMatrix,
    rank: usize,
    residual: f64,
}

impl GramOracle {
    pub fn new(states: Vec<PureState>, t: usize) -> Result<Self> {
        if states.is_empty() || t == 0 {
            return Err(Error::domain("Gram oracle needs at least one state and t ≥ 1"));
        }
        let dim = states[0].dim();
        if let Some(bad) = states.iter().find(|s| s.dim() != dim) {
            return Err(Error::shape(dim, bad.dim()));
        }
        let k = states.len();
        let mut gram = CMatrix::zeros(k, k);
        for i in 0..k {
            for j in i..k {
                let g = states[i].inner(&states[j])?.powu(t as u32);
                gram[(i, j)] = g;
                gram[(j, i)] = g.conj();
            }
        }
        let (pinv, rank) = hermitian_pseudo_inverse(&gram, GRAM_RANK_CUTOFF)?;
        let residual = frobenius_norm_sq(&(&gram * &pinv * &gram - &gram)).sqrt();
        if residual > GRAM_RESIDUAL_TOLERANCE {
            return Err(Error::Numeric(format!("Gram pseudo-inverse residual {residual:e}")));
        }
        Ok(Self {
            states,
            t,
            gram,
            pinv,
            rank,
            residual,
        })
    }

    /// Enrolls the PRS output of every key of `generator`.
    pub fn from_generator(generator: &Generator, t: usize) -> Result<Self> {
        let lambda = generator.params.lambda;
        if lambda > MAX_ENROLLED_KEY_BITS {
            return Err(Error::Infeasible(format!(
                "enrolling 2^{lambda} keys exceeds the limit of 2^{MAX_ENROLLED_KEY_BITS}"
            )));
        }
        let states = (0..1u64 << lambda)
            .into_par_iter()
            .map(|i| generator.prs(&PrfKey::from_index(lambda, i)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(states, t)
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn gram(&self) -> &CMatrix {
        &self.gram
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    /// `‖P |θ⟩^{⊗t}‖²`.
    pub fn accept(&self, theta: &PureState) -> Result<f64> {
        let v = self
            .states
            .iter()
            .map(|s| s.inner(theta).map(|z| z.powu(self.t as u32)))
            .collect::<Result<Vec<C64>>>()?;
        let v = DVector::from_vec(v);
        Ok(v.dotc(&(&self.pinv * &v)).re)
    }
}

/// Which attack to mount.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AttackKind {
    /// Symmetric-subspace projection with `t` copies.
    Gram { t: usize },
    /// `copies / 2` SWAP tests; reject if any fails.
    Purity { copies: usize },
}

/// Which ensemble plays the role of the generator side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ensemble {
    Generator,
    Haar,
}

/// Outcome of a distinguishing experiment against Haar-random inputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackReport {
    pub attack: AttackKind,
    pub lambda: usize,
    pub n: usize,
    pub t: usize,
    pub accept_gen: f64,
    pub accept_haar: f64,
    pub advantage: f64,
    /// 95% confidence radius of the advantage.
    pub ci95: f64,
    pub gen_std_err: f64,
    pub haar_std_err: f64,
    pub trials: usize,
    pub seed: u64,
}

fn mean_and_std_err(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn build_report(
    attack: AttackKind,
    generator: &Generator,
    t: usize,
    gen_side: &[f64],
    haar_side: &[f64],
    seed: u64,
) -> AttackReport {
    let (accept_gen, gen_std_err) = mean_and_std_err(gen_side);
    let (accept_haar, haar_std_err) = mean_and_std_err(haar_side);
    AttackReport {
        attack,
        lambda: generator.params.lambda,
        n: generator.params.n,
        t,
        accept_gen,
        accept_haar,
        advantage: (accept_gen - accept_haar).abs(),
        ci95: 1.96 * (gen_std_err.powi(2) + haar_std_err.powi(2)).sqrt(),
        gen_std_err,
        haar_std_err,
        trials: gen_side.len(),
        seed,
    }
}

/// Copies used by default against outputs of impurity `κ`: `⌈4/κ⌉` SWAP pairs.
pub fn default_purity_copies(kappa: f64) -> Result<usize> {
    if !(kappa > 0.0 && kappa <= 1.0) {
        return Err(Error::domain(format!("impurity κ = {kappa} must lie in (0, 1]")));
    }
    Ok(2 * (4.0 / kappa).ceil() as usize)
}

/// Exact impurity `1 − Tr ρ²` of the abort-wrapped output on `(key, x)`.
pub fn output_impurity(generator: &Generator, model: &AbortModel, key: &PrfKey, x: &BitString) -> Result<f64> {
    Ok(1.0 - generator.abort_wrapped(key, x, model)?.traced.purity())
}

/// One purity-attack trial: returns `(analytic rejection, sampled rejection)`.
fn purity_trial(accept: f64, pairs: usize, rng: &mut SimRng) -> Result<(f64, f64)> {
    let analytic = 1.0 - accept.powi(pairs as i32);
    let passed = sample_binomial(accept, pairs as u64, rng)?;
    Ok((analytic, if passed == pairs as u64 { 0.0 } else { 1.0 }))
}

/// Outcome of the SWAP-test attack with both sampled and analytic rejection rates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PurityReport {
    pub report: AttackReport,
    pub kappa_mean: f64,
    pub reject_gen_sampled: f64,
    pub reject_gen_analytic: f64,
    pub reject_haar_sampled: f64,
    pub reject_haar_analytic: f64,
}

/// SWAP-test attack on the abort-wrapped generator at input `x = 0^d`.
///
/// Each trial draws a fresh key, runs `⌊copies/2⌋` SWAP tests and rejects if
/// any fails. Acceptance in the report is the probability of not rejecting.
pub fn purity_attack(
    generator: &Generator,
    model: &AbortModel,
    copies: usize,
    trials: usize,
    seed: u64,
) -> Result<PurityReport> {
    let pairs = copies / 2;
    if pairs == 0 {
        return Err(Error::domain("purity attack needs at least two copies"));
    }
    model.validate()?;
    let master = SimRng::from_seed(seed);
    let x = BitString::zeros(generator.params.d);
    let rows = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = master.fork(i as u64);
            let key = PrfKey::random(generator.params.lambda, &mut rng);
            let out = generator.abort_wrapped(&key, &x, model)?;
            let kappa = 1.0 - out.traced.purity();
            let (gen_analytic, gen_sampled) = purity_trial(swap_test_accept_prob(&out.traced), pairs, &mut rng)?;
            // Haar inputs are pure, so each SWAP test accepts with probability exactly 1.
            let (haar_analytic, haar_sampled) = purity_trial(1.0, pairs, &mut rng)?;
            Ok([kappa, gen_analytic, gen_sampled, haar_analytic, haar_sampled])
        })
        .collect::<Result<Vec<[f64; 5]>>>()?;
    let col = |j: usize| rows.iter().map(|r| r[j]).collect::<Vec<f64>>();
    let mean = |j: usize| col(j).iter().sum::<f64>() / trials.max(1) as f64;
    let gen_accept: Vec<f64> = col(2).iter().map(|r| 1.0 - r).collect();
    let haar_accept: Vec<f64> = col(4).iter().map(|r| 1.0 - r).collect();
    Ok(PurityReport {
        report: build_report(AttackKind::Purity { copies }, generator, copies, &gen_accept, &haar_accept, seed),
        kappa_mean: mean(0),
        reject_gen_sampled: mean(2),
        reject_gen_analytic: mean(1),
        reject_haar_sampled: mean(4),
        reject_haar_analytic: mean(3),
    })
}

/// Gram attack: exact per-sample acceptance averaged over `trials` draws
/// from each side.
pub fn gram_experiment(
    oracle: &GramOracle,
    generator: &Generator,
    left: Ensemble,
    trials: usize,
    seed: u64,
) -> Result<AttackReport> {
    let master = SimRng::from_seed(seed);
    let n = generator.params.n;
    let rows = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = master.fork(i as u64);
            let left_state = match left {
                Ensemble::Generator => generator.prs(&PrfKey::random(generator.params.lambda, &mut rng))?,
                Ensemble::Haar => haar_sample(n, &mut rng)?,
            };
            let theta = haar_sample(n, &mut rng)?;
            Ok((oracle.accept(&left_state)?, oracle.accept(&theta)?))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    let (gen_side, haar_side): (Vec<f64>, Vec<f64>) = rows.into_iter().unzip();
    Ok(build_report(
        AttackKind::Gram { t: oracle.t() },
        generator,
        oracle.t(),
        &gen_side,
        &haar_side,
        seed,
    ))
}

/// Runs either attack of `kind` with `left` against Haar inputs.
pub fn run_distinguishing_experiment(
    generator: &Generator,
    model: &AbortModel,
    kind: AttackKind,
    left: Ensemble,
    trials: usize,
    seed: u64,
) -> Result<AttackReport> {
    match kind {
        AttackKind::Gram { t } => {
            if *model != AbortModel::NEVER {
                return Err(Error::domain("the subspace attack applies to pure outputs only"));
            }
            let oracle = GramOracle::from_generator(generator, t)?;
            gram_experiment(&oracle, generator, left, trials, seed)
        }
        AttackKind::Purity { copies } => match left {
            Ensemble::Generator => Ok(purity_attack(generator, model, copies, trials, seed)?.report),
            Ensemble::Haar => {
                // Pure inputs pass every SWAP test.
                let ones = vec![1.0; trials];
                Ok(build_report(kind, generator, copies, &ones, &ones, seed))
            }
        },
    }
}

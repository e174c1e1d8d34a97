//! Verifiable tomography over two channel families.
//!
//! First family: `(P_x, k, x, b) ↦ (I ⊗ P_x^b) Ĝ(k, x) (I ⊗ P_x^b)` on
//! `n + 1` qubits, where `Ĝ` is the abort-wrapped generator before tracing.
//! Second family: `(k, i, b) ↦ G(k, i‖b)` on `n` qubits.
//!
//! `Verify` tomographs the channel output itself and accepts when the
//! claimed matrix is within `4 · 9N/s` of its own estimate: both are within
//! `9N/s` of the true state with overwhelming probability.

use serde::{Deserialize, Serialize};

use super::{tomograph_state, Tomograph, TomographyMode};
use crate::error::{Error, Result};
use crate::generators::{abort_state, AbortModel, Generator};
use crate::prf::{BitString, PrfKey};
use crate::quantum::{frobenius_sq, CMatrix, DensityMatrix, PauliString};
use crate::rng::SimRng;

/// Factor by which desk presets shrink the per-observable copy count.
pub const DESK_DIVISOR: u64 = 4;

/// Copy accounting for boosted tomography: `L = 4 s N² λ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TomographyBudget {
    pub n_dim: usize,
    pub s: u64,
    pub lambda: usize,
    pub copies: u128,
}

impl TomographyBudget {
    pub fn new(n_dim: usize, s: u64, lambda: usize) -> Result<Self> {
        if n_dim == 0 || s == 0 || lambda == 0 {
            return Err(Error::domain("tomography budget needs N, s, λ ≥ 1"));
        }
        let copies = 4u128
            .checked_mul(s as u128)
            .and_then(|v| v.checked_mul(n_dim as u128 * n_dim as u128))
            .and_then(|v| v.checked_mul(lambda as u128))
            .ok_or_else(|| Error::domain("copy budget overflows u128"))?;
        Ok(Self {
            n_dim,
            s,
            lambda,
            copies,
        })
    }

    /// `ε = N/s`.
    pub fn epsilon(&self) -> f64 {
        self.n_dim as f64 / self.s as f64
    }

    /// `9N/s`, the boosted error guarantee.
    pub fn guarantee(&self) -> f64 {
        9.0 * self.epsilon()
    }
}

/// Which channel family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Instantiation {
    First,
    Second,
}

impl Instantiation {
    /// Output dimension for `n`-qubit generator states.
    pub fn dim(self, n: usize) -> usize {
        match self {
            Instantiation::First => 1 << (n + 1),
            Instantiation::Second => 1 << n,
        }
    }

    /// Per-observable copies at full scale.
    pub fn paper_s(self, n: usize) -> u64 {
        match self {
            Instantiation::First => 6561 << (n + 1),
            Instantiation::Second => 1 << (n + 9),
        }
    }

    /// Total copy count as written for each family.
    pub fn paper_copies(self, n: usize, lambda: usize) -> u128 {
        match self {
            Instantiation::First => 6561u128 * (1u128 << (3 * (n + 1) + 2)) * lambda as u128,
            Instantiation::Second => (1u128 << (3 * n + 11)) * lambda as u128,
        }
    }
}

/// Where the first family's abort check reads the `⊥` weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbortCheck {
    /// `⟨⊥|(I ⊗ P_x^b) M (I ⊗ P_x^b)|⊥⟩`.
    Conjugated,
    /// `⟨⊥|M|⊥⟩`.
    Raw,
}

/// Thresholds and budgets of one verifiable-tomography scheme.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifiableParams {
    pub instantiation: Instantiation,
    pub n: usize,
    pub budget: TomographyBudget,
    pub mode: TomographyMode,
    pub abort_check: AbortCheck,
    /// `Valid` iff `‖M − M̂‖_F² ≤ accept_threshold`.
    pub accept_threshold: f64,
    /// First family only: `Invalid` if the `⊥` weight exceeds this.
    pub abort_threshold: f64,
    pub desk: bool,
}

impl VerifiableParams {
    fn build(instantiation: Instantiation, n: usize, lambda: usize, s: u64, desk: bool) -> Result<Self> {
        let budget = TomographyBudget::new(instantiation.dim(n), s, lambda)?;
        Ok(Self {
            instantiation,
            n,
            budget,
            mode: TomographyMode::Sampled,
            abort_check: AbortCheck::Conjugated,
            accept_threshold: 4.0 * budget.guarantee(),
            abort_threshold: 1.0 / 9.0,
            desk,
        })
    }

    /// Full-scale constants; asserts the copy identity `L = 4sN²λ`.
    pub fn paper(instantiation: Instantiation, n: usize, lambda: usize) -> Result<Self> {
        let p = Self::build(instantiation, n, lambda, instantiation.paper_s(n), false)?;
        if p.budget.copies != instantiation.paper_copies(n, lambda) {
            return Err(Error::Numeric(format!(
                "copy identity fails: 4sN²λ = {} but L = {}",
                p.budget.copies,
                instantiation.paper_copies(n, lambda)
            )));
        }
        Ok(p)
    }

    /// Full-scale `s` divided by `divisor`, with thresholds rescaled to the new `9N/s`.
    pub fn desk(instantiation: Instantiation, n: usize, lambda: usize, divisor: u64) -> Result<Self> {
        if divisor == 0 {
            return Err(Error::domain("desk divisor must be at least 1"));
        }
        let s = (instantiation.paper_s(n) / divisor).max(1);
        Self::build(instantiation, n, lambda, s, true)
    }

    pub fn with_mode(mut self, mode: TomographyMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_abort_check(mut self, check: AbortCheck) -> Self {
        self.abort_check = check;
        self
    }

    fn check_dim(&self, m: &Tomograph) -> Result<()> {
        if m.dim() != self.budget.n_dim {
            return Err(Error::shape(self.budget.n_dim, m.dim()));
        }
        Ok(())
    }
}

/// Outcome of `Verify`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Valid,
    Invalid,
}

impl Verdict {
    pub fn is_valid(self) -> bool {
        self == Verdict::Valid
    }
}

/// Input `(P_x, k, x, b)` of the first channel family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelFirstInput {
    pub pauli: PauliString,
    pub key: PrfKey,
    pub x: BitString,
    pub b: bool,
}

/// Input `(k, i, b)` of the second channel family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelSecondInput {
    pub key: PrfKey,
    pub i: BitString,
    pub b: bool,
}

/// First-family scheme over a `(λ, d, n)` generator with recognizable abort.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FirstScheme {
    pub generator: Generator,
    pub model: AbortModel,
    pub params: VerifiableParams,
}

impl FirstScheme {
    pub fn new(generator: Generator, model: AbortModel, params: VerifiableParams) -> Result<Self> {
        if params.instantiation != Instantiation::First || params.n != generator.params.n {
            return Err(Error::domain("first-family parameters do not match the generator"));
        }
        model.validate()?;
        Ok(Self {
            generator,
            model,
            params,
        })
    }

    /// `(I ⊗ P_x^b) Ĝ(k, x) (I ⊗ P_x^b)`.
    pub fn channel(&self, input: &ChannelFirstInput) -> Result<DensityMatrix> {
        if input.pauli.n() != self.generator.params.n {
            return Err(Error::shape(self.generator.params.n, input.pauli.n()));
        }
        let out = self.generator.abort_wrapped(&input.key, &input.x, &self.model)?;
        if input.b {
            input.pauli.with_leading_identity(1).apply_density(&out.pre_trace)
        } else {
            Ok(out.pre_trace)
        }
    }

    pub fn tomography(&self, input: &ChannelFirstInput, rng: &mut SimRng) -> Result<Tomograph> {
        tomograph_state(&self.channel(input)?, &self.params.budget, self.params.mode, rng)
    }

    /// Weight of `|⊥⟩` that the abort check reads from `M`.
    pub fn abort_weight(&self, input: &ChannelFirstInput, m: &CMatrix) -> Result<f64> {
        let n = self.generator.params.n;
        let view = match (self.params.abort_check, input.b) {
            (AbortCheck::Conjugated, true) => input.pauli.with_leading_identity(1).conjugate_matrix(m)?,
            _ => m.clone(),
        };
        let bot = 1usize << n;
        let _ = abort_state(n);
        Ok(view[(bot, bot)].re)
    }

    pub fn verify(&self, input: &ChannelFirstInput, m: &Tomograph, rng: &mut SimRng) -> Result<Verdict> {
        self.params.check_dim(m)?;
        if m.aborted || self.abort_weight(input, &m.matrix)? > self.params.abort_threshold {
            return Ok(Verdict::Invalid);
        }
        let reference = self.tomography(input, rng)?;
        if reference.aborted {
            return Ok(Verdict::Invalid);
        }
        let dist = frobenius_sq(&m.matrix, &reference.matrix)?;
        Ok(if dist <= self.params.accept_threshold {
            Verdict::Valid
        } else {
            Verdict::Invalid
        })
    }
}

/// Second-family scheme over a generator whose input is `i‖b` (`d + 1` bits).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecondScheme {
    pub generator: Generator,
    pub model: AbortModel,
    pub params: VerifiableParams,
}

impl SecondScheme {
    pub fn new(generator: Generator, model: AbortModel, params: VerifiableParams) -> Result<Self> {
        if params.instantiation != Instantiation::Second || params.n != generator.params.n {
            return Err(Error::domain("second-family parameters do not match the generator"));
        }
        if generator.params.d < 2 {
            return Err(Error::domain("second family needs a generator with at least 2 input bits"));
        }
        model.validate()?;
        Ok(Self {
            generator,
            model,
            params,
        })
    }

    /// Index length `d` (the generator reads `d + 1` input bits).
    pub fn index_bits(&self) -> usize {
        self.generator.params.d - 1
    }

    /// `G(k, i‖b)`.
    pub fn channel(&self, input: &ChannelSecondInput) -> Result<DensityMatrix> {
        if input.i.len() != self.index_bits() {
            return Err(Error::shape(self.index_bits(), input.i.len()));
        }
        let mut x = input.i.clone();
        x.push(input.b);
        Ok(self.generator.abort_wrapped(&input.key, &x, &self.model)?.traced)
    }

    pub fn tomography(&self, input: &ChannelSecondInput, rng: &mut SimRng) -> Result<Tomograph> {
        tomograph_state(&self.channel(input)?, &self.params.budget, self.params.mode, rng)
    }

    pub fn verify(&self, input: &ChannelSecondInput, m: &Tomograph, rng: &mut SimRng) -> Result<Verdict> {
        self.params.check_dim(m)?;
        if m.aborted {
            return Ok(Verdict::Invalid);
        }
        let reference = self.tomography(input, rng)?;
        if reference.aborted {
            return Ok(Verdict::Invalid);
        }
        let dist = frobenius_sq(&m.matrix, &reference.matrix)?;
        Ok(if dist <= self.params.accept_threshold {
            Verdict::Valid
        } else {
            Verdict::Invalid
        })
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{AbortModel, Generator, GeneratorParams};
use crate::prf::PrfVariant;
use crate::tomography::{
    FirstScheme, Instantiation, SecondScheme, TomographyMode, VerifiableParams, DESK_DIVISOR,
};

/// `⌈log₂ v⌉` for `v ≥ 1`.
fn ceil_log2(v: f64) -> usize {
    v.log2().ceil().max(0.0) as usize
}

/// `(d, n)` of the first tomography instantiation: `d = ⌈log λ / log log λ⌉`, `n = ⌈3 log λ⌉`.
pub fn first_instantiation_dims(lambda: usize) -> Result<(usize, usize)> {
    if lambda < 6 {
        return Err(Error::domain("log λ / log log λ needs λ ≥ 6 to be meaningful"));
    }
    let l = (lambda as f64).log2();
    Ok(((l / l.log2()).ceil() as usize, (3.0 * l).ceil() as usize))
}

/// `(d, n)` of the second tomography instantiation: `d = n = ⌈log λ⌉`.
pub fn second_instantiation_dims(lambda: usize) -> Result<(usize, usize)> {
    if lambda < 2 {
        return Err(Error::domain("second instantiation needs λ ≥ 2"));
    }
    let v = ceil_log2(lambda as f64);
    Ok((v, v))
}

/// Which protocol a parameter set drives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolKind {
    Commitment,
    OneTimePad,
}

/// Sizes and tomography settings shared by both parties of a protocol run.
///
/// For the commitment `d` is the number of Pauli blocks (`m = 2^d·n`); for
/// the one-time pad `d` is the index length and messages have at most `2^d` bits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolParams {
    pub kind: ProtocolKind,
    pub lambda: usize,
    pub d: usize,
    pub n: usize,
    pub m: usize,
    pub verifiable: VerifiableParams,
    pub variant: PrfVariant,
    /// Set when `m < 3λ`, where the binding bound says nothing.
    pub binding_relaxed: bool,
}

impl ProtocolParams {
    fn build(
        kind: ProtocolKind,
        lambda: usize,
        d: usize,
        n: usize,
        verifiable: VerifiableParams,
        variant: PrfVariant,
    ) -> Result<Self> {
        if lambda == 0 || d == 0 || n == 0 || d >= 16 {
            return Err(Error::domain("protocol needs λ, d, n ≥ 1 and d < 16"));
        }
        let m = n << d;
        Ok(Self {
            kind,
            lambda,
            d,
            n,
            m,
            verifiable,
            variant,
            binding_relaxed: kind == ProtocolKind::Commitment && m < 3 * lambda,
        })
    }

    /// Full-scale commitment: `n = ⌈3 log λ⌉`, `d = ⌈log(3λ/n)⌉ ≥ 1`, so `m ≥ 3λ`.
    pub fn commitment_paper(lambda: usize, variant: PrfVariant) -> Result<Self> {
        let (_, n) = first_instantiation_dims(lambda)?;
        let d = ceil_log2(3.0 * lambda as f64 / n as f64).max(1);
        let v = VerifiableParams::paper(Instantiation::First, n, lambda)?;
        Self::build(ProtocolKind::Commitment, lambda, d, n, v, variant)
    }

    /// Reduced-`s` commitment with explicit `d` and `n`; may violate `m ≥ 3λ`.
    pub fn commitment_desk(lambda: usize, d: usize, n: usize, mode: TomographyMode, variant: PrfVariant) -> Result<Self> {
        let v = VerifiableParams::desk(Instantiation::First, n, lambda, DESK_DIVISOR)?.with_mode(mode);
        Self::build(ProtocolKind::Commitment, lambda, d, n, v, variant)
    }

    /// Full-scale one-time pad with `d = n = ⌈log λ⌉`.
    pub fn otp_paper(lambda: usize, variant: PrfVariant) -> Result<Self> {
        let (d, n) = second_instantiation_dims(lambda)?;
        let v = VerifiableParams::paper(Instantiation::Second, n, lambda)?;
        Self::build(ProtocolKind::OneTimePad, lambda, d, n, v, variant)
    }

    pub fn otp_desk(lambda: usize, d: usize, n: usize, mode: TomographyMode, variant: PrfVariant) -> Result<Self> {
        let v = VerifiableParams::desk(Instantiation::Second, n, lambda, DESK_DIVISOR)?.with_mode(mode);
        Self::build(ProtocolKind::OneTimePad, lambda, d, n, v, variant)
    }

    pub fn with_mode(mut self, mode: TomographyMode) -> Self {
        self.verifiable = self.verifiable.with_mode(mode);
        self
    }

    /// Copies consumed per tomograph (`L`).
    pub fn copies(&self) -> u128 {
        self.verifiable.budget.copies
    }

    /// Largest message length of the one-time pad.
    pub fn message_bits(&self) -> usize {
        1 << self.d
    }

    /// `(729/542)^{2^d} · 2^{2λ − m}`.
    pub fn binding_envelope(&self) -> f64 {
        (729.0f64 / 542.0).powi(1 << self.d) * 2f64.powi(2 * self.lambda as i32 - self.m as i32)
    }

    fn expect(&self, kind: ProtocolKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::domain(format!("parameters are for {:?}, not {kind:?}", self.kind)));
        }
        Ok(())
    }

    /// The first-family scheme over a `(λ, d, n)` generator.
    pub fn first_scheme(&self) -> Result<FirstScheme> {
        self.expect(ProtocolKind::Commitment)?;
        let g = Generator::new(GeneratorParams::new(self.lambda, self.d, self.n)?, self.variant);
        FirstScheme::new(g, AbortModel::NEVER, self.verifiable)
    }

    /// The second-family scheme over a `(λ, d + 1, n)` generator.
    pub fn second_scheme(&self) -> Result<SecondScheme> {
        self.expect(ProtocolKind::OneTimePad)?;
        let g = Generator::new(GeneratorParams::new(self.lambda, self.d + 1, self.n)?, self.variant);
        SecondScheme::new(g, AbortModel::NEVER, self.verifiable)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_commitment_meets_size_requirement() {
        for lambda in [6, 8, 16, 32, 64, 128, 256, 1024] {
            let p = ProtocolParams::commitment_paper(lambda, PrfVariant::HmacSha256).unwrap();
            assert!(p.m >= 3 * lambda, "λ={lambda}");
            assert!(!p.binding_relaxed);
            assert!(p.d >= 1);
            // n + 1 qubit channel: L = 3^8 · 2^{3n+5} · λ.
            assert_eq!(p.copies(), 6561 * (1u128 << (3 * p.n + 5)) * lambda as u128);
            assert!(p.binding_envelope() <= (729.0f64 / 542.0).powi(1 << p.d) * 2f64.powi(-(lambda as i32)));
        }
        let p = ProtocolParams::commitment_paper(64, PrfVariant::HmacSha256).unwrap();
        assert_eq!((p.n, p.d, p.m), (18, 4, 288));
    }

    #[test]
    fn instantiation_dims() {
        assert_eq!(first_instantiation_dims(64).unwrap(), (3, 18));
        assert_eq!(first_instantiation_dims(16).unwrap(), (2, 12));
        assert!(first_instantiation_dims(4).is_err());
        assert_eq!(second_instantiation_dims(8).unwrap(), (3, 3));
        assert_eq!(second_instantiation_dims(9).unwrap(), (4, 4));
        let p = ProtocolParams::otp_paper(64, PrfVariant::HmacSha256).unwrap();
        assert_eq!(p.copies(), (1u128 << (3 * 6 + 11)) * 64);
        assert_eq!(p.message_bits(), 64);
    }

    #[test]
    fn desk_presets() {
        let c = ProtocolParams::commitment_desk(8, 1, 3, TomographyMode::Analytic, PrfVariant::Mixer { seed: 1 }).unwrap();
        assert_eq!(c.m, 6);
        assert!(c.binding_relaxed);
        assert!(c.first_scheme().is_ok());
        assert!(c.second_scheme().is_err());
        let o = ProtocolParams::otp_desk(8, 3, 4, TomographyMode::Sampled, PrfVariant::Mixer { seed: 1 }).unwrap();
        assert!(!o.binding_relaxed);
        assert_eq!(o.second_scheme().unwrap().index_bits(), 3);
    }
}

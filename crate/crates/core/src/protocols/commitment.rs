//! Commitment with a classical transcript: the receiver sends a random
//! Pauli `P = ⊗_x P_x`, the committer returns one tomograph per `x` of the
//! first-family channel at `(P_x, k, x, b)`, and opens with `(k, b)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::params::{ProtocolKind, ProtocolParams};
use super::wire::digest;
use crate::error::{Error, Result};
use crate::prf::{BitString, PrfKey};
use crate::quantum::PauliString;
use crate::rng::SimRng;
use crate::tomography::{ChannelFirstInput, FirstScheme, Tomograph, TomographyMode, Verdict};

/// Largest key length the extractor and binding search enumerate.
pub const MAX_EXTRACTOR_KEY_BITS: usize = 14;

/// `δ` of the overlap event that every double opening implies.
pub const DOUBLE_OPENING_OVERLAP: f64 = 542.0 / 729.0;

/// Everything the receiver holds after the commit phase.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommitmentTranscript {
    pub params: ProtocolParams,
    pub pauli: PauliString,
    /// `M_x` in order of `x` read as a `d`-bit integer.
    pub tomographs: Vec<Tomograph>,
}

impl CommitmentTranscript {
    pub fn digest(&self) -> [u8; 32] {
        digest(self)
    }

    fn check_shape(&self) -> Result<Vec<PauliString>> {
        let blocks = 1usize << self.params.d;
        if self.pauli.n() != self.params.m {
            return Err(Error::shape(self.params.m, self.pauli.n()));
        }
        if self.tomographs.len() != blocks {
            return Err(Error::shape(blocks, self.tomographs.len()));
        }
        self.pauli.blocks(self.params.n)
    }
}

/// Decommitment `(k, b)`; `b` is kept as a raw byte so that out-of-range
/// openings can be represented and rejected.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Opening {
    pub key: PrfKey,
    pub b: u8,
}

/// Result of a reveal or an extraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RevealOutcome {
    Bit(bool),
    Bottom,
}

impl RevealOutcome {
    pub fn bit(self) -> Option<bool> {
        match self {
            RevealOutcome::Bit(b) => Some(b),
            RevealOutcome::Bottom => None,
        }
    }
}

fn block_input(p: &PauliString, key: &PrfKey, x: usize, d: usize, b: bool) -> ChannelFirstInput {
    ChannelFirstInput {
        pauli: p.clone(),
        key: key.clone(),
        x: BitString::from_u64(x as u64, d),
        b,
    }
}

/// Uniform `m`-qubit Pauli, phases dropped.
pub fn receiver_sample_pauli(params: &ProtocolParams, rng: &mut SimRng) -> PauliString {
    PauliString::sample(params.m, rng)
}

/// Honest commit to `b` against the challenge `pauli`. Tomographs for
/// different `x` run in parallel on forked streams.
pub fn committer_commit(
    b: bool,
    pauli: &PauliString,
    params: &ProtocolParams,
    rng: &mut SimRng,
) -> Result<(Opening, CommitmentTranscript)> {
    if params.kind != ProtocolKind::Commitment {
        return Err(Error::domain("commitment needs commitment parameters"));
    }
    let key = PrfKey::random(params.lambda, rng);
    let transcript = commit_with_key(&key, b, pauli, params, rng)?;
    Ok((Opening { key, b: b as u8 }, transcript))
}

/// Commit phase under a caller-chosen key.
pub fn commit_with_key(
    key: &PrfKey,
    b: bool,
    pauli: &PauliString,
    params: &ProtocolParams,
    rng: &mut SimRng,
) -> Result<CommitmentTranscript> {
    let scheme = params.first_scheme()?;
    let mut transcript = CommitmentTranscript {
        params: *params,
        pauli: pauli.clone(),
        tomographs: Vec::new(),
    };
    let blocks = transcript_blocks(&transcript)?;
    let master = rng.next_seed();
    let base = SimRng::from_seed(master);
    let tomographs = blocks
        .par_iter()
        .enumerate()
        .map(|(x, p)| {
            let t = scheme.tomography(&block_input(p, key, x, params.d, b), &mut base.fork(x as u64))?;
            if t.aborted {
                return Err(Error::Infeasible(format!("tomography aborted for block {x}")));
            }
            Ok(t)
        })
        .collect::<Result<Vec<_>>>()?;
    transcript.tomographs = tomographs;
    Ok(transcript)
}

fn transcript_blocks(t: &CommitmentTranscript) -> Result<Vec<PauliString>> {
    if t.pauli.n() != t.params.m {
        return Err(Error::shape(t.params.m, t.pauli.n()));
    }
    t.pauli.blocks(t.params.n)
}

/// Whether every block verifies under `(k, b)`.
fn all_blocks_valid(
    scheme: &FirstScheme,
    blocks: &[PauliString],
    t: &CommitmentTranscript,
    key: &PrfKey,
    b: bool,
    rng: &mut SimRng,
) -> Result<bool> {
    for (x, (p, m)) in blocks.iter().zip(&t.tomographs).enumerate() {
        let input = block_input(p, key, x, t.params.d, b);
        if scheme.verify(&input, m, rng)? != Verdict::Valid {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Verifier randomness derived from the transcript and opening, so reveal is
/// a function of its arguments.
fn reveal_rng(t: &CommitmentTranscript, o: &Opening) -> SimRng {
    let d = digest(&(t.digest(), o));
    SimRng::from_seed(u64::from_le_bytes(d[..8].try_into().expect("8 bytes")))
}

/// `b` iff every `M_x` verifies under `(P_x, k, x, b)`; `⊥` otherwise,
/// including malformed transcripts and openings.
pub fn reveal_verify(transcript: &CommitmentTranscript, opening: &Opening) -> RevealOutcome {
    let b = match opening.b {
        0 => false,
        1 => true,
        _ => return RevealOutcome::Bottom,
    };
    if opening.key.lambda() != transcript.params.lambda {
        return RevealOutcome::Bottom;
    }
    let Ok(blocks) = transcript.check_shape() else {
        return RevealOutcome::Bottom;
    };
    let Ok(scheme) = transcript.params.first_scheme() else {
        return RevealOutcome::Bottom;
    };
    let mut rng = reveal_rng(transcript, opening);
    match all_blocks_valid(&scheme, &blocks, transcript, &opening.key, b, &mut rng) {
        Ok(true) => RevealOutcome::Bit(b),
        _ => RevealOutcome::Bottom,
    }
}

fn extractor_scheme(transcript: &CommitmentTranscript) -> Result<(FirstScheme, Vec<PauliString>)> {
    let lambda = transcript.params.lambda;
    if lambda > MAX_EXTRACTOR_KEY_BITS {
        return Err(Error::Infeasible(format!(
            "exhaustive search over 2^{lambda} keys exceeds the cap 2^{MAX_EXTRACTOR_KEY_BITS}"
        )));
    }
    let params = transcript.params.with_mode(TomographyMode::Analytic);
    Ok((params.first_scheme()?, transcript.check_shape()?))
}

/// Exhaustive extractor: `b′` of the first `(k′, b′)` (in order `k′‖b′`)
/// under which every block verifies, `⊥` if none. Verification uses the exact
/// channel output as reference.
pub fn extractor(transcript: &CommitmentTranscript) -> Result<RevealOutcome> {
    let (scheme, blocks) = extractor_scheme(transcript)?;
    let lambda = transcript.params.lambda;
    let found = (0u64..(1u64 << (lambda + 1)))
        .into_par_iter()
        .map(|c| {
            let key = PrfKey::from_index(lambda, c >> 1);
            let b = c & 1 == 1;
            let mut rng = SimRng::from_seed(c);
            all_blocks_valid(&scheme, &blocks, transcript, &key, b, &mut rng).map(|ok| ok.then_some(b))
        })
        .find_first(|r| !matches!(r, Ok(None)));
    match found {
        None => Ok(RevealOutcome::Bottom),
        Some(Ok(Some(b))) => Ok(RevealOutcome::Bit(b)),
        Some(Ok(None)) => unreachable!("filtered by find_first"),
        Some(Err(e)) => Err(e),
    }
}

/// Result of the exhaustive key-pair search for one challenge `P`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BindingTrial {
    /// Pairs `(k0, k1)` with `|⟨ψ_{k0,x}|P_x|ψ_{k1,x}⟩|² ≥ 542/729` for all `x`.
    pub overlap_pairs: u64,
    /// Pairs for which the midpoint tomographs `(σ0_x + σ1_x)/2` open both ways.
    pub double_openings: u64,
    /// Largest over pairs of `min_x |⟨ψ_{k0,x}|P_x|ψ_{k1,x}⟩|²`.
    pub max_min_overlap: f64,
}

/// Aggregate of [`binding_search`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BindingReport {
    pub lambda: usize,
    pub d: usize,
    pub n: usize,
    pub m: usize,
    pub challenges: usize,
    pub key_pairs_per_challenge: u64,
    /// Fraction of challenges admitting an overlap pair.
    pub overlap_rate: f64,
    /// Fraction of challenges admitting a midpoint double opening.
    pub double_opening_rate: f64,
    pub envelope: f64,
    pub mean_max_min_overlap: f64,
    pub trials: Vec<BindingTrial>,
}

/// For one challenge, examine all `2^{2λ}` pairs `(k0, k1)`.
pub fn binding_trial(params: &ProtocolParams, pauli: &PauliString) -> Result<BindingTrial> {
    if params.lambda > MAX_EXTRACTOR_KEY_BITS / 2 + 1 {
        return Err(Error::Infeasible(format!(
            "pair search over 2^{} key pairs exceeds the cap",
            2 * params.lambda
        )));
    }
    let scheme = params.with_mode(TomographyMode::Analytic).first_scheme()?;
    let blocks = pauli.blocks(params.n)?;
    let keys: Vec<PrfKey> = (0..1u64 << params.lambda).map(|k| PrfKey::from_index(params.lambda, k)).collect();
    let d = params.d;
    // states[x][k] = ψ_{k,x}; masked[x][k] = P_x ψ_{k,x}
    let mut states = Vec::with_capacity(blocks.len());
    let mut masked = Vec::with_capacity(blocks.len());
    for (x, p) in blocks.iter().enumerate() {
        let xs = BitString::from_u64(x as u64, d);
        let s: Vec<_> = keys.iter().map(|k| scheme.generator.prfs(k, &xs)).collect::<Result<_>>()?;
        masked.push(s.iter().map(|v| p.apply_state(v)).collect::<Result<Vec<_>>>()?);
        states.push(s);
    }
    let rows = (0..keys.len())
        .into_par_iter()
        .map(|k0| {
            let mut row = BindingTrial {
                overlap_pairs: 0,
                double_openings: 0,
                max_min_overlap: 0.0,
            };
            for k1 in 0..keys.len() {
                let mut min = f64::INFINITY;
                for x in 0..blocks.len() {
                    min = min.min(states[x][k0].overlap_sq(&masked[x][k1])?);
                }
                row.max_min_overlap = row.max_min_overlap.max(min);
                if min >= DOUBLE_OPENING_OVERLAP {
                    row.overlap_pairs += 1;
                }
                if min > 0.5 && midpoint_opens_both(&scheme, &blocks, &keys[k0], &keys[k1], params)? {
                    row.double_openings += 1;
                }
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rows.into_iter().fold(
        BindingTrial {
            overlap_pairs: 0,
            double_openings: 0,
            max_min_overlap: 0.0,
        },
        |acc, r| BindingTrial {
            overlap_pairs: acc.overlap_pairs + r.overlap_pairs,
            double_openings: acc.double_openings + r.double_openings,
            max_min_overlap: acc.max_min_overlap.max(r.max_min_overlap),
        },
    ))
}

/// A cheating committer's best generic guess: the midpoint of the two honest
/// channel outputs. Far pairs (overlap ≤ 1/2) can never pass both checks, so
/// callers skip them.
fn midpoint_opens_both(
    scheme: &FirstScheme,
    blocks: &[PauliString],
    k0: &PrfKey,
    k1: &PrfKey,
    params: &ProtocolParams,
) -> Result<bool> {
    let mut rng = SimRng::from_seed(0);
    for (x, p) in blocks.iter().enumerate() {
        let i0 = block_input(p, k0, x, params.d, false);
        let i1 = block_input(p, k1, x, params.d, true);
        let mid = (scheme.channel(&i0)?.into_matrix() + scheme.channel(&i1)?.into_matrix()) * crate::quantum::C64::new(0.5, 0.0);
        let t = Tomograph {
            matrix: mid,
            s: params.verifiable.budget.s,
            lambda: params.lambda,
            copies: 0,
            aborted: false,
        };
        if !scheme.verify(&i0, &t, &mut rng)?.is_valid() || !scheme.verify(&i1, &t, &mut rng)?.is_valid() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exhaustive binding search over `challenges` random Paulis.
pub fn binding_search(params: &ProtocolParams, challenges: usize, seed: u64) -> Result<BindingReport> {
    let rng = SimRng::from_seed(seed);
    let trials = (0..challenges)
        .map(|c| binding_trial(params, &receiver_sample_pauli(params, &mut rng.fork(c as u64))))
        .collect::<Result<Vec<_>>>()?;
    let frac = |f: &dyn Fn(&BindingTrial) -> bool| trials.iter().filter(|t| f(t)).count() as f64 / challenges.max(1) as f64;
    Ok(BindingReport {
        lambda: params.lambda,
        d: params.d,
        n: params.n,
        m: params.m,
        challenges,
        key_pairs_per_challenge: 1u64 << (2 * params.lambda),
        overlap_rate: frac(&|t| t.overlap_pairs > 0),
        double_opening_rate: frac(&|t| t.double_openings > 0),
        envelope: params.binding_envelope(),
        mean_max_min_overlap: trials.iter().map(|t| t.max_min_overlap).sum::<f64>() / challenges.max(1) as f64,
        trials,
    })
}

/// Exact total-variation distance between the transcript-digest
/// distributions for `b = 0` and `b = 1` over all keys, at a fixed challenge.
/// Descriptive only: hiding is a computational property.
pub fn hiding_tv(params: &ProtocolParams, pauli: &PauliString) -> Result<f64> {
    if params.lambda > MAX_EXTRACTOR_KEY_BITS {
        return Err(Error::Infeasible("hiding statistic enumerates all keys".into()));
    }
    let exact = params.with_mode(TomographyMode::Analytic);
    let mut counts = std::collections::BTreeMap::<[u8; 32], (i64, i64)>::new();
    for k in 0..1u64 << params.lambda {
        let key = PrfKey::from_index(params.lambda, k);
        for b in [false, true] {
            let t = commit_with_key(&key, b, pauli, &exact, &mut SimRng::from_seed(0))?;
            let e = counts.entry(t.digest()).or_default();
            if b {
                e.1 += 1
            } else {
                e.0 += 1
            }
        }
    }
    let total = (1u64 << params.lambda) as f64;
    Ok(counts.values().map(|(a, b)| (a - b).abs() as f64).sum::<f64>() / (2.0 * total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prf::PrfVariant;
    use crate::quantum::CMatrix;

    fn desk(mode: TomographyMode) -> ProtocolParams {
        ProtocolParams::commitment_desk(8, 1, 3, mode, PrfVariant::Mixer { seed: 21 }).unwrap()
    }

    #[test]
    fn challenge_has_block_structure() {
        let p = desk(TomographyMode::Analytic);
        let mut rng = SimRng::from_seed(1);
        let pauli = receiver_sample_pauli(&p, &mut rng);
        assert_eq!(pauli.n(), 6);
        assert_eq!(pauli.blocks(p.n).unwrap().len(), 2);
    }

    #[test]
    fn analytic_round_trip_and_extraction() {
        let p = desk(TomographyMode::Analytic);
        let mut rng = SimRng::from_seed(2);
        for b in [false, true] {
            let pauli = receiver_sample_pauli(&p, &mut rng);
            let (opening, t) = committer_commit(b, &pauli, &p, &mut rng).unwrap();
            let scheme = p.first_scheme().unwrap();
            let blocks = pauli.blocks(p.n).unwrap();
            for (x, m) in t.tomographs.iter().enumerate() {
                let exact = scheme.channel(&block_input(&blocks[x], &opening.key, x, p.d, b)).unwrap();
                assert_eq!(&m.matrix, exact.matrix());
            }
            assert_eq!(reveal_verify(&t, &opening), RevealOutcome::Bit(b));
            assert_eq!(reveal_verify(&t, &Opening { b: 2, ..opening.clone() }), RevealOutcome::Bottom);
            assert_eq!(extractor(&t).unwrap(), RevealOutcome::Bit(b));
        }
    }

    #[test]
    fn sampled_round_trip_and_wrong_bit() {
        let p = desk(TomographyMode::Sampled);
        let mut rng = SimRng::from_seed(3);
        for b in [false, true] {
            let pauli = receiver_sample_pauli(&p, &mut rng);
            let (opening, t) = committer_commit(b, &pauli, &p, &mut rng).unwrap();
            assert_eq!(reveal_verify(&t, &opening), RevealOutcome::Bit(b));
            // Pure in its arguments.
            assert_eq!(reveal_verify(&t, &opening), reveal_verify(&t, &opening));
            let flipped = Opening { b: 1 - opening.b, ..opening };
            assert_eq!(reveal_verify(&t, &flipped), RevealOutcome::Bottom);
        }
    }

    #[test]
    fn garbage_transcripts_reveal_bottom() {
        let p = desk(TomographyMode::Analytic);
        let mut rng = SimRng::from_seed(4);
        let pauli = receiver_sample_pauli(&p, &mut rng);
        let (opening, mut t) = committer_commit(true, &pauli, &p, &mut rng).unwrap();
        for m in &mut t.tomographs {
            m.matrix = CMatrix::zeros(16, 16);
        }
        assert_eq!(reveal_verify(&t, &opening), RevealOutcome::Bottom);
        assert_eq!(extractor(&t).unwrap(), RevealOutcome::Bottom);
        t.tomographs.pop();
        assert_eq!(reveal_verify(&t, &opening), RevealOutcome::Bottom);
        let short_key = Opening { key: PrfKey::from_index(7, 0), b: 1 };
        assert_eq!(reveal_verify(&t, &short_key), RevealOutcome::Bottom);
    }

    #[test]
    fn extractor_cap() {
        let p = ProtocolParams::commitment_desk(15, 1, 3, TomographyMode::Analytic, PrfVariant::Mixer { seed: 1 }).unwrap();
        let t = CommitmentTranscript {
            params: p,
            pauli: PauliString::identity(6),
            tomographs: vec![],
        };
        assert!(matches!(extractor(&t), Err(Error::Infeasible(_))));
    }

    #[test]
    fn binding_search_counts_are_consistent() {
        let p = ProtocolParams::commitment_desk(4, 1, 3, TomographyMode::Analytic, PrfVariant::Mixer { seed: 9 }).unwrap();
        let report = binding_search(&p, 3, 5).unwrap();
        assert_eq!(report.key_pairs_per_challenge, 256);
        for t in &report.trials {
            // A midpoint double opening forces the overlap event.
            assert!(t.double_openings <= t.overlap_pairs);
            assert!(t.max_min_overlap <= 1.0 + 1e-12);
        }
        assert!(report.envelope > 1.0);
    }

    #[test]
    fn hiding_statistic_is_a_distance() {
        let p = ProtocolParams::commitment_desk(4, 1, 3, TomographyMode::Analytic, PrfVariant::Mixer { seed: 9 }).unwrap();
        let pauli = receiver_sample_pauli(&p, &mut SimRng::from_seed(6));
        let tv = hiding_tv(&p, &pauli).unwrap();
        assert!((0.0..=1.0).contains(&tv));
    }
}

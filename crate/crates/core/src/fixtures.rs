//! Frozen regression artifacts: PRF vectors, generator state vectors and a
//! commitment transcript digest, all derived from fixed seeds.
//!
//! State files hold a little-endian `u64` dimension followed by the
//! amplitudes as `(re, im)` little-endian `f64` pairs.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::generators::{Generator, GeneratorParams};
use crate::prf::{format_vectors, parse_vectors, prf_eval, BitString, PrfKey, PrfSpec, PrfVariant, PrfVector};
use crate::protocols::{run_commitment_session, ProtocolParams};
use crate::quantum::{PureState, C64};
use crate::rng::SimRng;
use crate::tomography::TomographyMode;

pub const FIXTURE_SEED: u64 = 0x5eed_2024;
pub const FIXTURE_MIXER: PrfVariant = PrfVariant::Mixer { seed: 0x00c0_ffee };
const VECTOR_LAMBDA: usize = 16;

pub fn encode_state(psi: &PureState) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + 16 * psi.dim());
    out.extend_from_slice(&(psi.dim() as u64).to_le_bytes());
    for z in psi.amplitudes().iter() {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

pub fn decode_state(bytes: &[u8]) -> Result<PureState> {
    let header: [u8; 8] = bytes
        .get(..8)
        .and_then(|h| h.try_into().ok())
        .ok_or_else(|| Error::Codec("missing dimension header".into()))?;
    let dim = u64::from_le_bytes(header) as usize;
    if !dim.is_power_of_two() || bytes.len() != 8 + 16 * dim {
        return Err(Error::Codec(format!("bad state file: dim {dim}, {} bytes", bytes.len())));
    }
    let f = |off: usize| f64::from_le_bytes(bytes[off..off + 8].try_into().expect("8-byte slice"));
    let amps: Vec<C64> = (0..dim).map(|i| C64::new(f(8 + 16 * i), f(16 + 16 * i))).collect();
    PureState::new(amps)
}

fn vector_spec(variant: PrfVariant) -> Result<PrfSpec> {
    PrfSpec::new(variant, 8, 32, 0)
}

fn prf_vectors(variant: PrfVariant) -> Result<Vec<PrfVector>> {
    let spec = vector_spec(variant)?;
    let mut rng = SimRng::from_seed(FIXTURE_SEED);
    (0..16)
        .map(|_| {
            let key = PrfKey::random(VECTOR_LAMBDA, &mut rng);
            let input = BitString::random(8, &mut rng);
            let output = prf_eval(&spec, &key, &input)?;
            Ok(PrfVector { key, input, output })
        })
        .collect()
}

fn state_generator(variant: PrfVariant) -> Result<Generator> {
    Ok(Generator::new(GeneratorParams::new(16, 4, 3)?, variant))
}

fn state_key() -> PrfKey {
    PrfKey::from_index(16, 0xbeef)
}

/// Digest of a desk commitment session committing to 1.
pub fn commitment_fixture_digest() -> Result<String> {
    let params = ProtocolParams::commitment_desk(8, 1, 3, TomographyMode::Sampled, FIXTURE_MIXER)?;
    Ok(run_commitment_session(params, true, FIXTURE_SEED)?.transcript_digest)
}

/// All fixture files, by name, as they should appear on disk.
pub fn build_fixtures() -> Result<BTreeMap<String, Vec<u8>>> {
    let mut files = BTreeMap::new();
    for (name, variant) in [("prf_mixer.txt", FIXTURE_MIXER), ("prf_hmac.txt", PrfVariant::HmacSha256)] {
        let header = format!("{variant:?}, λ={VECTOR_LAMBDA}, 8 input bits, 32 output bits, tag 0\nkey input output");
        files.insert(name.to_string(), format_vectors(&header, &prf_vectors(variant)?).into_bytes());
    }
    for (suffix, variant) in [("mixer", FIXTURE_MIXER), ("hmac", PrfVariant::HmacSha256)] {
        let g = state_generator(variant)?;
        files.insert(format!("prs_{suffix}.bin"), encode_state(&g.prs(&state_key())?));
        let x = BitString::parse_binary("1010")?;
        files.insert(format!("prfs_{suffix}.bin"), encode_state(&g.prfs(&state_key(), &x)?));
    }
    files.insert("commitment_digest.txt".into(), format!("{}\n", commitment_fixture_digest()?).into_bytes());
    Ok(files)
}

pub fn write_fixtures(dir: &Path) -> Result<Vec<String>> {
    std::fs::create_dir_all(dir)?;
    let files = build_fixtures()?;
    for (name, bytes) in &files {
        std::fs::write(dir.join(name), bytes)?;
    }
    Ok(files.into_keys().collect())
}

/// Per-file comparison of `dir` against freshly built fixtures. PRF vector
/// files are parsed before comparison so comment edits do not matter.
pub fn check_fixtures(dir: &Path) -> Result<BTreeMap<String, bool>> {
    let mut out = BTreeMap::new();
    for (name, expected) in build_fixtures()? {
        let Ok(found) = std::fs::read(dir.join(&name)) else {
            out.insert(name, false);
            continue;
        };
        let ok = if let Some(variant) = match name.as_str() {
            "prf_mixer.txt" => Some(FIXTURE_MIXER),
            "prf_hmac.txt" => Some(PrfVariant::HmacSha256),
            _ => None,
        } {
            let spec = vector_spec(variant)?;
            let parse = |b: &[u8]| parse_vectors(&String::from_utf8_lossy(b), VECTOR_LAMBDA, &spec).ok();
            parse(&found).is_some() && parse(&found) == parse(&expected)
        } else {
            found == expected
        };
        out.insert(name, ok);
    }
    Ok(out)
}

//! Keyed pseudorandom functions `F: {0,1}^λ × {0,1}^d → {0,1}^m`.
//!
//! Bit strings are MSB-first. Every evaluation hashes a length-prefixed
//! encoding of the key and the input, then expands in counter mode, so
//! output prefixes are consistent across output lengths.

use std::fmt;
use std::path::Path;

use hmac::{Hmac, KeyInit, Mac};
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};
use sha2::Sha256;

use crate::error::{Error, Result};

/// A finite bit string, most significant bit first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            bits: vec![false; len],
        }
    }

    /// The low `len` bits of `value`, most significant first.
    pub fn from_u64(value: u64, len: usize) -> Self {
        let bits = (0..len)
            .rev()
            .map(|i| i < 64 && (value >> i) & 1 == 1)
            .collect();
        Self { bits }
    }

    /// Parses a string of `0`/`1` characters.
    pub fn parse_binary(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Codec(format!("invalid bit {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }

    /// Unpacks the first `len` bits of `bytes`.
    pub fn from_bytes(bytes: &[u8], len: usize) -> Result<Self> {
        if bytes.len() != len.div_ceil(8) {
            return Err(Error::shape(len.div_ceil(8), bytes.len()));
        }
        let bits = (0..len)
            .map(|i| (bytes[i / 8] >> (7 - i % 8)) & 1 == 1)
            .collect();
        Ok(Self { bits })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Value of the string read as a big-endian integer; requires `len ≤ 64`.
    pub fn to_u64(&self) -> Result<u64> {
        if self.len() > 64 {
            return Err(Error::domain(format!("{}-bit string does not fit in u64", self.len())));
        }
        Ok(self.bits.iter().fold(0u64, |acc, b| (acc << 1) | *b as u64))
    }

    /// Packed bytes, zero-padded at the end.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.len().div_ceil(8)];
        for (i, b) in self.bits.iter().enumerate() {
            if *b {
                out[i / 8] |= 0x80 >> (i % 8);
            }
        }
        out
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.to_bytes())
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        BitString { bits }
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    /// Truncates or zero-extends to `len` bits.
    pub fn resized(&self, len: usize) -> BitString {
        let mut bits = self.bits.clone();
        bits.resize(len, false);
        BitString { bits }
    }

    /// Number of positions where the strings differ; lengths must match.
    pub fn hamming_distance(&self, other: &BitString) -> Result<usize> {
        if self.len() != other.len() {
            return Err(Error::shape(self.len(), other.len()));
        }
        Ok(self.bits.iter().zip(&other.bits).filter(|(a, b)| a != b).count())
    }

    pub fn random<R: RngCore + ?Sized>(len: usize, rng: &mut R) -> Self {
        Self {
            bits: (0..len).map(|_| rng.random::<bool>()).collect(),
        }
    }

    /// Packed bytes preceded by the bit length as a big-endian `u32`.
    fn encode_prefixed(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&(self.len() as u32).to_be_bytes());
        out.extend_from_slice(&self.to_bytes());
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            f.write_str(if *b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A PRF key `k ∈ {0,1}^λ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PrfKey(BitString);

impl PrfKey {
    pub fn new(bits: BitString) -> Self {
        Self(bits)
    }

    /// Key number `index` of `2^λ`, for exhaustive enumeration.
    pub fn from_index(lambda: usize, index: u64) -> Self {
        Self(BitString::from_u64(index, lambda))
    }

    pub fn from_bytes(lambda: usize, bytes: &[u8]) -> Result<Self> {
        BitString::from_bytes(bytes, lambda).map(Self)
    }

    pub fn random<R: RngCore + ?Sized>(lambda: usize, rng: &mut R) -> Self {
        Self(BitString::random(lambda, rng))
    }

    pub fn lambda(&self) -> usize {
        self.0.len()
    }

    pub fn bits(&self) -> &BitString {
        &self.0
    }

    pub fn index(&self) -> Result<u64> {
        self.0.to_u64()
    }

    pub fn to_hex(&self) -> String {
        self.0.to_hex()
    }
}

/// Which primitive backs the PRF.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PrfVariant {
    /// Seeded 64-bit mixer: fast, bit-stable, not cryptographic.
    Mixer { seed: u64 },
    /// HMAC-SHA-256 in counter mode.
    HmacSha256,
    /// Always outputs zeros.
    ConstantZero,
}

/// A PRF family with fixed input and output lengths.
///
/// `tag` separates independent PRFs that share a variant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrfSpec {
    pub variant: PrfVariant,
    pub input_bits: usize,
    pub output_bits: usize,
    pub tag: u32,
}

impl PrfSpec {
    pub fn new(variant: PrfVariant, input_bits: usize, output_bits: usize, tag: u32) -> Result<Self> {
        if input_bits == 0 || output_bits == 0 {
            return Err(Error::domain("PRF input and output lengths must be at least 1"));
        }
        Ok(Self {
            variant,
            input_bits,
            output_bits,
            tag,
        })
    }

    fn check_input(&self, input: &BitString) -> Result<()> {
        if input.len() != self.input_bits {
            return Err(Error::domain(format!(
                "PRF input has {} bits, expected {}",
                input.len(),
                self.input_bits
            )));
        }
        Ok(())
    }
}

const MIX_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn mixer_block(seed: u64, message: &[u8], counter: u32) -> [u8; 8] {
    let mut h = mix64(seed ^ MIX_GAMMA);
    for chunk in message.chunks(8) {
        let mut word = [0u8; 8];
        word[..chunk.len()].copy_from_slice(chunk);
        h = mix64(h.wrapping_add(MIX_GAMMA) ^ u64::from_be_bytes(word));
    }
    h = mix64(h ^ (message.len() as u64));
    mix64(h.wrapping_add(MIX_GAMMA) ^ counter as u64).to_be_bytes()
}

fn hmac_block(key: &PrfKey, message: &[u8], counter: u32) -> Vec<u8> {
    let mut keybytes = Vec::new();
    key.bits().encode_prefixed(&mut keybytes);
    let mut mac = <Hmac<Sha256> as KeyInit>::new_from_slice(&keybytes)
        .expect("HMAC accepts keys of any length");
    mac.update(message);
    mac.update(&counter.to_be_bytes());
    mac.finalize().into_bytes().to_vec()
}

/// `F(key, input)`.
pub fn prf_eval(spec: &PrfSpec, key: &PrfKey, input: &BitString) -> Result<BitString> {
    spec.check_input(input)?;
    let m = spec.output_bits;
    if let PrfVariant::ConstantZero = spec.variant {
        return Ok(BitString::zeros(m));
    }
    let mut message = Vec::new();
    message.extend_from_slice(&spec.tag.to_be_bytes());
    if let PrfVariant::Mixer { .. } = spec.variant {
        key.bits().encode_prefixed(&mut message);
    }
    input.encode_prefixed(&mut message);

    let mut out = Vec::with_capacity(m.div_ceil(8) + 32);
    let mut counter = 0u32;
    while out.len() * 8 < m {
        match spec.variant {
            PrfVariant::Mixer { seed } => out.extend_from_slice(&mixer_block(seed, &message, counter)),
            PrfVariant::HmacSha256 => out.extend(hmac_block(key, &message, counter)),
            PrfVariant::ConstantZero => unreachable!(),
        }
        counter += 1;
    }
    out.truncate(m.div_ceil(8));
    BitString::from_bytes(&out, m)
}

/// First output bit of `F(key, input)`.
pub fn prf_bit(spec: &PrfSpec, key: &PrfKey, input: &BitString) -> Result<bool> {
    let one = PrfSpec {
        output_bits: 1,
        ..*spec
    };
    Ok(prf_eval(&one, key, input)?.bit(0))
}

/// One regression vector: `(key, input, output)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrfVector {
    pub key: PrfKey,
    pub input: BitString,
    pub output: BitString,
}

/// Parses a vector file: `#` comments, then lines `key_hex input_hex output_hex`.
pub fn parse_vectors(text: &str, lambda: usize, spec: &PrfSpec) -> Result<Vec<PrfVector>> {
    let mut out = Vec::new();
    for line in text.lines().map(str::trim) {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Codec(format!("expected 3 hex fields, got {line:?}")));
        }
        let decode = |s: &str| hex::decode(s).map_err(|e| Error::Codec(e.to_string()));
        out.push(PrfVector {
            key: PrfKey::from_bytes(lambda, &decode(fields[0])?)?,
            input: BitString::from_bytes(&decode(fields[1])?, spec.input_bits)?,
            output: BitString::from_bytes(&decode(fields[2])?, spec.output_bits)?,
        });
    }
    Ok(out)
}

/// Renders vectors in the format read by [`parse_vectors`].
pub fn format_vectors(header: &str, vectors: &[PrfVector]) -> String {
    let mut out = String::new();
    for line in header.lines() {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    for v in vectors {
        out.push_str(&format!(
            "{} {} {}\n",
            v.key.to_hex(),
            v.input.to_hex(),
            v.output.to_hex()
        ));
    }
    out
}

pub fn read_vectors(path: &Path, lambda: usize, spec: &PrfSpec) -> Result<Vec<PrfVector>> {
    parse_vectors(&std::fs::read_to_string(path)?, lambda, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SimRng;

    fn mixer(d: usize, m: usize) -> PrfSpec {
        PrfSpec::new(PrfVariant::Mixer { seed: 0x0123 }, d, m, 0).unwrap()
    }

    #[test]
    fn bit_string_conversions() {
        let b = BitString::from_u64(0b1011, 4);
        assert_eq!(b.to_string(), "1011");
        assert_eq!(b.to_u64().unwrap(), 11);
        assert_eq!(b.to_bytes(), vec![0b1011_0000]);
        assert_eq!(BitString::from_bytes(&b.to_bytes(), 4).unwrap(), b);
        assert_eq!(BitString::parse_binary("1011").unwrap(), b);
        assert_eq!(b.resized(6).to_string(), "101100");
        assert_eq!(b.resized(2).to_string(), "10");
    }

    #[test]
    fn evaluation_is_deterministic() {
        let mut rng = SimRng::from_seed(1);
        for spec in [mixer(8, 40), PrfSpec::new(PrfVariant::HmacSha256, 8, 300, 0).unwrap()] {
            let k = PrfKey::random(16, &mut rng);
            let x = BitString::random(8, &mut rng);
            assert_eq!(prf_eval(&spec, &k, &x).unwrap(), prf_eval(&spec, &k, &x).unwrap());
            assert_eq!(prf_eval(&spec, &k, &x).unwrap().len(), spec.output_bits);
        }
    }

    #[test]
    fn wrong_input_length_is_a_domain_error() {
        let k = PrfKey::from_index(8, 3);
        assert!(matches!(
            prf_eval(&mixer(4, 8), &k, &BitString::zeros(5)),
            Err(Error::Domain(_))
        ));
        assert!(PrfSpec::new(PrfVariant::HmacSha256, 0, 1, 0).is_err());
    }

    #[test]
    fn single_bits_are_balanced() {
        let mut rng = SimRng::from_seed(2);
        for spec in [mixer(16, 1), PrfSpec::new(PrfVariant::HmacSha256, 16, 1, 0).unwrap()] {
            let k = PrfKey::random(32, &mut rng);
            let ones = (0..10_000u64)
                .filter(|i| prf_bit(&spec, &k, &BitString::from_u64(*i, 16)).unwrap())
                .count();
            assert!((ones as f64 / 1e4 - 0.5).abs() < 0.02, "{ones}");
        }
    }

    #[test]
    fn distinct_keys_disagree() {
        let spec = mixer(8, 1000);
        let x = BitString::from_u64(5, 8);
        let a = prf_eval(&spec, &PrfKey::from_index(16, 1), &x).unwrap();
        let b = prf_eval(&spec, &PrfKey::from_index(16, 2), &x).unwrap();
        let agree = 1000 - a.hamming_distance(&b).unwrap();
        assert!(agree <= 600);
    }

    #[test]
    fn bit_is_a_prefix_of_longer_outputs() {
        let k = PrfKey::from_index(10, 77);
        for spec in [mixer(6, 129), PrfSpec::new(PrfVariant::HmacSha256, 6, 257, 3).unwrap()] {
            for x in 0..16 {
                let x = BitString::from_u64(x, 6);
                let long = prf_eval(&spec, &k, &x).unwrap();
                assert_eq!(prf_bit(&spec, &k, &x).unwrap(), long.bit(0));
                let short = prf_eval(&PrfSpec { output_bits: 9, ..spec }, &k, &x).unwrap();
                assert_eq!(short.bits(), &long.bits()[..9]);
            }
        }
    }

    #[test]
    fn encodings_are_length_prefixed() {
        // A zero input of length 8 and one of length 16 pack to byte strings
        // where one is a prefix of the other; the length prefix separates them.
        let mut a = Vec::new();
        BitString::zeros(8).encode_prefixed(&mut a);
        let mut b = Vec::new();
        BitString::zeros(16).encode_prefixed(&mut b);
        assert_ne!(a[..4], b[..4]);
        let mut c = Vec::new();
        BitString::zeros(7).encode_prefixed(&mut c);
        assert_ne!(a, c);
    }

    #[test]
    fn tags_and_variants_separate_functions() {
        let k = PrfKey::from_index(16, 9);
        let x = BitString::from_u64(3, 8);
        let base = mixer(8, 64);
        let other = PrfSpec { tag: 1, ..base };
        assert_ne!(prf_eval(&base, &k, &x).unwrap(), prf_eval(&other, &k, &x).unwrap());
        let zero = PrfSpec::new(PrfVariant::ConstantZero, 8, 64, 0).unwrap();
        assert_eq!(prf_eval(&zero, &k, &x).unwrap(), BitString::zeros(64));
    }

    #[test]
    fn vector_files_round_trip() {
        let spec = mixer(8, 32);
        let vectors: Vec<PrfVector> = (0..4u64)
            .map(|i| {
                let key = PrfKey::from_index(16, 0x0123 + i);
                let input = BitString::from_u64(i * 37, 8);
                let output = prf_eval(&spec, &key, &input).unwrap();
                PrfVector { key, input, output }
            })
            .collect();
        let text = format_vectors("mixer seed=0x0123", &vectors);
        assert_eq!(parse_vectors(&text, 16, &spec).unwrap(), vectors);
        assert!(parse_vectors("zz 00 00", 16, &spec).is_err());
    }
}

//! Exact density matrices for the binary-phase-to-Haar hybrid chain.
//!
//! All five hybrids live on `(ℂ^N)^{⊗t}` with `N = 2^n`. Basis index `v`
//! encodes a tuple in `[N]^t` (entries `0..N`, first factor most significant).
//!
//! 1. `E_k |ψ_k⟩⟨ψ_k|^{⊗t}` over every key of a generator.
//! 2. `E_α |ψ_α⟩⟨ψ_α|^{⊗t}` over uniform sign vectors `α ∈ {±1}^N`.
//! 3. `E_w |bintype_{type(w) mod 2}⟩⟨·|` over uniform `w ∈ [N]^t`.
//! 4. `E_T |type_T⟩⟨type_T|` over binary `T` of Hamming weight `t`.
//! 5. `Π_sym / Tr Π_sym`, the Haar average.

use std::collections::BTreeMap;

use nalgebra::DVector;
use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::Generator;
use crate::prf::PrfKey;
use crate::quantum::{
    binomial, checked_power_dim, index_type, sym_projector, trace_distance, type_classes, CMatrix,
    DensityMatrix, PureState, C64, DEFAULT_DIMENSION_CAP,
};

/// Largest key length enumerated exhaustively.
pub const MAX_ENUMERATED_KEY_BITS: usize = 12;

/// Frequency histogram of a tuple in `[N]^t`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TypeVector {
    counts: Vec<usize>,
    t: usize,
}

impl TypeVector {
    pub fn new(counts: Vec<usize>) -> Self {
        let t = counts.iter().sum();
        Self { counts, t }
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn parity(&self) -> Vec<u8> {
        self.counts.iter().map(|c| (c % 2) as u8).collect()
    }
}

/// `type(v)`; entries of `v` must lie in `0..N`.
pub fn type_of(v: &[usize], n_dim: usize) -> Result<TypeVector> {
    let mut counts = vec![0; n_dim];
    for &x in v {
        if x >= n_dim {
            return Err(Error::domain(format!("tuple entry {x} outside [0, {n_dim})")));
        }
        counts[x] += 1;
    }
    Ok(TypeVector::new(counts))
}

/// Which hybrid of the chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum HybridId {
    KeyedPrs = 1,
    RandomSigns = 2,
    ParityType = 3,
    DistinctType = 4,
    Haar = 5,
}

impl HybridId {
    pub const ALL: [HybridId; 5] = [
        HybridId::KeyedPrs,
        HybridId::RandomSigns,
        HybridId::ParityType,
        HybridId::DistinctType,
        HybridId::Haar,
    ];

    pub fn from_index(i: usize) -> Result<Self> {
        Self::ALL
            .get(i.wrapping_sub(1))
            .copied()
            .ok_or_else(|| Error::domain(format!("hybrid index {i} outside 1..=5")))
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

fn check_dims(n_dim: usize, t: usize, cap: usize) -> Result<usize> {
    if n_dim == 0 || !n_dim.is_power_of_two() || t == 0 {
        return Err(Error::domain(format!(
            "hybrids need N a power of two and t ≥ 1, got N={n_dim}, t={t}"
        )));
    }
    checked_power_dim(n_dim, t, cap, "hybrid density matrix")
}

fn uniform_state(n_dim: usize, t: usize, support: &[usize]) -> Result<PureState> {
    if support.is_empty() {
        return Err(Error::domain("type class is empty"));
    }
    let dim = check_dims(n_dim, t, DEFAULT_DIMENSION_CAP)?;
    let amp = C64::new(1.0 / (support.len() as f64).sqrt(), 0.0);
    let mut amps = DVector::zeros(dim);
    for &v in support {
        amps[v] = amp;
    }
    Ok(PureState::from_vector_unchecked(dim.trailing_zeros() as usize, amps))
}

/// `|type_T⟩`: uniform superposition over tuples of type `T`.
pub fn type_state(tv: &TypeVector, n_dim: usize, t: usize) -> Result<PureState> {
    if tv.counts.len() != n_dim || tv.t != t {
        return Err(Error::shape(format!("type over {n_dim} symbols summing to {t}"), format!("{:?}", tv.counts)));
    }
    let dim = check_dims(n_dim, t, DEFAULT_DIMENSION_CAP)?;
    let support: Vec<usize> = (0..dim).filter(|&v| index_type(v, n_dim, t) == tv.counts).collect();
    uniform_state(n_dim, t, &support)
}

/// `|bintype_T⟩`: uniform superposition over tuples with `type mod 2 = T`.
pub fn bintype_state(parity: &[u8], n_dim: usize, t: usize) -> Result<PureState> {
    if parity.len() != n_dim || parity.iter().any(|b| *b > 1) {
        return Err(Error::shape(format!("binary vector of length {n_dim}"), format!("{parity:?}")));
    }
    let dim = check_dims(n_dim, t, DEFAULT_DIMENSION_CAP)?;
    let support: Vec<usize> = (0..dim)
        .filter(|&v| index_type(v, n_dim, t).iter().zip(parity).all(|(c, p)| (c % 2) as u8 == *p))
        .collect();
    uniform_state(n_dim, t, &support)
}

/// Probability that `t` uniform draws from `[N]` collide: `1 − N!/((N−t)! N^t)`.
pub fn collision_probability(n_dim: usize, t: usize) -> f64 {
    let mut distinct = 1.0f64;
    for i in 0..t {
        distinct *= (n_dim as f64 - i as f64).max(0.0) / n_dim as f64;
    }
    1.0 - distinct
}

/// Weight of the symmetric subspace outside the collision-free tuples:
/// `1 − C(N, t) / C(N + t − 1, t)`.
pub fn symmetric_collision_weight(n_dim: usize, t: usize) -> f64 {
    let free = binomial(n_dim, t);
    let all = crate::quantum::sym_dim(n_dim, t);
    1.0 - big_ratio(&free, &all)
}

fn big_ratio(a: &BigUint, b: &BigUint) -> f64 {
    let a: f64 = a.to_string().parse().unwrap_or(f64::INFINITY);
    let b: f64 = b.to_string().parse().unwrap_or(f64::INFINITY);
    a / b
}

/// `∏ᵢ sign(vᵢ)` for every tuple index, given per-symbol signs.
fn tuple_signs(symbol_negative: &[bool], n_dim: usize, t: usize, dim: usize) -> Vec<i64> {
    (0..dim)
        .map(|mut v| {
            let mut s = 1i64;
            for _ in 0..t {
                if symbol_negative[v % n_dim] {
                    s = -s;
                }
                v /= n_dim;
            }
            s
        })
        .collect()
}

/// `Σ_p w_p s_p s_pᵀ / (total · N^t)` with integer accumulation, which is
/// exact and independent of summation order.
fn weighted_sign_average(
    patterns: &[(u64, i64)],
    n_dim: usize,
    t: usize,
    dim: usize,
    total: i64,
) -> CMatrix {
    let signs: Vec<Vec<i64>> = patterns
        .iter()
        .map(|(p, _)| {
            let neg: Vec<bool> = (0..n_dim).map(|x| (p >> x) & 1 == 1).collect();
            tuple_signs(&neg, n_dim, t, dim)
        })
        .collect();
    let rows: Vec<Vec<i64>> = (0..dim)
        .into_par_iter()
        .map(|a| {
            let mut row = vec![0i64; dim];
            for (s, (_, w)) in signs.iter().zip(patterns) {
                let sa = s[a] * w;
                for (cell, sb) in row.iter_mut().zip(s) {
                    *cell += sa * sb;
                }
            }
            row
        })
        .collect();
    let scale = 1.0 / (total as f64 * (dim as f64));
    CMatrix::from_fn(dim, dim, |a, b| C64::new(rows[a][b] as f64 * scale, 0.0))
}

/// Hybrid 1 with every key enumerated; keys sharing a sign pattern are grouped.
pub fn keyed_prs_density(generator: &Generator, t: usize, cap: usize) -> Result<DensityMatrix> {
    let lambda = generator.params.lambda;
    if lambda > MAX_ENUMERATED_KEY_BITS {
        return Err(Error::Infeasible(format!(
            "exhaustive key enumeration is limited to λ ≤ {MAX_ENUMERATED_KEY_BITS}, got {lambda}"
        )));
    }
    let n_dim = 1usize << generator.params.n;
    let dim = check_dims(n_dim, t, cap)?;
    let patterns: Vec<u64> = (0..1u64 << lambda)
        .into_par_iter()
        .map(|i| generator.sign_pattern(&PrfKey::from_index(lambda, i)))
        .collect::<Result<_>>()?;
    let mut counts: BTreeMap<u64, i64> = BTreeMap::new();
    for p in patterns {
        *counts.entry(p).or_default() += 1;
    }
    let grouped: Vec<(u64, i64)> = counts.into_iter().collect();
    Ok(DensityMatrix::from_matrix_unchecked(weighted_sign_average(
        &grouped,
        n_dim,
        t,
        dim,
        1i64 << lambda,
    )))
}

/// Hybrid 2 in closed form: `N^{-t} Σ_{type(x) ≡ type(y) mod 2} |x⟩⟨y|`.
pub fn random_signs_density(n_dim: usize, t: usize, cap: usize) -> Result<DensityMatrix> {
    let dim = check_dims(n_dim, t, cap)?;
    let parity: Vec<Vec<usize>> = (0..dim)
        .map(|v| index_type(v, n_dim, t).iter().map(|c| c % 2).collect())
        .collect();
    let w = C64::new(1.0 / dim as f64, 0.0);
    let m = CMatrix::from_fn(dim, dim, |a, b| if parity[a] == parity[b] { w } else { C64::new(0.0, 0.0) });
    Ok(DensityMatrix::from_matrix_unchecked(m))
}

/// Hybrid 2 by averaging over all `2^N` sign vectors.
pub fn random_signs_density_enumerated(n_dim: usize, t: usize, cap: usize) -> Result<DensityMatrix> {
    if n_dim > 16 {
        return Err(Error::Infeasible(format!("sign enumeration over 2^{n_dim} vectors")));
    }
    let dim = check_dims(n_dim, t, cap)?;
    let patterns: Vec<(u64, i64)> = (0..1u64 << n_dim).map(|p| (p, 1)).collect();
    Ok(DensityMatrix::from_matrix_unchecked(weighted_sign_average(
        &patterns,
        n_dim,
        t,
        dim,
        1i64 << n_dim,
    )))
}

/// Hybrid 3: each parity class `C_T` is drawn with probability `|C_T|/N^t`
/// and contributes its normalized projector.
pub fn parity_type_density(n_dim: usize, t: usize, cap: usize) -> Result<DensityMatrix> {
    let dim = check_dims(n_dim, t, cap)?;
    let mut classes: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for v in 0..dim {
        let parity = index_type(v, n_dim, t).iter().map(|c| c % 2).collect();
        classes.entry(parity).or_default().push(v);
    }
    let mut m = CMatrix::zeros(dim, dim);
    for members in classes.values() {
        let prob = members.len() as f64 / dim as f64;
        let w = C64::new(prob / members.len() as f64, 0.0);
        for &a in members {
            for &b in members {
                m[(a, b)] += w;
            }
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(m))
}

/// Hybrid 4; undefined when `t > N` since no binary `T` has weight `t`.
pub fn distinct_type_density(n_dim: usize, t: usize, cap: usize) -> Result<DensityMatrix> {
    let dim = check_dims(n_dim, t, cap)?;
    if t > n_dim {
        return Err(Error::domain(format!(
            "no binary type of weight t = {t} exists over N = {n_dim} symbols"
        )));
    }
    let choices = big_ratio(&binomial(n_dim, t), &BigUint::from(1u32));
    let mut m = CMatrix::zeros(dim, dim);
    for (ty, members) in type_classes(n_dim, t, dim) {
        if ty.iter().any(|c| *c > 1) {
            continue;
        }
        let w = C64::new(1.0 / (choices * members.len() as f64), 0.0);
        for &a in &members {
            for &b in &members {
                m[(a, b)] = w;
            }
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(m))
}

/// Hybrid 5: `Π_sym / C(N + t − 1, t)`.
pub fn haar_density(n_dim: usize, t: usize, cap: usize) -> Result<DensityMatrix> {
    check_dims(n_dim, t, cap)?;
    let p = sym_projector(n_dim, t, cap)?;
    let tr = p.trace().re;
    Ok(DensityMatrix::from_matrix_unchecked(p.unscale(tr)))
}

/// Density matrix of hybrid `id`. Hybrid 1 needs a generator with `2^n = N`.
pub fn hybrid_density(
    id: HybridId,
    n_dim: usize,
    t: usize,
    source: Option<&Generator>,
    cap: usize,
) -> Result<DensityMatrix> {
    match id {
        HybridId::KeyedPrs => {
            let g = source.ok_or_else(|| Error::domain("hybrid 1 needs a key source"))?;
            if 1usize << g.params.n != n_dim {
                return Err(Error::shape(n_dim, 1usize << g.params.n));
            }
            keyed_prs_density(g, t, cap)
        }
        HybridId::RandomSigns => random_signs_density(n_dim, t, cap),
        HybridId::ParityType => parity_type_density(n_dim, t, cap),
        HybridId::DistinctType => distinct_type_density(n_dim, t, cap),
        HybridId::Haar => haar_density(n_dim, t, cap),
    }
}

/// Exact trace distance between two hybrids.
pub fn hybrid_td(
    i: HybridId,
    j: HybridId,
    n_dim: usize,
    t: usize,
    source: Option<&Generator>,
    cap: usize,
) -> Result<f64> {
    let a = hybrid_density(i, n_dim, t, source, cap)?;
    let b = hybrid_density(j, n_dim, t, source, cap)?;
    trace_distance(&a, &b)
}

/// Total weight a density matrix places on tuples with a repeated entry.
pub fn collision_weight(rho: &DensityMatrix, n_dim: usize, t: usize) -> f64 {
    (0..rho.dim())
        .filter(|&v| index_type(v, n_dim, t).iter().any(|c| *c > 1))
        .map(|v| rho.matrix()[(v, v)].re)
        .sum()
}

/// One pairwise comparison in a hybrid report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairResult {
    pub td: Option<f64>,
    /// Envelope or exact value the distance is compared against.
    pub bound: Option<f64>,
    pub pass: Option<bool>,
    pub note: String,
}

/// Summary of the hybrid chain at one `(N, t)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HybridReport {
    pub n_dim: usize,
    pub t: usize,
    pub lambda: Option<usize>,
    pub collision_probability: f64,
    pub envelope: f64,
    pub hybrid2_hybrid3_max_abs_diff: f64,
    pub pairs: BTreeMap<String, PairResult>,
}

impl HybridReport {
    pub fn all_pass(&self) -> bool {
        self.hybrid2_hybrid3_max_abs_diff <= 1e-10 && self.pairs.values().all(|p| p.pass != Some(false))
    }
}

/// Computes every adjacent distance of the chain with its bound.
pub fn hybrids_check(n_dim: usize, t: usize, source: Option<&Generator>, cap: usize) -> Result<HybridReport> {
    let h2 = random_signs_density(n_dim, t, cap)?;
    let h3 = parity_type_density(n_dim, t, cap)?;
    let h5 = haar_density(n_dim, t, cap)?;
    let h4 = if t <= n_dim {
        Some(distinct_type_density(n_dim, t, cap)?)
    } else {
        None
    };
    let envelope = (t * t) as f64 / n_dim as f64;
    let collision = collision_probability(n_dim, t);
    let diff = crate::quantum::max_abs_diff(h2.matrix(), h3.matrix())?;
    let mut pairs = BTreeMap::new();

    if let Some(g) = source {
        let h1 = hybrid_density(HybridId::KeyedPrs, n_dim, t, Some(g), cap)?;
        pairs.insert(
            "1-2".into(),
            PairResult {
                td: Some(trace_distance(&h1, &h2)?),
                bound: None,
                pass: None,
                note: format!("PRF quality over all 2^{} keys", g.params.lambda),
            },
        );
    }
    let td23 = trace_distance(&h2, &h3)?;
    pairs.insert(
        "2-3".into(),
        PairResult {
            td: Some(td23),
            bound: Some(0.0),
            pass: Some(td23 <= 1e-10),
            note: "random-sign and parity-type hybrids are identical".into(),
        },
    );
    match &h4 {
        Some(h4) => {
            let td34 = trace_distance(&h3, h4)?;
            pairs.insert(
                "3-4".into(),
                PairResult {
                    td: Some(td34),
                    bound: Some(collision),
                    pass: Some((td34 - collision).abs() <= 1e-9 && td34 <= envelope + 1e-12),
                    note: "equals the collision probability; at most t²/N".into(),
                },
            );
            let td45 = trace_distance(h4, &h5)?;
            pairs.insert(
                "4-5".into(),
                PairResult {
                    td: Some(td45),
                    bound: Some(envelope),
                    pass: Some(td45 <= envelope + 1e-12),
                    note: "measured against the raw t²/N envelope".into(),
                },
            );
        }
        None => {
            let weight = collision_weight(&h3, n_dim, t);
            pairs.insert(
                "3-4".into(),
                PairResult {
                    td: None,
                    bound: Some(collision),
                    pass: Some((collision - 1.0).abs() <= 1e-12 && (weight - 1.0).abs() <= 1e-9),
                    note: "hybrid 4 undefined for t > N; every draw collides".into(),
                },
            );
        }
    }
    let td25 = trace_distance(&h2, &h5)?;
    pairs.insert(
        "2-5".into(),
        PairResult {
            td: Some(td25),
            bound: Some(2.0 * envelope),
            pass: None,
            note: "end to end".into(),
        },
    );
    Ok(HybridReport {
        n_dim,
        t,
        lambda: source.map(|g| g.params.lambda),
        collision_probability: collision,
        envelope,
        hybrid2_hybrid3_max_abs_diff: diff,
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{GeneratorParams, Generator};
    use crate::prf::PrfVariant;
    use crate::quantum::max_abs_diff;

    const CAP: usize = DEFAULT_DIMENSION_CAP;

    #[test]
    fn types_of_small_tuples() {
        assert_eq!(type_of(&[0, 0, 1], 2).unwrap().counts(), &[2, 1]);
        assert_eq!(type_of(&[1, 0], 2).unwrap().counts(), &[1, 1]);
        assert_eq!(type_of(&[1, 0, 0], 2).unwrap(), type_of(&[0, 1, 0], 2).unwrap());
        assert!(type_of(&[2], 2).is_err());
    }

    #[test]
    fn type_states() {
        let s = type_state(&TypeVector::new(vec![1, 1]), 2, 2).unwrap();
        let h = 1.0 / 2f64.sqrt();
        let expected = [0.0, h, h, 0.0];
        for (a, e) in s.amplitudes().iter().zip(expected) {
            assert!((a.re - e).abs() < 1e-15);
        }
        for parity in [[1u8, 1, 0, 1], [0, 1, 1, 1], [1, 1, 1, 0]] {
            let ty = TypeVector::new(parity.iter().map(|p| *p as usize).collect());
            assert_eq!(type_state(&ty, 4, 3).unwrap(), bintype_state(&parity, 4, 3).unwrap());
        }
        assert!(bintype_state(&[1, 1], 2, 3).is_err());
        assert!((bintype_state(&[1, 0, 0, 0], 4, 3).unwrap().amplitudes().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_signs_closed_form_at_two_copies_of_a_qubit() {
        let h2 = random_signs_density(2, 2, CAP).unwrap();
        // Parity classes: {00, 11} (type even) and {01, 10} (type odd).
        let q = C64::new(0.25, 0.0);
        let z = C64::new(0.0, 0.0);
        let expected = CMatrix::from_row_slice(4, 4, &[q, z, z, q, z, q, q, z, z, q, q, z, q, z, z, q]);
        assert_eq!(h2.matrix(), &expected);
    }

    #[test]
    fn closed_form_and_enumeration_agree() {
        for (n, t) in [(2, 1), (2, 2), (2, 3), (4, 2), (4, 3), (4, 4)] {
            let a = random_signs_density(n, t, CAP).unwrap();
            let b = random_signs_density_enumerated(n, t, CAP).unwrap();
            assert!(max_abs_diff(a.matrix(), b.matrix()).unwrap() < 1e-10, "N={n} t={t}");
        }
    }

    #[test]
    fn parity_and_sign_hybrids_coincide() {
        for (n, t) in [(2, 2), (2, 3), (4, 2), (8, 2), (4, 3)] {
            let a = random_signs_density(n, t, CAP).unwrap();
            let b = parity_type_density(n, t, CAP).unwrap();
            assert!(max_abs_diff(a.matrix(), b.matrix()).unwrap() < 1e-12);
            assert!(hybrid_td(HybridId::RandomSigns, HybridId::ParityType, n, t, None, CAP).unwrap() < 1e-10);
        }
    }

    #[test]
    fn parity_hybrid_splits_along_collisions() {
        for (n, t) in [(4, 2), (8, 2), (4, 3), (8, 3)] {
            let td = hybrid_td(HybridId::ParityType, HybridId::DistinctType, n, t, None, CAP).unwrap();
            assert!((td - collision_probability(n, t)).abs() < 1e-9);
            assert!(td <= (t * t) as f64 / n as f64);
        }
    }

    #[test]
    fn distinct_type_hybrid_needs_enough_symbols() {
        assert!(matches!(distinct_type_density(2, 3, CAP), Err(Error::Domain(_))));
        assert!((collision_probability(2, 3) - 1.0).abs() < 1e-15);
        let h3 = parity_type_density(2, 3, CAP).unwrap();
        assert!((collision_weight(&h3, 2, 3) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn haar_hybrid_collision_weight() {
        for (n, t) in [(4, 2), (8, 2), (8, 3)] {
            let td = hybrid_td(HybridId::DistinctType, HybridId::Haar, n, t, None, CAP).unwrap();
            assert!((td - symmetric_collision_weight(n, t)).abs() < 1e-9);
            assert!(td <= (t * t) as f64 / n as f64);
            let h5 = haar_density(n, t, CAP).unwrap();
            assert!((h5.matrix().trace().re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn keyed_hybrid_matches_direct_key_average() {
        let g = Generator::new(GeneratorParams::new(5, 1, 2).unwrap(), PrfVariant::Mixer { seed: 4 });
        let t = 2;
        let fast = keyed_prs_density(&g, t, CAP).unwrap();
        let mut slow = CMatrix::zeros(16, 16);
        for i in 0..32 {
            let psi = g.prs(&PrfKey::from_index(5, i)).unwrap();
            slow += psi.tensor(&psi).outer();
        }
        slow.unscale_mut(32.0);
        assert!(max_abs_diff(fast.matrix(), &slow).unwrap() < 1e-14);
        assert!(keyed_prs_density(
            &Generator::new(GeneratorParams::new(13, 1, 2).unwrap(), PrfVariant::Mixer { seed: 4 }),
            2,
            CAP
        )
        .is_err());
    }

    #[test]
    fn end_to_end_chain_bound() {
        for (n, t) in [(4, 2), (8, 2), (8, 3)] {
            let td25 = hybrid_td(HybridId::RandomSigns, HybridId::Haar, n, t, None, CAP).unwrap();
            let td45 = hybrid_td(HybridId::DistinctType, HybridId::Haar, n, t, None, CAP).unwrap();
            assert!(td25 <= 2.0 * (t * t) as f64 / n as f64 + td45 + 1e-12);
        }
    }

    #[test]
    fn report_flags() {
        let g = Generator::new(GeneratorParams::new(6, 1, 2).unwrap(), PrfVariant::Mixer { seed: 1 });
        let r = hybrids_check(4, 2, Some(&g), CAP).unwrap();
        assert!(r.all_pass());
        assert!(r.pairs["1-2"].td.unwrap() >= 0.0);
        let r = hybrids_check(2, 3, None, CAP).unwrap();
        assert!(r.all_pass());
        assert!(r.pairs["3-4"].td.is_none());
        assert_eq!(HybridId::from_index(4).unwrap(), HybridId::DistinctType);
        assert!(HybridId::from_index(0).is_err());
    }
}

//! The symmetric subspace of `(ℂ^N)^{⊗t}`.
//!
//! Basis index `v` of the `N^t`-dimensional space encodes the tuple
//! `(v₁, …, v_t)` in base `N`, first factor most significant.

use std::collections::BTreeMap;

use num_bigint::BigUint;

use super::linalg::{CMatrix, C64};
use crate::error::{Error, Result};

/// Default cap on the dimension of dense multi-copy objects.
pub const DEFAULT_DIMENSION_CAP: usize = 4096;

/// `N^t`, or a resource error when it exceeds `cap`.
pub fn checked_power_dim(n_dim: usize, t: usize, cap: usize, what: &'static str) -> Result<usize> {
    let mut dim: u128 = 1;
    for _ in 0..t {
        dim = dim.saturating_mul(n_dim as u128);
    }
    if dim > cap as u128 {
        return Err(Error::Resource {
            what,
            requested: dim,
            cap,
        });
    }
    Ok(dim as usize)
}

/// Digits of `index` as a `t`-tuple over `[0, N)`.
pub fn tuple_digits(mut index: usize, n_dim: usize, t: usize) -> Vec<usize> {
    let mut out = vec![0; t];
    for slot in out.iter_mut().rev() {
        *slot = index % n_dim;
        index /= n_dim;
    }
    out
}

/// Inverse of [`tuple_digits`].
pub fn tuple_index(digits: &[usize], n_dim: usize) -> usize {
    digits.iter().fold(0, |acc, d| acc * n_dim + d)
}

/// Frequency histogram of the tuple encoded by `index`.
pub fn index_type(index: usize, n_dim: usize, t: usize) -> Vec<usize> {
    let mut counts = vec![0; n_dim];
    for d in tuple_digits(index, n_dim, t) {
        counts[d] += 1;
    }
    counts
}

/// `dim Sym^t(ℂ^N) = C(N + t − 1, t)`.
pub fn sym_dim(n_dim: usize, t: usize) -> BigUint {
    binomial(n_dim + t - 1, t)
}

/// Exact binomial coefficient.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc *= BigUint::from(n - i);
        acc /= BigUint::from(i + 1);
    }
    acc
}

/// Basis indices grouped by type class, in lexicographic order of the type.
pub fn type_classes(n_dim: usize, t: usize, dim: usize) -> BTreeMap<Vec<usize>, Vec<usize>> {
    let mut classes: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for v in 0..dim {
        classes.entry(index_type(v, n_dim, t)).or_default().push(v);
    }
    classes
}

/// Projector onto the symmetric subspace.
///
/// Built from type classes: `Π[x, y] = [type(x) = type(y)] / |class|`, which
/// equals the permutation average `(1/t!) Σ_σ P(σ)`.
pub fn sym_projector(n_dim: usize, t: usize, cap: usize) -> Result<CMatrix> {
    if n_dim == 0 || t == 0 {
        return Err(Error::domain("symmetric projector needs N ≥ 1 and t ≥ 1"));
    }
    let dim = checked_power_dim(n_dim, t, cap, "symmetric projector")?;
    let mut out = CMatrix::zeros(dim, dim);
    for members in type_classes(n_dim, t, dim).values() {
        let w = C64::new(1.0 / members.len() as f64, 0.0);
        for &a in members {
            for &b in members {
                out[(a, b)] = w;
            }
        }
    }
    Ok(out)
}

/// Operator permuting the `t` tensor factors: factor `i` moves to slot `perm[i]`.
pub fn permutation_operator(n_dim: usize, t: usize, perm: &[usize], cap: usize) -> Result<CMatrix> {
    if perm.len() != t {
        return Err(Error::shape(t, perm.len()));
    }
    let dim = checked_power_dim(n_dim, t, cap, "permutation operator")?;
    let mut out = CMatrix::zeros(dim, dim);
    for v in 0..dim {
        let digits = tuple_digits(v, n_dim, t);
        let mut moved = vec![0; t];
        for (i, &d) in digits.iter().enumerate() {
            moved[perm[i]] = d;
        }
        out[(tuple_index(&moved, n_dim), v)] = C64::new(1.0, 0.0);
    }
    Ok(out)
}

/// All permutations of `0..t` in lexicographic order.
pub fn permutations(t: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..t).collect();
    loop {
        out.push(current.clone());
        let Some(i) = (1..t).rev().find(|&i| current[i - 1] < current[i]) else {
            break;
        };
        let j = (i..t).rev().find(|&j| current[j] > current[i - 1]).unwrap();
        current.swap(i - 1, j);
        current[i..].reverse();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{haar_sample, max_abs_diff};
    use crate::rng::SimRng;

    fn permutation_average(n_dim: usize, t: usize) -> CMatrix {
        let perms = permutations(t);
        let dim = n_dim.pow(t as u32);
        let mut acc = CMatrix::zeros(dim, dim);
        for p in &perms {
            acc += permutation_operator(n_dim, t, p, DEFAULT_DIMENSION_CAP).unwrap();
        }
        acc.unscale(perms.len() as f64)
    }

    #[test]
    fn dimensions() {
        assert_eq!(sym_dim(2, 2), BigUint::from(3u32));
        assert_eq!(sym_dim(8, 9), BigUint::from(11440u32));
        assert!(BigUint::from(6u32 * 256) <= sym_dim(256, 9));
        assert_eq!(permutations(4).len(), 24);
    }

    #[test]
    fn type_class_route_equals_permutation_average() {
        for (n_dim, t) in [(2, 1), (2, 2), (2, 3), (3, 2), (3, 3), (4, 2), (2, 4)] {
            let fast = sym_projector(n_dim, t, DEFAULT_DIMENSION_CAP).unwrap();
            let slow = permutation_average(n_dim, t);
            assert!(max_abs_diff(&fast, &slow).unwrap() < 1e-12, "N={n_dim} t={t}");
        }
    }

    #[test]
    fn projector_is_idempotent_with_symmetric_trace() {
        for (n_dim, t) in [(2, 1), (2, 2), (4, 3), (8, 2)] {
            let p = sym_projector(n_dim, t, DEFAULT_DIMENSION_CAP).unwrap();
            assert!(max_abs_diff(&(&p * &p), &p).unwrap() < 1e-9);
            let tr = p.trace().re;
            let expected: f64 = sym_dim(n_dim, t).to_string().parse().unwrap();
            assert!((tr - expected).abs() < 1e-9);
        }
        let id = sym_projector(2, 1, DEFAULT_DIMENSION_CAP).unwrap();
        assert_eq!(id, CMatrix::identity(2, 2));
    }

    #[test]
    fn projector_commutes_with_permutations() {
        for (n_dim, t) in [(2, 2), (3, 2), (2, 3), (3, 3), (3, 4), (9, 2)] {
            let p = sym_projector(n_dim, t, DEFAULT_DIMENSION_CAP).unwrap();
            for perm in permutations(t) {
                let q = permutation_operator(n_dim, t, &perm, DEFAULT_DIMENSION_CAP).unwrap();
                assert!(max_abs_diff(&(&p * &q), &(&q * &p)).unwrap() < 1e-9);
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let err = sym_projector(8, 5, DEFAULT_DIMENSION_CAP).unwrap_err();
        assert!(matches!(err, Error::Resource { requested: 32768, .. }));
    }

    #[test]
    fn haar_copies_average_to_normalized_projector() {
        let mut rng = SimRng::from_seed(21);
        let samples = 10_000;
        let mut acc = CMatrix::zeros(4, 4);
        for _ in 0..samples {
            let psi = haar_sample(1, &mut rng).unwrap();
            acc += psi.tensor(&psi).outer();
        }
        acc.unscale_mut(samples as f64);
        let target = sym_projector(2, 2, DEFAULT_DIMENSION_CAP).unwrap().unscale(3.0);
        let err = crate::quantum::frobenius_sq(&acc, &target).unwrap().sqrt();
        assert!(err < 0.05, "Frobenius error {err}");
    }
}

//! Small-range function distributions: a table of `r` i.i.d. draws from a
//! base distribution, with each domain point mapped to one of them by an
//! independent uniform index.

use std::collections::BTreeMap;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// A sampled small-range function over the domain `0..domain_size`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmallRangeTable<T> {
    r: usize,
    index: Vec<usize>,
    samples: Vec<T>,
}

impl<T> SmallRangeTable<T> {
    /// Draws `r` base samples, then one uniform index in `0..r` per domain point.
    pub fn sample<R: RngCore + ?Sized>(
        r: usize,
        domain_size: usize,
        mut base: impl FnMut(&mut R) -> T,
        rng: &mut R,
    ) -> Result<Self> {
        if r == 0 {
            return Err(Error::domain("small-range table needs r ≥ 1"));
        }
        let samples = (0..r).map(|_| base(rng)).collect();
        let index = (0..domain_size).map(|_| rng.random_range(0..r)).collect();
        Ok(Self { r, index, samples })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn domain_size(&self) -> usize {
        self.index.len()
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    /// `i_x`, zero-based.
    pub fn index_of(&self, x: usize) -> Result<usize> {
        self.index
            .get(x)
            .copied()
            .ok_or_else(|| Error::domain(format!("point {x} outside domain of size {}", self.index.len())))
    }

    pub fn eval(&self, x: usize) -> Result<&T> {
        Ok(&self.samples[self.index_of(x)?])
    }
}

/// Summary of one table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmallRangeStats {
    pub r: usize,
    pub domain_size: usize,
    /// Distinct values among `eval(x)` over the domain.
    pub distinct_images: usize,
    /// Distinct indices `i_x` used.
    pub distinct_indices: usize,
    pub max_bucket: usize,
    /// Bucket load `→` number of indices with that many domain points.
    pub bucket_histogram: BTreeMap<usize, usize>,
    /// Unordered point pairs sharing an index.
    pub index_collision_pairs: u64,
}

/// Points per index, in index order.
pub fn bucket_loads<T>(table: &SmallRangeTable<T>) -> Vec<usize> {
    let mut loads = vec![0usize; table.r];
    for &i in &table.index {
        loads[i] += 1;
    }
    loads
}

pub fn sr_statistics<T: PartialEq>(table: &SmallRangeTable<T>) -> SmallRangeStats {
    let loads = bucket_loads(table);
    let mut bucket_histogram = BTreeMap::new();
    for &l in &loads {
        *bucket_histogram.entry(l).or_insert(0) += 1;
    }
    let mut images: Vec<&T> = Vec::new();
    for (i, &l) in loads.iter().enumerate() {
        if l > 0 && !images.contains(&&table.samples[i]) {
            images.push(&table.samples[i]);
        }
    }
    SmallRangeStats {
        r: table.r,
        domain_size: table.domain_size(),
        distinct_images: images.len(),
        distinct_indices: loads.iter().filter(|&&l| l > 0).count(),
        max_bucket: loads.iter().copied().max().unwrap_or(0),
        bucket_histogram,
        index_collision_pairs: loads.iter().map(|&l| (l * l.saturating_sub(1) / 2) as u64).sum(),
    }
}

/// `r(1 − (1 − 1/r)^q)`: expected number of indices hit by `q` uniform draws.
pub fn expected_distinct(r: usize, q: usize) -> f64 {
    let r = r as f64;
    r * (1.0 - (1.0 - 1.0 / r).powf(q as f64))
}

/// Pearson goodness-of-fit result.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson χ² of observed counts against category probabilities.
pub fn chi_square(observed: &[u64], probs: &[f64]) -> Result<ChiSquare> {
    if observed.len() != probs.len() || observed.len() < 2 {
        return Err(Error::shape(format!("{} categories (≥ 2)", probs.len()), observed.len()));
    }
    let total: u64 = observed.iter().sum();
    if total == 0 || probs.iter().any(|&p| p <= 0.0) {
        return Err(Error::domain("χ² needs observations and positive probabilities"));
    }
    let statistic = observed
        .iter()
        .zip(probs)
        .map(|(&o, &p)| {
            let e = p * total as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    let dof = observed.len() - 1;
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::Numeric(e.to_string()))?;
    Ok(ChiSquare {
        statistic,
        dof,
        p_value: 1.0 - dist.cdf(statistic),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SimRng;
    use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest};

    #[test]
    fn zero_range_is_rejected() {
        let mut rng = SimRng::from_seed(0);
        assert!(SmallRangeTable::sample(0, 4, |r: &mut SimRng| r.next_u64(), &mut rng).is_err());
    }

    #[test]
    fn single_sample_table_is_constant() {
        let mut rng = SimRng::from_seed(1);
        let t = SmallRangeTable::sample(1, 50, |r: &mut SimRng| r.next_u64(), &mut rng).unwrap();
        let v = *t.eval(0).unwrap();
        assert!((0..50).all(|x| *t.eval(x).unwrap() == v));
        assert!(t.eval(50).is_err());
        assert_eq!(sr_statistics(&t).distinct_images, 1);
    }

    #[test]
    fn fixed_seed_reproduces_table() {
        let make = || SmallRangeTable::sample(7, 30, |r: &mut SimRng| r.next_u32(), &mut SimRng::from_seed(5)).unwrap();
        assert_eq!(make(), make());
    }

    #[test]
    fn distinct_index_count_matches_occupancy_formula() {
        let mut rng = SimRng::from_seed(2);
        let (r, q, trials) = (64, 64, 2000);
        let counts: Vec<f64> = (0..trials)
            .map(|_| {
                let t = SmallRangeTable::sample(r, q, |r: &mut SimRng| r.next_u64(), &mut rng).unwrap();
                sr_statistics(&t).distinct_indices as f64
            })
            .collect();
        let mean = counts.iter().sum::<f64>() / trials as f64;
        let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
        let se = (var / trials as f64).sqrt();
        assert!((mean - expected_distinct(r, q)).abs() < 4.0 * se, "{mean}");
    }

    #[test]
    fn pooled_bucket_loads_are_uniform() {
        let mut rng = SimRng::from_seed(3);
        let mut pooled = vec![0u64; 16];
        for _ in 0..100 {
            let t = SmallRangeTable::sample(16, 256, |_: &mut SimRng| (), &mut rng).unwrap();
            for (p, l) in pooled.iter_mut().zip(bucket_loads(&t)) {
                *p += l as u64;
            }
            assert!(sr_statistics(&t).distinct_images <= 16);
        }
        let fit = chi_square(&pooled, &[1.0 / 16.0; 16]).unwrap();
        assert!(fit.p_value > 0.01, "{fit:?}");
    }

    #[test]
    fn large_range_is_injective_with_high_probability() {
        let mut rng = SimRng::from_seed(4);
        let (q, r) = (16, 16 * 16 * 8);
        let trials = 500;
        let injective = (0..trials)
            .filter(|_| {
                let t = SmallRangeTable::sample(r, q, |r: &mut SimRng| r.next_u64(), &mut rng).unwrap();
                sr_statistics(&t).distinct_images == q
            })
            .count();
        let bound = 1.0 - (q * q) as f64 / (2 * r) as f64;
        assert!(injective as f64 / trials as f64 >= bound - 0.03);
    }

    #[test]
    fn index_collision_rate_is_one_over_r() {
        let mut rng = SimRng::from_seed(6);
        let (r, trials) = (8, 20_000);
        let hits = (0..trials)
            .filter(|_| {
                let t = SmallRangeTable::sample(r, 2, |_: &mut SimRng| (), &mut rng).unwrap();
                t.index_of(0).unwrap() == t.index_of(1).unwrap()
            })
            .count() as f64;
        let p = 1.0 / r as f64;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((hits / trials as f64 - p).abs() <= 3.0 * sigma);
    }

    #[test]
    fn chi_square_reference_values() {
        // Perfect fit has statistic 0 and p-value 1.
        let exact = chi_square(&[25, 25, 25, 25], &[0.25; 4]).unwrap();
        assert_eq!(exact.statistic, 0.0);
        assert!((exact.p_value - 1.0).abs() < 1e-12);
        // One degree of freedom: P[χ²₁ > 3.841] ≈ 0.05.
        let two = chi_square(&[60, 40], &[0.5, 0.5]).unwrap();
        assert!((two.statistic - 4.0).abs() < 1e-12);
        assert!((two.p_value - 0.0455).abs() < 1e-3);
        assert!(chi_square(&[1], &[1.0]).is_err());
    }

    proptest! {
        #[test]
        fn stats_are_consistent(r in 1usize..40, q in 0usize..120, seed in any::<u64>()) {
            let mut rng = SimRng::from_seed(seed);
            let t = SmallRangeTable::sample(r, q, |r: &mut SimRng| r.next_u32() % 5, &mut rng).unwrap();
            let s = sr_statistics(&t);
            prop_assert_eq!(t.samples().len(), r);
            prop_assert!(s.distinct_images <= s.distinct_indices.min(5));
            prop_assert!(s.distinct_indices <= r.min(q));
            prop_assert_eq!(s.bucket_histogram.values().sum::<usize>(), r);
            prop_assert_eq!(s.bucket_histogram.iter().map(|(l, c)| l * c).sum::<usize>(), q);
            for x in 0..q {
                prop_assert!(t.index_of(x).unwrap() < r);
            }
        }
    }
}

use rand::RngCore;
use rand_distr::{Binomial, Distribution};

use super::density::DensityMatrix;
use super::linalg::CMatrix;
use crate::error::{Error, Result};

/// Number of successes in `shots` Bernoulli(p) trials.
pub fn sample_binomial<R: RngCore + ?Sized>(p: f64, shots: u64, rng: &mut R) -> Result<u64> {
    if !(-1e-9..=1.0 + 1e-9).contains(&p) || p.is_nan() {
        return Err(Error::Numeric(format!("probability {p} outside [0, 1]")));
    }
    if shots == 0 {
        return Ok(0);
    }
    let dist = Binomial::new(shots, p.clamp(0.0, 1.0))
        .map_err(|e| Error::Numeric(e.to_string()))?;
    Ok(dist.sample(rng))
}

/// Multinomial histogram by sequential conditional binomials.
pub fn sample_multinomial<R: RngCore + ?Sized>(
    probs: &[f64],
    shots: u64,
    rng: &mut R,
) -> Result<Vec<u64>> {
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::Numeric(format!("outcome probabilities sum to {total}")));
    }
    let mut out = vec![0u64; probs.len()];
    let mut remaining = shots;
    let mut mass = 1.0f64;
    for (i, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        let p = p.max(0.0);
        if i + 1 == probs.len() || mass <= 0.0 {
            out[i] = remaining;
            break;
        }
        let cond = (p / mass).min(1.0);
        let k = sample_binomial(cond, remaining, rng)?;
        out[i] = k;
        remaining -= k;
        mass -= p;
    }
    Ok(out)
}

/// Measures `shots` copies of `ρ` in the basis given by the rows of `U`,
/// i.e. outcome `j` has probability `(UρU†)[j, j]`.
pub fn measure_shots<R: RngCore + ?Sized>(
    rho: &DensityMatrix,
    basis: &CMatrix,
    shots: u64,
    rng: &mut R,
) -> Result<Vec<u64>> {
    if basis.shape() != rho.matrix().shape() {
        return Err(Error::shape(
            format!("{0}x{0} unitary", rho.dim()),
            format!("{}x{}", basis.nrows(), basis.ncols()),
        ));
    }
    let rotated = basis * rho.matrix() * basis.adjoint();
    let probs: Vec<f64> = (0..rho.dim()).map(|j| rotated[(j, j)].re).collect();
    sample_multinomial(&probs, shots, rng)
}

/// SWAP-test acceptance probability on two copies of `ρ`: `(1 + Tr ρ²) / 2`.
pub fn swap_test_accept_prob(rho: &DensityMatrix) -> f64 {
    (1.0 + rho.purity()) / 2.0
}

/// Number of accepting SWAP tests out of `shots`.
pub fn swap_test_sample<R: RngCore + ?Sized>(
    rho: &DensityMatrix,
    shots: u64,
    rng: &mut R,
) -> Result<u64> {
    sample_binomial(swap_test_accept_prob(rho), shots, rng)
}

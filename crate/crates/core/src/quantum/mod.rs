//! Exact dense quantum linear algebra at small dimension.

mod density;
mod linalg;
mod measure;
mod pauli;
mod state;
mod symmetric;

pub use density::{fidelity_overlap, trace_distance, trace_distance_hermitian, DensityMatrix};
pub use linalg::{
    compensated_sum, frobenius_norm_sq, frobenius_sq, hermitian_eigen, hermitian_eigenvalues,
    hermitian_pseudo_inverse, hs_inner, is_hermitian, max_abs_diff, CMatrix, C64, TOLERANCE,
};
pub use measure::{
    measure_shots, sample_binomial, sample_multinomial, swap_test_accept_prob, swap_test_sample,
};
pub use pauli::{Pauli, PauliMasks, PauliString};
pub use state::{haar_sample, PureState};
pub use symmetric::{
    binomial, checked_power_dim, index_type, permutation_operator, permutations, sym_dim,
    sym_projector, tuple_digits, tuple_index, type_classes, DEFAULT_DIMENSION_CAP,
};

/// Uniform sample from the projective Pauli group on `n` qubits.
pub fn pauli_sample<R: rand::RngCore + ?Sized>(n: usize, rng: &mut R) -> PauliString {
    PauliString::sample(n, rng)
}

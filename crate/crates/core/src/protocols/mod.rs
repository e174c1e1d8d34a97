//! Protocols with classical communication built on verifiable tomography.

mod commitment;
mod otp;
mod params;
mod wire;

pub use commitment::{
    binding_search, binding_trial, commit_with_key, committer_commit, extractor, hiding_tv, receiver_sample_pauli,
    reveal_verify, BindingReport, BindingTrial, CommitmentTranscript, Opening, RevealOutcome, DOUBLE_OPENING_OVERLAP,
    MAX_EXTRACTOR_KEY_BITS,
};
pub use otp::{otp_decrypt, otp_encrypt, Ciphertext};
pub use params::{first_instantiation_dims, second_instantiation_dims, ProtocolKind, ProtocolParams};
pub use wire::{
    decode_frame, digest, digest_hex, encode_frame, read_message, run_commitment_over_tcp, run_commitment_session,
    write_message, Committer, Message, Payload, Receiver, Role, SessionResult, MAX_FRAME_BYTES, WIRE_VERSION,
};

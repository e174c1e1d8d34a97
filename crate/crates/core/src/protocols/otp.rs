//! Pseudo one-time pad: bit `i` of the message becomes a tomograph of
//! `G(k, i‖msg_i)`; decryption accepts bit 0 iff the tomograph verifies
//! against `(k, i, 0)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::params::ProtocolParams;
use crate::error::{Error, Result};
use crate::prf::{BitString, PrfKey};
use crate::rng::SimRng;
use crate::tomography::{ChannelSecondInput, Tomograph};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ciphertext {
    pub params: ProtocolParams,
    pub u: Vec<Tomograph>,
}

fn index_input(key: &PrfKey, i: usize, d: usize, b: bool) -> ChannelSecondInput {
    ChannelSecondInput {
        key: key.clone(),
        i: BitString::from_u64(i as u64, d),
        b,
    }
}

pub fn otp_encrypt(key: &PrfKey, msg: &BitString, params: &ProtocolParams, rng: &mut SimRng) -> Result<Ciphertext> {
    let scheme = params.second_scheme()?;
    if msg.len() > params.message_bits() {
        return Err(Error::shape(format!("at most {} message bits", params.message_bits()), msg.len()));
    }
    if key.lambda() != params.lambda {
        return Err(Error::shape(params.lambda, key.lambda()));
    }
    let base = SimRng::from_seed(rng.next_seed());
    let u = msg
        .bits()
        .par_iter()
        .enumerate()
        .map(|(i, &b)| {
            let t = scheme.tomography(&index_input(key, i, params.d, b), &mut base.fork(i as u64))?;
            if t.aborted {
                return Err(Error::Infeasible(format!("tomography aborted for bit {i}")));
            }
            Ok(t)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Ciphertext { params: *params, u })
}

pub fn otp_decrypt(key: &PrfKey, ct: &Ciphertext, rng: &mut SimRng) -> Result<BitString> {
    let scheme = ct.params.second_scheme()?;
    if ct.u.len() > ct.params.message_bits() {
        return Err(Error::shape(format!("at most {} tomographs", ct.params.message_bits()), ct.u.len()));
    }
    let base = SimRng::from_seed(rng.next_seed());
    let bits = ct
        .u
        .par_iter()
        .enumerate()
        .map(|(i, u)| {
            let v = scheme.verify(&index_input(key, i, ct.params.d, false), u, &mut base.fork(i as u64))?;
            Ok(!v.is_valid())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BitString::new(bits))
}

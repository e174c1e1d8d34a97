pub mod attacks;
pub mod error;
pub mod fixtures;
pub mod generators;
pub mod hybrids;
pub mod prf;
pub mod protocols;
pub mod quantum;
pub mod rng;
pub mod smallrange;
pub mod tomography;

pub use error::{Error, Result};
pub use rng::SimRng;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/overview.md")]
    mod overview {}
    #[doc = include_str!("../../../book/src/phase-states.md")]
    mod phase_states {}
    #[doc = include_str!("../../../book/src/hybrids.md")]
    mod hybrids {}
    #[doc = include_str!("../../../book/src/attacks.md")]
    mod attacks {}
    #[doc = include_str!("../../../book/src/tomography.md")]
    mod tomography {}
    #[doc = include_str!("../../../book/src/verifiable.md")]
    mod verifiable {}
    #[doc = include_str!("../../../book/src/commitment.md")]
    mod commitment {}
    #[doc = include_str!("../../../book/src/otp.md")]
    mod otp {}
    #[doc = include_str!("../../../book/src/smallrange.md")]
    mod smallrange {}
}

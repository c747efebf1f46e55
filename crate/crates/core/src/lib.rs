//! Spin and momentum observables of a Gaussian spin-1/2 packet seen from a
//! boosted frame.
//!
//! Natural units (`ħ = c = 1`) throughout. The packet has mass `m`, momentum
//! width `1/κ`, and is observed from a frame moving with speed `v` along the
//! first axis while its spin is tilted by the momentum-dependent Wigner angle.

pub mod error;
pub mod fisher;
pub mod numerics;
pub mod state;
pub mod wavefunction;
pub mod wigner;

pub use error::{Error, Result};
pub use numerics::QuadratureSpec;

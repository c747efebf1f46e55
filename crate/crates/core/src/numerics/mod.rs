//! Special functions, deterministic quadrature and Monte Carlo integration.

mod erf;
mod montecarlo;
mod quadrature;

pub use erf::{erfc, erfcx};
pub use montecarlo::{mc_integrate, McResult, MIN_SAMPLES};
pub use quadrature::{
    integrate, integrate_2d_gaussian_weighted, integrate_plane, integrate_semi_infinite,
    IntegralResult, QuadratureSpec,
};

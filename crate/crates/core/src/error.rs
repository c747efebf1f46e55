use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} = {value} is outside the domain ({expected})")]
    Domain {
        what: &'static str,
        value: f64,
        expected: &'static str,
    },

    /// Adaptive quadrature ran out of subdivisions. Carries the best estimate.
    #[error(
        "quadrature did not converge: value {value:e}, error estimate {error_estimate:e} after {evaluations} evaluations"
    )]
    Convergence {
        value: f64,
        error_estimate: f64,
        evaluations: usize,
    },

    #[error(
        "the relativistic limit v = 1 has no finite boost; use the closed-form limit routines"
    )]
    RelativisticLimit,

    #[error("momentum |p| = 0 is degenerate for this quantity")]
    DegenerateMomentum,

    #[error("grid too coarse: |x| up to {x_max} requested but the momentum grid only resolves |x| < {limit}; {hint}")]
    Resolution {
        x_max: f64,
        limit: f64,
        hint: String,
    },

    #[error("no interior maximum of the density found in (0, {search_max}]")]
    NoInteriorMaximum { search_max: f64 },

    #[error("{quantity}: routes disagree ({first:e} vs {second:e})")]
    RouteMismatch {
        quantity: &'static str,
        first: f64,
        second: f64,
    },
}

pub(crate) fn check_domain(
    what: &'static str,
    value: f64,
    ok: bool,
    expected: &'static str,
) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Domain {
            what,
            value,
            expected,
        })
    }
}

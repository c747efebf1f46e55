//! Spin amplitudes of the boosted packet and the scalar integrals `ξ`, `η`,
//! `ν` through which the boost enters every Fisher quantity.
//!
//! Every function takes the boost velocity `v`; `v = 1` is served by the
//! limiting Wigner angles (`cos α = m/p⁰`), never by an infinite rapidity.

use std::f64::consts::PI;

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{erfcx, integrate_plane, integrate_semi_infinite, QuadratureSpec};
use crate::wigner::{boost_from_velocity, wigner_angles, Boost, Momentum2, PhysicalConfig};

/// Tolerance of the cross-check between the two routes to `η`.
pub const ETA_ROUTE_TOLERANCE: f64 = 1e-9;

/// One-dimensional ground-state amplitude `κ^{1/2} π^{-1/4} e^{-κ²p²/2}`.
pub fn gaussian_amp(p: f64, cfg: &PhysicalConfig) -> f64 {
    let k = cfg.kappa();
    (k / PI.sqrt()).sqrt() * (-0.5 * k * k * p * p).exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinAmplitude {
    pub down: Complex64,
    pub up: Complex64,
}

/// Momentum amplitudes of the two spin components at shift `theta`.
pub fn amplitude(
    theta: (f64, f64),
    p: Momentum2,
    b: &Boost,
    cfg: &PhysicalConfig,
) -> Result<SpinAmplitude> {
    b.finite()?;
    let a = wigner_angles(p, b, cfg);
    let envelope = gaussian_amp(p.p1, cfg) * gaussian_amp(p.p2, cfg);
    let shift = Complex64::from_polar(envelope, -(p.p1 * theta.0 + p.p2 * theta.1));
    Ok(SpinAmplitude {
        down: shift * a.cos_half(),
        up: -shift * a.phase() * a.sin_half(),
    })
}

/// Populations of the two spin components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpinWeights {
    pub xi: f64,
    pub p_down: f64,
    pub p_up: f64,
}

fn check_velocity(v: f64) -> Result<Boost> {
    boost_from_velocity(v)
}

/// `∫_0^∞ u e^{-u²} (1 - cos α(u/κ)) du`, the spin-up population.
///
/// Integrating the versine directly keeps full relative accuracy for slow
/// boosts, where `1 - ξ` is tiny.
fn spin_up_integral(cfg: &PhysicalConfig, b: &Boost, spec: &QuadratureSpec) -> Result<f64> {
    let k = cfg.kappa();
    let r = integrate_semi_infinite(
        |u| {
            let a = wigner_angles(Momentum2::new(u / k, 0.0), b, cfg);
            u * (-u * u).exp() * a.one_minus_cos()
        },
        spec,
    )?;
    Ok(r.value)
}

/// `ξ = 2κ² ∫_0^∞ p e^{-κ²p²} cos α dp`.
pub fn xi(cfg: &PhysicalConfig, v: f64, spec: &QuadratureSpec) -> Result<f64> {
    let b = check_velocity(v)?;
    Ok(1.0 - 2.0 * spin_up_integral(cfg, &b, spec)?)
}

/// `ξ` at `v = 1` in closed form, `sqrt(π)·mκ·erfcx(mκ)`.
pub fn xi_rel(cfg: &PhysicalConfig) -> f64 {
    let k = cfg.m_kappa();
    PI.sqrt() * k * erfcx(k).expect("m·kappa is positive")
}

/// `(1 - ξ)/2`.
pub fn spin_up_probability(cfg: &PhysicalConfig, v: f64, spec: &QuadratureSpec) -> Result<f64> {
    let b = check_velocity(v)?;
    spin_up_integral(cfg, &b, spec)
}

pub fn spin_weights(cfg: &PhysicalConfig, v: f64, spec: &QuadratureSpec) -> Result<SpinWeights> {
    let p_up = spin_up_probability(cfg, v, spec)?;
    Ok(SpinWeights {
        xi: 1.0 - 2.0 * p_up,
        p_down: 1.0 - p_up,
        p_up,
    })
}

/// `κη/v` from the radial integral
/// `∫_0^∞ u³ e^{-u²} / (sqrt(κ'² + u²) + κ' sqrt(1 - v²)) du`, `κ' = mκ`.
fn kappa_eta_over_v(cfg: &PhysicalConfig, v: f64, spec: &QuadratureSpec) -> Result<f64> {
    let k = cfg.m_kappa();
    let s = ((1.0 - v) * (1.0 + v)).sqrt();
    let r = integrate_semi_infinite(
        |u| u.powi(3) * (-u * u).exp() / ((k * k + u * u).sqrt() + k * s),
        spec,
    )?;
    Ok(r.value)
}

/// `η = -∫∫ (p¹)²/|p| [φ₀φ₀]² sin α d²p`, from its radial reduction.
///
/// Nonnegative, and zero exactly at `v = 0`.
pub fn eta(cfg: &PhysicalConfig, v: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_velocity(v)?;
    Ok(v * kappa_eta_over_v(cfg, v, spec)? / cfg.kappa())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Axis {
    P1,
    P2,
}

/// `η` evaluated literally as a plane integral, with `(p^j)²` for the
/// chosen axis.
pub fn eta_cartesian(
    cfg: &PhysicalConfig,
    v: f64,
    axis: Axis,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let b = check_velocity(v)?;
    let k2 = cfg.kappa().powi(2);
    let r = integrate_plane(
        |p1, p2| {
            let p = Momentum2::new(p1, p2);
            let n = p.norm();
            if n == 0.0 {
                return 0.0;
            }
            let pj = match axis {
                Axis::P1 => p1,
                Axis::P2 => p2,
            };
            let a = wigner_angles(p, &b, cfg);
            -(pj * pj / n) * a.sin_alpha * k2 / PI * (-k2 * n * n).exp()
        },
        cfg.kappa(),
        spec,
    )?;
    Ok(r.value)
}

/// `ν = ∫∫ (p¹)² [φ₀φ₀]² cos α d²p = κ⁻² ∫_0^∞ u³ e^{-u²} cos α(u/κ) du`.
pub fn nu(cfg: &PhysicalConfig, v: f64, spec: &QuadratureSpec) -> Result<f64> {
    let b = check_velocity(v)?;
    let k = cfg.kappa();
    let r = integrate_semi_infinite(
        |u| {
            let a = wigner_angles(Momentum2::new(u / k, 0.0), &b, cfg);
            u.powi(3) * (-u * u).exp() * a.cos_alpha
        },
        spec,
    )?;
    Ok(r.value / (k * k))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalarIntegrals {
    pub xi: f64,
    /// radial route
    pub eta: f64,
    /// plane-integral route, `(p¹)²` weight
    pub eta_cartesian: f64,
    pub nu: f64,
}

/// `ξ`, `η` and `ν`, with `η` computed by both routes and required to agree
/// to [`ETA_ROUTE_TOLERANCE`] relative, plus an absolute floor of `1e-14/κ`.
pub fn scalar_integrals(
    cfg: &PhysicalConfig,
    v: f64,
    spec: &QuadratureSpec,
) -> Result<ScalarIntegrals> {
    let xi = xi(cfg, v, spec)?;
    let eta = eta(cfg, v, spec)?;
    let eta_c = eta_cartesian(cfg, v, Axis::P1, spec)?;
    if (eta - eta_c).abs() > ETA_ROUTE_TOLERANCE * eta.abs() + 1e-14 / cfg.kappa() {
        return Err(Error::RouteMismatch {
            quantity: "eta",
            first: eta,
            second: eta_c,
        });
    }
    let nu = nu(cfg, v, spec)?;
    Ok(ScalarIntegrals {
        xi,
        eta,
        eta_cartesian: eta_c,
        nu,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinDensityMatrix(pub Matrix2<Complex64>);

impl SpinDensityMatrix {
    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (self.0 - self.0.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Smallest eigenvalue of the (Hermitian part of the) matrix.
    pub fn min_eigenvalue(&self) -> f64 {
        let a = self.0[(0, 0)].re;
        let d = self.0[(1, 1)].re;
        let b = self.0[(0, 1)];
        let mean = 0.5 * (a + d);
        let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        mean - radius
    }
}

/// Spin state after tracing out momentum, in the basis (spin down, spin up).
///
/// Entries `∫∫ F_σ F*_σ'` are plane integrals of the amplitudes.
pub fn spin_reduced_state(
    theta: (f64, f64),
    cfg: &PhysicalConfig,
    v: f64,
    spec: &QuadratureSpec,
) -> Result<SpinDensityMatrix> {
    let b = check_velocity(v)?;
    b.finite()?;
    let entry = |f: &dyn Fn(&SpinAmplitude) -> f64| -> Result<f64> {
        let mut failure = None;
        let r = integrate_plane(
            |p1, p2| match amplitude(theta, Momentum2::new(p1, p2), &b, cfg) {
                Ok(a) => f(&a),
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            },
            cfg.kappa(),
            spec,
        )?;
        match failure {
            Some(e) => Err(e),
            None => Ok(r.value),
        }
    };
    let dd = entry(&|a| a.down.norm_sqr())?;
    let uu = entry(&|a| a.up.norm_sqr())?;
    let du_re = entry(&|a| (a.down * a.up.conj()).re)?;
    let du_im = entry(&|a| (a.down * a.up.conj()).im)?;
    let du = Complex64::new(du_re, du_im);
    Ok(SpinDensityMatrix(Matrix2::new(
        Complex64::new(dd, 0.0),
        du,
        du.conj(),
        Complex64::new(uu, 0.0),
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate, mc_integrate};
    use crate::wigner::spin_half_rep;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cfg(m: f64, k: f64) -> PhysicalConfig {
        PhysicalConfig::new(m, k).unwrap()
    }

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    /// `(√π/4)·erfcx(k)·(1 - 2k²) + k/2`, the v = 1 value of κη.
    fn kappa_eta_limit(k: f64) -> f64 {
        k / 2.0 + PI.sqrt() / 4.0 * erfcx(k).unwrap() * (1.0 - 2.0 * k * k)
    }

    #[test]
    fn ground_state_amplitude() {
        assert_relative_eq!(
            gaussian_amp(0.0, &cfg(1.0, 1.0)),
            PI.powf(-0.25),
            epsilon = 1e-15
        );
        for k in [0.1, 1.0, 3.0] {
            let c = cfg(1.0, k);
            let q = QuadratureSpec::new(1e-12, 0.0, 2000).unwrap();
            let norm = 2.0
                * integrate_semi_infinite(|p| gaussian_amp(p, &c).powi(2), &q)
                    .unwrap()
                    .value;
            assert_relative_eq!(norm, 1.0, max_relative = 1e-11);
        }
        let (s, p) = (2.0f64, 0.37);
        let lhs = gaussian_amp(p, &cfg(1.0, 0.8));
        let rhs = s.sqrt() * gaussian_amp(s * p, &cfg(1.0, 0.8 / s));
        assert_relative_eq!(lhs, rhs, max_relative = 1e-15);
    }

    #[test]
    fn amplitudes_at_rest_and_under_boost() {
        let c = cfg(1.0, 1.0);
        let rest = boost_from_velocity(0.0).unwrap();
        let p = Momentum2::new(0.4, -0.9);
        let a = amplitude((0.2, 0.5), p, &rest, &c).unwrap();
        assert_eq!(a.up.norm(), 0.0);
        let env = gaussian_amp(0.4, &c) * gaussian_amp(-0.9, &c);
        let expect = Complex64::from_polar(env, -(0.4 * 0.2 - 0.9 * 0.5));
        assert!((a.down - expect).norm() < 1e-15);

        let b = boost_from_velocity(0.6).unwrap();
        let p = Momentum2::new(1.0, 0.0);
        let a = amplitude((0.0, 0.0), p, &b, &c).unwrap();
        let angles = wigner_angles(p, &b, &c);
        // spin_half_rep acting on spin down reproduces both components
        let u = spin_half_rep(&angles);
        let env = gaussian_amp(1.0, &c) * gaussian_amp(0.0, &c);
        assert!((a.up - u.0[(0, 1)] * env).norm() < 1e-15);
        assert!((a.down - u.0[(1, 1)] * env).norm() < 1e-15);
        assert!(amplitude((0.0, 0.0), p, &Boost::RelativisticLimit, &c).is_err());
    }

    #[test]
    fn up_amplitude_sign_on_first_axis() {
        // φ = 0 and sin(α/2) < 0, so the spin-up amplitude is -sin(α/2) > 0
        // times the envelope; its magnitude follows the half angle.
        let c = cfg(1.0, 1.0);
        let b = boost_from_velocity(0.6).unwrap();
        let p = Momentum2::new(1.0, 0.0);
        let a = amplitude((0.0, 0.0), p, &b, &c).unwrap();
        let half = wigner_angles(p, &b, &c).sin_half();
        let env = gaussian_amp(1.0, &c) * gaussian_amp(0.0, &c);
        assert!(half < 0.0);
        assert_relative_eq!(a.up.re, -half * env, max_relative = 1e-15);
        assert_eq!(a.up.im, 0.0);
    }

    #[test]
    fn pointwise_norm_is_velocity_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let c = cfg(rng.random_range(0.1..5.0), rng.random_range(0.1..3.0));
            let p = Momentum2::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
            let theta = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            let b = boost_from_velocity(rng.random_range(0.0..0.999)).unwrap();
            let a = amplitude(theta, p, &b, &c).unwrap();
            let env = (gaussian_amp(p.p1, &c) * gaussian_amp(p.p2, &c)).powi(2);
            assert!((a.down.norm_sqr() + a.up.norm_sqr() - env).abs() <= 1e-12 * env.max(1e-300));
        }
    }

    #[test]
    fn xi_at_rest_and_limit() {
        for m in [0.5, 1.0, 2.0] {
            for k in [0.1, 1.0, 3.0] {
                assert_relative_eq!(xi(&cfg(m, k), 0.0, &spec()).unwrap(), 1.0, epsilon = 1e-10);
            }
        }
        let c = cfg(1.0, 1.0);
        let closed = xi_rel(&c);
        assert_relative_eq!(closed, 0.757_872_156_141_31, max_relative = 1e-12);
        assert_relative_eq!(xi(&c, 1.0, &spec()).unwrap(), closed, max_relative = 1e-10);
        assert!(xi(&c, 0.5, &spec()).unwrap() > xi(&c, 0.9, &spec()).unwrap());
        assert!(xi(&c, 1.01, &spec()).is_err());
    }

    #[test]
    fn xi_approaches_limit_at_square_root_rate() {
        // ξ(v) - ξ_rel = O(sqrt(1 - v²)): shrinking 1 - v by 100 shrinks the
        // gap by 10.
        let c = cfg(1.0, 1.0);
        let closed = xi_rel(&c);
        let g1 = xi(&c, 1.0 - 1e-6, &spec()).unwrap() - closed;
        let g2 = xi(&c, 1.0 - 1e-8, &spec()).unwrap() - closed;
        assert!(g1 > 0.0 && g2 > 0.0);
        assert_relative_eq!(g1 / g2, 10.0, max_relative = 1e-3);
    }

    #[test]
    fn xi_rel_asymptotics() {
        assert!(xi_rel(&cfg(1e-6, 1.0)) < 1e-5);
        let x = xi_rel(&cfg(50.0, 1.0));
        assert!(((x - (1.0 - 1.0 / 5000.0)) / (1.0 - 1.0 / 5000.0)).abs() < 1e-3);
    }

    #[test]
    fn spin_up_probability_limits_and_ordering() {
        assert_eq!(
            spin_up_probability(&cfg(1.0, 1.0), 0.0, &spec()).unwrap(),
            0.0
        );
        let p = spin_up_probability(&cfg(1e-4, 1.0), 1.0, &spec()).unwrap();
        assert!((p - 0.5).abs() < 1e-3);
        for v in [0.1, 0.5, 0.95] {
            let mut prev = 1.0;
            for i in 0..30 {
                let mk = 1e-2 * 10f64.powf(3.0 * i as f64 / 29.0);
                let q = spin_up_probability(&cfg(mk, 1.0), v, &spec()).unwrap();
                assert!(q < prev);
                prev = q;
            }
        }
    }

    #[test]
    fn xi_monotone_in_velocity_and_above_limit() {
        for (m, k) in [(1.0, 1.0), (0.5, 0.1), (2.0, 3.0)] {
            let c = cfg(m, k);
            let floor = xi_rel(&c);
            let mut prev = 1.0 + 1e-15;
            for i in 0..=10 {
                let v = if i == 10 { 0.99 } else { i as f64 / 10.0 };
                let x = xi(&c, v, &spec()).unwrap();
                assert!(x < prev || (i == 0 && x <= prev));
                assert!(x > floor);
                prev = x;
            }
        }
    }

    #[test]
    fn eta_limits_and_bound() {
        assert_eq!(eta(&cfg(1.0, 1.0), 0.0, &spec()).unwrap(), 0.0);
        let c = cfg(1.0, 1.0);
        let at_light = eta(&c, 1.0, &spec()).unwrap() * c.kappa();
        assert_relative_eq!(at_light, kappa_eta_limit(1.0), max_relative = 1e-10);
        assert_relative_eq!(at_light, 0.310_531_960_964_67, max_relative = 1e-11);
        let cart = eta_cartesian(&c, 1.0, Axis::P1, &spec()).unwrap();
        assert_relative_eq!(cart, kappa_eta_limit(1.0), max_relative = 1e-8);
        for (m, k, v) in [
            (1.0, 1.0, 0.5),
            (0.01, 0.5, 0.99),
            (3.0, 3.0, 1.0),
            (1e-4, 0.1, 1.0),
        ] {
            let c = cfg(m, k);
            assert!(k * eta(&c, v, &spec()).unwrap() < PI.sqrt() * v / 4.0);
        }
    }

    #[test]
    fn eta_routes_and_axes_agree() {
        for m in [0.3, 1.0, 4.0] {
            for k in [0.1, 1.0, 2.5] {
                for v in [0.2, 0.7, 0.95] {
                    let c = cfg(m, k);
                    let s = scalar_integrals(&c, v, &spec()).unwrap();
                    let p2 = eta_cartesian(&c, v, Axis::P2, &spec()).unwrap();
                    assert_relative_eq!(s.eta, s.eta_cartesian, max_relative = 1e-9);
                    assert_relative_eq!(s.eta, p2, max_relative = 1e-9);
                }
            }
        }
    }

    #[test]
    fn nu_values() {
        for k in [0.1, 1.0, 3.0] {
            let n = nu(&cfg(1.0, k), 0.0, &spec()).unwrap();
            assert_relative_eq!(n, 1.0 / (2.0 * k * k), max_relative = 1e-10);
        }
        for v in [0.3, 0.9, 1.0] {
            let n = nu(&cfg(0.2, 1.3), v, &spec()).unwrap();
            assert!(n.abs() <= 1.0 / (2.0 * 1.69));
        }
        let c = cfg(1.0, 1.0);
        let n = nu(&c, 0.9, &spec()).unwrap();
        assert!(n > 0.0 && n < 0.5);
        let b = boost_from_velocity(0.9).unwrap();
        let mc = mc_integrate(
            |p1, p2| p1 * p1 * wigner_angles(Momentum2::new(p1, p2), &b, &c).cos_alpha,
            1.0,
            200_000,
            17,
        )
        .unwrap();
        assert!((mc.value - n).abs() < 4.0 * mc.std_error);
    }

    #[test]
    fn eta_radial_matches_independent_finite_quadrature() {
        // the radial integrand evaluated on [0, 12] with the finite-interval
        // rule, where the Gaussian tail is below 1e-60
        let c = cfg(0.7, 1.4);
        let v: f64 = 0.8;
        let k = c.m_kappa();
        let s = (1.0 - v * v).sqrt();
        let r = integrate(
            |u| u.powi(3) * (-u * u).exp() / ((k * k + u * u).sqrt() + k * s),
            0.0,
            12.0,
            &QuadratureSpec::new(1e-13, 0.0, 2000).unwrap(),
        )
        .unwrap();
        assert_relative_eq!(
            eta(&c, v, &spec()).unwrap() * 1.4,
            v * r.value,
            max_relative = 1e-11
        );
    }

    #[test]
    fn reduced_spin_state() {
        let c = cfg(1.0, 1.0);
        let rest = spin_reduced_state((0.0, 0.0), &c, 0.0, &spec()).unwrap();
        assert!((rest.0[(0, 0)].re - 1.0).abs() < 1e-12);
        assert!(rest.0[(1, 1)].norm() < 1e-15 && rest.0[(0, 1)].norm() < 1e-15);

        let v = 0.8;
        let base = spin_reduced_state((0.0, 0.0), &c, v, &spec()).unwrap();
        let w = spin_weights(&c, v, &spec()).unwrap();
        assert_relative_eq!(base.0[(0, 0)].re, w.p_down, max_relative = 1e-10);
        assert_relative_eq!(base.0[(1, 1)].re, w.p_up, max_relative = 1e-9);
        assert!((base.trace() - 1.0).norm() < 1e-10);
        assert!(base.hermiticity_defect() < 1e-15);
        assert!(base.min_eigenvalue() >= -1e-12);
        let moved = spin_reduced_state((0.3, -1.2), &c, v, &spec()).unwrap();
        assert!((moved.0 - base.0).iter().all(|z| z.norm() < 1e-12));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn eta_below_maximum(m in 0.01f64..10.0, k in 0.05f64..5.0, v in 0.0f64..=1.0) {
            let c = cfg(m, k);
            let ke = k * eta(&c, v, &spec()).unwrap();
            prop_assert!(ke >= 0.0);
            prop_assert!(ke < PI.sqrt() * v / 4.0 || v == 0.0);
        }

        #[test]
        fn xi_bracketed(m in 0.01f64..10.0, k in 0.05f64..5.0, v in 0.0f64..1.0) {
            let c = cfg(m, k);
            let x = xi(&c, v, &spec()).unwrap();
            prop_assert!(x <= 1.0 && x > xi_rel(&c) - 1e-12);
        }
    }
}

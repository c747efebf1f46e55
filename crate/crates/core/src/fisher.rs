//! SLD Fisher information of the shift parameters `(θ₁, θ₂)` in the rest
//! frame, in a boosted frame, and in the relativistic limit.
//!
//! Closed forms take `η` from [`crate::state`]; [`j_moving_oracle`] rebuilds
//! the same matrix from raw inner products of the spin components and shares
//! no algebra with the closed form.

use std::f64::consts::PI;

use nalgebra::{Matrix2, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{check_domain, Error, Result};
use crate::numerics::{erfcx, integrate_plane, QuadratureSpec};
use crate::state::{amplitude, eta, xi, SpinAmplitude};
use crate::wigner::{boost_from_velocity, Boost, Momentum2, PhysicalConfig};

/// Tolerance for matrix inequalities, applied to eigenvalues of the difference.
pub const LOEWNER_TOLERANCE: f64 = 1e-10;

/// Real symmetric 2×2 Fisher matrix for `(θ₁, θ₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherMatrix(pub Matrix2<f64>);

impl FisherMatrix {
    pub fn diagonal(value: f64) -> Self {
        Self(Matrix2::from_diagonal_element(value))
    }

    pub fn matrix(&self) -> &Matrix2<f64> {
        &self.0
    }

    pub fn inverse(&self) -> Result<Matrix2<f64>> {
        self.0.try_inverse().ok_or(Error::Domain {
            what: "Fisher matrix determinant",
            value: self.0.determinant(),
            expected: "nonzero",
        })
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let e = SymmetricEigen::new(self.0).eigenvalues;
        let (a, b) = (e[0], e[1]);
        if a <= b {
            [a, b]
        } else {
            [b, a]
        }
    }

    pub fn is_positive_definite(&self) -> bool {
        self.eigenvalues()[0] > 0.0
    }

    /// `self ≤ other` in the Loewner order, up to `tol` on the eigenvalues
    /// of `other - self`.
    pub fn loewner_le(&self, other: &FisherMatrix, tol: f64) -> bool {
        FisherMatrix(other.0 - self.0).eigenvalues()[0] >= -tol
    }

    /// Largest entry-wise relative difference, measured against the largest
    /// entry of `other`.
    pub fn max_relative_diff(&self, other: &FisherMatrix) -> f64 {
        (self.0 - other.0).amax() / other.0.amax()
    }
}

/// Diagonal of the inverse Fisher matrix: lower bounds on the variances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrBound {
    pub var_theta1: f64,
    pub var_theta2: f64,
}

pub fn cr_bound(j: &FisherMatrix) -> Result<CrBound> {
    let inv = j.inverse()?;
    Ok(CrBound {
        var_theta1: inv[(0, 0)],
        var_theta2: inv[(1, 1)],
    })
}

/// `(2/κ²)·I`.
pub fn j_rest(cfg: &PhysicalConfig) -> FisherMatrix {
    FisherMatrix::diagonal(2.0 / cfg.kappa().powi(2))
}

fn j_from_kappa_eta(cfg: &PhysicalConfig, kappa_eta: f64) -> FisherMatrix {
    FisherMatrix::diagonal(2.0 / cfg.kappa().powi(2) * (1.0 - 2.0 * kappa_eta * kappa_eta))
}

/// `(2/κ²)(1 - 2κ²η²)·I`; `v = 1` is routed to [`j_rel`].
pub fn j_moving(cfg: &PhysicalConfig, v: f64, spec: &QuadratureSpec) -> Result<FisherMatrix> {
    if boost_from_velocity(v)?.is_limit() {
        return Ok(j_rel(cfg));
    }
    Ok(j_from_kappa_eta(cfg, cfg.kappa() * eta(cfg, v, spec)?))
}

/// `κη` at `v = 1`: `κ'/2 + (√π/4)·erfcx(κ')·(1 - 2κ'²)` with `κ' = mκ`.
fn kappa_eta_limit(m_kappa: f64) -> f64 {
    let k = m_kappa;
    0.5 * k + 0.25 * PI.sqrt() * erfcx(k).expect("m·kappa is positive") * (1.0 - 2.0 * k * k)
}

/// Relativistic-limit Fisher matrix from its closed form.
pub fn j_rel(cfg: &PhysicalConfig) -> FisherMatrix {
    j_from_kappa_eta(cfg, kappa_eta_limit(cfg.m_kappa()))
}

/// Information-loss ratio `[J⁻¹]₁₁ / [J_rest⁻¹]₁₁ = 1/(1 - 2κ²η²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaRatio {
    pub value: f64,
}

pub fn delta_ratio(cfg: &PhysicalConfig, v: f64, spec: &QuadratureSpec) -> Result<DeltaRatio> {
    let ke = if boost_from_velocity(v)?.is_limit() {
        kappa_eta_limit(cfg.m_kappa())
    } else {
        cfg.kappa() * eta(cfg, v, spec)?
    };
    Ok(DeltaRatio {
        value: 1.0 / (1.0 - 2.0 * ke * ke),
    })
}

/// `1/(1 - πv²/8)`, the supremum of the ratio over all `mκ`.
pub fn delta_upper_bound(v: f64) -> Result<f64> {
    check_domain("v", v, (0.0..=1.0).contains(&v), "0 <= v <= 1")?;
    Ok(1.0 / (1.0 - PI * v * v / 8.0))
}

/// Closed-form bounds with `lower·v ≤ κη ≤ upper·v`.
///
/// `lower = (√π/4)·erfcx(κ')` integrates `u³e^{-u²}/(sqrt(κ'²+u²) + κ')`;
/// `upper = κ'/2 + (√π/4)·erfcx(κ')·(1 - 2κ'²)` integrates
/// `u³e^{-u²}/sqrt(κ'²+u²)` and is also the exact `v = 1` value. The names
/// follow the role in the inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KappaEtaBounds {
    pub lower: f64,
    pub upper: f64,
}

pub fn kappa_eta_bounds(m_kappa: f64) -> Result<KappaEtaBounds> {
    check_domain(
        "m_kappa",
        m_kappa,
        m_kappa.is_finite() && m_kappa > 0.0,
        "0 < m_kappa",
    )?;
    Ok(KappaEtaBounds {
        lower: 0.25 * PI.sqrt() * erfcx(m_kappa)?,
        upper: kappa_eta_limit(m_kappa),
    })
}

/// `|tr ρ[L₁, L₂]| = 8ξη²`; nonzero means the SLD bound is not attainable.
pub fn weak_commutativity(cfg: &PhysicalConfig, v: f64, spec: &QuadratureSpec) -> Result<f64> {
    let x = xi(cfg, v, spec)?;
    let e = if boost_from_velocity(v)?.is_limit() {
        kappa_eta_limit(cfg.m_kappa()) / cfg.kappa()
    } else {
        eta(cfg, v, spec)?
    };
    Ok(8.0 * x * e * e)
}

/// Raw plane integrals of the amplitude products the mixture formula needs.
struct InnerProducts {
    /// `∫|F_σ|²`, σ = (down, up)
    norm: [f64; 2],
    /// `∫ p_j p_k |F_σ|²`, indexed `[σ][j][k]`
    second: [[[f64; 2]; 2]; 2],
    /// `Im ∫ p_j |F_σ|²`: the (purely imaginary) overlap `⟨∂_j F_σ|F_σ⟩`
    first: [[f64; 2]; 2],
    /// `∫ conj(F_up)·(-i p_j)·F_down`
    cross: [Complex64; 2],
}

fn plane(
    cfg: &PhysicalConfig,
    spec: &QuadratureSpec,
    theta: (f64, f64),
    b: &Boost,
    f: impl Fn(&SpinAmplitude, [f64; 2]) -> f64,
) -> Result<f64> {
    let mut failure = None;
    let r = integrate_plane(
        |p1, p2| match amplitude(theta, Momentum2::new(p1, p2), b, cfg) {
            Ok(a) => f(&a, [p1, p2]),
            Err(e) => {
                failure = Some(e);
                0.0
            }
        },
        cfg.kappa(),
        spec,
    )?;
    failure.map_or(Ok(r.value), Err)
}

fn inner_products(
    cfg: &PhysicalConfig,
    v: f64,
    theta: (f64, f64),
    spec: &QuadratureSpec,
) -> Result<InnerProducts> {
    let b = boost_from_velocity(v)?;
    b.finite()?;
    let comp = |a: &SpinAmplitude, s: usize| if s == 0 { a.down } else { a.up };
    let mut ip = InnerProducts {
        norm: [0.0; 2],
        second: [[[0.0; 2]; 2]; 2],
        first: [[0.0; 2]; 2],
        cross: [Complex64::new(0.0, 0.0); 2],
    };
    for s in 0..2 {
        ip.norm[s] = plane(cfg, spec, theta, &b, |a, _| comp(a, s).norm_sqr())?;
        for j in 0..2 {
            // ⟨∂_j F|F⟩ = ∫ conj(-i p_j F)·F = i ∫ p_j |F|²
            ip.first[s][j] = plane(cfg, spec, theta, &b, |a, p| p[j] * comp(a, s).norm_sqr())?;
            for k in j..2 {
                let val = plane(cfg, spec, theta, &b, |a, p| {
                    p[j] * p[k] * comp(a, s).norm_sqr()
                })?;
                ip.second[s][j][k] = val;
                ip.second[s][k][j] = val;
            }
        }
    }
    for j in 0..2 {
        let z = |a: &SpinAmplitude, p: [f64; 2]| a.up.conj() * Complex64::new(0.0, -p[j]) * a.down;
        let re = plane(cfg, spec, theta, &b, |a, p| z(a, p).re)?;
        let im = plane(cfg, spec, theta, &b, |a, p| z(a, p).im)?;
        ip.cross[j] = Complex64::new(re, im);
    }
    Ok(ip)
}

/// Fisher matrix of the rank-2 mixture `Σ_σ λ_σ |ψ̄_σ⟩⟨ψ̄_σ|`, assembled
/// from numerically integrated inner products of the normalized components:
///
/// `J_jk = Σ_σ 4λ_σ Re[⟨∂_jψ̄_σ|∂_kψ̄_σ⟩ - ⟨∂_jψ̄_σ|ψ̄_σ⟩⟨ψ̄_σ|∂_kψ̄_σ⟩]
///        - 16 λ↓λ↑ Re[conj(a_j)·a_k]`, `a_j = ⟨ψ̄↑|∂_jψ̄↓⟩`.
///
/// The weights `λ_σ` are the component norms themselves.
pub fn j_moving_oracle(
    cfg: &PhysicalConfig,
    v: f64,
    spec: &QuadratureSpec,
) -> Result<FisherMatrix> {
    j_moving_oracle_at((0.0, 0.0), cfg, v, spec)
}

/// [`j_moving_oracle`] evaluated at an arbitrary shift `theta`.
pub fn j_moving_oracle_at(
    theta: (f64, f64),
    cfg: &PhysicalConfig,
    v: f64,
    spec: &QuadratureSpec,
) -> Result<FisherMatrix> {
    check_domain("v", v, v > 0.0 && v < 1.0, "0 < v < 1")?;
    let ip = inner_products(cfg, v, theta, spec)?;
    let lambda = ip.norm;
    let mut j = Matrix2::zeros();
    for r in 0..2 {
        for c in 0..2 {
            let mut acc = 0.0;
            for s in 0..2 {
                let l = lambda[s];
                let dd = ip.second[s][r][c] / l;
                // ⟨∂_rψ̄|ψ̄⟩⟨ψ̄|∂_cψ̄⟩ = (i f_r)(-i f_c) = f_r f_c
                let (fr, fc) = (ip.first[s][r] / l, ip.first[s][c] / l);
                acc += 4.0 * l * (dd - fr * fc);
            }
            let norm = (lambda[0] * lambda[1]).sqrt();
            let (ar, ac) = (ip.cross[r] / norm, ip.cross[c] / norm);
            acc -= 16.0 * lambda[0] * lambda[1] * (ar.conj() * ac).re;
            j[(r, c)] = acc;
        }
    }
    Ok(FisherMatrix(j))
}

/// Largest `|⟨∂_jψ̄_σ|ψ̄_σ⟩|` over both components and both axes; zero by
/// parity of the integrand.
pub fn first_moment_defect(cfg: &PhysicalConfig, v: f64, spec: &QuadratureSpec) -> Result<f64> {
    let ip = inner_products(cfg, v, (0.0, 0.0), spec)?;
    let mut worst = 0.0f64;
    for s in 0..2 {
        for j in 0..2 {
            worst = worst.max((ip.first[s][j] / ip.norm[s]).abs());
        }
    }
    Ok(worst)
}

/// Fisher matrix of the boosted pure state with spin kept,
/// `4 Re[⟨∂_jΨ|∂_kΨ⟩ - ⟨∂_jΨ|Ψ⟩⟨Ψ|∂_kΨ⟩]`; a unitary image of the rest-frame
/// model, so it must equal [`j_rest`].
pub fn j_pure_boosted(cfg: &PhysicalConfig, v: f64, spec: &QuadratureSpec) -> Result<FisherMatrix> {
    check_domain("v", v, (0.0..1.0).contains(&v), "0 <= v < 1")?;
    let ip = inner_products(cfg, v, (0.0, 0.0), spec)?;
    let norm = ip.norm[0] + ip.norm[1];
    let mut j = Matrix2::zeros();
    for r in 0..2 {
        for c in 0..2 {
            let dd = (ip.second[0][r][c] + ip.second[1][r][c]) / norm;
            let fr = (ip.first[0][r] + ip.first[1][r]) / norm;
            let fc = (ip.first[0][c] + ip.first[1][c]) / norm;
            j[(r, c)] = 4.0 * (dd - fr * fc);
        }
    }
    Ok(FisherMatrix(j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{eta_cartesian, nu, Axis};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn cfg(m: f64, k: f64) -> PhysicalConfig {
        PhysicalConfig::new(m, k).unwrap()
    }

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    /// `upper` integrand on the half line, as an independent check of the
    /// erfcx closed forms.
    fn kappa_eta_limit_by_quadrature(k: f64) -> f64 {
        crate::numerics::integrate_semi_infinite(
            |u| u.powi(3) * (-u * u).exp() / (k * k + u * u).sqrt(),
            &QuadratureSpec::new(1e-13, 0.0, 2000).unwrap(),
        )
        .unwrap()
        .value
    }

    #[test]
    fn rest_frame() {
        let j = j_rest(&cfg(1.0, 1.0));
        assert_eq!(*j.matrix(), Matrix2::new(2.0, 0.0, 0.0, 2.0));
        let inv = j_rest(&cfg(3.0, 0.5)).inverse().unwrap();
        assert_eq!(inv, Matrix2::new(0.125, 0.0, 0.0, 0.125));
        let tiny = j_rest(&cfg(1.0, 1e-6)).inverse().unwrap();
        assert!(tiny.amax() < 1e-12);
        let b = cr_bound(&j_rest(&cfg(1.0, 0.2))).unwrap();
        assert_relative_eq!(b.var_theta1, 0.02, max_relative = 1e-15);
    }

    #[test]
    fn moving_frame_basics() {
        let c = cfg(1.0, 1.0);
        assert_eq!(j_moving(&c, 0.0, &spec()).unwrap(), j_rest(&c));
        for v in [0.1, 0.5, 0.99, 1.0] {
            let j = j_moving(&c, v, &spec()).unwrap();
            assert!(j.is_positive_definite());
            assert!(j.loewner_le(&j_rest(&c), LOEWNER_TOLERANCE));
            assert!(!j_rest(&c).loewner_le(&j, LOEWNER_TOLERANCE));
        }
        assert_eq!(j_moving(&c, 1.0, &spec()).unwrap(), j_rel(&c));
    }

    #[test]
    fn oracle_matches_closed_form() {
        let c = cfg(1.0, 1.0);
        let closed = j_moving(&c, 0.9, &spec()).unwrap();
        let oracle = j_moving_oracle(&c, 0.9, &spec()).unwrap();
        assert!(oracle.max_relative_diff(&closed) < 1e-8);
        let oracle = j_moving_oracle(&c, 0.7, &spec()).unwrap();
        assert!(oracle.0[(0, 1)].abs() < 1e-10 && oracle.0[(1, 0)].abs() < 1e-10);
        assert!(first_moment_defect(&c, 0.7, &spec()).unwrap() < 1e-12);
        let shifted = j_moving_oracle_at((0.4, -2.0), &c, 0.7, &spec()).unwrap();
        assert!(shifted.max_relative_diff(&oracle) < 1e-9);
        assert!(j_moving_oracle(&c, 0.0, &spec()).is_err());
    }

    #[test]
    fn oracle_spin_blocks_carry_nu_which_cancels() {
        // The per-component second moments are 1/(4κ²) ± ν/2; their weighted
        // sum is ν-free. Check the blocks against ν directly.
        let c = cfg(0.8, 1.3);
        let v = 0.85;
        let ip = inner_products(&c, v, (0.0, 0.0), &spec()).unwrap();
        let n = nu(&c, v, &spec()).unwrap();
        let base = 1.0 / (4.0 * 1.3 * 1.3);
        assert_relative_eq!(ip.second[0][0][0], base + 0.5 * n, max_relative = 1e-9);
        assert_relative_eq!(ip.second[1][0][0], base - 0.5 * n, max_relative = 1e-8);
        // |a₁|·sqrt(λ↓λ↑) = η/2
        let e = eta_cartesian(&c, v, Axis::P1, &spec()).unwrap();
        assert_relative_eq!(ip.cross[0].norm(), 0.5 * e, max_relative = 1e-9);
    }

    #[test]
    fn pure_boosted_state_keeps_rest_information() {
        let c = cfg(1.0, 0.7);
        let j = j_pure_boosted(&c, 0.8, &spec()).unwrap();
        assert!(j.max_relative_diff(&j_rest(&c)) < 1e-8);
    }

    #[test]
    fn relativistic_limit_closed_form() {
        for k in [0.01, 0.3, 1.0, 4.0] {
            assert_relative_eq!(
                kappa_eta_limit(k),
                kappa_eta_limit_by_quadrature(k),
                max_relative = 1e-11
            );
        }
        // [J⁻¹]₁₁ - κ²/2 → 1/(4m²) for large mκ
        let c = cfg(50.0, 1.0);
        let excess = j_rel(&c).inverse().unwrap()[(0, 0)] - 0.5;
        assert!((excess / (1.0 / (4.0 * 2500.0)) - 1.0).abs() < 0.01);
        let c = cfg(1e-3, 1.0);
        let ratio = j_rel(&c).inverse().unwrap()[(0, 0)] / 0.5;
        assert!((ratio * (1.0 - PI / 8.0) - 1.0).abs() < 0.01);
    }

    #[test]
    fn moving_frame_converges_to_limit() {
        // the gap to the limit scales like sqrt(1 - v²)
        let c = cfg(1.0, 1.0);
        let lim = j_rel(&c).0[(0, 0)];
        let g1 = j_moving(&c, 1.0 - 1e-6, &spec()).unwrap().0[(0, 0)] - lim;
        let g2 = j_moving(&c, 1.0 - 1e-8, &spec()).unwrap().0[(0, 0)] - lim;
        assert!(g1 > 0.0 && g2 > 0.0);
        assert_relative_eq!(g1 / g2, 10.0, max_relative = 1e-3);
    }

    #[test]
    fn delta_values() {
        let c = cfg(1.0, 1.0);
        assert_eq!(delta_ratio(&c, 0.0, &spec()).unwrap().value, 1.0);
        assert_eq!(delta_upper_bound(0.0).unwrap(), 1.0);
        assert_relative_eq!(delta_upper_bound(1.0).unwrap(), 1.0 / (1.0 - PI / 8.0));
        assert_relative_eq!(delta_upper_bound(0.5).unwrap(), 1.0 / (1.0 - PI / 32.0));
        assert!(delta_upper_bound(1.5).is_err());
        let d = delta_ratio(&cfg(1e-4, 1.0), 1.0, &spec()).unwrap().value;
        assert!((d / delta_upper_bound(1.0).unwrap() - 1.0).abs() < 5e-3);
        // ratio equals the inverse-matrix ratio
        let j = j_moving(&c, 0.6, &spec()).unwrap();
        let via_inverse = j.inverse().unwrap()[(0, 0)] / j_rest(&c).inverse().unwrap()[(0, 0)];
        assert_relative_eq!(
            delta_ratio(&c, 0.6, &spec()).unwrap().value,
            via_inverse,
            max_relative = 1e-14
        );
    }

    #[test]
    fn delta_monotone_in_velocity_and_kappa() {
        for k in [0.1, 0.5, 1.0, 3.0] {
            let c = cfg(1.0, k);
            let mut prev = 1.0;
            for i in 0..=20 {
                let d = delta_ratio(&c, i as f64 / 20.0, &spec()).unwrap().value;
                assert!(d >= prev);
                prev = d;
            }
        }
        for v in [0.2, 0.6, 0.95, 1.0] {
            let mut prev = f64::INFINITY;
            for k in [0.1, 0.5, 1.0, 3.0] {
                let d = delta_ratio(&cfg(1.0, k), v, &spec()).unwrap().value;
                assert!(d < prev);
                prev = d;
            }
        }
    }

    #[test]
    fn bounds_limits_and_sandwich() {
        let b = kappa_eta_bounds(1e-6).unwrap();
        assert!(
            (b.lower - 0.443_113_462_7).abs() < 1e-5 && (b.upper - 0.443_113_462_7).abs() < 1e-5
        );
        let b = kappa_eta_bounds(50.0).unwrap();
        assert!((b.lower * 200.0 - 1.0).abs() < 0.01);
        assert!((b.upper * 100.0 - 1.0).abs() < 0.01);
        let b = kappa_eta_bounds(1.0).unwrap();
        assert_relative_eq!(b.lower, 0.189_468_039_035_33, max_relative = 1e-11);
        assert_relative_eq!(b.upper, 0.310_531_960_964_67, max_relative = 1e-11);
        let c = cfg(1.0, 1.0);
        let r = eta(&c, 0.7, &spec()).unwrap() / 0.7;
        assert!(b.lower <= r && r <= b.upper);
        assert_relative_eq!(r, 0.213_006_821_157_82, max_relative = 1e-10);
        assert!(kappa_eta_bounds(0.0).is_err());
    }

    #[test]
    fn weak_commutativity_values() {
        let c = cfg(1.0, 1.0);
        assert_eq!(weak_commutativity(&c, 0.0, &spec()).unwrap(), 0.0);
        for v in [0.3, 0.6, 0.9] {
            let w = weak_commutativity(&c, v, &spec()).unwrap();
            let x = xi(&c, v, &spec()).unwrap();
            let e = eta(&c, v, &spec()).unwrap();
            assert!(w > 0.0);
            assert_relative_eq!(w, 8.0 * x * e * e, max_relative = 1e-10);
        }
        assert!(weak_commutativity(&c, 1.0, &spec()).unwrap() > 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn sandwich_holds(k in 1e-3f64..30.0, v in 0.01f64..=1.0) {
            let c = cfg(k, 1.0);
            let b = kappa_eta_bounds(k).unwrap();
            let r = eta(&c, v, &spec()).unwrap() / v;
            prop_assert!(b.lower * (1.0 - 1e-9) <= r && r <= b.upper * (1.0 + 1e-9));
            prop_assert!(b.lower <= b.upper);
        }

        #[test]
        fn delta_below_bound(m in 1e-3f64..10.0, k in 0.05f64..5.0, v in 0.0f64..=1.0) {
            let d = delta_ratio(&cfg(m, k), v, &spec()).unwrap().value;
            prop_assert!(d >= 1.0 && d <= delta_upper_bound(v).unwrap() + 1e-9);
        }
    }
}

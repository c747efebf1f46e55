//! Boost kinematics along the third axis and the Wigner rotation it induces on
//! a spin-1/2 particle with transverse momentum `(p1, p2, 0)`.
//!
//! Rotation conventions: `R3(φ)` turns the 1-2 plane by `+φ`, and
//! `R2(α) = [[cos α, 0, -sin α], [0, 1, 0], [sin α, 0, cos α]]`.
//! With these, the spatial block of `L⁻¹(Λp)·Λ·L(p)` is `R3(φ)·R2(α)·R3(-φ)`.

use nalgebra::{Matrix2, Matrix3, Matrix4, Vector3, Vector4};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{check_domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalConfig {
    m: f64,
    kappa: f64,
}

impl PhysicalConfig {
    pub fn new(m: f64, kappa: f64) -> Result<Self> {
        check_domain("m", m, m.is_finite() && m > 0.0, "0 < m < inf")?;
        check_domain(
            "kappa",
            kappa,
            kappa.is_finite() && kappa > 0.0,
            "0 < kappa < inf",
        )?;
        Ok(Self { m, kappa })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// The dimensionless product every observable depends on (with `v`).
    pub fn m_kappa(&self) -> f64 {
        self.m * self.kappa
    }
}

/// A boost with finite rapidity, `0 <= v < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiniteBoost {
    pub v: f64,
    pub cosh_chi: f64,
    pub sinh_chi: f64,
    /// `sqrt(1 - v²) = 1/cosh χ`, formed as `sqrt((1-v)(1+v))`
    pub inv_gamma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Boost {
    Finite(FiniteBoost),
    /// `v = 1`; no finite rapidity exists.
    RelativisticLimit,
}

impl Boost {
    pub fn v(&self) -> f64 {
        match self {
            Boost::Finite(b) => b.v,
            Boost::RelativisticLimit => 1.0,
        }
    }

    pub fn finite(&self) -> Result<&FiniteBoost> {
        match self {
            Boost::Finite(b) => Ok(b),
            Boost::RelativisticLimit => Err(Error::RelativisticLimit),
        }
    }

    pub fn is_limit(&self) -> bool {
        matches!(self, Boost::RelativisticLimit)
    }
}

pub fn boost_from_velocity(v: f64) -> Result<Boost> {
    check_domain("v", v, (0.0..=1.0).contains(&v), "0 <= v <= 1")?;
    if v == 1.0 {
        return Ok(Boost::RelativisticLimit);
    }
    let inv_gamma = ((1.0 - v) * (1.0 + v)).sqrt();
    Ok(Boost::Finite(FiniteBoost {
        v,
        cosh_chi: 1.0 / inv_gamma,
        sinh_chi: v / inv_gamma,
        inv_gamma,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Momentum2 {
    pub p1: f64,
    pub p2: f64,
}

impl Momentum2 {
    pub fn new(p1: f64, p2: f64) -> Self {
        Self { p1, p2 }
    }

    pub fn norm(&self) -> f64 {
        self.p1.hypot(self.p2)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.p1 * self.p1 + self.p2 * self.p2
    }

    /// `p⁰ = sqrt(m² + |p|²)`
    pub fn energy(&self, m: f64) -> f64 {
        (m * m + self.norm_sqr()).sqrt()
    }
}

/// Spatial part of `Λp`: `(p1, p2, -p⁰ sinh χ)`.
pub fn boost_momentum(p: Momentum2, b: &Boost, cfg: &PhysicalConfig) -> Result<Vector3<f64>> {
    let b = b.finite()?;
    Ok(Vector3::new(p.p1, p.p2, -p.energy(cfg.m) * b.sinh_chi))
}

/// Wigner rotation angles; `sin α <= 0 < cos α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WignerAngles {
    pub cos_alpha: f64,
    pub sin_alpha: f64,
    /// azimuth of `p` in `(-π, π]`; 0 at `p = 0`
    pub phi: f64,
    /// `1 - cos α` without cancellation
    versine: f64,
}

impl WignerAngles {
    /// Angles from an explicit `α` (any sign) and `φ`.
    pub fn from_alpha(alpha: f64, phi: f64) -> Self {
        let half = (0.5 * alpha).sin();
        Self {
            cos_alpha: alpha.cos(),
            sin_alpha: alpha.sin(),
            phi,
            versine: 2.0 * half * half,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.sin_alpha.atan2(self.cos_alpha)
    }

    pub fn one_minus_cos(&self) -> f64 {
        self.versine
    }

    pub fn cos_half(&self) -> f64 {
        (1.0 - 0.5 * self.versine).sqrt()
    }

    /// Carries the sign of `sin α`.
    pub fn sin_half(&self) -> f64 {
        let two_cos_sq = 2.0 * (2.0 - self.versine);
        if two_cos_sq == 0.0 {
            return 1.0f64.copysign(self.sin_alpha);
        }
        self.sin_alpha / two_cos_sq.sqrt()
    }

    /// `e^{iφ}` as `(cos φ, sin φ)`.
    pub fn phase(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.phi)
    }
}

fn azimuth(p: Momentum2) -> f64 {
    if p.p1 == 0.0 && p.p2 == 0.0 {
        return 0.0;
    }
    let phi = p.p2.atan2(p.p1);
    if phi == -std::f64::consts::PI {
        std::f64::consts::PI
    } else {
        phi
    }
}

/// Wigner angles at transverse momentum `p`.
///
/// Evaluated in the velocity form (numerator and denominator scaled by
/// `1/cosh χ`), which stays accurate as `v → 1`. For the relativistic-limit
/// marker the `v → 1` limit of the angles is returned: `cos α = m/p⁰`,
/// `sin α = -|p|/p⁰`.
pub fn wigner_angles(p: Momentum2, b: &Boost, cfg: &PhysicalConfig) -> WignerAngles {
    let m = cfg.m;
    let n2 = p.norm_sqr();
    let n = n2.sqrt();
    let p0 = (m * m + n2).sqrt();
    let excess = n2 / (p0 + m); // p⁰ - m
    let (cos_alpha, sin_alpha, versine) = match b {
        Boost::Finite(b) => {
            let s = b.inv_gamma;
            let den = p0 + m * s;
            let versine = excess * (b.v * b.v / (1.0 + s)) / den;
            ((p0 * s + m) / den, -n * b.v / den, versine)
        }
        Boost::RelativisticLimit => (m / p0, -n / p0, excess / p0),
    };
    WignerAngles {
        cos_alpha,
        sin_alpha,
        phi: azimuth(p),
        versine,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation3(pub Matrix3<f64>);

impl Rotation3 {
    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn max_abs_diff(&self, other: &Rotation3) -> f64 {
        (self.0 - other.0).amax()
    }

    /// Largest deviation from `RᵀR = I` and from `det R = 1`.
    pub fn orthogonality_defect(&self) -> f64 {
        let gram = (self.0.transpose() * self.0 - Matrix3::identity()).amax();
        gram.max((self.0.determinant() - 1.0).abs())
    }
}

fn rot2(cos_a: f64, sin_a: f64) -> Matrix3<f64> {
    Matrix3::new(cos_a, 0.0, -sin_a, 0.0, 1.0, 0.0, sin_a, 0.0, cos_a)
}

fn rot3(phi: f64) -> Matrix3<f64> {
    let (s, c) = phi.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// Spatial block of `W(Λ, p)` from its closed-form entries.
pub fn wigner_matrix(p: Momentum2, b: &Boost, cfg: &PhysicalConfig) -> Result<Rotation3> {
    let b = b.finite()?;
    let n2 = p.norm_sqr();
    if n2 == 0.0 {
        return Err(Error::DegenerateMomentum);
    }
    let m = cfg.m;
    let (ch, sh) = (b.cosh_chi, b.sinh_chi);
    let p0 = p.energy(m);
    let (q1, q2) = (p.p1 * p.p1, p.p2 * p.p2);
    let den = p0 * ch + m;
    let excess = n2 / (p0 + m);
    let diagonal = |a: f64, c: f64| {
        (p0 * (m * a + p0 * c) * sh * sh + n2 * (a * ch + c)) / (n2 * ((p0 * sh).powi(2) + n2))
    };
    let w11 = diagonal(q1, q2);
    let w22 = diagonal(q2, q1);
    let w21 = -p.p1 * p.p2 * (ch - 1.0) * excess / (n2 * den);
    let w31 = -p.p1 * sh / den;
    let w32 = -p.p2 * sh / den;
    let w33 = (p0 + m * ch) / den;
    Ok(Rotation3(Matrix3::new(
        w11, w21, -w31, //
        w21, w22, -w32, //
        w31, w32, w33,
    )))
}

/// Standard boost `L(p)` taking the rest momentum `(m, 0)` to `(p⁰, p)`.
fn standard_boost(p: &Vector3<f64>, m: f64) -> Matrix4<f64> {
    let n2 = p.norm_squared();
    let p0 = (m * m + n2).sqrt();
    let mut l = Matrix4::identity();
    l[(0, 0)] = p0 / m;
    for i in 0..3 {
        l[(i + 1, 0)] = p[i] / m;
        l[(0, i + 1)] = p[i] / m;
        if n2 > 0.0 {
            for j in 0..3 {
                l[(i + 1, j + 1)] += (p0 - m) * p[i] * p[j] / (m * n2);
            }
        }
    }
    l
}

/// Spatial block of `L⁻¹(Λp)·Λ·L(p)` by explicit 4×4 products.
///
/// The inverse of a standard boost is the standard boost of the reversed
/// momentum. The time row and column of the product are checked to be
/// trivial.
pub fn wigner_matrix_composed(p: Momentum2, b: &Boost, cfg: &PhysicalConfig) -> Result<Rotation3> {
    let b = b.finite()?;
    let m = cfg.m;
    let (ch, sh) = (b.cosh_chi, b.sinh_chi);
    #[rustfmt::skip]
    let lambda = Matrix4::new(
        ch,  0.0, 0.0, -sh,
        0.0, 1.0, 0.0, 0.0,
        0.0, 0.0, 1.0, 0.0,
        -sh, 0.0, 0.0, ch,
    );
    let pv = Vector3::new(p.p1, p.p2, 0.0);
    let four = lambda * Vector4::new(p.energy(m), p.p1, p.p2, 0.0);
    let q = Vector3::new(four[1], four[2], four[3]);
    let w = standard_boost(&(-q), m) * lambda * standard_boost(&pv, m);
    let scale = ch * ch * (1.0 + pv.norm_squared() / (m * m));
    debug_assert!((w[(0, 0)] - 1.0).abs() <= 1e-9 * scale);
    debug_assert!(
        (1..4).all(|k| w[(0, k)].abs() <= 1e-9 * scale && w[(k, 0)].abs() <= 1e-9 * scale)
    );
    Ok(Rotation3(w.fixed_view::<3, 3>(1, 1).into_owned()))
}

/// `R3(φ)·R2(α)·R3(-φ)`.
pub fn euler_reconstruct(a: &WignerAngles) -> Rotation3 {
    Rotation3(rot3(a.phi) * rot2(a.cos_alpha, a.sin_alpha) * rot3(-a.phi))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinHalfRep(pub Matrix2<Complex64>);

impl SpinHalfRep {
    pub fn matrix(&self) -> &Matrix2<Complex64> {
        &self.0
    }

    /// Largest deviation from `U†U = I` and from `det U = 1`.
    pub fn unitarity_defect(&self) -> f64 {
        let u = &self.0;
        let gram = u.adjoint() * u - Matrix2::identity();
        let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
        gram.iter()
            .map(|z| z.norm())
            .fold((det - 1.0).norm(), f64::max)
    }
}

/// `[[cos(α/2), -e^{iφ} sin(α/2)], [e^{-iφ} sin(α/2), cos(α/2)]]` in the
/// basis (spin up, spin down).
pub fn spin_half_rep(a: &WignerAngles) -> SpinHalfRep {
    let c = Complex64::new(a.cos_half(), 0.0);
    let s = a.sin_half();
    let e = a.phase();
    SpinHalfRep(Matrix2::new(c, -e * s, e.conj() * s, c))
}

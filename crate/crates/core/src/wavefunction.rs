//! Coordinate-space densities of the two spin components, the location of the
//! spin-up peak, and the classical Fisher information of a position
//! measurement.
//!
//! Wave functions are `ψ(x) = (1/2π) ∫∫ F(p) e^{-ip·x} d²p` on the plane
//! `x³ = 0`, discretized on a centred `n × n` momentum grid `|p_j| < p_max`.
//! All integrands are Gaussian-damped and analytic in `(p1, p2)`, so the
//! rectangle rule converges geometrically in both the grid step and the
//! window.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{check_domain, Error, Result};
use crate::numerics::QuadratureSpec;
use crate::state::{spin_weights, SpinWeights};
use crate::wigner::{boost_from_velocity, wigner_angles, Boost, Momentum2, PhysicalConfig};

/// Densities below this fraction of the peak are left out of `(∂p)²/p`.
pub const DENSITY_FLOOR_RATIO: f64 = 1e-300;

pub const DEFAULT_GRID_POINTS: usize = 512;

/// Momentum window in units of `1/κ`; the Gaussian envelope is `e^{-32}` there.
pub const DEFAULT_WINDOW_WIDTH: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentumWindow {
    n: usize,
    p_max: f64,
}

impl MomentumWindow {
    /// `n` points per axis (a multiple of 4, at least 16) on `[-p_max, p_max)`.
    pub fn new(n: usize, p_max: f64) -> Result<Self> {
        check_domain(
            "grid points",
            n as f64,
            n >= 16 && n % 4 == 0,
            ">= 16 and a multiple of 4",
        )?;
        check_domain(
            "p_max",
            p_max,
            p_max.is_finite() && p_max > 0.0,
            "0 < p_max",
        )?;
        Ok(Self { n, p_max })
    }

    /// `n` points with `p_max = 8/κ`.
    pub fn for_config(cfg: &PhysicalConfig, n: usize) -> Result<Self> {
        Self::new(n, DEFAULT_WINDOW_WIDTH / cfg.kappa())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    pub fn dp(&self) -> f64 {
        2.0 * self.p_max / self.n as f64
    }

    fn momentum(&self, k: usize) -> f64 {
        (k as f64 - (self.n / 2) as f64) * self.dp()
    }

    /// Half period of the discrete transform: positions beyond it alias.
    pub fn x_limit(&self) -> f64 {
        PI / self.dp()
    }

    /// Position step of the full two-dimensional transform.
    pub fn dx(&self) -> f64 {
        2.0 * PI / (self.n as f64 * self.dp())
    }

    fn check_extent(&self, x_max: f64) -> Result<()> {
        if x_max > self.x_limit() {
            return Err(Error::Resolution {
                x_max,
                limit: self.x_limit(),
                hint: format!(
                    "use at least {} grid points or a smaller momentum window",
                    (self.n as f64 * x_max / self.x_limit() / 4.0).ceil() as usize * 4
                ),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormalizationMode {
    /// Amplitude prefactor `sqrt(2/(1∓ξ))·κ/(2π)²·sqrt(cosh χ)`, the
    /// absolute scale of the textbook expression for the boosted packet.
    #[serde(rename = "raw")]
    Raw,
    /// The two-dimensional density of each component integrates to one.
    #[serde(rename = "2d-normalized")]
    Normalized,
}

impl NormalizationMode {
    pub fn label(&self) -> &'static str {
        match self {
            NormalizationMode::Raw => "raw",
            NormalizationMode::Normalized => "2d-normalized",
        }
    }
}

impl std::str::FromStr for NormalizationMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "raw" => Ok(NormalizationMode::Raw),
            "2d-normalized" => Ok(NormalizationMode::Normalized),
            other => Err(format!(
                "unknown normalization mode '{other}' (raw | 2d-normalized)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Component {
    Down,
    Up,
}

/// Samples of a density (or of its derivative) along `x¹` at `x² = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityProfile {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub mode: NormalizationMode,
}

/// Momentum kernel without the normalization constant:
/// `e^{-κ²|p|²/2}·cos(α/2)` (down) or `e^{-κ²|p|²/2}·e^{iφ}·sin(α/2)` (up).
fn kernel(p: Momentum2, b: &Boost, cfg: &PhysicalConfig, c: Component) -> Complex64 {
    let k2 = cfg.kappa().powi(2);
    let env = (-0.5 * k2 * p.norm_sqr()).exp();
    let a = wigner_angles(p, b, cfg);
    match c {
        Component::Down => Complex64::new(env * a.cos_half(), 0.0),
        Component::Up => a.phase() * (env * a.sin_half()),
    }
}

/// `G(p¹) = Σ_{p²} kernel(p¹, p²)·dp`, the kernel collapsed onto `x² = 0`.
fn collapse(w: &MomentumWindow, b: &Boost, cfg: &PhysicalConfig, c: Component) -> Vec<Complex64> {
    let dp = w.dp();
    (0..w.n)
        .map(|i| {
            let p1 = w.momentum(i);
            (0..w.n)
                .map(|j| kernel(Momentum2::new(p1, w.momentum(j)), b, cfg, c))
                .sum::<Complex64>()
                * dp
        })
        .collect()
}

/// `Σ G(p)·(-ip)^order·e^{-ipx}·dp`.
fn line_transform(w: &MomentumWindow, g: &[Complex64], x: f64, derivative: bool) -> Complex64 {
    let dp = w.dp();
    g.iter()
        .enumerate()
        .map(|(i, gi)| {
            let p = w.momentum(i);
            let phase = Complex64::from_polar(1.0, -p * x);
            if derivative {
                gi * phase * Complex64::new(0.0, -p)
            } else {
                gi * phase
            }
        })
        .sum::<Complex64>()
        * dp
}

/// Amplitude prefactor in front of `∫∫ kernel·e^{-ip·x} d²p`.
///
/// Down is `+`, up is `-` (the spin-up amplitude carries `-e^{iφ} sin(α/2)`).
fn prefactor(
    cfg: &PhysicalConfig,
    b: &Boost,
    weights: &SpinWeights,
    c: Component,
    mode: NormalizationMode,
) -> Result<f64> {
    let (sign, weight) = match c {
        Component::Down => (1.0, weights.p_down),
        Component::Up => (-1.0, weights.p_up),
    };
    if weight <= 0.0 {
        return Err(Error::Domain {
            what: "component weight",
            value: weight,
            expected: "> 0 (the spin-up component needs v > 0)",
        });
    }
    let k = cfg.kappa();
    let norm = (1.0 / weight).sqrt();
    Ok(sign
        * norm
        * match mode {
            // φ₀(p¹)φ₀(p²) = (κ/√π)·e^{-κ²|p|²/2}, and the transform carries 1/(2π)
            NormalizationMode::Normalized => k / PI.sqrt() / (2.0 * PI),
            NormalizationMode::Raw => k / (2.0 * PI).powi(2) * b.finite()?.cosh_chi.sqrt(),
        })
}

fn check_grid(grid: &[f64], w: &MomentumWindow) -> Result<()> {
    if let Some(bad) = grid.iter().find(|x| !x.is_finite()) {
        return Err(Error::Domain {
            what: "grid point",
            value: *bad,
            expected: "finite",
        });
    }
    let x_max = grid.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    w.check_extent(x_max)
}

fn component_profile(
    cfg: &PhysicalConfig,
    v: f64,
    grid: &[f64],
    mode: NormalizationMode,
    window: &MomentumWindow,
    spec: &QuadratureSpec,
    c: Component,
    derivative: bool,
) -> Result<DensityProfile> {
    let b = boost_from_velocity(v)?;
    b.finite()?;
    check_grid(grid, window)?;
    let weights = spin_weights(cfg, v, spec)?;
    let pref = prefactor(cfg, &b, &weights, c, mode)?;
    let g = collapse(window, &b, cfg, c);
    let values = grid
        .iter()
        .map(|&x| {
            let psi = pref * line_transform(window, &g, x, false);
            if derivative {
                let dpsi = pref * line_transform(window, &g, x, true);
                2.0 * (psi.conj() * dpsi).re
            } else {
                psi.norm_sqr()
            }
        })
        .collect();
    Ok(DensityProfile {
        grid: grid.to_vec(),
        values,
        mode,
    })
}

/// `|ψ↑(x¹, 0)|²` on `grid`, for `0 < v < 1`.
pub fn psi_up_profile(
    cfg: &PhysicalConfig,
    v: f64,
    grid: &[f64],
    mode: NormalizationMode,
    window: &MomentumWindow,
    spec: &QuadratureSpec,
) -> Result<DensityProfile> {
    check_domain("v", v, v > 0.0 && v < 1.0, "0 < v < 1")?;
    component_profile(cfg, v, grid, mode, window, spec, Component::Up, false)
}

/// `|ψ↓(x¹, 0)|²` on `grid`, for `0 <= v < 1`.
pub fn psi_down_profile(
    cfg: &PhysicalConfig,
    v: f64,
    grid: &[f64],
    mode: NormalizationMode,
    window: &MomentumWindow,
    spec: &QuadratureSpec,
) -> Result<DensityProfile> {
    component_profile(cfg, v, grid, mode, window, spec, Component::Down, false)
}

/// `d/dx¹ |ψ↑(x¹, 0)|²`, differentiated under the integral sign.
pub fn density_derivative_profile(
    cfg: &PhysicalConfig,
    v: f64,
    grid: &[f64],
    mode: NormalizationMode,
    window: &MomentumWindow,
    spec: &QuadratureSpec,
) -> Result<DensityProfile> {
    check_domain("v", v, v > 0.0 && v < 1.0, "0 < v < 1")?;
    component_profile(cfg, v, grid, mode, window, spec, Component::Up, true)
}

/// Samples in the coarse peak scan, over `(0, PEAK_SEARCH_WIDTH·κ]`.
const PEAK_SCAN_POINTS: usize = 2000;
const PEAK_SEARCH_WIDTH: f64 = 20.0;

/// Position `x¹ > 0` of the maximum of the spin-up density on `x² = 0`.
///
/// A coarse scan brackets the maximum; bisection on the sign of the
/// spectral derivative then pins it to rounding.
pub fn peak_location(cfg: &PhysicalConfig, v: f64, window: &MomentumWindow) -> Result<f64> {
    check_domain("v", v, v > 0.0 && v < 1.0, "0 < v < 1")?;
    let b = boost_from_velocity(v)?;
    let search_max = (PEAK_SEARCH_WIDTH * cfg.kappa()).min(window.x_limit());
    let g = collapse(window, &b, cfg, Component::Up);
    let density = |x: f64| line_transform(window, &g, x, false).norm_sqr();
    let slope = |x: f64| {
        let psi = line_transform(window, &g, x, false);
        let dpsi = line_transform(window, &g, x, true);
        (psi.conj() * dpsi).re
    };
    let step = search_max / PEAK_SCAN_POINTS as f64;
    let (best, _) = (1..=PEAK_SCAN_POINTS)
        .map(|i| (i, density(i as f64 * step)))
        .fold(
            (0, f64::NEG_INFINITY),
            |acc, (i, d)| if d > acc.1 { (i, d) } else { acc },
        );
    if best == PEAK_SCAN_POINTS {
        return Err(Error::NoInteriorMaximum { search_max });
    }
    let (mut lo, mut hi) = ((best - 1) as f64 * step, (best + 1) as f64 * step);
    if slope(lo) <= 0.0 || slope(hi) >= 0.0 {
        return Err(Error::NoInteriorMaximum { search_max });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if slope(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Centred two-dimensional transform of samples `f[k1·n + k2]` on the
/// momentum grid to positions `x_j = (j - n/2)·dx`, including `dp²/(2π)`.
fn transform_2d(w: &MomentumWindow, mut data: Vec<Complex64>) -> Vec<Complex64> {
    let n = w.n;
    let fft = FftPlanner::new().plan_fft_forward(n);
    // With n divisible by 4, e^{-i p_k x_j} = (-1)^(j+k) e^{-2πi jk/n}.
    let checker = |i: usize, j: usize| if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
    for i in 0..n {
        for j in 0..n {
            data[i * n + j] *= checker(i, j);
        }
    }
    for row in data.chunks_exact_mut(n) {
        fft.process(row);
    }
    let mut column = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        for i in 0..n {
            column[i] = data[i * n + j];
        }
        fft.process(&mut column);
        for i in 0..n {
            data[i * n + j] = column[i];
        }
    }
    let scale = w.dp().powi(2) / (2.0 * PI);
    for i in 0..n {
        for j in 0..n {
            data[i * n + j] *= scale * checker(i, j);
        }
    }
    data
}

/// Momentum amplitudes `F_σ` (unnormalized, weights included) on the grid,
/// optionally multiplied by `-i p_axis`.
fn amplitude_grid(
    w: &MomentumWindow,
    b: &Boost,
    cfg: &PhysicalConfig,
    c: Component,
    derivative_axis: Option<usize>,
) -> Vec<Complex64> {
    let n = w.n;
    let k = cfg.kappa();
    let envelope_norm = k / PI.sqrt();
    let sign = match c {
        Component::Down => 1.0,
        Component::Up => -1.0,
    };
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let p = [w.momentum(i), w.momentum(j)];
            let mut f = kernel(Momentum2::new(p[0], p[1]), b, cfg, c) * (sign * envelope_norm);
            if let Some(axis) = derivative_axis {
                f *= Complex64::new(0.0, -p[axis]);
            }
            out.push(f);
        }
    }
    out
}

/// Total probability of each component in position space, after dividing by
/// its momentum-space weight: `(down, up)`, both ideally 1.
pub fn position_norms(
    cfg: &PhysicalConfig,
    v: f64,
    window: &MomentumWindow,
    spec: &QuadratureSpec,
) -> Result<(f64, f64)> {
    let b = boost_from_velocity(v)?;
    b.finite()?;
    let weights = spin_weights(cfg, v, spec)?;
    let dx2 = window.dx().powi(2);
    let mass = |c| {
        transform_2d(window, amplitude_grid(window, &b, cfg, c, None))
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            * dx2
    };
    let down = mass(Component::Down) / weights.p_down;
    let up = if weights.p_up > 0.0 {
        mass(Component::Up) / weights.p_up
    } else {
        1.0
    };
    Ok((down, up))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassicalFisher {
    pub fi_theta1: f64,
    pub fi_theta2: f64,
    /// probability mass in cells dropped by the density floor
    pub excluded_mass: f64,
    pub window: MomentumWindow,
}

/// Fisher information of an ideal position measurement of the mixed state,
/// `∫∫ (∂_j p)²/p d²x` with `p = |ψ↓|² + |ψ↑|²` at `θ = 0`.
///
/// The shift enters as `ψ(x + θ)`, so `∂_θ` is a spatial derivative, taken
/// spectrally. Cells with `p` below [`DENSITY_FLOOR_RATIO`] of the peak are
/// excluded and their mass reported.
pub fn classical_fisher_position(
    cfg: &PhysicalConfig,
    v: f64,
    window: &MomentumWindow,
) -> Result<ClassicalFisher> {
    check_domain("v", v, (0.0..1.0).contains(&v), "0 <= v < 1")?;
    let b = boost_from_velocity(v)?;
    let field = |c, axis| transform_2d(window, amplitude_grid(window, &b, cfg, c, axis));
    let psi = [field(Component::Down, None), field(Component::Up, None)];
    let dpsi = [
        [
            field(Component::Down, Some(0)),
            field(Component::Up, Some(0)),
        ],
        [
            field(Component::Down, Some(1)),
            field(Component::Up, Some(1)),
        ],
    ];
    let density: Vec<f64> = psi[0]
        .iter()
        .zip(&psi[1])
        .map(|(d, u)| d.norm_sqr() + u.norm_sqr())
        .collect();
    let peak = density.iter().copied().fold(0.0, f64::max);
    let floor = DENSITY_FLOOR_RATIO * peak;
    let dx2 = window.dx().powi(2);
    let mut fi = [0.0; 2];
    let mut excluded = 0.0;
    for (idx, &p) in density.iter().enumerate() {
        if p <= floor {
            excluded += p * dx2;
            continue;
        }
        for axis in 0..2 {
            let dp: f64 = (0..2)
                .map(|s| 2.0 * (psi[s][idx].conj() * dpsi[axis][s][idx]).re)
                .sum();
            fi[axis] += dp * dp / p * dx2;
        }
    }
    Ok(ClassicalFisher {
        fi_theta1: fi[0],
        fi_theta2: fi[1],
        excluded_mass: excluded,
        window: *window,
    })
}

//! Adaptive Gauss–Kronrod quadrature on finite intervals, the half line and
//! the plane.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{check_domain, Error, Result};

/// Tolerances and work limit shared by every integral in the crate.
///
/// A result is accepted once `error_estimate <= max(abs_tol, rel_tol·|value|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadratureSpec {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self> {
        check_domain(
            "rel_tol",
            rel_tol,
            rel_tol.is_finite() && rel_tol > 0.0,
            "0 < rel_tol",
        )?;
        check_domain(
            "abs_tol",
            abs_tol,
            abs_tol.is_finite() && abs_tol >= 0.0,
            "abs_tol >= 0",
        )?;
        check_domain(
            "max_subdivisions",
            max_subdivisions as f64,
            max_subdivisions >= 1,
            ">= 1",
        )?;
        Ok(Self {
            rel_tol,
            abs_tol,
            max_subdivisions,
        })
    }

    pub fn with_rel_tol(self, rel_tol: f64) -> Result<Self> {
        Self::new(rel_tol, self.abs_tol, self.max_subdivisions)
    }

    fn tolerance(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_subdivisions: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

// 21-point Kronrod extension of the 10-point Gauss rule; Gauss nodes are the
// odd-indexed Kronrod abscissae.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_703_761_300,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    /// error is at the roundoff floor; bisecting cannot reduce it
    at_floor: bool,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Result<Panel> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut fv = [0.0; 21];
    for (i, &x) in XGK.iter().enumerate() {
        if i == 10 {
            fv[10] = f(center);
        } else {
            fv[i] = f(center - half * x);
            fv[20 - i] = f(center + half * x);
        }
    }
    if let Some(bad) = fv.iter().find(|v| !v.is_finite()) {
        return Err(Error::Domain {
            what: "integrand value",
            value: *bad,
            expected: "finite on the integration domain",
        });
    }

    let mut resk = WGK[10] * fv[10];
    let mut resabs = WGK[10] * fv[10].abs();
    let mut resg = 0.0;
    for i in 0..10 {
        let pair = fv[i] + fv[20 - i];
        resk += WGK[i] * pair;
        resabs += WGK[i] * (fv[i].abs() + fv[20 - i].abs());
        if i % 2 == 1 {
            resg += WG[i / 2] * pair;
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[10] * (fv[10] - mean).abs();
    for i in 0..10 {
        resasc += WGK[i] * ((fv[i] - mean).abs() + (fv[20 - i] - mean).abs());
    }

    let hl = half.abs();
    let value = resk * half;
    let resabs = resabs * hl;
    let resasc = resasc * hl;
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    let at_floor = resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) && err <= floor;
    if at_floor {
        err = floor;
    }
    Ok(Panel {
        a,
        b,
        value,
        error: err,
        at_floor,
    })
}

struct Adaptive {
    value: f64,
    error: f64,
    evaluations: usize,
}

fn adaptive<F: FnMut(f64) -> f64>(
    f: &mut F,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<Adaptive> {
    let mut heap = BinaryHeap::with_capacity(spec.max_subdivisions + 2);
    let mut evaluations = 0;
    let (mut value, mut error) = (0.0, 0.0);
    for w in breaks.windows(2) {
        let p = gauss_kronrod(f, w[0], w[1])?;
        evaluations += 21;
        value += p.value;
        error += p.error;
        heap.push(p);
    }

    loop {
        if error <= spec.tolerance(value) {
            break;
        }
        let worst = *heap.peek().expect("at least one panel");
        // Every remaining panel is at or below the worst one; if that one is
        // limited by roundoff, further bisection is pointless.
        if worst.at_floor {
            break;
        }
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) || heap.len() >= spec.max_subdivisions {
            let (value, error) = resum(&heap);
            return Err(Error::Convergence {
                value,
                error_estimate: error,
                evaluations,
            });
        }
        heap.pop();
        let left = gauss_kronrod(f, worst.a, mid)?;
        let right = gauss_kronrod(f, mid, worst.b)?;
        evaluations += 42;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    let (value, error) = resum(&heap);
    Ok(Adaptive {
        value,
        error,
        evaluations,
    })
}

fn resum(heap: &BinaryHeap<Panel>) -> (f64, f64) {
    let mut panels: Vec<&Panel> = heap.iter().collect();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    panels
        .iter()
        .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
}

/// `∫_a^b f(x) dx` by globally adaptive 21-point Gauss–Kronrod.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralResult> {
    check_domain("a", a, a.is_finite(), "finite")?;
    check_domain("b", b, b.is_finite(), "finite")?;
    if a == b {
        return Ok(IntegralResult {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let r = adaptive(&mut f, &[lo, hi], spec)?;
    Ok(IntegralResult {
        value: sign * r.value,
        error_estimate: r.error,
        evaluations: r.evaluations,
    })
}

const SCAN_LO: i32 = -40;
const SCAN_HI: i32 = 60;

/// Where the half-line integrand lives: a dyadic partition of `[0, cutoff]`
/// and the neglected-tail bound.
struct HalfLineSupport {
    breaks: Vec<f64>,
    tail: f64,
    evaluations: usize,
}

/// Scans `L(p) = p·|f(p)|` on `p = 2^k` and cuts the half line where `L` has
/// fallen three decades below the requested tolerance on two successive
/// points past its maximum.
fn half_line_support<F: FnMut(f64) -> f64>(
    f: &mut F,
    spec: &QuadratureSpec,
) -> Result<Option<HalfLineSupport>> {
    let profile: Vec<f64> = (SCAN_LO..=SCAN_HI)
        .map(|k| {
            let p = 2f64.powi(k);
            p * f(p).abs()
        })
        .collect();
    let evaluations = profile.len();
    if let Some(bad) = profile.iter().find(|v| !v.is_finite()) {
        return Err(Error::Domain {
            what: "integrand value",
            value: *bad,
            expected: "finite on [0, inf)",
        });
    }
    let (peak, lmax) = profile
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0), |acc, (i, l)| if l > acc.1 { (i, l) } else { acc });
    if lmax == 0.0 {
        return Ok(None);
    }
    let threshold = 1e-3 * spec.abs_tol.max(spec.rel_tol * lmax);
    let cut = (peak + 1..profile.len() - 1)
        .find(|&i| profile[i] <= threshold && profile[i + 1] <= threshold)
        .ok_or(Error::Domain {
            what: "integrand decay",
            value: profile[profile.len() - 1],
            expected: "p·|f(p)| decaying to zero on [0, inf)",
        })?;

    let k_cut = SCAN_LO + cut as i32;
    let k_lo = (SCAN_LO + peak as i32 - 10).max(SCAN_LO);
    let mut breaks = vec![0.0];
    let panels = (k_cut - k_lo + 1) as usize;
    if panels <= spec.max_subdivisions / 2 {
        breaks.extend((k_lo..=k_cut).map(|k| 2f64.powi(k)));
    } else {
        breaks.push(2f64.powi(k_cut));
    }
    // Past the cutoff the profile is below threshold on a dyadic grid, so
    // ∫_cut^∞ |f| <= Σ L(2^k)·ln 2 plus one octave of slack.
    let tail = profile[cut..].iter().sum::<f64>() * 2.0;
    Ok(Some(HalfLineSupport {
        breaks,
        tail,
        evaluations,
    }))
}

/// `∫_0^∞ f(p) dp` for integrands decaying at least as fast as `1/p^(1+ε)`.
///
/// The error estimate includes a bound on the truncated tail.
pub fn integrate_semi_infinite<F: FnMut(f64) -> f64>(
    mut f: F,
    spec: &QuadratureSpec,
) -> Result<IntegralResult> {
    let support = match half_line_support(&mut f, spec)? {
        Some(s) => s,
        None => {
            return Ok(IntegralResult {
                value: 0.0,
                error_estimate: 0.0,
                evaluations: (SCAN_HI - SCAN_LO + 1) as usize,
            })
        }
    };
    let r = adaptive(&mut f, &support.breaks, spec).map_err(|e| match e {
        Error::Convergence {
            value,
            error_estimate,
            evaluations,
        } => Error::Convergence {
            value,
            error_estimate: error_estimate + support.tail,
            evaluations: evaluations + support.evaluations,
        },
        other => other,
    })?;
    Ok(IntegralResult {
        value: r.value,
        error_estimate: r.error + support.tail,
        evaluations: r.evaluations + support.evaluations,
    })
}

struct Angular {
    value: f64,
    l1: f64,
    difference: f64,
    evaluations: usize,
}

/// Periodic trapezoid rule over the full turn, doubled from 16 nodes until two
/// successive levels differ by at most `tol_frac` of `∫|h|`.
fn angular_trapezoid<H: FnMut(f64) -> f64>(
    h: &mut H,
    tol_frac: f64,
    max_nodes: usize,
) -> Result<Angular> {
    let mut n = 16usize;
    let (mut sum, mut abs_sum) = (0.0, 0.0);
    for j in 0..n {
        let v = h(2.0 * PI * j as f64 / n as f64);
        sum += v;
        abs_sum += v.abs();
    }
    let mut evaluations = n;
    let mut estimate = 2.0 * PI * sum / n as f64;
    loop {
        for j in 0..n {
            let v = h(2.0 * PI * (2 * j + 1) as f64 / (2 * n) as f64);
            sum += v;
            abs_sum += v.abs();
        }
        evaluations += n;
        n *= 2;
        let value = 2.0 * PI * sum / n as f64;
        let l1 = 2.0 * PI * abs_sum / n as f64;
        let difference = (value - estimate).abs();
        if !value.is_finite() {
            return Err(Error::Domain {
                what: "integrand value",
                value,
                expected: "finite on the plane",
            });
        }
        if difference <= tol_frac * l1 {
            return Ok(Angular {
                value,
                l1,
                difference,
                evaluations,
            });
        }
        if n >= max_nodes {
            return Err(Error::Convergence {
                value,
                error_estimate: difference,
                evaluations,
            });
        }
        estimate = value;
    }
}

const MAX_ANGULAR_NODES: usize = 1 << 16;

/// `∫∫_{R²} g(p1, p2) d²p` in polar coordinates.
///
/// `kappa` sets the radial length scale (`u = kappa·r` is integrated on the
/// half line); the angular integral uses the periodic trapezoid rule, which
/// converges geometrically for smooth integrands.
pub fn integrate_plane<G: FnMut(f64, f64) -> f64>(
    mut g: G,
    kappa: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralResult> {
    check_domain(
        "kappa",
        kappa,
        kappa.is_finite() && kappa > 0.0,
        "0 < kappa",
    )?;
    let mut inner_evals = 0usize;
    let mut inner_rel_max = 0.0f64;
    let mut weight_samples: Vec<(f64, f64)> = Vec::new();
    let mut inner_failure: Option<Error> = None;
    let tol_frac = 0.1 * spec.rel_tol;
    let radial = |u: f64| {
        if inner_failure.is_some() {
            return 0.0;
        }
        let r = u / kappa;
        match angular_trapezoid(
            &mut |t: f64| {
                let (s, c) = t.sin_cos();
                g(r * c, r * s)
            },
            tol_frac,
            MAX_ANGULAR_NODES,
        ) {
            Ok(ang) => {
                inner_evals += ang.evaluations;
                if ang.l1 > 0.0 {
                    inner_rel_max = inner_rel_max.max(ang.difference / ang.l1);
                }
                weight_samples.push((u, u * ang.l1));
                u * ang.value
            }
            Err(e) => {
                inner_failure = Some(e);
                0.0
            }
        }
    };
    let outer = integrate_semi_infinite(radial, spec);
    if let Some(e) = inner_failure {
        return Err(e);
    }
    let outer = outer?;
    // ∫ u·∫|g| dθ du by the trapezoid rule on the radii the outer rule visited;
    // only used to scale the angular error.
    weight_samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    let abs_weight: f64 = weight_samples
        .windows(2)
        .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
        .sum();
    let scale = 1.0 / (kappa * kappa);
    Ok(IntegralResult {
        value: outer.value * scale,
        error_estimate: (outer.error_estimate + inner_rel_max * abs_weight) * scale,
        evaluations: outer.evaluations + inner_evals,
    })
}

/// `∫∫ g(p)·(κ²/π)·exp(-κ²|p|²) d²p`, the expectation of `g` under the
/// squared ground-state amplitude of a two-dimensional Gaussian packet.
pub fn integrate_2d_gaussian_weighted<G: FnMut(f64, f64) -> f64>(
    mut g: G,
    kappa: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralResult> {
    check_domain(
        "kappa",
        kappa,
        kappa.is_finite() && kappa > 0.0,
        "0 < kappa",
    )?;
    let k2 = kappa * kappa;
    integrate_plane(
        |p1, p2| g(p1, p2) * k2 / PI * (-k2 * (p1 * p1 + p2 * p2)).exp(),
        kappa,
        spec,
    )
}

//! The acceptance suite behind `spinshift validate`.
//!
//! Each check returns its clauses with measured values and limits, so a
//! failure says by how much. A check passes when every clause holds and it
//! finishes within its runtime budget.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;
use spinshift::fisher::{
    delta_ratio, delta_upper_bound, j_moving, j_moving_oracle, j_rel, j_rest, kappa_eta_bounds,
    weak_commutativity,
};
use spinshift::numerics::{mc_integrate, McResult};
use spinshift::state::{eta, eta_cartesian, nu, spin_reduced_state, xi, xi_rel, Axis};
use spinshift::wavefunction::{
    classical_fisher_position, density_derivative_profile, peak_location, position_norms,
    psi_up_profile, MomentumWindow, NormalizationMode,
};
use spinshift::wigner::{
    boost_from_velocity, euler_reconstruct, spin_half_rep, wigner_angles, wigner_matrix, Momentum2,
    PhysicalConfig,
};
use spinshift::QuadratureSpec;

use crate::commands::{cmd_fig4, linear_grid, log_grid};
use crate::config::{Command, RunConfig};
use crate::error::{CliError, CliResult};
use crate::series::SCHEMA_VERSION;

/// Default tolerances, keyed `check.clause`. An override of `check` alone
/// applies to every clause of that check.
pub const DEFAULT_TOLERANCES: &[(&str, f64)] = &[
    ("rest.exact", 0.0),
    ("xi.rest", 1e-10),
    ("xi.limit", 1e-6),
    ("oracle.rel", 1e-8),
    ("oracle.offdiag", 1e-10),
    ("sandwich.slack", 1e-9),
    ("sandwich.limit", 1e-5),
    ("delta.rest", 1e-10),
    ("delta.bound", 1e-9),
    ("delta.limit", 5e-3),
    ("asymptotics.rel", 1e-2),
    ("weak.rel", 1e-10),
    ("reduced.theta", 1e-12),
    ("reduced.trace", 1e-10),
    ("wigner.orthogonality", 1e-12),
    ("wigner.euler", 1e-11),
    ("wigner.su2", 1e-12),
    ("wigner.trig", 1e-12),
    ("wave.parity", 1e-10),
    ("wave.norm", 1e-6),
    ("fisher.grid", 1e-6),
    ("fisher.rest", 1e-3),
    ("mc.sigmas", 4.0),
];

pub struct Tolerances(BTreeMap<String, f64>);

impl Tolerances {
    /// Rejects override keys that match neither a clause nor a check.
    pub fn new(overrides: &BTreeMap<String, f64>) -> CliResult<Self> {
        let known = |k: &str| {
            DEFAULT_TOLERANCES
                .iter()
                .any(|(d, _)| *d == k || d.split('.').next() == Some(k))
        };
        if let Some(bad) = overrides.keys().find(|k| !known(k)) {
            let names: Vec<&str> = DEFAULT_TOLERANCES.iter().map(|(k, _)| *k).collect();
            return Err(CliError::Usage(format!(
                "unknown tolerance '{bad}'; known: {}",
                names.join(", ")
            )));
        }
        if let Some((k, v)) = overrides
            .iter()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(CliError::Usage(format!(
                "tolerance {k} = {v} must be finite and >= 0"
            )));
        }
        Ok(Self(overrides.clone()))
    }

    pub fn get(&self, key: &str) -> f64 {
        let group = key.split('.').next().unwrap_or(key);
        self.0
            .get(key)
            .or_else(|| self.0.get(group))
            .copied()
            .or_else(|| {
                DEFAULT_TOLERANCES
                    .iter()
                    .find(|(k, _)| *k == key)
                    .map(|(_, v)| *v)
            })
            .expect("every clause key has a default")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Clause {
    pub what: String,
    pub measured: f64,
    /// `measured <= limit` is required
    pub limit: f64,
    pub passed: bool,
}

impl Clause {
    fn le(what: impl Into<String>, measured: f64, limit: f64) -> Self {
        Self {
            what: what.into(),
            measured,
            limit,
            passed: measured <= limit,
        }
    }

    /// A yes/no property; `measured` is 0 when it holds.
    fn holds(what: impl Into<String>, ok: bool) -> Self {
        Self {
            what: what.into(),
            measured: if ok { 0.0 } else { 1.0 },
            limit: 0.0,
            passed: ok,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub runtime_s: f64,
    pub budget_s: f64,
    pub clauses: Vec<Clause>,
    /// set when the check could not be evaluated
    pub error: Option<String>,
}

impl CheckReport {
    /// One line: status, number, name, runtime, and the first failing clause.
    pub fn summary(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let mut line = format!(
            "[{status}] {:02} {} ({:.2} s of {:.0} s)",
            self.id, self.name, self.runtime_s, self.budget_s
        );
        if let Some(e) = &self.error {
            line.push_str(&format!(": error: {e}"));
        } else if let Some(c) = self.clauses.iter().find(|c| !c.passed) {
            line.push_str(&format!(
                ": {} measured {:e} > limit {:e}",
                c.what, c.measured, c.limit
            ));
        } else if self.runtime_s > self.budget_s {
            line.push_str(": over runtime budget");
        }
        line
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub passed: bool,
    pub checks: Vec<CheckReport>,
}

struct Context {
    spec: QuadratureSpec,
    tol: Tolerances,
    seed: u64,
    grid_points: usize,
}

type CheckFn = fn(&Context) -> CliResult<Vec<Clause>>;

const CHECKS: &[(u8, &str, f64, CheckFn)] = &[
    (1, "rest-frame Fisher matrix", 1.0, check_rest),
    (2, "xi limits", 5.0, check_xi_limits),
    (
        3,
        "closed form against inner-product oracle",
        60.0,
        check_oracle,
    ),
    (4, "kappa-eta sandwich", 10.0, check_sandwich),
    (5, "information-loss ratio bounds", 10.0, check_delta),
    (6, "relativistic-limit asymptotics", 1.0, check_asymptotics),
    (7, "weak commutativity", 1.0, check_weak_commutativity),
    (8, "spin-reduced state", 10.0, check_reduced_state),
    (9, "Wigner rotation algebra", 5.0, check_wigner),
    (10, "wave function densities", 120.0, check_wavefunction),
    (
        11,
        "position measurement below quantum bound",
        120.0,
        check_classical_fisher,
    ),
    (
        12,
        "quadrature against Monte Carlo",
        30.0,
        check_monte_carlo,
    ),
    (13, "deterministic figure output", 30.0, check_determinism),
];

pub const CHECK_COUNT: usize = 13;

fn physical(m: f64, kappa: f64) -> CliResult<PhysicalConfig> {
    Ok(PhysicalConfig::new(m, kappa)?)
}

/// Runs the selected checks (all when `cfg.only` is unset) in order, calling
/// `progress` after each one.
pub fn run(cfg: &RunConfig, mut progress: impl FnMut(&CheckReport)) -> CliResult<ValidationReport> {
    let ctx = Context {
        spec: cfg.quadrature()?,
        tol: Tolerances::new(&cfg.tolerances)?,
        seed: cfg.seed,
        grid_points: cfg.grid_points,
    };
    if let Some(bad) = cfg
        .only
        .iter()
        .flatten()
        .find(|id| !CHECKS.iter().any(|c| c.0 == **id))
    {
        return Err(CliError::Usage(format!(
            "no check numbered {bad} (1..={CHECK_COUNT})"
        )));
    }
    let mut checks = Vec::new();
    for &(id, name, budget_s, f) in CHECKS {
        if cfg.only.as_ref().is_some_and(|only| !only.contains(&id)) {
            continue;
        }
        let start = Instant::now();
        let outcome = f(&ctx);
        let runtime_s = start.elapsed().as_secs_f64();
        let (clauses, error) = match outcome {
            Ok(c) => (c, None),
            Err(e) => (Vec::new(), Some(e.to_string())),
        };
        let passed = error.is_none() && clauses.iter().all(|c| c.passed) && runtime_s <= budget_s;
        let report = CheckReport {
            id,
            name,
            passed,
            runtime_s,
            budget_s,
            clauses,
            error,
        };
        progress(&report);
        checks.push(report);
    }
    Ok(ValidationReport {
        schema_version: SCHEMA_VERSION,
        command: "validate",
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

fn check_rest(ctx: &Context) -> CliResult<Vec<Clause>> {
    let mut worst_j = 0.0f64;
    let mut worst_inv = 0.0f64;
    for kappa in [0.1, 0.5, 1.0, 3.0, 10.0] {
        let c = physical(1.0, kappa)?;
        let j = j_rest(&c);
        let expected = 2.0 / (kappa * kappa);
        let inv = j.inverse()?;
        let m = j.matrix();
        worst_j = worst_j
            .max((m[(0, 0)] - expected).abs() / expected)
            .max((m[(1, 1)] - expected).abs() / expected)
            .max(m[(0, 1)].abs())
            .max(m[(1, 0)].abs());
        let half = 0.5 * kappa * kappa;
        worst_inv = worst_inv
            .max((inv[(0, 0)] - half).abs() / half)
            .max((inv[(1, 1)] - half).abs() / half)
            .max(inv[(0, 1)].abs())
            .max(inv[(1, 0)].abs());
    }
    let t = ctx.tol.get("rest.exact");
    Ok(vec![
        Clause::le("J_rest against 2/kappa^2 (relative)", worst_j, t),
        Clause::le("inverse against kappa^2/2 (relative)", worst_inv, t),
    ])
}

fn parameter_grid() -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for m in [0.5, 1.0, 2.0] {
        for kappa in [0.1, 1.0, 3.0] {
            out.push((m, kappa));
        }
    }
    out
}

fn check_xi_limits(ctx: &Context) -> CliResult<Vec<Clause>> {
    let v_near = 1.0 - 1e-10;
    let rows = parameter_grid()
        .par_iter()
        .map(|&(m, kappa)| {
            let c = physical(m, kappa)?;
            let rest = (xi(&c, 0.0, &ctx.spec)? - 1.0).abs();
            let closed = xi_rel(&c);
            let near = (xi(&c, v_near, &ctx.spec)? - closed).abs() / closed;
            Ok((rest, near))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let rest = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let near = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(vec![
        Clause::le("max |xi(0) - 1|", rest, ctx.tol.get("xi.rest")),
        Clause::le(
            "max relative |xi(1 - 1e-10) - xi_rel|",
            near,
            ctx.tol.get("xi.limit"),
        ),
    ])
}

fn check_oracle(ctx: &Context) -> CliResult<Vec<Clause>> {
    let mut points = Vec::new();
    for m in [0.5, 1.0, 2.0] {
        for kappa in [0.3, 1.0, 2.0] {
            for v in [0.3, 0.7, 0.95] {
                points.push((m, kappa, v));
            }
        }
    }
    let rows = points
        .par_iter()
        .map(|&(m, kappa, v)| {
            let c = physical(m, kappa)?;
            let closed = j_moving(&c, v, &ctx.spec)?;
            let oracle = j_moving_oracle(&c, v, &ctx.spec)?;
            let (a, b) = (closed.matrix(), oracle.matrix());
            let diag = ((a[(0, 0)] - b[(0, 0)]).abs() / a[(0, 0)])
                .max((a[(1, 1)] - b[(1, 1)]).abs() / a[(1, 1)]);
            let off = b[(0, 1)].abs().max(b[(1, 0)].abs());
            Ok((diag, off))
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(vec![
        Clause::le(
            "max relative diagonal difference over 27 points",
            rows.iter().map(|r| r.0).fold(0.0, f64::max),
            ctx.tol.get("oracle.rel"),
        ),
        Clause::le(
            "max |off-diagonal| of the oracle",
            rows.iter().map(|r| r.1).fold(0.0, f64::max),
            ctx.tol.get("oracle.offdiag"),
        ),
    ])
}

fn check_sandwich(ctx: &Context) -> CliResult<Vec<Clause>> {
    let slack = ctx.tol.get("sandwich.slack");
    let k_grid = log_grid(1e-3, 1e2, 20);
    let v_grid: Vec<f64> = (1..=20).map(|i| i as f64 / 21.0).collect();
    let rows = k_grid
        .par_iter()
        .map(|&k| {
            let c = physical(1.0, k)?;
            let b = kappa_eta_bounds(k)?;
            let mut below = f64::NEG_INFINITY;
            let mut above = f64::NEG_INFINITY;
            for &v in &v_grid {
                let r = k * eta(&c, v, &ctx.spec)? / v;
                below = below.max(b.lower - r);
                above = above.max(r - b.upper);
            }
            Ok((below, above))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let limit_bounds = kappa_eta_bounds(1e-6)?;
    let quarter_root_pi = 0.25 * PI.sqrt();
    let limit_gap = (limit_bounds.lower - quarter_root_pi)
        .abs()
        .max((limit_bounds.upper - quarter_root_pi).abs());
    Ok(vec![
        Clause::le(
            "max (lower - kappa eta/v) on 20x20 grid",
            rows.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max),
            slack,
        ),
        Clause::le(
            "max (kappa eta/v - upper) on 20x20 grid",
            rows.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max),
            slack,
        ),
        Clause::le(
            "bounds against sqrt(pi)/4 at m kappa = 1e-6",
            limit_gap,
            ctx.tol.get("sandwich.limit"),
        ),
    ])
}

fn check_delta(ctx: &Context) -> CliResult<Vec<Clause>> {
    let v_grid = linear_grid(0.0, 1.0, 200);
    let k_grid = log_grid(1e-3, 1e2, 12);
    let rows = k_grid
        .par_iter()
        .map(|&k| {
            let c = physical(1.0, k)?;
            let rest = (delta_ratio(&c, 0.0, &ctx.spec)?.value - 1.0).abs();
            let mut excess = f64::NEG_INFINITY;
            for &v in &v_grid {
                excess = excess.max(delta_ratio(&c, v, &ctx.spec)?.value - delta_upper_bound(v)?);
            }
            Ok((rest, excess))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let sup = delta_upper_bound(1.0)?;
    let small = delta_ratio(&physical(1.0, 1e-4)?, 1.0, &ctx.spec)?.value;
    Ok(vec![
        Clause::le(
            "max |delta(0) - 1|",
            rows.iter().map(|r| r.0).fold(0.0, f64::max),
            ctx.tol.get("delta.rest"),
        ),
        Clause::le(
            "max (delta(v) - 1/(1 - pi v^2/8))",
            rows.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max),
            ctx.tol.get("delta.bound"),
        ),
        Clause::le(
            "delta(1) at m kappa = 1e-4 minus 1/(1 - pi/8)",
            small - sup,
            ctx.tol.get("delta.bound"),
        ),
        Clause::le(
            "relative gap to 1/(1 - pi/8) at m kappa = 1e-4",
            (sup - small).abs() / sup,
            ctx.tol.get("delta.limit"),
        ),
    ])
}

fn check_asymptotics(ctx: &Context) -> CliResult<Vec<Clause>> {
    let t = ctx.tol.get("asymptotics.rel");
    let mut clauses = Vec::new();
    for (m, kappa) in [(1.0, 50.0), (50.0, 1.0)] {
        let c = physical(m, kappa)?;
        let inv = j_rel(&c).inverse()?[(0, 0)];
        let excess = inv - 0.5 * kappa * kappa;
        let expected = 1.0 / (4.0 * m * m);
        clauses.push(Clause::le(
            format!("large m kappa (m={m}, kappa={kappa}): relative error of the 1/(4m^2) excess"),
            (excess - expected).abs() / expected,
            t,
        ));
    }
    let c = physical(1.0, 1e-3)?;
    let ratio = j_rel(&c).inverse()?[(0, 0)] / (0.5 * 1e-6);
    let expected = delta_upper_bound(1.0)?;
    clauses.push(Clause::le(
        "small m kappa = 1e-3: relative error against 1/(1 - pi/8)",
        (ratio - expected).abs() / expected,
        t,
    ));
    Ok(clauses)
}

fn check_weak_commutativity(ctx: &Context) -> CliResult<Vec<Clause>> {
    // independent routes: xi from the spin-reduced state, eta from the
    // plane integral, both at a tighter tolerance than the closed form
    let tight = QuadratureSpec::new(1e-13, 1e-15, 4000)?;
    let t = ctx.tol.get("weak.rel");
    let mut worst = 0.0f64;
    let mut positive = true;
    for (m, kappa) in [(1.0, 1.0), (0.5, 2.0)] {
        let c = physical(m, kappa)?;
        for v in [0.2, 0.6, 0.9] {
            let w = weak_commutativity(&c, v, &ctx.spec)?;
            let rho = spin_reduced_state((0.0, 0.0), &c, v, &tight)?;
            let xi_state = (rho.0[(0, 0)] - rho.0[(1, 1)]).re;
            let eta_plane = eta_cartesian(&c, v, Axis::P1, &tight)?;
            let composed = 8.0 * xi_state * eta_plane * eta_plane;
            positive &= w > 0.0;
            worst = worst.max((w - composed).abs() / composed);
        }
    }
    let at_rest = weak_commutativity(&physical(1.0, 1.0)?, 0.0, &ctx.spec)?;
    Ok(vec![
        Clause::holds("8 xi eta^2 > 0 for v > 0", positive),
        Clause::le(
            "relative difference from independently composed 8 xi eta^2",
            worst,
            t,
        ),
        Clause::le("|8 xi eta^2| at v = 0", at_rest.abs(), 0.0),
    ])
}

fn check_reduced_state(ctx: &Context) -> CliResult<Vec<Clause>> {
    let c = physical(1.0, 1.0)?;
    let v = 0.9;
    let reference = spin_reduced_state((0.0, 0.0), &c, v, &ctx.spec)?;
    let mut rng = ChaCha20Rng::seed_from_u64(ctx.seed);
    let thetas: Vec<(f64, f64)> = (0..20)
        .map(|_| (rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)))
        .collect();
    let states = thetas
        .par_iter()
        .map(|&th| Ok(spin_reduced_state(th, &c, v, &ctx.spec)?))
        .collect::<CliResult<Vec<_>>>()?;
    let mut drift = 0.0f64;
    let mut trace = (reference.trace().re - 1.0)
        .abs()
        .max(reference.trace().im.abs());
    for s in &states {
        drift = drift.max(
            (s.0 - reference.0)
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max),
        );
        trace = trace
            .max((s.trace().re - 1.0).abs())
            .max(s.trace().im.abs());
    }
    Ok(vec![
        Clause::le(
            "max entry change over 20 random shifts",
            drift,
            ctx.tol.get("reduced.theta"),
        ),
        Clause::le("max |trace - 1|", trace, ctx.tol.get("reduced.trace")),
    ])
}

fn check_wigner(ctx: &Context) -> CliResult<Vec<Clause>> {
    let mut rng = ChaCha20Rng::seed_from_u64(ctx.seed ^ 0x5157);
    let mut worst = [0.0f64; 4];
    for _ in 0..1000 {
        let m = 10f64.powf(rng.random_range(-1.0..1.0));
        let p = Momentum2::new(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
        let v = rng.random_range(0.0..0.999);
        let c = physical(m, 1.0)?;
        let b = boost_from_velocity(v)?;
        let angles = wigner_angles(p, &b, &c);
        let w = wigner_matrix(p, &b, &c)?;
        worst[0] = worst[0].max(w.orthogonality_defect());
        worst[1] = worst[1].max(w.max_abs_diff(&euler_reconstruct(&angles)));
        worst[2] = worst[2].max(spin_half_rep(&angles).unitarity_defect());
        worst[3] = worst[3].max((angles.cos_alpha.powi(2) + angles.sin_alpha.powi(2) - 1.0).abs());
    }
    Ok(vec![
        Clause::le(
            "rotation orthogonality and determinant",
            worst[0],
            ctx.tol.get("wigner.orthogonality"),
        ),
        Clause::le(
            "Euler reconstruction",
            worst[1],
            ctx.tol.get("wigner.euler"),
        ),
        Clause::le(
            "SU(2) unitarity and determinant",
            worst[2],
            ctx.tol.get("wigner.su2"),
        ),
        Clause::le("cos^2 + sin^2 - 1", worst[3], ctx.tol.get("wigner.trig")),
    ])
}

fn check_wavefunction(ctx: &Context) -> CliResult<Vec<Clause>> {
    let c = physical(1.0, 0.1)?;
    let window = MomentumWindow::for_config(&c, ctx.grid_points)?;
    let grid = linear_grid(-0.5, 0.5, 401);
    let mid = 200;
    let tol = ctx.tol.get("wave.parity");
    let velocities = [0.7, 0.9, 0.98];
    let rows = velocities
        .par_iter()
        .map(|&v| {
            let mode = NormalizationMode::Raw;
            let dens = psi_up_profile(&c, v, &grid, mode, &window, &ctx.spec)?.values;
            let deriv = density_derivative_profile(&c, v, &grid, mode, &window, &ctx.spec)?.values;
            let peak = peak_location(&c, v, &window)?;
            let (down, up) = position_norms(&c, v, &window, &ctx.spec)?;
            let top = dens.iter().copied().fold(0.0, f64::max);
            let parity = (0..grid.len())
                .map(|i| (dens[i] - dens[grid.len() - 1 - i]).abs())
                .fold(0.0, f64::max)
                / top;
            let origin = dens[mid] / top;
            let dtop = deriv.iter().fold(0.0f64, |a, x| a.max(x.abs()));
            let odd = (0..grid.len())
                .map(|i| (deriv[i] + deriv[grid.len() - 1 - i]).abs())
                .fold(0.0, f64::max)
                / dtop;
            let cell = (mid + 1..grid.len()).find(|&i| deriv[i] < 0.0);
            let bracketed = cell.is_some_and(|i| grid[i - 1] <= peak && peak <= grid[i]);
            let norm = (down - 1.0).abs().max((up - 1.0).abs());
            Ok((parity.max(origin), odd, bracketed, norm, peak))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let peaks: Vec<f64> = rows.iter().map(|r| r.4).collect();
    Ok(vec![
        Clause::le(
            "up density parity defect and value at origin, relative to peak",
            rows.iter().map(|r| r.0).fold(0.0, f64::max),
            tol,
        ),
        Clause::le(
            "max |norm - 1| of both components",
            rows.iter().map(|r| r.3).fold(0.0, f64::max),
            ctx.tol.get("wave.norm"),
        ),
        Clause::holds(
            format!("peak(0.7) < peak(0.9) < peak(0.98): {peaks:?}"),
            peaks[0] < peaks[1] && peaks[1] < peaks[2],
        ),
        Clause::le(
            "derivative oddness defect, relative to its maximum",
            rows.iter().map(|r| r.1).fold(0.0, f64::max),
            tol,
        ),
        Clause::holds(
            "derivative sign change brackets the peak within one cell",
            rows.iter().all(|r| r.2),
        ),
    ])
}

fn check_classical_fisher(ctx: &Context) -> CliResult<Vec<Clause>> {
    let kappa = 0.1;
    let c = physical(1.0, kappa)?;
    let window = MomentumWindow::for_config(&c, ctx.grid_points)?;
    let grid_tol = ctx.tol.get("fisher.grid");
    let rows = [0.0, 0.3, 0.6, 0.9]
        .par_iter()
        .map(|&v| {
            let fi = classical_fisher_position(&c, v, &window)?.fi_theta1;
            let j = j_moving(&c, v, &ctx.spec)?.matrix()[(0, 0)];
            Ok((v, fi, j))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let excess = rows
        .iter()
        .map(|(_, fi, j)| (fi - j) / j)
        .fold(f64::NEG_INFINITY, f64::max);
    let rest = rows[0].1;
    let target = 2.0 / (kappa * kappa);
    Ok(vec![
        Clause::le(
            "max (FI - J11)/J11 over v in {0, 0.3, 0.6, 0.9}",
            excess,
            grid_tol,
        ),
        Clause::le(
            "relative |FI(0) - 2/kappa^2|",
            (rest - target).abs() / target,
            ctx.tol.get("fisher.rest"),
        ),
    ])
}

fn check_monte_carlo(ctx: &Context) -> CliResult<Vec<Clause>> {
    let c = physical(1.0, 1.0)?;
    let v = 0.9;
    let b = boost_from_velocity(v)?;
    let n = 1_000_000;
    let sigmas = ctx.tol.get("mc.sigmas");
    let angles = |p1: f64, p2: f64| wigner_angles(Momentum2::new(p1, p2), &b, &c);
    let mc: [McResult; 3] = [
        mc_integrate(|p1, p2| angles(p1, p2).cos_alpha, 1.0, n, ctx.seed)?,
        mc_integrate(
            |p1, p2| {
                let r = p1.hypot(p2);
                if r == 0.0 {
                    0.0
                } else {
                    -(p1 * p1 / r) * angles(p1, p2).sin_alpha
                }
            },
            1.0,
            n,
            ctx.seed.wrapping_add(1),
        )?,
        mc_integrate(
            |p1, p2| p1 * p1 * angles(p1, p2).cos_alpha,
            1.0,
            n,
            ctx.seed.wrapping_add(2),
        )?,
    ];
    let quad = [
        xi(&c, v, &ctx.spec)?,
        eta(&c, v, &ctx.spec)?,
        nu(&c, v, &ctx.spec)?,
    ];
    Ok(["xi", "eta", "nu"]
        .iter()
        .zip(mc.iter().zip(quad))
        .map(|(name, (m, q))| {
            Clause::le(
                format!(
                    "{name}: |quadrature - MC| in standard errors ({} samples)",
                    m.n_samples
                ),
                (q - m.value).abs() / m.std_error,
                sigmas,
            )
        })
        .collect())
}

fn check_determinism(ctx: &Context) -> CliResult<Vec<Clause>> {
    let mut cfg = RunConfig::for_command(Command::Fig4);
    cfg.rel_tol = ctx.spec.rel_tol;
    cfg.seed = ctx.seed;
    let render = |cfg: &RunConfig| -> CliResult<Vec<String>> {
        Ok(cmd_fig4(cfg)?.iter().map(|s| s.to_csv()).collect())
    };
    let first = render(&cfg)?;
    let second = render(&cfg)?;
    Ok(vec![Clause::holds(
        "two fig4 runs produce byte-identical CSV",
        first == second,
    )])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn only(ids: &[u8], tolerances: &[(&str, f64)]) -> RunConfig {
        let mut cfg = RunConfig::for_command(Command::Validate);
        cfg.only = Some(ids.to_vec());
        cfg.tolerances = tolerances
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect();
        cfg
    }

    #[test]
    fn tolerance_lookup_and_group_overrides() {
        let t = Tolerances::new(&BTreeMap::from([("sandwich".to_string(), 0.0)])).unwrap();
        assert_eq!(t.get("sandwich.slack"), 0.0);
        assert_eq!(t.get("sandwich.limit"), 0.0);
        assert_eq!(t.get("mc.sigmas"), 4.0);
        assert!(Tolerances::new(&BTreeMap::from([("nope".to_string(), 1.0)])).is_err());
        assert!(Tolerances::new(&BTreeMap::from([("mc".to_string(), -1.0)])).is_err());
    }

    #[test]
    fn zero_sandwich_tolerance_fails_with_diagnostic() {
        let report = run(&only(&[4], &[("sandwich", 0.0)]), |_| {}).unwrap();
        assert!(!report.passed);
        let line = report.checks[0].summary();
        assert!(
            line.starts_with("[FAIL] 04") && line.contains("measured"),
            "{line}"
        );
    }

    #[test]
    fn fast_checks_pass_with_runtime_reported() {
        let report = run(&only(&[1, 6, 9], &[]), |_| {}).unwrap();
        assert_eq!(report.checks.len(), 3);
        for c in &report.checks {
            assert!(c.passed, "{}", c.summary());
            assert!(c.runtime_s >= 0.0);
        }
    }

    #[test]
    fn unknown_check_number_is_a_usage_error() {
        assert_eq!(run(&only(&[14], &[]), |_| {}).unwrap_err().exit_code(), 1);
    }
}

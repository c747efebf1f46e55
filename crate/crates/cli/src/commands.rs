//! Figure data and the single-point `compute` record.
//!
//! Grid points are evaluated in parallel and collected in input order, so
//! output never depends on scheduling.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use spinshift::fisher::{
    cr_bound, delta_ratio, delta_upper_bound, j_moving, j_rel, j_rest, kappa_eta_bounds,
    weak_commutativity, CrBound, FisherMatrix,
};
use spinshift::state::{eta, nu, scalar_integrals, spin_up_probability, xi_rel};
use spinshift::wavefunction::{
    classical_fisher_position, density_derivative_profile, peak_location, psi_up_profile,
    ClassicalFisher, MomentumWindow,
};
use spinshift::wigner::PhysicalConfig;
use spinshift::QuadratureSpec;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::series::{CurveSeries, SCHEMA_VERSION};

/// `n` log-spaced points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    (0..n)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64))
        .collect()
}

/// `n` evenly spaced points on `[lo, hi]`, endpoints exact.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

pub const M_KAPPA_RANGE: (f64, f64) = (1e-2, 10.0);

fn base_metadata(cfg: &RunConfig, spec: &QuadratureSpec) -> BTreeMap<String, String> {
    BTreeMap::from([
        ("m".to_string(), cfg.m.to_string()),
        ("rel_tol".to_string(), spec.rel_tol.to_string()),
        ("abs_tol".to_string(), spec.abs_tol.to_string()),
        (
            "max_subdivisions".to_string(),
            spec.max_subdivisions.to_string(),
        ),
    ])
}

fn physical(m: f64, kappa: f64) -> CliResult<PhysicalConfig> {
    Ok(PhysicalConfig::new(m, kappa)?)
}

/// Spin-up probability against `mκ`, one series per velocity.
pub fn cmd_fig1(cfg: &RunConfig) -> CliResult<Vec<CurveSeries>> {
    let spec = cfg.quadrature()?;
    let grid = log_grid(M_KAPPA_RANGE.0, M_KAPPA_RANGE.1, cfg.samples);
    cfg.v_list
        .iter()
        .map(|&v| {
            let values = grid
                .par_iter()
                .map(|&mk| {
                    let c = physical(cfg.m, mk / cfg.m)?;
                    if v == 1.0 {
                        Ok(0.5 * (1.0 - xi_rel(&c)))
                    } else {
                        Ok(spin_up_probability(&c, v, &spec)?)
                    }
                })
                .collect::<CliResult<Vec<f64>>>()?;
            let mut meta = base_metadata(cfg, &spec);
            meta.insert("v".into(), v.to_string());
            meta.insert(
                "route".into(),
                if v == 1.0 {
                    "closed-form"
                } else {
                    "quadrature"
                }
                .into(),
            );
            CurveSeries::new(
                format!("fig1_v{v}"),
                "m_kappa",
                "spin_up_probability",
                grid.iter().copied().zip(values).collect(),
                meta,
            )
        })
        .collect()
}

fn profile_series(cfg: &RunConfig, derivative: bool) -> CliResult<Vec<CurveSeries>> {
    let spec = cfg.quadrature()?;
    let c = physical(cfg.m, cfg.kappa)?;
    let window = MomentumWindow::for_config(&c, cfg.grid_points)?;
    let grid = linear_grid(-cfg.x_max, cfg.x_max, cfg.samples);
    let (prefix, ordinate) = if derivative {
        ("fig3", "d_density_dx1")
    } else {
        ("fig2", "density_up")
    };
    let profiles = cfg
        .v_list
        .par_iter()
        .map(|&v| {
            let p = if derivative {
                density_derivative_profile(&c, v, &grid, cfg.mode, &window, &spec)?
            } else {
                psi_up_profile(&c, v, &grid, cfg.mode, &window, &spec)?
            };
            Ok((p, peak_location(&c, v, &window)?))
        })
        .collect::<CliResult<Vec<_>>>()?;
    cfg.v_list
        .iter()
        .zip(profiles)
        .map(|(&v, (profile, peak))| {
            let mut meta = base_metadata(cfg, &spec);
            meta.insert("kappa".into(), cfg.kappa.to_string());
            meta.insert("v".into(), v.to_string());
            meta.insert("mode".into(), cfg.mode.label().into());
            meta.insert("grid_points".into(), cfg.grid_points.to_string());
            meta.insert("p_max".into(), window.p_max().to_string());
            meta.insert("x_max".into(), cfg.x_max.to_string());
            meta.insert("peak_x1".into(), peak.to_string());
            CurveSeries::new(
                format!("{prefix}_v{v}"),
                "x1",
                ordinate,
                profile.grid.into_iter().zip(profile.values).collect(),
                meta,
            )
        })
        .collect()
}

/// Spin-up density along `x¹` at `x² = 0`, one series per velocity.
pub fn cmd_fig2(cfg: &RunConfig) -> CliResult<Vec<CurveSeries>> {
    profile_series(cfg, false)
}

/// Derivative of the spin-up density along `x¹`.
pub fn cmd_fig3(cfg: &RunConfig) -> CliResult<Vec<CurveSeries>> {
    profile_series(cfg, true)
}

/// `Δ(V)` on `V ∈ [0, 1]`, one series per `κ`.
pub fn cmd_fig4(cfg: &RunConfig) -> CliResult<Vec<CurveSeries>> {
    let spec = cfg.quadrature()?;
    let grid = linear_grid(0.0, 1.0, cfg.samples);
    cfg.kappa_list
        .iter()
        .map(|&kappa| {
            let c = physical(cfg.m, kappa)?;
            let values = grid
                .par_iter()
                .map(|&v| Ok(delta_ratio(&c, v, &spec)?.value))
                .collect::<CliResult<Vec<f64>>>()?;
            let mut meta = base_metadata(cfg, &spec);
            meta.insert("kappa".into(), kappa.to_string());
            meta.insert("v_max_route".into(), "closed-form".into());
            CurveSeries::new(
                format!("fig4_kappa{kappa}"),
                "v",
                "delta",
                grid.iter().copied().zip(values).collect(),
                meta,
            )
        })
        .collect()
}

/// `|κη|/V` against `mκ` per velocity, followed by the lower and upper
/// closed-form bounds.
pub fn cmd_fig5(cfg: &RunConfig) -> CliResult<Vec<CurveSeries>> {
    let spec = cfg.quadrature()?;
    let grid = log_grid(M_KAPPA_RANGE.0, M_KAPPA_RANGE.1, cfg.samples);
    if let Some(v) = cfg.v_list.iter().find(|v| **v == 0.0) {
        return Err(CliError::Usage(format!("fig5 divides by v; got v = {v}")));
    }
    let mut out = cfg
        .v_list
        .iter()
        .map(|&v| {
            let values = grid
                .par_iter()
                .map(|&mk| {
                    let c = physical(cfg.m, mk / cfg.m)?;
                    if v == 1.0 {
                        return Ok(kappa_eta_bounds(mk)?.upper);
                    }
                    Ok((c.kappa() * eta(&c, v, &spec)?).abs() / v)
                })
                .collect::<CliResult<Vec<f64>>>()?;
            let mut meta = base_metadata(cfg, &spec);
            meta.insert("v".into(), v.to_string());
            CurveSeries::new(
                format!("fig5_v{v}"),
                "m_kappa",
                "kappa_eta_over_v",
                grid.iter().copied().zip(values).collect(),
                meta,
            )
        })
        .collect::<CliResult<Vec<_>>>()?;
    let bounds = grid
        .iter()
        .map(|&mk| kappa_eta_bounds(mk))
        .collect::<Result<Vec<_>, _>>()?;
    for (name, pick) in [("lower", 0usize), ("upper", 1)] {
        let points = grid
            .iter()
            .zip(&bounds)
            .map(|(&x, b)| (x, if pick == 0 { b.lower } else { b.upper }))
            .collect();
        let mut meta = base_metadata(cfg, &spec);
        meta.insert("route".into(), "closed-form".into());
        out.push(CurveSeries::new(
            format!("fig5_bound_{name}"),
            "m_kappa",
            "kappa_eta_over_v",
            points,
            meta,
        )?);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComputeInputs {
    pub m: f64,
    pub kappa: f64,
    pub v: f64,
    pub m_kappa: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComputeResults {
    pub xi: f64,
    pub xi_rel: f64,
    pub spin_up_probability: f64,
    pub eta: f64,
    /// plane-integral route; absent at `v = 1`
    pub eta_cartesian: Option<f64>,
    pub kappa_eta: f64,
    pub nu: f64,
    pub j_rest: [[f64; 2]; 2],
    pub j_moving: [[f64; 2]; 2],
    pub j_rel: [[f64; 2]; 2],
    pub delta: f64,
    pub delta_upper_bound: f64,
    pub kappa_eta_lower_bound: f64,
    pub kappa_eta_upper_bound: f64,
    pub weak_commutativity: f64,
    pub cr_rest: CrBound,
    pub cr_moving: CrBound,
    pub classical_fisher: Option<ClassicalFisher>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComputeRecord {
    pub schema_version: u32,
    pub command: &'static str,
    pub inputs: ComputeInputs,
    pub results: ComputeResults,
    pub tolerances: QuadratureSpec,
    /// how each quantity was obtained
    pub provenance: BTreeMap<&'static str, &'static str>,
    pub version: &'static str,
}

fn as_rows(j: &FisherMatrix) -> [[f64; 2]; 2] {
    let m = j.matrix();
    [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]
}

/// Every scalar and matrix at one `(m, κ, v)`. At `v = 1` the closed-form
/// limit routines replace the velocity quadratures.
pub fn cmd_compute(cfg: &RunConfig) -> CliResult<ComputeRecord> {
    let v = cfg
        .v
        .ok_or_else(|| CliError::Usage("compute needs --v".into()))?;
    let spec = cfg.quadrature()?;
    let c = physical(cfg.m, cfg.kappa)?;
    let limit = v == 1.0;
    let bounds = kappa_eta_bounds(c.m_kappa())?;
    let mut provenance = BTreeMap::new();
    let (xi, eta_value, eta_cartesian, nu_value) = if limit {
        provenance.insert("xi", "closed-form");
        provenance.insert("eta", "closed-form");
        provenance.insert("nu", "quadrature with limit angles");
        (
            xi_rel(&c),
            bounds.upper / c.kappa(),
            None,
            nu(&c, v, &spec)?,
        )
    } else {
        provenance.insert("xi", "quadrature");
        provenance.insert("eta", "radial quadrature, checked against plane quadrature");
        provenance.insert("nu", "quadrature");
        let s = scalar_integrals(&c, v, &spec)?;
        (s.xi, s.eta, Some(s.eta_cartesian), s.nu)
    };
    let jm = j_moving(&c, v, &spec)?;
    let classical_fisher = if cfg.classical_fi && !limit {
        provenance.insert("classical_fisher", "spectral position-space grid");
        let window = MomentumWindow::for_config(&c, cfg.grid_points)?;
        Some(classical_fisher_position(&c, v, &window)?)
    } else {
        None
    };
    Ok(ComputeRecord {
        schema_version: SCHEMA_VERSION,
        command: "compute",
        inputs: ComputeInputs {
            m: c.m(),
            kappa: c.kappa(),
            v,
            m_kappa: c.m_kappa(),
        },
        results: ComputeResults {
            xi,
            xi_rel: xi_rel(&c),
            spin_up_probability: 0.5 * (1.0 - xi),
            eta: eta_value,
            eta_cartesian,
            kappa_eta: c.kappa() * eta_value,
            nu: nu_value,
            j_rest: as_rows(&j_rest(&c)),
            j_moving: as_rows(&jm),
            j_rel: as_rows(&j_rel(&c)),
            delta: delta_ratio(&c, v, &spec)?.value,
            delta_upper_bound: delta_upper_bound(v)?,
            kappa_eta_lower_bound: bounds.lower,
            kappa_eta_upper_bound: bounds.upper,
            weak_commutativity: weak_commutativity(&c, v, &spec)?,
            cr_rest: cr_bound(&j_rest(&c))?,
            cr_moving: cr_bound(&jm)?,
            classical_fisher,
        },
        tolerances: spec,
        provenance,
        version: env!("CARGO_PKG_VERSION"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Command;
    use std::f64::consts::PI;

    fn small(command: Command, samples: usize) -> RunConfig {
        RunConfig {
            samples,
            ..RunConfig::for_command(command)
        }
    }

    #[test]
    fn grids_hit_their_endpoints() {
        let g = log_grid(1e-2, 10.0, 7);
        assert!((g[0] - 1e-2).abs() < 1e-17 && (g[6] - 10.0).abs() < 1e-13);
        assert_eq!(*linear_grid(0.0, 1.0, 200).last().unwrap(), 1.0);
    }

    #[test]
    fn fig1_shape() {
        let series = cmd_fig1(&small(Command::Fig1, 30)).unwrap();
        assert_eq!(series.len(), 4);
        let c = PhysicalConfig::new(1.0, 1e-2).unwrap();
        assert!((series[3].points[0].1 - 0.5 * (1.0 - xi_rel(&c))).abs() < 1e-3);
        let (slow, fast) = (series[0].ordinates(), series[2].ordinates());
        assert!(slow.iter().zip(&fast).all(|(a, b)| a < b));
        assert!(series
            .iter()
            .flat_map(|s| s.ordinates())
            .all(|y| (0.0..=0.5).contains(&y)));
    }

    #[test]
    fn fig2_and_fig3_shapes() {
        let cfg = RunConfig {
            grid_points: 128,
            samples: 81,
            v_list: vec![0.98, 0.7],
            ..RunConfig::for_command(Command::Fig2)
        };
        let dens = cmd_fig2(&cfg).unwrap();
        let peak = |s: &CurveSeries| s.metadata["peak_x1"].parse::<f64>().unwrap();
        assert!(peak(&dens[0]) > peak(&dens[1]));
        for s in &dens {
            let y = s.ordinates();
            let top = y.iter().copied().fold(0.0, f64::max);
            assert!(y[40] <= 1e-10 * top);
        }
        let deriv = cmd_fig3(&RunConfig {
            command: Command::Fig3,
            ..cfg
        })
        .unwrap();
        for s in &deriv {
            let y = s.ordinates();
            let top = y.iter().fold(0.0f64, |a, x| a.max(x.abs()));
            assert!((0..81).all(|i| (y[i] + y[80 - i]).abs() <= 1e-9 * top));
        }
    }

    #[test]
    fn fig2_reports_resolution_errors() {
        let cfg = RunConfig {
            grid_points: 16,
            x_max: 5.0,
            v_list: vec![0.7],
            ..RunConfig::for_command(Command::Fig2)
        };
        let err = cmd_fig2(&cfg).unwrap_err();
        assert!(err.to_string().contains("grid points"), "{err}");
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn fig4_shape() {
        let series = cmd_fig4(&small(Command::Fig4, 41)).unwrap();
        for s in &series {
            assert!((s.points[0].1 - 1.0).abs() < 1e-10);
            for &(v, d) in &s.points {
                assert!(d <= delta_upper_bound(v).unwrap() + 1e-9);
            }
        }
        let (k01, k3) = (series[0].ordinates(), series[3].ordinates());
        assert!(k01.iter().zip(&k3).skip(1).all(|(a, b)| a > b));
    }

    #[test]
    fn fig5_shape() {
        let series = cmd_fig5(&small(Command::Fig5, 25)).unwrap();
        assert_eq!(series.len(), 5);
        let (lower, upper) = (series[3].ordinates(), series[4].ordinates());
        for s in &series[..3] {
            for (i, y) in s.ordinates().iter().enumerate() {
                assert!(lower[i] - 1e-9 <= *y && *y <= upper[i] + 1e-9);
            }
        }
        let quarter_root_pi = 0.25 * PI.sqrt();
        assert!(
            (upper[0] - quarter_root_pi).abs() < 0.02 && (lower[0] - quarter_root_pi).abs() < 0.02
        );
        // slow boosts collapse onto the lower bound
        let slow = series[2].ordinates();
        assert!(slow
            .iter()
            .zip(&lower)
            .all(|(y, l)| (y - l).abs() < 1e-2 * l));
    }

    #[test]
    fn compute_at_rest_and_in_the_limit() {
        let rest = cmd_compute(&RunConfig {
            v: Some(0.0),
            ..RunConfig::for_command(Command::Compute)
        })
        .unwrap();
        assert!((rest.results.xi - 1.0).abs() < 1e-12);
        assert_eq!(rest.results.eta, 0.0);
        assert!((rest.results.delta - 1.0).abs() < 1e-12);
        assert_eq!(rest.results.j_moving, [[2.0, 0.0], [0.0, 2.0]]);
        let lim = cmd_compute(&RunConfig {
            v: Some(1.0),
            ..RunConfig::for_command(Command::Compute)
        })
        .unwrap();
        let expected = PI.sqrt() * spinshift::numerics::erfcx(1.0).unwrap();
        assert!((lim.results.xi - expected).abs() < 1e-14);
        assert_eq!(lim.results.j_moving, lim.results.j_rel);
        let text = crate::series::to_json(&lim);
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["schema_version"], 1);
        assert_eq!(value["inputs"]["v"], 1.0);
    }

    #[test]
    fn compute_requires_velocity() {
        let err = cmd_compute(&RunConfig::for_command(Command::Compute)).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }
}

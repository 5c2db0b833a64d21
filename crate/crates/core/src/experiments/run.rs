//! Wires a configuration through the solvers and writes the artifacts.
//!
//! Layout of an output directory:
//!
//! ```text
//! <dir>/ldg/density_t<t>.csv   LDG on its evaluation grid
//! <dir>/fd/density_t<t>.csv    finite differences on the nodes
//! <dir>/mc/density_t<t>.csv    histogram on the bin centers
//! <dir>/exact/density_t<t>.csv reference density on the LDG grid
//! <dir>/errors.csv             every method against the reference
//! <dir>/metadata.json          resolved settings and solver diagnostics
//! ```
//!
//! A Hurst sweep writes one such directory per value, `<dir>/H<value>`.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::coefficients::build_pdee;
use crate::density::{DensityField, DensityTrajectory};
use crate::error::{Error, Result};
use crate::exact::ExactDensity;
use crate::fd::{fd_solve, FdProblem, FD_C_CFL};
use crate::ldg::{build_mesh, solve_states, DgField, EvalGrid, InitialCondition, LdgProblem};
use crate::metrics::{write_error_table, ErrorReport};
use crate::sde_mc::{estimate_density, simulate, BinSpec, McSettings};

use super::catalog::{build_exact, build_model};
use super::config::{ExperimentConfig, InitialKind, Method};

/// Command-line overrides.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub paths: Option<usize>,
}

/// Diagnostics of one solver run.
#[derive(Debug, Clone, Serialize)]
pub struct SolverRecord {
    pub method: Method,
    pub initial: String,
    pub steps: usize,
    pub min_step: f64,
    pub initial_mass: f64,
    pub mass: Vec<f64>,
    pub max_mass_drift: f64,
    /// Wall-clock time; kept out of the metadata file so reruns compare
    /// byte for byte.
    #[serde(skip)]
    pub elapsed: Duration,
}

/// Everything one experiment (one sweep leg) produced.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub name: String,
    pub hurst: Option<f64>,
    pub out_dir: PathBuf,
    pub reference: Option<Method>,
    pub ldg: Option<Vec<DensityField>>,
    /// LDG cell means on the histogram bins, when Monte Carlo runs.
    pub ldg_on_bins: Option<Vec<DensityField>>,
    pub fd: Option<Vec<DensityField>>,
    pub mc: Option<Vec<DensityField>>,
    pub exact: Option<Vec<DensityField>>,
    pub reports: Vec<ErrorReport>,
    pub records: Vec<SolverRecord>,
    pub files: Vec<PathBuf>,
}

impl RunOutput {
    pub fn report(&self, method: Method, time: f64) -> Option<&ErrorReport> {
        self.reports
            .iter()
            .find(|r| r.method == method.label() && (r.time - time).abs() <= 1e-12 * time.max(1.0))
    }

    pub fn record(&self, method: Method) -> Option<&SolverRecord> {
        self.records.iter().find(|r| r.method == method)
    }
}

/// Runs the experiment, or every leg of its Hurst sweep.
pub fn run(config: &ExperimentConfig, opts: &RunOptions) -> Result<Vec<RunOutput>> {
    config.validate()?;
    let base = opts.out_dir.clone().unwrap_or_else(|| {
        PathBuf::from(
            config
                .output
                .dir
                .clone()
                .unwrap_or_else(|| format!("out/{}", config.name)),
        )
    });
    match &config.sweep {
        None => Ok(vec![run_single(config, opts, &base)?]),
        Some(sweep) => sweep
            .hurst
            .iter()
            .map(|&h| run_single(&config.with_hurst(h), opts, &base.join(format!("H{h}"))))
            .collect(),
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_snapshots(dir: &Path, fields: &[DensityField], files: &mut Vec<PathBuf>) -> Result<()> {
    create_dir(dir)?;
    for f in fields {
        files.push(f.write_csv(dir)?);
    }
    Ok(())
}

fn record(
    method: Method,
    initial: String,
    traj: &DensityTrajectory,
    elapsed: Duration,
) -> SolverRecord {
    SolverRecord {
        method,
        initial,
        steps: traj.steps,
        min_step: traj.min_step,
        initial_mass: traj.initial_mass,
        mass: traj.mass.clone(),
        max_mass_drift: traj.max_mass_drift(),
        elapsed,
    }
}

/// Linear interpolation of nodal values at `xs`; zero outside the nodes.
fn interpolate(field: &DensityField, xs: &[f64], time: f64) -> Result<DensityField> {
    let (a, dx, n) = (field.grid[0], field.spacing(), field.len());
    let values = xs
        .iter()
        .map(|&x| {
            let s = (x - a) / dx;
            if s < 0.0 || s > (n - 1) as f64 {
                return 0.0;
            }
            let i = (s.floor() as usize).min(n - 2);
            let frac = s - i as f64;
            (1.0 - frac) * field.values[i] + frac * field.values[i + 1]
        })
        .collect();
    DensityField::new(xs.to_vec(), values, time)
}

/// Means of the DG solution over the histogram bins.
fn bin_means(field: &DgField, bins: BinSpec, time: f64) -> Result<DensityField> {
    let mesh = field.mesh();
    let centers = crate::density::midpoint_grid(bins.a, bins.b, bins.n_bins);
    if bins.n_bins == mesh.n_cells() && bins.a == mesh.a() && bins.b == mesh.b() {
        return DensityField::new(centers, field.cell_averages(), time);
    }
    // Five-point Gauss–Legendre on each bin, clipped to the mesh.
    const XI: [f64; 5] = [
        -0.906179845938664,
        -0.5384693101056831,
        0.0,
        0.5384693101056831,
        0.906179845938664,
    ];
    const W: [f64; 5] = [
        0.23692688505618908,
        0.47862867049936647,
        0.5688888888888889,
        0.47862867049936647,
        0.23692688505618908,
    ];
    let half = 0.5 * bins.width();
    let values = centers
        .iter()
        .map(|&c| {
            XI.iter()
                .zip(W)
                .map(|(xi, w)| {
                    let x = c + half * xi;
                    0.5 * w * field.evaluate(x).unwrap_or(0.0)
                })
                .sum()
        })
        .collect();
    DensityField::new(centers, values, time)
}

fn sample_exact(exact: &ExactDensity, like: &DensityField) -> Result<DensityField> {
    exact.sample(&like.grid, like.time)
}

fn run_single(config: &ExperimentConfig, opts: &RunOptions, out_dir: &Path) -> Result<RunOutput> {
    let seed = opts.seed.unwrap_or(config.seed);
    let (g, s, m) = (&config.grid, &config.solver, &config.model);
    let domain = (g.a, g.b);
    let times = &g.record_times;
    let t_end = *times.last().expect("validated");
    let model = build_model(m, domain)?;
    let exact = build_exact(m, domain)?;
    let reference = s.reference_method();
    create_dir(out_dir)?;

    let initial = match s.initial {
        InitialKind::Delta => InitialCondition::Delta {
            x0: m.x0,
            width: s.delta_width,
        },
        InitialKind::Dirac => InitialCondition::Dirac { x0: m.x0 },
        InitialKind::WarmStart => {
            let exact = exact
                .clone()
                .expect("validated: warm start has an exact density");
            let t0 = s.t0;
            InitialCondition::warm_start(move |x| exact.density(x, t0).unwrap_or(0.0))
        }
    };

    let mut out = RunOutput {
        name: config.name.clone(),
        hurst: m.hurst,
        out_dir: out_dir.to_path_buf(),
        reference,
        ldg: None,
        ldg_on_bins: None,
        fd: None,
        mc: None,
        exact: None,
        reports: Vec::new(),
        records: Vec::new(),
        files: Vec::new(),
    };
    let bins = BinSpec::new(g.a, g.b, s.mc_bins.unwrap_or(g.cells))?;

    let needs_pdee = s.runs(Method::Ldg) || s.runs(Method::Fd);
    let coefficients = if needs_pdee {
        Some(build_pdee(&model)?)
    } else {
        None
    };

    if s.runs(Method::Ldg) {
        let started = Instant::now();
        let mesh = build_mesh(g.a, g.b, g.cells)?;
        let mut problem = LdgProblem::new(
            coefficients.clone().expect("built above"),
            mesh,
            s.dt,
            s.t0,
            t_end,
            initial.clone(),
        )
        .with_degree(s.degree);
        problem.cfl_policy = s.cfl_policy;
        problem.formulation = s.formulation;
        problem.eval_grid = s.eval_grid;
        let (traj, states) = solve_states(&problem, times)?;
        out.records.push(record(
            Method::Ldg,
            initial.label(),
            &traj,
            started.elapsed(),
        ));
        if s.runs(Method::Mc) {
            out.ldg_on_bins = Some(
                states
                    .iter()
                    .zip(times)
                    .map(|(f, &t)| bin_means(f, bins, t))
                    .collect::<Result<_>>()?,
            );
        }
        write_snapshots(
            &out_dir.join(Method::Ldg.dir_name()),
            &traj.snapshots,
            &mut out.files,
        )?;
        out.ldg = Some(traj.snapshots);
    }

    if s.runs(Method::Fd) {
        let started = Instant::now();
        let mut problem = FdProblem::new(
            coefficients.clone().expect("built above"),
            domain,
            g.cells + 1,
            s.fd_dt.unwrap_or(s.dt),
            s.t0,
            t_end,
            initial.clone(),
        );
        problem.cfl_policy = s.fd_cfl_policy;
        let traj = fd_solve(&problem, times)?;
        out.records.push(record(
            Method::Fd,
            initial.label(),
            &traj,
            started.elapsed(),
        ));
        write_snapshots(
            &out_dir.join(Method::Fd.dir_name()),
            &traj.snapshots,
            &mut out.files,
        )?;
        out.fd = Some(traj.snapshots);
    }

    if s.runs(Method::Mc) {
        let started = Instant::now();
        let settings = McSettings {
            dt: s.mc_dt,
            n_paths: opts.paths.unwrap_or(s.mc_paths),
            seed,
        };
        let ensemble = simulate(&model, settings, times)?;
        let fields = times
            .iter()
            .enumerate()
            .map(|(k, &t)| estimate_density(&ensemble.at(k), bins, t))
            .collect::<Result<Vec<_>>>()?;
        let mass: Vec<f64> = fields
            .iter()
            .map(|f| f.spacing() * f.values.iter().sum::<f64>())
            .collect();
        out.records.push(SolverRecord {
            method: Method::Mc,
            initial: format!("point(x0={})", m.x0),
            steps: ((t_end / s.mc_dt).round() as usize),
            min_step: s.mc_dt,
            initial_mass: 1.0,
            max_mass_drift: mass.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max),
            mass,
            elapsed: started.elapsed(),
        });
        write_snapshots(
            &out_dir.join(Method::Mc.dir_name()),
            &fields,
            &mut out.files,
        )?;
        out.mc = Some(fields);
    }

    if s.runs(Method::Exact) {
        let exact = exact.as_ref().expect("validated: exact density available");
        let grid = s.eval_grid.grid(&build_mesh(g.a, g.b, g.cells)?);
        let fields = times
            .iter()
            .map(|&t| exact.sample(&grid, t))
            .collect::<Result<Vec<_>>>()?;
        write_snapshots(
            &out_dir.join(Method::Exact.dir_name()),
            &fields,
            &mut out.files,
        )?;
        out.exact = Some(fields);
    }

    out.reports = error_reports(&out, exact.as_ref())?;
    if !out.reports.is_empty() {
        out.files.push(write_error_table(out_dir, &out.reports)?);
    }
    let metadata_path = out_dir.join("metadata.json");
    let metadata = metadata(config, seed, opts, &out, bins);
    std::fs::write(
        &metadata_path,
        serde_json::to_string_pretty(&metadata).expect("metadata serializes") + "\n",
    )
    .map_err(|e| Error::io(&metadata_path, e))?;
    out.files.push(metadata_path);
    Ok(out)
}

fn error_reports(out: &RunOutput, exact: Option<&ExactDensity>) -> Result<Vec<ErrorReport>> {
    let mut reports = Vec::new();
    match out.reference {
        Some(Method::Exact) => {
            let exact = exact.expect("validated");
            let label = Method::Exact.label();
            for (method, fields) in [
                (Method::Ldg, &out.ldg),
                (Method::Fd, &out.fd),
                (Method::Mc, &out.mc),
            ] {
                for f in fields.iter().flatten() {
                    reports.push(ErrorReport::compare(
                        method.label(),
                        f,
                        label,
                        &sample_exact(exact, f)?,
                    )?);
                }
            }
        }
        Some(Method::Mc) => {
            let label = Method::Mc.label();
            let mc = out.mc.as_ref().expect("reference runs");
            for (k, reference) in mc.iter().enumerate() {
                if let Some(ldg) = &out.ldg_on_bins {
                    reports.push(ErrorReport::compare(
                        Method::Ldg.label(),
                        &ldg[k],
                        label,
                        reference,
                    )?);
                }
                if let Some(fd) = &out.fd {
                    let on_bins = interpolate(&fd[k], &reference.grid, reference.time)?;
                    reports.push(ErrorReport::compare(
                        Method::Fd.label(),
                        &on_bins,
                        label,
                        reference,
                    )?);
                }
            }
        }
        _ => {}
    }
    Ok(reports)
}

#[derive(Serialize)]
struct Metadata<'a> {
    name: &'a str,
    description: &'a str,
    seed: u64,
    hurst: f64,
    reference: Option<Method>,
    config: &'a ExperimentConfig,
    ldg: Option<serde_json::Value>,
    fd: Option<serde_json::Value>,
    mc: Option<serde_json::Value>,
    exact: Option<serde_json::Value>,
    solvers: &'a [SolverRecord],
}

fn metadata<'a>(
    config: &'a ExperimentConfig,
    seed: u64,
    opts: &RunOptions,
    out: &'a RunOutput,
    bins: BinSpec,
) -> Metadata<'a> {
    let s = &config.solver;
    let ldg = s.runs(Method::Ldg).then(|| {
        let grid_note = match s.eval_grid {
            EvalGrid::Nodes => "mesh nodes, numerical flux p-hat (left trace)",
            EvalGrid::Midpoints => "cell centers, point values",
            EvalGrid::CellAverages => "cell centers, cell means",
        };
        serde_json::json!({
            "degree": s.degree,
            "basis": "orthonormal Legendre",
            "fluxes": "p-hat from the left, w-hat from the right, zero exterior states",
            "formulation": s.formulation,
            "time_integrator": "SSP-RK3 (Shu-Osher)",
            "dt": s.dt,
            "t0": s.t0,
            "cfl_policy": s.cfl_policy,
            "c_cfl": crate::ldg::default_c_cfl(s.degree),
            "c_adv": crate::ldg::default_c_adv(s.degree),
            "eval_grid": s.eval_grid,
            "eval_grid_note": grid_note,
            "cells": config.grid.cells,
            "spacing": config.grid.spacing(),
        })
    });
    let fd = s.runs(Method::Fd).then(|| {
        serde_json::json!({
            "scheme": "central differences of D1 p and D2 p at the nodes",
            "time_integrator": "forward Euler",
            "boundary": "p = 0 at both ends",
            "dt": s.fd_dt.unwrap_or(s.dt),
            "c_cfl": FD_C_CFL,
            "cfl_policy": s.fd_cfl_policy,
            "nodes": config.grid.cells + 1,
        })
    });
    let mc = s.runs(Method::Mc).then(|| {
        serde_json::json!({
            "scheme": "Heun predictor-corrector",
            "paths": opts.paths.unwrap_or(s.mc_paths),
            "dt": s.mc_dt,
            "bins": bins.n_bins,
            "bin_width": bins.width(),
            "range": [bins.a, bins.b],
            "estimator": "histogram normalized by all paths; paths outside the range count toward the total",
        })
    });
    let exact = s.runs(Method::Exact).then(|| {
        serde_json::json!({
            "family": config.model.family,
            "variant": config.model.exact_variant,
        })
    });
    Metadata {
        name: &config.name,
        description: &config.description,
        seed,
        hurst: config.model.hurst_value(),
        reference: out.reference,
        config,
        ldg,
        fd,
        mc,
        exact,
        solvers: &out.records,
    }
}

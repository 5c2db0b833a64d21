use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::coefficients::PdeeCoefficients;
use crate::density::{DensityField, DensityTrajectory};
use crate::error::{Error, Result};

use super::operator::{Formulation, LdgOperator};
use super::{project, project_point_mass, DgField, Mesh};

/// Diffusive stability constant in `dt ≤ c_cfl h² / max D2` for degree `k`.
///
/// The spectral radius of the degree-`k` diffusion operator is about
/// `ρ_k D / h²` with `ρ_k ≈ 4, 36, 148, 439` for `k = 0..=3`; SSP-RK3 is
/// stable on the negative real axis up to 2.51. The constants keep a 10%
/// margin.
pub fn default_c_cfl(k: usize) -> f64 {
    match k {
        0 => 0.56,
        1 => 0.062,
        2 => 0.015,
        3 => 0.0051,
        _ => 2.2 / (2.0 * ((k + 1) as f64).powi(4)),
    }
}

/// Advective counterpart `dt ≤ c_adv h / max|∂x D2 - D1|`.
pub fn default_c_adv(k: usize) -> f64 {
    match k {
        0 => 0.9,
        1 => 0.3,
        2 => 0.18,
        _ => 0.1 / (k as f64 - 1.0),
    }
}

/// What to do when the requested `dt` exceeds the stability limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CflPolicy {
    /// Split each step into equal stable substeps.
    #[default]
    Substep,
    /// Fail with [`Error::Cfl`].
    Strict,
}

pub type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum InitialCondition {
    /// `δ(x - x0)` regularized as a Gaussian of standard deviation `width`
    /// (default `2h`).
    Delta {
        x0: f64,
        width: Option<f64>,
    },
    /// The point mass itself, projected exactly onto the discrete space.
    Dirac {
        x0: f64,
    },
    Function(DensityFn),
    /// A reference density at `t0 > 0`, typically exact or Monte Carlo.
    WarmStart(DensityFn),
}

impl fmt::Debug for InitialCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl InitialCondition {
    pub fn function(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::Function(Arc::new(f))
    }

    pub fn warm_start(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::WarmStart(Arc::new(f))
    }

    pub fn label(&self) -> String {
        match self {
            Self::Delta { x0, width: Some(w) } => format!("delta(x0={x0}, width={w})"),
            Self::Delta { x0, width: None } => format!("delta(x0={x0}, width=2h)"),
            Self::Dirac { x0 } => format!("dirac(x0={x0})"),
            Self::Function(_) => "function".into(),
            Self::WarmStart(_) => "warm_start".into(),
        }
    }

    /// The initial density as a function, with `h` the grid spacing used
    /// for the default delta width. A point mass has no density.
    pub fn density(&self, h: f64) -> Result<DensityFn> {
        match self {
            Self::Dirac { .. } => Err(Error::InvalidInput(
                "a point mass has no pointwise density; project it instead".into(),
            )),
            Self::Delta { x0, width } => {
                let s = width.unwrap_or(2.0 * h);
                if !(s > 0.0) {
                    return Err(Error::InvalidInput(format!(
                        "delta width must be positive, got {s}"
                    )));
                }
                let x0 = *x0;
                Ok(Arc::new(move |x| {
                    (-(x - x0) * (x - x0) / (2.0 * s * s)).exp() / (s * (2.0 * PI).sqrt())
                }))
            }
            Self::Function(f) | Self::WarmStart(f) => Ok(f.clone()),
        }
    }

    /// Values on uniform `nodes` spaced `dx`; a point mass is shared
    /// linearly between its two neighbouring nodes.
    pub fn nodal_values(&self, nodes: &[f64], dx: f64) -> Result<Vec<f64>> {
        if let Self::Dirac { x0 } = *self {
            let (a, b) = (nodes[0], nodes[nodes.len() - 1]);
            if !(a..=b).contains(&x0) {
                return Err(Error::Domain(format!("x0 = {x0} lies outside [{a}, {b}]")));
            }
            let s = (x0 - a) / dx;
            let i = (s.floor() as usize).min(nodes.len() - 2);
            let frac = s - i as f64;
            let mut p = vec![0.0; nodes.len()];
            p[i] = (1.0 - frac) / dx;
            p[i + 1] += frac / dx;
            return Ok(p);
        }
        let f = self.density(dx)?;
        Ok(nodes.iter().map(|&x| f(x)).collect())
    }

    fn project(&self, mesh: &Mesh, k: usize) -> Result<DgField> {
        if let Self::Dirac { x0 } = *self {
            return project_point_mass(x0, mesh, k);
        }
        let f = self.density(mesh.h())?;
        Ok(project(|x| f(x), mesh, k))
    }
}

/// Where snapshots sample the discrete solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalGrid {
    /// The `N + 1` mesh nodes (numerical flux `p̂`).
    #[default]
    Nodes,
    /// Cell centers.
    Midpoints,
    /// Cell means, reported at the centers; the counterpart of a histogram.
    CellAverages,
}

impl EvalGrid {
    pub fn grid(self, mesh: &Mesh) -> Vec<f64> {
        match self {
            Self::Nodes => mesh.nodes(),
            Self::Midpoints | Self::CellAverages => mesh.centers(),
        }
    }

    pub fn sample(self, field: &DgField) -> Vec<f64> {
        match self {
            Self::Nodes => field.node_values(),
            Self::Midpoints => field.midpoint_values(),
            Self::CellAverages => field.cell_averages(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LdgProblem {
    pub coefficients: PdeeCoefficients,
    pub mesh: Mesh,
    pub k: usize,
    pub dt: f64,
    pub t0: f64,
    pub t_end: f64,
    pub initial: InitialCondition,
    pub c_cfl: f64,
    pub c_adv: f64,
    pub cfl_policy: CflPolicy,
    pub formulation: Formulation,
    pub eval_grid: EvalGrid,
    /// Gauss points per cell for the volume integrals; at least `k + 2`.
    pub quad_points: usize,
}

impl LdgProblem {
    /// Degree 2, default stability constants, substepping.
    pub fn new(
        coefficients: PdeeCoefficients,
        mesh: Mesh,
        dt: f64,
        t0: f64,
        t_end: f64,
        initial: InitialCondition,
    ) -> Self {
        Self {
            coefficients,
            mesh,
            k: 2,
            dt,
            t0,
            t_end,
            initial,
            c_cfl: default_c_cfl(2),
            c_adv: default_c_adv(2),
            cfl_policy: CflPolicy::Substep,
            formulation: Formulation::default(),
            eval_grid: EvalGrid::default(),
            quad_points: 4,
        }
    }

    /// Sets the degree and resets the stability constants to its defaults.
    pub fn with_degree(mut self, k: usize) -> Self {
        self.k = k;
        self.c_cfl = default_c_cfl(k);
        self.c_adv = default_c_adv(k);
        self.quad_points = self.quad_points.max(k + 2);
        self
    }

    fn validate(&self, record_times: &[f64]) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidInput(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.t0 >= 0.0 && self.t_end >= self.t0) {
            return Err(Error::InvalidInput(format!(
                "need 0 <= t0 <= T, got t0 = {}, T = {}",
                self.t0, self.t_end
            )));
        }
        if !(self.c_cfl > 0.0 && self.c_adv > 0.0) {
            return Err(Error::InvalidInput(format!(
                "stability constants must be positive, got c_cfl = {}, c_adv = {}",
                self.c_cfl, self.c_adv
            )));
        }
        if record_times.is_empty() {
            return Err(Error::InvalidInput("no record times requested".into()));
        }
        let tol = time_tol(self.t_end);
        for (i, &t) in record_times.iter().enumerate() {
            if !(t >= self.t0 - tol && t <= self.t_end + tol) {
                return Err(Error::InvalidInput(format!(
                    "record time {t} outside [{}, {}]",
                    self.t0, self.t_end
                )));
            }
            if i > 0 && !(t > record_times[i - 1]) {
                return Err(Error::InvalidInput(
                    "record times must be strictly increasing".into(),
                ));
            }
        }
        Ok(())
    }
}

fn time_tol(t: f64) -> f64 {
    1e-12 * t.abs().max(1.0)
}

struct Stepper<'a> {
    op: LdgOperator,
    coefs: &'a PdeeCoefficients,
    k1: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
}

impl Stepper<'_> {
    fn stage(&mut self, t: f64, u: &[f64]) -> Result<()> {
        self.op.load_coefficients(self.coefs, t);
        if !self.op.coefficients_finite() {
            return Err(Error::NonFinite { time: t });
        }
        self.op.apply(u, &mut self.k1);
        Ok(())
    }

    /// One Shu–Osher SSP-RK3 step.
    fn step(&mut self, t: f64, tau: f64, u: &mut [f64]) -> Result<()> {
        self.stage(t, u)?;
        for ((v, &x), &k) in self.u1.iter_mut().zip(u.iter()).zip(&self.k1) {
            *v = x + tau * k;
        }
        let u1 = std::mem::take(&mut self.u1);
        self.stage(t + tau, &u1)?;
        for (((v, &x), &y), &k) in self.u2.iter_mut().zip(u.iter()).zip(&u1).zip(&self.k1) {
            *v = 0.75 * x + 0.25 * (y + tau * k);
        }
        self.u1 = u1;
        let u2 = std::mem::take(&mut self.u2);
        self.stage(t + 0.5 * tau, &u2)?;
        for ((x, &y), &k) in u.iter_mut().zip(&u2).zip(&self.k1) {
            *x = *x / 3.0 + 2.0 / 3.0 * (y + tau * k);
        }
        self.u2 = u2;
        Ok(())
    }

    fn limit(&mut self, t: f64, h: f64, c_cfl: f64, c_adv: f64) -> Result<f64> {
        let (d2, adv) = self.op.load_coefficients(self.coefs, t);
        if !self.op.coefficients_finite() {
            return Err(Error::NonFinite { time: t });
        }
        let rate = d2 / (c_cfl * h * h) + adv / (c_adv * h);
        Ok(if rate > 0.0 {
            1.0 / rate
        } else {
            f64::INFINITY
        })
    }
}

/// Advances the problem with SSP-RK3 and samples the solution on
/// `problem.eval_grid` at `record_times` (strictly increasing, within
/// `[t0, T]`).
///
/// Each step of length `dt` is checked against the stability limit at both
/// of its ends, so growth of the coefficients in time is tracked.
pub fn solve(problem: &LdgProblem, record_times: &[f64]) -> Result<DensityTrajectory> {
    solve_field(problem, record_times).map(|(traj, _)| traj)
}

/// [`solve`], also returning the final discrete state.
pub fn solve_field(
    problem: &LdgProblem,
    record_times: &[f64],
) -> Result<(DensityTrajectory, DgField)> {
    let (traj, mut states) = solve_states(problem, record_times)?;
    let last = states.pop().expect("validated record times are nonempty");
    Ok((traj, last))
}

/// [`solve`], also returning the discrete state at every record time so it
/// can be sampled on other grids.
pub fn solve_states(
    problem: &LdgProblem,
    record_times: &[f64],
) -> Result<(DensityTrajectory, Vec<DgField>)> {
    problem.validate(record_times)?;
    let mesh = problem.mesh;
    let h = mesh.h();
    let mut field = problem.initial.project(&mesh, problem.k)?;
    if !field.is_finite() {
        return Err(Error::NonFinite { time: problem.t0 });
    }
    let n = field.coeffs.len();
    let mut stepper = Stepper {
        op: LdgOperator::new(mesh, problem.k, problem.quad_points, problem.formulation),
        coefs: &problem.coefficients,
        k1: vec![0.0; n],
        u1: vec![0.0; n],
        u2: vec![0.0; n],
    };
    let grid = problem.eval_grid.grid(&mesh);
    let initial_mass = field.mass();
    let mut snapshots = Vec::with_capacity(record_times.len());
    let mut states = Vec::with_capacity(record_times.len());
    let mut mass = Vec::with_capacity(record_times.len());
    let mut steps = 0usize;
    let mut min_step = f64::INFINITY;
    let mut t = problem.t0;

    for &target in record_times {
        while target - t > time_tol(target) {
            let span = problem.dt.min(target - t);
            let limit = stepper
                .limit(t, h, problem.c_cfl, problem.c_adv)?
                .min(stepper.limit(t + span, h, problem.c_cfl, problem.c_adv)?);
            let n_sub = if span <= limit * (1.0 + 1e-12) {
                1
            } else {
                match problem.cfl_policy {
                    CflPolicy::Strict => {
                        return Err(Error::Cfl {
                            dt: span,
                            limit,
                            time: t,
                        })
                    }
                    CflPolicy::Substep => (span / limit).ceil() as usize,
                }
            };
            let tau = span / n_sub as f64;
            for s in 0..n_sub {
                stepper.step(t + s as f64 * tau, tau, &mut field.coeffs)?;
            }
            steps += n_sub;
            min_step = min_step.min(tau);
            t = if target - (t + span) <= time_tol(target) {
                target
            } else {
                t + span
            };
            if !field.is_finite() {
                return Err(Error::NonFinite { time: t });
            }
        }
        snapshots.push(DensityField::new(
            grid.clone(),
            problem.eval_grid.sample(&field),
            target,
        )?);
        mass.push(field.mass());
        states.push(field.clone());
    }

    let traj = DensityTrajectory {
        snapshots,
        mass,
        initial_mass,
        steps,
        min_step,
    };
    Ok((traj, states))
}

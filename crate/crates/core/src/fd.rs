//! Central finite-difference baseline with forward-Euler stepping.
//!
//! At interior nodes
//!
//! ```text
//! p_i' = -((D1 p)_{i+1} - (D1 p)_{i-1}) / 2Δx
//!        + ((D2 p)_{i+1} - 2 (D2 p)_i + (D2 p)_{i-1}) / Δx²
//! ```
//!
//! with `p = 0` held at both ends.

use crate::coefficients::{CoefSample, PdeeCoefficients};
use crate::density::{DensityField, DensityTrajectory};
use crate::error::{Error, Result};
use crate::ldg::{CflPolicy, InitialCondition};

/// Forward Euler is stable for diffusion when `dt ≤ Δx² / (2 max D2)`.
pub const FD_C_CFL: f64 = 0.5;

#[derive(Debug, Clone)]
pub struct FdProblem {
    pub coefficients: PdeeCoefficients,
    pub a: f64,
    pub b: f64,
    /// Nodes including both ends.
    pub n_points: usize,
    pub dt: f64,
    pub t0: f64,
    pub t_end: f64,
    pub initial: InitialCondition,
    pub c_cfl: f64,
    /// Strict by default: the baseline runs at the step it is given or not
    /// at all.
    pub cfl_policy: CflPolicy,
}

impl FdProblem {
    pub fn new(
        coefficients: PdeeCoefficients,
        (a, b): (f64, f64),
        n_points: usize,
        dt: f64,
        t0: f64,
        t_end: f64,
        initial: InitialCondition,
    ) -> Self {
        Self {
            coefficients,
            a,
            b,
            n_points,
            dt,
            t0,
            t_end,
            initial,
            c_cfl: FD_C_CFL,
            cfl_policy: CflPolicy::Strict,
        }
    }

    pub fn spacing(&self) -> f64 {
        (self.b - self.a) / (self.n_points - 1) as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let dx = self.spacing();
        (0..self.n_points)
            .map(|i| {
                if i + 1 == self.n_points {
                    self.b
                } else {
                    self.a + i as f64 * dx
                }
            })
            .collect()
    }
}

fn tol(t: f64) -> f64 {
    1e-12 * t.abs().max(1.0)
}

pub fn fd_solve(problem: &FdProblem, record_times: &[f64]) -> Result<DensityTrajectory> {
    if problem.n_points < 3 || !(problem.a < problem.b) {
        return Err(Error::InvalidInput(format!(
            "finite differences need a < b and at least 3 nodes (got [{}, {}], {})",
            problem.a, problem.b, problem.n_points
        )));
    }
    if !(problem.dt > 0.0) || !(problem.t_end >= problem.t0) {
        return Err(Error::InvalidInput(format!(
            "need dt > 0 and T >= t0 (dt = {}, t0 = {}, T = {})",
            problem.dt, problem.t0, problem.t_end
        )));
    }
    if record_times.is_empty() {
        return Err(Error::InvalidInput("no record times requested".into()));
    }
    for (i, &t) in record_times.iter().enumerate() {
        if !(t >= problem.t0 - tol(t) && t <= problem.t_end + tol(t))
            || (i > 0 && !(t > record_times[i - 1]))
        {
            return Err(Error::InvalidInput(format!(
                "record times must increase strictly within [{}, {}]",
                problem.t0, problem.t_end
            )));
        }
    }

    let x = problem.nodes();
    let n = x.len();
    let dx = problem.spacing();
    let mut p = problem.initial.nodal_values(&x, dx)?;
    p[0] = 0.0;
    p[n - 1] = 0.0;
    let mut next = p.clone();
    let mut f1 = vec![0.0; n];
    let mut f2 = vec![0.0; n];
    let mut coef = vec![CoefSample::default(); n];
    let mass = |p: &[f64]| dx * p.iter().sum::<f64>();
    let initial_mass = mass(&p);

    let mut snapshots = Vec::with_capacity(record_times.len());
    let mut masses = Vec::with_capacity(record_times.len());
    let mut steps = 0usize;
    let mut min_step = f64::INFINITY;
    let mut t = problem.t0;
    for &target in record_times {
        while target - t > tol(target) {
            let mut tau = problem.dt.min(target - t);
            problem.coefficients.sample(t, &x, &mut coef);
            let d2max = coef.iter().map(|c| c.d2.abs()).fold(0.0, f64::max);
            let limit = if d2max > 0.0 {
                problem.c_cfl * dx * dx / d2max
            } else {
                f64::INFINITY
            };
            if tau > limit * (1.0 + 1e-12) {
                match problem.cfl_policy {
                    CflPolicy::Strict => {
                        return Err(Error::Cfl {
                            dt: tau,
                            limit,
                            time: t,
                        })
                    }
                    // The largest equal fraction of the step that is stable.
                    CflPolicy::Substep => tau /= (tau / limit).ceil(),
                }
            }
            for i in 0..n {
                f1[i] = coef[i].d1 * p[i];
                f2[i] = coef[i].d2 * p[i];
            }
            for i in 1..n - 1 {
                let adv = (f1[i + 1] - f1[i - 1]) / (2.0 * dx);
                let diff = (f2[i + 1] - 2.0 * f2[i] + f2[i - 1]) / (dx * dx);
                next[i] = p[i] + tau * (diff - adv);
            }
            std::mem::swap(&mut p, &mut next);
            steps += 1;
            min_step = min_step.min(tau);
            t = if target - (t + tau) <= tol(target) {
                target
            } else {
                t + tau
            };
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite { time: t });
            }
        }
        snapshots.push(DensityField::new(x.clone(), p.clone(), target)?);
        masses.push(mass(&p));
    }
    Ok(DensityTrajectory {
        snapshots,
        mass: masses,
        initial_mass,
        steps,
        min_step,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn heat_error(n_points: usize) -> f64 {
        let (d, s0, t_end) = (0.5, 0.3, 0.25);
        let problem = FdProblem::new(
            PdeeCoefficients::constant(0.0, d),
            (-4.0, 4.0),
            n_points,
            1e-5,
            0.0,
            t_end,
            InitialCondition::function(move |x| {
                (-x * x / (2.0 * s0 * s0)).exp() / (s0 * (2.0 * PI).sqrt())
            }),
        );
        let traj = fd_solve(&problem, &[t_end]).unwrap();
        let s2 = s0 * s0 + 2.0 * d * t_end;
        let snap = &traj.snapshots[0];
        let dx = problem.spacing();
        let e: f64 = snap
            .grid
            .iter()
            .zip(&snap.values)
            .map(|(&x, &p)| {
                let exact = (-x * x / (2.0 * s2)).exp() / (2.0 * PI * s2).sqrt();
                (p - exact).powi(2)
            })
            .sum();
        (dx * e).sqrt()
    }

    #[test]
    fn heat_kernel_second_order_in_space() {
        let e1 = heat_error(81);
        let e2 = heat_error(161);
        let order = (e1 / e2).log2();
        assert!((order - 2.0).abs() < 0.3, "{e1} {e2} order {order}");
    }

    #[test]
    fn frozen_without_coefficients() {
        let f = |x: f64| (-x * x).exp();
        let problem = FdProblem::new(
            PdeeCoefficients::constant(0.0, 0.0),
            (-3.0, 3.0),
            61,
            0.01,
            0.0,
            1.0,
            InitialCondition::function(f),
        );
        let traj = fd_solve(&problem, &[1.0]).unwrap();
        let snap = &traj.snapshots[0];
        for (i, (&x, &p)) in snap.grid.iter().zip(&snap.values).enumerate() {
            if i == 0 || i == 60 {
                assert_eq!(p, 0.0);
            } else {
                assert_eq!(p, f(x));
            }
        }
    }

    #[test]
    fn cfl_violation_is_an_error() {
        let problem = FdProblem::new(
            PdeeCoefficients::constant(0.0, 1.0),
            (-3.0, 3.0),
            121,
            0.01,
            0.0,
            1.0,
            InitialCondition::Delta {
                x0: 0.0,
                width: Some(0.2),
            },
        );
        assert!(matches!(fd_solve(&problem, &[1.0]), Err(Error::Cfl { .. })));
    }

    #[test]
    fn substep_policy_stays_stable() {
        let mut problem = FdProblem::new(
            PdeeCoefficients::constant(0.0, 1.0),
            (-5.0, 5.0),
            201,
            0.01,
            0.0,
            0.5,
            InitialCondition::Delta {
                x0: 0.0,
                width: Some(0.3),
            },
        );
        problem.cfl_policy = CflPolicy::Substep;
        let traj = fd_solve(&problem, &[0.25, 0.5]).unwrap();
        assert!(traj.min_step <= 0.5 * 0.05 * 0.05 * (1.0 + 1e-12));
        // Heat kernel: variance 0.09 + 2t.
        let s2: f64 = 0.09 + 1.0;
        let snap = &traj.snapshots[1];
        let peak = snap.values[100];
        assert!(
            (peak - 1.0 / (2.0 * std::f64::consts::PI * s2).sqrt()).abs() < 1e-3,
            "{peak}"
        );
    }
}

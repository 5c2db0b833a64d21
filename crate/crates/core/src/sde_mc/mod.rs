//! Pathwise integration of Langevin models over noise ensembles and
//! histogram density estimates: the Monte Carlo reference.
//!
//! Both noise channels use the Heun predictor–corrector, which converges to
//! the Stratonovich integral for the white channel and to the symmetric
//! (Young) pathwise integral for the fractional one when `H >= 1/2`.

mod histogram;
mod model;

use rayon::prelude::*;

pub use crate::density::DensityField;
pub use histogram::{estimate_density, BinSpec};
pub use model::{
    ClosedForm, Jet, ModelClass, ModelCoefficients, SdeModel, SpaceTimeField, TimeFunction,
};

use crate::error::{Error, Result};
use crate::noise::{HurstParameter, IncrementSampler, NoiseKind, NoiseSpec, PathEnsemble};

/// States of every path at the recorded times, row-major
/// `[n_paths × n_times]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateEnsemble {
    pub times: Vec<f64>,
    pub states: Vec<f64>,
}

impl StateEnsemble {
    pub fn n_times(&self) -> usize {
        self.times.len()
    }

    pub fn n_paths(&self) -> usize {
        if self.times.is_empty() {
            0
        } else {
            self.states.len() / self.times.len()
        }
    }

    /// All path states at recorded time index `k`.
    pub fn at(&self, k: usize) -> Vec<f64> {
        let m = self.times.len();
        self.states.iter().skip(k).step_by(m).copied().collect()
    }

    pub fn path(&self, p: usize) -> &[f64] {
        let m = self.times.len();
        &self.states[p * m..(p + 1) * m]
    }
}

/// Maps each record time onto a step index of the grid `k · dt`.
fn record_steps(record_times: &[f64], dt: f64, n_steps: usize) -> Result<Vec<usize>> {
    if record_times.is_empty() {
        return Err(Error::InvalidInput("no record times".into()));
    }
    let mut steps = Vec::with_capacity(record_times.len());
    for &t in record_times {
        let k = (t / dt).round();
        if !(t >= 0.0) || (k * dt - t).abs() > 1e-9 * t.max(1.0) || k as usize > n_steps {
            return Err(Error::InvalidInput(format!(
                "record time {t} is not on the grid k·{dt}, k <= {n_steps}"
            )));
        }
        steps.push(k as usize);
    }
    if steps.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput(
            "record times must be strictly increasing".into(),
        ));
    }
    Ok(steps)
}

/// One Heun predictor–corrector step.
#[inline]
fn heun_step(model: &SdeModel, t: f64, dt: f64, x: f64, dw: f64, db: f64) -> f64 {
    let [f0, g0, h0] = model.channels(t, x);
    let predicted = x + f0 * dt + g0 * dw + h0 * db;
    let [f1, g1, h1] = model.channels(t + dt, predicted);
    x + 0.5 * (f0 + f1) * dt + 0.5 * (g0 + g1) * dw + 0.5 * (h0 + h1) * db
}

/// Integrates one path, writing the recorded states into `out`.
/// Returns the time of the first non-finite state, if any.
fn integrate_row(
    model: &SdeModel,
    dt: f64,
    gwn: Option<&[f64]>,
    fgn: Option<&[f64]>,
    steps: &[usize],
    out: &mut [f64],
) -> Option<f64> {
    let last = *steps.last().unwrap();
    let mut x = model.x0();
    let mut next = 0;
    for k in 0..=last {
        while next < steps.len() && steps[next] == k {
            out[next] = x;
            next += 1;
        }
        if k == last {
            break;
        }
        let dw = gwn.map_or(0.0, |r| r[k]);
        let db = fgn.map_or(0.0, |r| r[k]);
        x = heun_step(model, k as f64 * dt, dt, x, dw, db);
        if !x.is_finite() {
            return Some((k + 1) as f64 * dt);
        }
    }
    None
}

fn first_failure(failures: impl ParallelIterator<Item = (usize, f64)>) -> Result<()> {
    match failures.min_by_key(|(p, _)| *p) {
        Some((path, time)) => Err(Error::PathBlowup { path, time }),
        None => Ok(()),
    }
}

/// Integrates `model` along every path of the given ensembles.
pub fn integrate(
    model: &SdeModel,
    gwn: &PathEnsemble,
    fgn: &PathEnsemble,
    record_times: &[f64],
) -> Result<StateEnsemble> {
    let (sw, sf) = (gwn.spec(), fgn.spec());
    if sw.dt != sf.dt || sw.n_paths != sf.n_paths || sw.n_steps != sf.n_steps {
        return Err(Error::InvalidInput(
            "white and fractional ensembles must share dt, n_steps and n_paths".into(),
        ));
    }
    let steps = record_steps(record_times, sw.dt, sw.n_steps)?;
    let m = steps.len();
    let mut states = vec![0.0; m * sw.n_paths];
    let failures = states.par_chunks_mut(m).enumerate().filter_map(|(p, out)| {
        integrate_row(
            model,
            sw.dt,
            Some(gwn.row(p)),
            Some(fgn.row(p)),
            &steps,
            out,
        )
        .map(|t| (p, t))
    });
    first_failure(failures)?;
    Ok(StateEnsemble {
        times: record_times.to_vec(),
        states,
    })
}

/// Monte Carlo run settings for [`simulate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSettings {
    pub dt: f64,
    pub n_paths: usize,
    pub seed: u64,
}

impl McSettings {
    /// The desk-scale default: `10^5` paths, step `0.004`.
    pub fn desk(seed: u64) -> Self {
        Self {
            dt: 0.004,
            n_paths: 100_000,
            seed,
        }
    }
}

/// Same result as generating both ensembles with
/// [`generate_paths`](crate::noise::generate_paths) and calling
/// [`integrate`], but draws each noise row on the fly so memory stays
/// `O(n_paths · n_record)`. Absent channels are not sampled.
pub fn simulate(
    model: &SdeModel,
    settings: McSettings,
    record_times: &[f64],
) -> Result<StateEnsemble> {
    let horizon = record_times.iter().copied().fold(0.0, f64::max);
    let n_steps = ((horizon / settings.dt).round() as usize).max(1);
    let spec = |hurst: HurstParameter| {
        NoiseSpec::new(hurst, settings.dt, n_steps, settings.n_paths, settings.seed)
    };
    let gwn = IncrementSampler::new(spec(HurstParameter::BROWNIAN)?, NoiseKind::Bm)?;
    let fgn = IncrementSampler::new(spec(model.hurst())?, NoiseKind::Fbm)?;
    let (use_gwn, use_fgn) = (model.has_gwn(), model.has_fgn());
    let steps = record_steps(record_times, settings.dt, n_steps)?;
    let m = steps.len();
    let mut states = vec![0.0; m * settings.n_paths];
    let failures = states.par_chunks_mut(m).enumerate().filter_map(|(p, out)| {
        let mut w = vec![0.0; n_steps];
        let mut b = vec![0.0; n_steps];
        if use_gwn {
            gwn.sample_row(p, &mut w);
        }
        if use_fgn {
            fgn.sample_row(p, &mut b);
        }
        integrate_row(
            model,
            settings.dt,
            use_gwn.then_some(w.as_slice()),
            use_fgn.then_some(b.as_slice()),
            &steps,
            out,
        )
        .map(|t| (p, t))
    });
    first_failure(failures)?;
    Ok(StateEnsemble {
        times: record_times.to_vec(),
        states,
    })
}

#[cfg(test)]
mod tests;

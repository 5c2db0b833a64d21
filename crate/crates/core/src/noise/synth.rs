use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::{fgn_grid_autocovariance, NoiseKind, NoiseSpec, PathEnsemble};
use crate::error::{Error, Result};

/// Negative circulant eigenvalues down to this magnitude are clamped to zero;
/// anything more negative triggers the dense fallback.
const EIGEN_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SynthesisMethod {
    /// Circulant embedding, falling back to a dense Cholesky factor when the
    /// embedding is not nonnegative-definite.
    #[default]
    Auto,
    /// Dense Cholesky factor of the full increment covariance.
    Dense,
}

enum Factor {
    White {
        scale: f64,
    },
    Circulant {
        sqrt_eig: Vec<f64>,
        fft: Arc<dyn Fft<f64>>,
    },
    Dense {
        lower: DMatrix<f64>,
    },
}

/// Draws one row of increments for any path index.
///
/// Every path owns a ChaCha stream selected by its index, so row `i` is the
/// same whichever thread produces it and however many rows are drawn.
pub struct IncrementSampler {
    spec: NoiseSpec,
    kind: NoiseKind,
    factor: Factor,
}

impl IncrementSampler {
    pub fn new(spec: NoiseSpec, kind: NoiseKind) -> Result<Self> {
        Self::with_method(spec, kind, SynthesisMethod::Auto)
    }

    pub fn with_method(spec: NoiseSpec, kind: NoiseKind, method: SynthesisMethod) -> Result<Self> {
        spec.validate()?;
        let white = kind == NoiseKind::Bm || spec.hurst.is_brownian();
        let factor = if white {
            Factor::White {
                scale: spec.dt.sqrt(),
            }
        } else {
            match method {
                SynthesisMethod::Auto => match circulant_factor(&spec) {
                    Some(f) => f,
                    None => dense_factor(&spec)?,
                },
                SynthesisMethod::Dense => dense_factor(&spec)?,
            }
        };
        Ok(Self { spec, kind, factor })
    }

    pub fn spec(&self) -> &NoiseSpec {
        &self.spec
    }

    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    pub fn uses_circulant(&self) -> bool {
        matches!(self.factor, Factor::Circulant { .. })
    }

    fn rng_for(&self, path: usize) -> ChaCha8Rng {
        let salt = match self.kind {
            NoiseKind::Fbm => 0x6662_6d5f_6e6f_6973,
            NoiseKind::Bm => 0x626d_5f6e_6f69_7365,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(self.spec.seed ^ salt);
        rng.set_stream(path as u64);
        rng
    }

    /// Fills `out` (length `n_steps`) with the increments of path `path`.
    pub fn sample_row(&self, path: usize, out: &mut [f64]) {
        let n = self.spec.n_steps;
        assert_eq!(out.len(), n, "row buffer must hold n_steps increments");
        let mut rng = self.rng_for(path);
        match &self.factor {
            Factor::White { scale } => {
                for v in out.iter_mut() {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    *v = scale * z;
                }
            }
            Factor::Circulant { sqrt_eig, fft } => {
                let mut buf: Vec<Complex64> = sqrt_eig
                    .iter()
                    .map(|&s| {
                        let re: f64 = StandardNormal.sample(&mut rng);
                        let im: f64 = StandardNormal.sample(&mut rng);
                        Complex64::new(s * re, s * im)
                    })
                    .collect();
                fft.process(&mut buf);
                for (v, c) in out.iter_mut().zip(&buf) {
                    *v = c.re;
                }
            }
            Factor::Dense { lower } => {
                let z = DVector::from_iterator(n, (0..n).map(|_| StandardNormal.sample(&mut rng)));
                let x = lower * z;
                out.copy_from_slice(x.as_slice());
            }
        }
    }
}

fn grid_covariances(spec: &NoiseSpec) -> Vec<f64> {
    (0..=spec.n_steps)
        .map(|lag| fgn_grid_autocovariance(lag, spec.dt, spec.hurst))
        .collect()
}

/// Builds the circulant embedding of size `2n`; `None` when an eigenvalue
/// falls below `-EIGEN_TOLERANCE`.
fn circulant_factor(spec: &NoiseSpec) -> Option<Factor> {
    let n = spec.n_steps;
    let m = 2 * n;
    let gamma = grid_covariances(spec);
    let mut row: Vec<Complex64> = (0..m)
        .map(|j| {
            let lag = if j <= n { j } else { m - j };
            Complex64::new(gamma[lag], 0.0)
        })
        .collect();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(m);
    fft.process(&mut row);
    let mut sqrt_eig = Vec::with_capacity(m);
    for c in &row {
        let lambda = c.re;
        if lambda < -EIGEN_TOLERANCE {
            return None;
        }
        sqrt_eig.push((lambda.max(0.0) / m as f64).sqrt());
    }
    Some(Factor::Circulant { sqrt_eig, fft })
}

fn dense_factor(spec: &NoiseSpec) -> Result<Factor> {
    let n = spec.n_steps;
    let gamma = grid_covariances(spec);
    let cov = DMatrix::from_fn(n, n, |i, j| gamma[i.abs_diff(j)]);
    let chol = cov.cholesky().ok_or_else(|| {
        Error::Embedding(format!(
            "increment covariance (H = {}, n = {n}) is not positive definite",
            spec.hurst.value()
        ))
    })?;
    Ok(Factor::Dense {
        lower: chol.unpack(),
    })
}

/// Builds a full ensemble; rows are generated in parallel but the result
/// does not depend on the worker count.
pub fn generate_paths(spec: NoiseSpec, kind: NoiseKind) -> Result<PathEnsemble> {
    let sampler = IncrementSampler::new(spec, kind)?;
    Ok(sampler.ensemble())
}

impl IncrementSampler {
    pub fn ensemble(&self) -> PathEnsemble {
        let n = self.spec.n_steps;
        let mut increments = vec![0.0; n * self.spec.n_paths];
        increments
            .par_chunks_mut(n)
            .enumerate()
            .for_each(|(path, row)| self.sample_row(path, row));
        PathEnsemble::from_parts(self.spec, self.kind, increments)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::HurstParameter;

    fn spec(h: f64, dt: f64, n_steps: usize, n_paths: usize, seed: u64) -> NoiseSpec {
        NoiseSpec::new(HurstParameter::new(h).unwrap(), dt, n_steps, n_paths, seed).unwrap()
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let s = spec(0.8, 0.01, 64, 200, 7);
        let a = generate_paths(s, NoiseKind::Fbm).unwrap();
        let b = generate_paths(s, NoiseKind::Fbm).unwrap();
        assert_eq!(a.increments(), b.increments());
    }

    #[test]
    fn rows_do_not_depend_on_ensemble_size() {
        let small = generate_paths(spec(0.7, 0.01, 32, 3, 11), NoiseKind::Fbm).unwrap();
        let large = generate_paths(spec(0.7, 0.01, 32, 50, 11), NoiseKind::Fbm).unwrap();
        for p in 0..3 {
            assert_eq!(small.row(p), large.row(p));
        }
    }

    #[test]
    fn rows_do_not_depend_on_thread_count() {
        let s = spec(0.8, 0.01, 40, 500, 3);
        let pool1 = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let pool4 = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        let a = pool1.install(|| generate_paths(s, NoiseKind::Fbm).unwrap());
        let b = pool4.install(|| generate_paths(s, NoiseKind::Fbm).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn embedding_is_used_for_persistent_noise() {
        for h in [0.55, 0.6, 0.7, 0.8, 0.9, 0.99] {
            let sampler = IncrementSampler::new(spec(h, 0.004, 250, 1, 0), NoiseKind::Fbm).unwrap();
            assert!(sampler.uses_circulant(), "H = {h}");
        }
    }

    #[test]
    fn circulant_and_dense_have_same_second_moments() {
        // Sample covariance of both synthesis routes against the exact one.
        let s = spec(0.8, 0.05, 8, 40_000, 5);
        let circ = IncrementSampler::new(s, NoiseKind::Fbm).unwrap().ensemble();
        let dense = IncrementSampler::with_method(s, NoiseKind::Fbm, SynthesisMethod::Dense)
            .unwrap()
            .ensemble();
        for ens in [&circ, &dense] {
            for lag in 0..4 {
                let exact = fgn_grid_autocovariance(lag, s.dt, s.hurst);
                let prods: Vec<f64> = (0..s.n_paths)
                    .map(|p| ens.row(p)[0] * ens.row(p)[lag])
                    .collect();
                let mean = prods.iter().sum::<f64>() / prods.len() as f64;
                let var = prods.iter().map(|x| (x - mean).powi(2)).sum::<f64>()
                    / (prods.len() - 1) as f64;
                let se = (var / prods.len() as f64).sqrt();
                assert!(
                    (mean - exact).abs() < 4.0 * se,
                    "lag {lag}: {mean} vs {exact} (se {se})"
                );
            }
        }
    }

    #[test]
    fn single_step_ensemble() {
        let ens = generate_paths(spec(0.8, 0.1, 1, 10, 1), NoiseKind::Fbm).unwrap();
        assert_eq!(ens.increments().len(), 10);
        assert!(ens.increments().iter().all(|v| v.is_finite()));
    }
}

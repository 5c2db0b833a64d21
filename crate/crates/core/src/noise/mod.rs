//! Fractional Gaussian noise statistics and exact-in-distribution
//! synthesis of fBm / Brownian increment ensembles.
//!
//! The autocorrelation of unit FGN is
//! `R(τ) = 2H(2H-1)|τ|^{2H-2} + 2H|τ|^{2H-1} δ(τ)`. Only the regular
//! part is representable pointwise; the Dirac term is handled analytically
//! by callers (it carries the white-noise contribution at `H = 1/2`).

mod dump;
mod synth;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

pub use dump::{ENSEMBLE_HEADER_LEN, ENSEMBLE_MAGIC};
pub use synth::{generate_paths, IncrementSampler, SynthesisMethod};

/// Hurst index restricted to `[1/2, 1)`.
///
/// `H = 1/2` is the Brownian case; it is admitted so that fractional code
/// paths can be cross-checked against white noise.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct HurstParameter(f64);

impl HurstParameter {
    pub const BROWNIAN: HurstParameter = HurstParameter(0.5);

    pub fn new(h: f64) -> Result<Self> {
        if (0.5..1.0).contains(&h) {
            Ok(Self(h))
        } else {
            Err(Error::Domain(format!(
                "Hurst parameter must satisfy 0.5 <= H < 1, got {h}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_brownian(self) -> bool {
        self.0 == 0.5
    }

    /// `H t^{2H-1}`, the time factor multiplying the FGN channel in the
    /// density evolution equations. Equals `1/2` for every `t > 0` at `H = 1/2`.
    pub fn memory_factor(self, t: f64) -> f64 {
        let h = self.0;
        if h == 0.5 {
            0.5
        } else {
            h * t.powf(2.0 * h - 1.0)
        }
    }
}

impl TryFrom<f64> for HurstParameter {
    type Error = Error;

    fn try_from(h: f64) -> Result<Self> {
        Self::new(h)
    }
}

impl From<HurstParameter> for f64 {
    fn from(h: HurstParameter) -> f64 {
        h.0
    }
}

/// Regular part `2H(2H-1)|τ|^{2H-2}` of the FGN autocorrelation.
pub fn fgn_autocorrelation_regular(tau: f64, h: HurstParameter) -> Result<f64> {
    if tau == 0.0 || !tau.is_finite() {
        return Err(Error::Domain(format!(
            "FGN autocorrelation at tau = {tau}: the lag-zero term is a Dirac component"
        )));
    }
    let h = h.value();
    Ok(2.0 * h * (2.0 * h - 1.0) * tau.abs().powf(2.0 * h - 2.0))
}

/// Power spectral density `Γ(2H+1) sin(Hπ)/π · |ω|^{1-2H}` of unit FGN.
pub fn spectral_density(omega: f64, h: HurstParameter) -> Result<f64> {
    let hv = h.value();
    if !omega.is_finite() || (omega == 0.0 && hv > 0.5) {
        return Err(Error::Domain(format!(
            "FGN spectral density diverges at omega = {omega} for H = {hv}"
        )));
    }
    let amplitude =
        gamma(2.0 * hv + 1.0) * (hv * std::f64::consts::PI).sin() / std::f64::consts::PI;
    if hv == 0.5 {
        return Ok(amplitude);
    }
    Ok(amplitude * omega.abs().powf(1.0 - 2.0 * hv))
}

/// `E[B^H_t B^H_s] = (t^{2H} + s^{2H} - |t-s|^{2H}) / 2`.
pub fn fbm_covariance(t: f64, s: f64, h: HurstParameter) -> Result<f64> {
    if !(t >= 0.0 && s >= 0.0) || !t.is_finite() || !s.is_finite() {
        return Err(Error::Domain(format!(
            "fBm covariance needs nonnegative finite times, got t = {t}, s = {s}"
        )));
    }
    let e = 2.0 * h.value();
    // Written symmetrically so that swapping t and s is bit-identical.
    let (lo, hi) = if t <= s { (t, s) } else { (s, t) };
    Ok(0.5 * (hi.powf(e) + lo.powf(e) - (hi - lo).powf(e)))
}

/// Autocovariance `γ(ℓ)` of FGN increments on a grid of spacing `dt`:
/// `½ dt^{2H} (|ℓ+1|^{2H} - 2|ℓ|^{2H} + |ℓ-1|^{2H})`.
pub fn fgn_grid_autocovariance(lag: usize, dt: f64, h: HurstParameter) -> f64 {
    let e = 2.0 * h.value();
    let l = lag as f64;
    let shape = (l + 1.0).powf(e) - 2.0 * l.powf(e) + (l - 1.0).abs().powf(e);
    0.5 * dt.powf(e) * shape
}

/// Time grid and ensemble size for one noise channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub hurst: HurstParameter,
    pub dt: f64,
    pub n_steps: usize,
    pub n_paths: usize,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(
        hurst: HurstParameter,
        dt: f64,
        n_steps: usize,
        n_paths: usize,
        seed: u64,
    ) -> Result<Self> {
        let spec = Self {
            hurst,
            dt,
            n_steps,
            n_paths,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if self.n_steps == 0 || self.n_paths == 0 {
            return Err(Error::InvalidInput(
                "n_steps and n_paths must be at least 1".into(),
            ));
        }
        Ok(())
    }

    pub fn horizon(&self) -> f64 {
        self.dt * self.n_steps as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NoiseKind {
    /// Fractional Brownian motion increments (fractional Gaussian noise).
    Fbm,
    /// Standard Brownian increments; the `NoiseSpec` Hurst index is ignored.
    Bm,
}

/// Per-path noise increments, row-major `[n_paths × n_steps]`.
///
/// Immutable once built, so it can be shared freely between threads.
#[derive(Debug, Clone, PartialEq)]
pub struct PathEnsemble {
    spec: NoiseSpec,
    kind: NoiseKind,
    increments: Vec<f64>,
}

impl PathEnsemble {
    pub(crate) fn from_parts(spec: NoiseSpec, kind: NoiseKind, increments: Vec<f64>) -> Self {
        debug_assert_eq!(increments.len(), spec.n_steps * spec.n_paths);
        Self {
            spec,
            kind,
            increments,
        }
    }

    pub fn spec(&self) -> &NoiseSpec {
        &self.spec
    }

    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    pub fn n_paths(&self) -> usize {
        self.spec.n_paths
    }

    pub fn n_steps(&self) -> usize {
        self.spec.n_steps
    }

    pub fn increments(&self) -> &[f64] {
        &self.increments
    }

    pub fn row(&self, path: usize) -> &[f64] {
        let n = self.spec.n_steps;
        &self.increments[path * n..(path + 1) * n]
    }

    /// Running sum of path `path` at grid index `step` (1-based: `step = 1`
    /// is the value after the first increment).
    pub fn level(&self, path: usize, step: usize) -> f64 {
        self.row(path)[..step].iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hp(h: f64) -> HurstParameter {
        HurstParameter::new(h).unwrap()
    }

    #[test]
    fn hurst_range() {
        assert!(HurstParameter::new(0.5).is_ok());
        assert!(HurstParameter::new(0.99).is_ok());
        assert!(HurstParameter::new(1.0).is_err());
        assert!(HurstParameter::new(0.3).is_err());
        assert!(HurstParameter::new(f64::NAN).is_err());
    }

    #[test]
    fn autocorrelation_examples() {
        assert_eq!(fgn_autocorrelation_regular(1.0, hp(0.5)).unwrap(), 0.0);
        assert!((fgn_autocorrelation_regular(1.0, hp(0.75)).unwrap() - 0.75).abs() < 1e-15);
        let v = fgn_autocorrelation_regular(2.0, hp(0.75)).unwrap();
        assert!((v - 0.75 / 2f64.sqrt()).abs() < 1e-15);
        assert!((v - 0.53033).abs() < 1e-5);
        assert_eq!(
            fgn_autocorrelation_regular(-2.0, hp(0.75)).unwrap(),
            fgn_autocorrelation_regular(2.0, hp(0.75)).unwrap()
        );
        assert!(matches!(
            fgn_autocorrelation_regular(0.0, hp(0.75)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn spectral_density_examples() {
        let white = spectral_density(1.0, hp(0.5)).unwrap();
        assert!((white - 1.0 / std::f64::consts::PI).abs() < 1e-14);
        let s1 = spectral_density(1.0, hp(0.8)).unwrap();
        let expected = gamma(2.6) * (0.8 * std::f64::consts::PI).sin() / std::f64::consts::PI;
        assert!((s1 - expected).abs() < 1e-14);
        assert!((s1 - 0.2675).abs() < 5e-4);
        let s4 = spectral_density(4.0, hp(0.8)).unwrap();
        assert!((s4 / s1 - 4f64.powf(-0.6)).abs() < 1e-14);
        assert!(spectral_density(0.0, hp(0.8)).is_err());
        assert!(spectral_density(0.0, hp(0.5)).is_ok());
    }

    #[test]
    fn covariance_examples() {
        for h in [0.5, 0.6, 0.8, 0.95] {
            assert!((fbm_covariance(1.0, 1.0, hp(h)).unwrap() - 1.0).abs() < 1e-15);
        }
        assert!((fbm_covariance(1.0, 2.0, hp(0.5)).unwrap() - 1.0).abs() < 1e-15);
        let c = fbm_covariance(1.0, 2.0, hp(0.8)).unwrap();
        assert!((c - 2f64.powf(0.6)).abs() < 1e-14);
        assert!((c - 1.51572).abs() < 1e-5);
        assert!(fbm_covariance(-1.0, 2.0, hp(0.8)).is_err());
    }

    #[test]
    fn grid_autocovariance_matches_covariance_differences() {
        let h = hp(0.7);
        let dt = 0.1;
        for lag in 0..6 {
            // Cov(B(dt) - B(0), B((l+1)dt) - B(l dt)) from the fBm covariance.
            let t = |i: usize| i as f64 * dt;
            let c = |a: usize, b: usize| fbm_covariance(t(a), t(b), h).unwrap();
            let direct = c(1, lag + 1) - c(1, lag) - c(0, lag + 1) + c(0, lag);
            assert!((direct - fgn_grid_autocovariance(lag, dt, h)).abs() < 1e-14);
        }
    }

    proptest::proptest! {
        #[test]
        fn covariance_is_symmetric(t in 0.0f64..50.0, s in 0.0f64..50.0, h in 0.5f64..0.999) {
            let h = hp(h);
            proptest::prop_assert_eq!(fbm_covariance(t, s, h).unwrap(), fbm_covariance(s, t, h).unwrap());
        }
    }
}

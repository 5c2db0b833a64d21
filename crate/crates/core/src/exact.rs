//! Closed-form reference densities.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::density::DensityField;
use crate::error::{Error, Result};
use crate::noise::HurstParameter;
use crate::quadrature::integrate_refined;

const NORMALIZATION_TOL: f64 = 1e-13;

/// Stationary density `C1 exp{(2a x² - b x⁴) / (2σ²)}` of
/// `dX = (aX - bX³)dt + σ ∘ dW`, normalized on a truncation domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryDoubleWell {
    pub a: f64,
    pub b: f64,
    pub sigma: f64,
    c1: f64,
}

impl StationaryDoubleWell {
    pub fn new(a: f64, b: f64, sigma: f64, domain: (f64, f64)) -> Result<Self> {
        if !(b > 0.0) {
            return Err(Error::Domain(format!(
                "stationary density needs b > 0, got {b}"
            )));
        }
        if sigma == 0.0 {
            return Err(Error::Domain("stationary density needs sigma != 0".into()));
        }
        let mut this = Self {
            a,
            b,
            sigma,
            c1: 1.0,
        };
        let mass = integrate_refined(domain.0, domain.1, NORMALIZATION_TOL, 0.0, |x| {
            this.unnormalized(x)
        })?;
        this.c1 = 1.0 / mass;
        Ok(this)
    }

    fn unnormalized(&self, x: f64) -> f64 {
        let x2 = x * x;
        ((2.0 * self.a * x2 - self.b * x2 * x2) / (2.0 * self.sigma * self.sigma)).exp()
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn density(&self, x: f64) -> f64 {
        self.c1 * self.unnormalized(x)
    }
}

/// Transient density of the Ornstein–Uhlenbeck model `dX = aX dt + σ dW`
/// started at 0: centered Gaussian with variance `σ²(1 - e^{2at}) / (-2a)`.
pub fn ou_transient(x: f64, t: f64, a: f64, sigma: f64) -> Result<f64> {
    if !(a < 0.0) {
        return Err(Error::Domain(format!(
            "OU transient density needs a < 0, got {a}"
        )));
    }
    if !(t > 0.0) {
        return Err(Error::Domain(format!(
            "OU density at t = {t} is a point mass"
        )));
    }
    let var = ou_variance(t, a, sigma);
    Ok((-x * x / (2.0 * var)).exp() / (2.0 * PI * var).sqrt())
}

pub fn ou_variance(t: f64, a: f64, sigma: f64) -> f64 {
    sigma * sigma * (-(2.0 * a * t).exp_m1()) / (-2.0 * a)
}

/// Density of `dX = √a t^b X ∘ dW`, `X_0 = x0`: lognormal with log-variance
/// `a t^{2b+1} / (2b+1)`. Zero for `x <= 0`.
pub fn gbm_time_varying(x: f64, t: f64, a: f64, b: f64, x0: f64) -> Result<f64> {
    if !(x0 > 0.0 && t > 0.0 && a > 0.0 && b > -0.5) {
        return Err(Error::Domain(format!(
            "time-varying GBM density needs x0 > 0, t > 0, a > 0, b > -1/2 (x0 = {x0}, t = {t}, a = {a}, b = {b})"
        )));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    let var = a * t.powf(2.0 * b + 1.0) / (2.0 * b + 1.0);
    let z = (x / x0).ln();
    Ok((-z * z / (2.0 * var)).exp() / (x * (2.0 * PI * var).sqrt()))
}

/// Which centering of the log-normal density to use for the linear
/// fractional model with `b = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinearFbmVariant {
    /// Centering `ln(x/x0) - x0 - at`, as the formula is commonly printed.
    Printed,
    /// Centering `ln(x/x0) - at`, the law of the pathwise solution
    /// `X_t = x0 exp(at + c B^H_t)`. Monte Carlo confirms this one.
    Corrected,
}

/// Density of `dX = aX dt + cX ∘ dB^H`: Gaussian in `ln x` with standard
/// deviation `c t^H`. Zero for `x <= 0`.
pub fn linear_fbm_lognormal(
    x: f64,
    t: f64,
    a: f64,
    c: f64,
    h: HurstParameter,
    x0: f64,
    variant: LinearFbmVariant,
) -> Result<f64> {
    if !(t > 0.0 && x0 > 0.0 && c != 0.0) {
        return Err(Error::Domain(format!(
            "log-normal fBm density needs t > 0, x0 > 0, c != 0 (t = {t}, x0 = {x0}, c = {c})"
        )));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    let var = c * c * t.powf(2.0 * h.value());
    let shift = match variant {
        LinearFbmVariant::Printed => x0,
        LinearFbmVariant::Corrected => 0.0,
    };
    let z = (x / x0).ln() - shift - a * t;
    Ok((-z * z / (2.0 * var)).exp() / (x * (2.0 * PI * var).sqrt()))
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Density of the driftless fractional model `dX = h(X) ∘ dB^H`:
/// `C1 (½ t^{2H} h²(x))^{-1/2} exp{-x̂(x)² / (2 t^{2H})}` with
/// `x̂(x) = ∫_{x0}^x dy / h(y)`, normalized per time on a truncation domain.
pub struct FgnOnlyGeneral {
    h: ScalarFn,
    xhat: ScalarFn,
    hurst: HurstParameter,
    domain: (f64, f64),
    cache: Mutex<HashMap<u64, f64>>,
}

impl fmt::Debug for FgnOnlyGeneral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FgnOnlyGeneral")
            .field("hurst", &self.hurst)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

impl FgnOnlyGeneral {
    /// `xhat` must be the antiderivative of `1/h` vanishing at the initial state.
    pub fn new(
        h: impl Fn(f64) -> f64 + Send + Sync + 'static,
        xhat: impl Fn(f64) -> f64 + Send + Sync + 'static,
        hurst: HurstParameter,
        domain: (f64, f64),
    ) -> Result<Self> {
        let (lo, hi) = domain;
        if !(lo < hi) {
            return Err(Error::InvalidInput(format!(
                "domain needs lo < hi, got [{lo}, {hi}]"
            )));
        }
        for i in 0..=1000 {
            let x = lo + (hi - lo) * i as f64 / 1000.0;
            let v = h(x);
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Domain(format!(
                    "h({x}) = {v} must stay positive on the domain"
                )));
            }
        }
        Ok(Self {
            h: Arc::new(h),
            xhat: Arc::new(xhat),
            hurst,
            domain,
            cache: Mutex::new(HashMap::new()),
        })
    }

    /// `h(x) = √(1 + σx²)`, for which `x̂` has the closed form
    /// `(asinh(√σ x) - asinh(√σ x0)) / √σ`.
    pub fn sqrt_quadratic(
        sigma: f64,
        hurst: HurstParameter,
        x0: f64,
        domain: (f64, f64),
    ) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(Error::Domain(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        let rs = sigma.sqrt();
        let base = (rs * x0).asinh();
        Self::new(
            move |x| (1.0 + sigma * x * x).sqrt(),
            move |x| ((rs * x).asinh() - base) / rs,
            hurst,
            domain,
        )
    }

    /// `h ≡ 1`: the fBm itself, `N(x0, t^{2H})`.
    pub fn unit(hurst: HurstParameter, x0: f64, domain: (f64, f64)) -> Result<Self> {
        Self::new(|_| 1.0, move |x| x - x0, hurst, domain)
    }

    fn unnormalized(&self, x: f64, t: f64) -> f64 {
        let s2 = t.powf(2.0 * self.hurst.value());
        let hx = (self.h)(x);
        let xh = (self.xhat)(x);
        (-xh * xh / (2.0 * s2)).exp() / (0.5 * s2 * hx * hx).sqrt()
    }

    /// `C1` at time `t`, cached per time.
    pub fn normalization(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("density at t = {t} is a point mass")));
        }
        if let Some(&c1) = self.cache.lock().unwrap().get(&t.to_bits()) {
            return Ok(c1);
        }
        let (lo, hi) = self.domain;
        let mass = integrate_refined(lo, hi, NORMALIZATION_TOL, 0.0, |x| self.unnormalized(x, t))?;
        let c1 = 1.0 / mass;
        self.cache.lock().unwrap().insert(t.to_bits(), c1);
        Ok(c1)
    }

    pub fn density(&self, x: f64, t: f64) -> Result<f64> {
        Ok(self.normalization(t)? * self.unnormalized(x, t))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExactFamily {
    StationaryDoubleWell,
    OuTransient,
    GbmTimeVarying,
    LinearFbmLognormal,
    FgnOnlyGeneral,
}

/// A reference density selected by family.
#[derive(Debug, Clone)]
pub enum ExactDensity {
    StationaryDoubleWell(StationaryDoubleWell),
    OuTransient {
        a: f64,
        sigma: f64,
    },
    GbmTimeVarying {
        a: f64,
        b: f64,
        x0: f64,
    },
    LinearFbmLognormal {
        a: f64,
        c: f64,
        hurst: HurstParameter,
        x0: f64,
        variant: LinearFbmVariant,
    },
    FgnOnlyGeneral(Arc<FgnOnlyGeneral>),
}

impl ExactDensity {
    pub fn family(&self) -> ExactFamily {
        match self {
            Self::StationaryDoubleWell(_) => ExactFamily::StationaryDoubleWell,
            Self::OuTransient { .. } => ExactFamily::OuTransient,
            Self::GbmTimeVarying { .. } => ExactFamily::GbmTimeVarying,
            Self::LinearFbmLognormal { .. } => ExactFamily::LinearFbmLognormal,
            Self::FgnOnlyGeneral(_) => ExactFamily::FgnOnlyGeneral,
        }
    }

    /// Density at `(x, t)`; the stationary family ignores `t`.
    pub fn density(&self, x: f64, t: f64) -> Result<f64> {
        match self {
            Self::StationaryDoubleWell(d) => Ok(d.density(x)),
            Self::OuTransient { a, sigma } => ou_transient(x, t, *a, *sigma),
            Self::GbmTimeVarying { a, b, x0 } => gbm_time_varying(x, t, *a, *b, *x0),
            Self::LinearFbmLognormal {
                a,
                c,
                hurst,
                x0,
                variant,
            } => linear_fbm_lognormal(x, t, *a, *c, *hurst, *x0, *variant),
            Self::FgnOnlyGeneral(d) => d.density(x, t),
        }
    }

    pub fn sample(&self, grid: &[f64], t: f64) -> Result<DensityField> {
        let values = grid
            .iter()
            .map(|&x| self.density(x, t))
            .collect::<Result<Vec<_>>>()?;
        DensityField::new(grid.to_vec(), values, t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hp(h: f64) -> HurstParameter {
        HurstParameter::new(h).unwrap()
    }

    fn mass(lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> f64 {
        integrate_refined(lo, hi, 1e-13, 1e-300, f).unwrap()
    }

    #[test]
    fn double_well_shape() {
        let d = StationaryDoubleWell::new(1.0, 1.0, 1.0, (-3.0, 3.0)).unwrap();
        for x in [0.1, 0.7, 1.3, 2.9] {
            assert_eq!(d.density(x), d.density(-x));
        }
        // Stationary points of x² - x⁴/2 are 0 and ±1; ±1 are the maxima.
        let grid: Vec<f64> = (0..=6000).map(|i| -3.0 + i as f64 * 1e-3).collect();
        let argmax = grid
            .iter()
            .copied()
            .max_by(|a, b| d.density(*a).partial_cmp(&d.density(*b)).unwrap())
            .unwrap();
        assert!((argmax.abs() - 1.0).abs() < 1e-9);
        assert!((mass(-3.0, 3.0, |x| d.density(x)) - 1.0).abs() < 1e-8);
        assert!(StationaryDoubleWell::new(1.0, 0.0, 1.0, (-3.0, 3.0)).is_err());
    }

    #[test]
    fn double_well_small_quartic_limit_is_gaussian() {
        let d = StationaryDoubleWell::new(-1.0, 1e-10, 1.0, (-8.0, 8.0)).unwrap();
        for x in [0.0f64, 0.5, 1.2] {
            let gauss = (-x * x).exp() / PI.sqrt();
            assert!((d.density(x) - gauss).abs() < 1e-8);
        }
    }

    #[test]
    fn ou_examples() {
        assert!((ou_transient(0.0, 200.0, -1.0, 1.0).unwrap() - 1.0 / PI.sqrt()).abs() < 1e-12);
        assert!((mass(-8.0, 8.0, |x| ou_transient(x, 0.7, -1.0, 1.0).unwrap()) - 1.0).abs() < 1e-8);
        // (1 - e^{-2t}) / 2 = t (1 - t + O(t²))
        let v = ou_variance(0.001, -1.0, 1.0);
        assert!((v - 0.001).abs() < 0.001 * 2.0 * 0.001);
        assert!(ou_transient(0.0, 0.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn ou_solves_its_fokker_planck_equation() {
        let (a, s) = (-1.0, 1.0);
        for t in [0.05, 0.2, 1.0, 5.0] {
            let v = ou_variance(t, a, s);
            let v_t = s * s * (2.0 * a * t).exp();
            for x in [-2.0, -0.4, 0.0, 0.9, 2.5] {
                let p = ou_transient(x, t, a, s).unwrap();
                let p_x = -x / v * p;
                let p_xx = (x * x / (v * v) - 1.0 / v) * p;
                let p_t = v_t * (x * x / (2.0 * v * v) - 1.0 / (2.0 * v)) * p;
                let rhs = -(a * p + a * x * p_x) + 0.5 * s * s * p_xx;
                assert!((p_t - rhs).abs() <= 1e-8, "t {t}, x {x}");
            }
        }
    }

    #[test]
    fn gbm_examples() {
        let p = |x: f64| gbm_time_varying(x, 1.0, 0.02, 0.3, 2.0).unwrap();
        assert!((mass(1e-12, 10.0, p) - 1.0).abs() < 1e-8);
        let grid: Vec<f64> = (1..4000).map(|i| i as f64 * 1e-3).collect();
        let mode = grid
            .iter()
            .copied()
            .max_by(|a, b| p(*a).partial_cmp(&p(*b)).unwrap())
            .unwrap();
        assert!(mode < 2.0);
        // b = 0: plain geometric Brownian motion, log-variance a t.
        let q = gbm_time_varying(1.5, 2.0, 0.1, 0.0, 1.0).unwrap();
        let var: f64 = 0.2;
        let z = 1.5f64.ln();
        let expected = (-z * z / (2.0 * var)).exp() / (1.5 * (2.0 * PI * var).sqrt());
        assert!((q - expected).abs() < 1e-14);
        assert_eq!(gbm_time_varying(-1.0, 1.0, 0.02, 0.3, 2.0).unwrap(), 0.0);
        assert!(gbm_time_varying(2.0, 1e-6, 0.02, 0.3, 2.0).unwrap() > 1e3);
    }

    #[test]
    fn linear_fbm_structure() {
        let h = hp(0.8);
        let (a, c, x0) = (-0.5, 0.5, 2.0);
        let p = |x: f64| {
            linear_fbm_lognormal(x, 1.0, a, c, h, x0, LinearFbmVariant::Corrected).unwrap()
        };
        assert!((mass(1e-9, 30.0, p) - 1.0).abs() < 1e-8);
        // Gaussian in ln x with std c t^H: density of ln X at its mean.
        let m = x0.ln() + a;
        let x = m.exp();
        assert!((p(x) * x - 1.0 / (c * (2.0 * PI).sqrt())).abs() < 1e-12);
        // Printed variant concentrates near x0 e^{x0} for small t.
        let q =
            |x: f64| linear_fbm_lognormal(x, 1e-4, a, c, h, x0, LinearFbmVariant::Printed).unwrap();
        assert!(q(x0 * x0.exp()) > 10.0);
        assert!(q(x0) < 1e-10);
        assert_eq!(p(-1.0), 0.0);
    }

    #[test]
    fn linear_fbm_brownian_degenerates_to_gwn_lognormal() {
        let p = linear_fbm_lognormal(
            1.3,
            2.0,
            0.0,
            0.4,
            HurstParameter::BROWNIAN,
            1.0,
            LinearFbmVariant::Corrected,
        )
        .unwrap();
        let var = 0.16 * 2.0;
        let z = 1.3f64.ln();
        let expected = (-z * z / (2.0 * var)).exp() / (1.3 * (2.0 * PI * var).sqrt());
        assert!((p - expected).abs() < 1e-14);
    }

    #[test]
    fn fgn_only_unit_is_gaussian() {
        let h = hp(0.7);
        let d = FgnOnlyGeneral::unit(h, 0.0, (-12.0, 12.0)).unwrap();
        let t: f64 = 1.7;
        let var = t.powf(1.4);
        for x in [-1.0, 0.0, 0.3, 2.0] {
            let gauss = (-x * x / (2.0 * var)).exp() / (2.0 * PI * var).sqrt();
            assert!((d.density(x, t).unwrap() - gauss).abs() < 1e-12);
        }
    }

    #[test]
    fn fgn_only_sqrt_quadratic() {
        let d = FgnOnlyGeneral::sqrt_quadratic(0.1, hp(0.8), 0.0, (-6.0, 6.0)).unwrap();
        for x in [0.2, 1.0, 2.5] {
            assert!((d.density(x, 0.5).unwrap() - d.density(-x, 0.5).unwrap()).abs() < 1e-15);
        }
        assert!((mass(-6.0, 6.0, |x| d.density(x, 0.5).unwrap()) - 1.0).abs() < 1e-8);
        // σ -> 0 approaches the h ≡ 1 case.
        let small = FgnOnlyGeneral::sqrt_quadratic(1e-10, hp(0.8), 0.0, (-6.0, 6.0)).unwrap();
        let unit = FgnOnlyGeneral::unit(hp(0.8), 0.0, (-6.0, 6.0)).unwrap();
        for x in [0.0, 0.7, 1.9] {
            assert!((small.density(x, 0.5).unwrap() - unit.density(x, 0.5).unwrap()).abs() < 1e-8);
        }
        assert!(FgnOnlyGeneral::new(|x| x, |x| x.ln(), hp(0.8), (-1.0, 1.0)).is_err());
    }

    #[test]
    fn fgn_only_solves_its_density_equation() {
        // Analytic derivatives of p = K(t) h⁻¹ exp(-x̂²/(2s)), s = t^{2H}, with
        // the full-line constant K = 1/√(2π s).
        let sigma = 0.1;
        let hv = 0.8;
        let d = FgnOnlyGeneral::sqrt_quadratic(sigma, hp(hv), 0.0, (-60.0, 60.0)).unwrap();
        for t in [0.2f64, 0.5, 1.0] {
            let s = t.powf(2.0 * hv);
            let s_t = 2.0 * hv * t.powf(2.0 * hv - 1.0);
            let kappa = 0.5 * s_t;
            for x in [-2.0f64, -0.5, 0.0, 0.8, 1.7] {
                let h = (1.0 + sigma * x * x).sqrt();
                let h1 = sigma * x / h;
                let h2 = sigma / (h * h * h);
                let xh = (sigma.sqrt() * x).asinh() / sigma.sqrt();
                let p = (-xh * xh / (2.0 * s)).exp() / (h * (2.0 * PI * s).sqrt());
                let q_x = -h1 / h - xh / (s * h);
                let q_xx =
                    -(h2 / h - h1 * h1 / (h * h)) - 1.0 / (s * h * h) + xh * h1 / (s * h * h);
                let q_t = -s_t / (2.0 * s) + xh * xh * s_t / (2.0 * s * s);
                let p_x = p * q_x;
                let p_xx = p * (q_x * q_x + q_xx);
                let p_t = p * q_t;
                let rhs = kappa * ((h1 * h1 + h * h2) * p + 3.0 * h * h1 * p_x + h * h * p_xx);
                assert!((p_t - rhs).abs() <= 1e-6, "t {t} x {x}: {p_t} vs {rhs}");
                // The implementation agrees with the full-line formula.
                assert!((d.density(x, t).unwrap() - p).abs() < 1e-10);
            }
        }
    }
}

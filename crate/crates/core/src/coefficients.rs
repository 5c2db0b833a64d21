//! Drift and diffusion fields `D1(x,t)`, `D2(x,t)` of the density evolution
//! equation `∂t p = -∂x(D1 p) + ∂xx(D2 p)` for each supported model family.
//!
//! | family                  | D1                               | D2                      |
//! |-------------------------|----------------------------------|-------------------------|
//! | white noise only        | f + ½ g g'                       | ½ g²                    |
//! | fractional noise only   | κ h h'                           | κ h²                    |
//! | linear, time-varying    | (A + ½B² + Ĉ) x                  | (½B² + Ĉ) x²            |
//! | commuting nonlinear     | f + ½ g g' + κ h h'              | ½ g² + κ h²             |
//!
//! with `κ(t) = H t^{2H-1}` and the memory coefficient
//! `Ĉ_t = C_t ∫₀ᵗ φ(t,r) C_r dr`, `φ(t,s) = H(2H-1)|t-s|^{2H-2}`.
//! Spatial derivatives are assembled from the model's analytic jets.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::noise::HurstParameter;
use crate::quadrature::GaussRule;
use crate::sde_mc::{
    ClosedForm, Jet, ModelClass, ModelCoefficients, SdeModel, SpaceTimeField, TimeFunction,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    FpkStratonovich,
    FgnOnly,
    LinearTimeVarying,
    NonlinearCommutative,
    /// Hand-supplied fields (tests, manufactured problems).
    Custom,
}

/// `D1, ∂x D1, D2, ∂x D2, ∂xx D2` at one point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CoefSample {
    pub d1: f64,
    pub d1_x: f64,
    pub d2: f64,
    pub d2_x: f64,
    pub d2_xx: f64,
}

type Sampler = dyn Fn(f64, &[f64], &mut [CoefSample]) + Send + Sync;

/// Drift/diffusion fields with their analytic spatial derivatives.
///
/// Evaluation is batched per time so that time-only factors (`κ(t)`, `Ĉ_t`)
/// are computed once per call.
#[derive(Clone)]
pub struct PdeeCoefficients {
    provenance: Provenance,
    t_min: f64,
    time_independent: bool,
    sampler: Arc<Sampler>,
}

impl fmt::Debug for PdeeCoefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PdeeCoefficients")
            .field("provenance", &self.provenance)
            .field("t_min", &self.t_min)
            .field("time_independent", &self.time_independent)
            .finish_non_exhaustive()
    }
}

impl PdeeCoefficients {
    /// Pointwise fields given directly.
    pub fn custom(f: impl Fn(f64, f64) -> CoefSample + Send + Sync + 'static) -> Self {
        Self::from_sampler(Provenance::Custom, move |t, xs, out| {
            for (o, &x) in out.iter_mut().zip(xs) {
                *o = f(x, t);
            }
        })
    }

    /// `D1 = v`, `D2 = d` with constants `v`, `d`.
    pub fn constant(drift: f64, diffusion: f64) -> Self {
        Self::custom(move |_, _| CoefSample {
            d1: drift,
            d2: diffusion,
            ..CoefSample::default()
        })
        .time_independent()
    }

    /// Declares that the fields do not depend on `t`, letting solvers
    /// sample them once.
    pub fn time_independent(mut self) -> Self {
        self.time_independent = true;
        self
    }

    pub fn is_time_independent(&self) -> bool {
        self.time_independent
    }

    fn from_sampler(
        provenance: Provenance,
        f: impl Fn(f64, &[f64], &mut [CoefSample]) + Send + Sync + 'static,
    ) -> Self {
        Self {
            provenance,
            t_min: 0.0,
            time_independent: false,
            sampler: Arc::new(f),
        }
    }

    pub fn with_t_min(mut self, t_min: f64) -> Self {
        self.t_min = t_min.max(0.0);
        self
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    /// Fills `out[i]` with the fields at `(xs[i], t)`. Times below `t_min`
    /// are clamped up to it.
    pub fn sample(&self, t: f64, xs: &[f64], out: &mut [CoefSample]) {
        debug_assert_eq!(xs.len(), out.len());
        (self.sampler)(t.max(self.t_min), xs, out)
    }

    pub fn at(&self, x: f64, t: f64) -> CoefSample {
        let mut out = [CoefSample::default()];
        self.sample(t, &[x], &mut out);
        out[0]
    }
}

/// Memory kernel `φ(t,s) = H(2H-1)|t-s|^{2H-2}`.
pub fn phi_kernel(t: f64, s: f64, h: HurstParameter) -> Result<f64> {
    if t == s {
        return Err(Error::Domain(
            "phi(t, t) is an integrable singularity; integrate it instead".into(),
        ));
    }
    let hv = h.value();
    Ok(hv * (2.0 * hv - 1.0) * (t - s).abs().powf(2.0 * hv - 2.0))
}

/// Quadrature settings for `Ĉ_t` when no closed form is available.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemoryQuadrature {
    /// Relative agreement required between the two refinement levels.
    pub rel_tol: f64,
    /// Geometric panels per half-interval.
    pub levels: usize,
}

impl Default for MemoryQuadrature {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            levels: 48,
        }
    }
}

/// `∫₀ᵗ φ(t,r) C_r dr` by the substitution `u = (t-r)^{2H-1}`, which turns
/// the kernel singularity into a constant weight:
/// `H ∫₀^{t^{2H-1}} C(t - u^{1/(2H-1)}) du`.
///
/// The transformed integrand may still be non-smooth at either end (a
/// fractional power of `r` in `C`, or the map `u^{1/(2H-1)}` itself), so the
/// interval is split in half and each half is covered by panels graded
/// geometrically toward its outer end.
fn memory_integral(
    t: f64,
    c: &TimeFunction,
    h: HurstParameter,
    quad: MemoryQuadrature,
) -> Result<f64> {
    let hv = h.value();
    let upper = t.powf(2.0 * hv - 1.0);
    let p = 1.0 / (2.0 * hv - 1.0);
    let integrand = |u: f64| c.eval((t - u.powf(p)).max(0.0));
    let graded = |rule: &GaussRule| -> f64 {
        let half = 0.5 * upper;
        let mut sum = 0.0;
        // Left half graded toward 0, right half toward `upper`.
        let mut outer = half;
        for _ in 0..quad.levels {
            let inner = 0.5 * outer;
            sum += rule.integrate(inner, outer, integrand);
            sum += rule.integrate(upper - outer, upper - inner, integrand);
            outer = inner;
        }
        sum += rule.integrate(0.0, outer, integrand);
        sum += rule.integrate(upper - outer, upper, integrand);
        sum
    };
    let coarse = graded(&GaussRule::legendre(10));
    let fine = graded(&GaussRule::legendre(20));
    if !fine.is_finite() {
        return Err(Error::Domain(format!(
            "memory integrand is not finite on [0, {t}]"
        )));
    }
    if (fine - coarse).abs() > quad.rel_tol * fine.abs() + 1e-300 {
        return Err(Error::Domain(format!(
            "memory integral at t = {t} did not converge: {coarse} vs {fine}"
        )));
    }
    Ok(hv * fine)
}

/// `Ĉ_t = C_t ∫₀ᵗ φ(t,r) C_r dr`; closed forms are used when `C` is tagged.
pub fn c_hat(t: f64, c: &TimeFunction, h: HurstParameter, quad: MemoryQuadrature) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!(
            "memory coefficient needs t > 0, got {t}"
        )));
    }
    if h.is_brownian() {
        return Ok(0.0);
    }
    let hv = h.value();
    match c.closed_form() {
        Some(ClosedForm::Constant(cc)) => Ok(cc * cc * hv * t.powf(2.0 * hv - 1.0)),
        Some(ClosedForm::PowerLaw { c: cc, d }) => {
            if d <= -1.0 {
                return Err(Error::Domain(format!(
                    "C_t = c t^d is not integrable for d = {d}"
                )));
            }
            let beta = gamma(2.0 * hv) * gamma(1.0 + d) / gamma(d + 2.0 * hv);
            Ok(cc * cc * t.powf(2.0 * d + 2.0 * hv - 1.0) * hv * beta)
        }
        None => Ok(c.eval(t) * memory_integral(t, c, h, quad)?),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutativityReport {
    pub max_residual: f64,
    pub pass: bool,
}

/// Pairwise scalar Lie-bracket residuals `|u v' - v u'|` over `grid`.
pub fn check_commutativity(model: &SdeModel, grid: &[f64], tol: f64) -> CommutativityReport {
    let t = 1.0;
    let mut max_residual: f64 = 0.0;
    for &x in grid {
        let jets: [Jet; 3] = match model.coefficients() {
            ModelCoefficients::Fields { f, g, h } => [f.eval(t, x), g.eval(t, x), h.eval(t, x)],
            ModelCoefficients::Linear { a, b, c } => {
                let lin = |k: f64| Jet::new(k * x, k, 0.0);
                [lin(a.eval(t)), lin(b.eval(t)), lin(c.eval(t))]
            }
        };
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            let r = (jets[i].value * jets[j].dx - jets[j].value * jets[i].dx).abs();
            max_residual = max_residual.max(r);
        }
    }
    CommutativityReport {
        max_residual,
        pass: max_residual <= tol,
    }
}

/// Residual tolerance used by [`build_pdee`] on the model's check domain.
pub const COMMUTATIVITY_TOL: f64 = 1e-8;

/// Assembles the density-equation coefficients for `model`.
pub fn build_pdee(model: &SdeModel) -> Result<PdeeCoefficients> {
    build_pdee_with(model, MemoryQuadrature::default())
}

pub fn build_pdee_with(model: &SdeModel, quad: MemoryQuadrature) -> Result<PdeeCoefficients> {
    let hurst = model.hurst();
    match (model.class(), model.coefficients()) {
        (ModelClass::PureGwn, ModelCoefficients::Fields { f, g, .. }) => Ok(fields_family(
            Provenance::FpkStratonovich,
            f.clone(),
            g.clone(),
            SpaceTimeField::zero(),
            hurst,
        )),
        (ModelClass::PureFgn, ModelCoefficients::Fields { h, .. }) => {
            require_autonomous(&[h])?;
            Ok(fields_family(
                Provenance::FgnOnly,
                SpaceTimeField::zero(),
                SpaceTimeField::zero(),
                h.clone(),
                hurst,
            ))
        }
        (ModelClass::NonlinearCommutative, ModelCoefficients::Fields { f, g, h }) => {
            require_autonomous(&[f, g, h])?;
            let (a, b) = model.check_domain();
            let grid: Vec<f64> = (0..=200).map(|i| a + (b - a) * i as f64 / 200.0).collect();
            let report = check_commutativity(model, &grid, COMMUTATIVITY_TOL);
            if !report.pass {
                return Err(Error::NotCommutative {
                    max_residual: report.max_residual,
                    tol: COMMUTATIVITY_TOL,
                });
            }
            Ok(fields_family(
                Provenance::NonlinearCommutative,
                f.clone(),
                g.clone(),
                h.clone(),
                hurst,
            ))
        }
        (ModelClass::LinearTv, ModelCoefficients::Linear { a, b, c }) => {
            linear_family(a, b, c, hurst, quad)
        }
        (class, _) => Err(Error::InvalidInput(format!(
            "model class {class:?} does not match its coefficient representation"
        ))),
    }
}

fn require_autonomous(fields: &[&SpaceTimeField]) -> Result<()> {
    if fields.iter().all(|f| f.is_autonomous()) {
        Ok(())
    } else {
        Err(Error::InvalidInput(
            "fractional-noise equations for nonlinear models need time-independent f, g, h".into(),
        ))
    }
}

fn fields_family(
    provenance: Provenance,
    f: SpaceTimeField,
    g: SpaceTimeField,
    h: SpaceTimeField,
    hurst: HurstParameter,
) -> PdeeCoefficients {
    let static_fields = f.is_autonomous()
        && g.is_autonomous()
        && h.is_autonomous()
        && (h.is_zero() || hurst.is_brownian());
    let coefs = PdeeCoefficients::from_sampler(provenance, move |t, xs, out| {
        let kappa = if h.is_zero() {
            0.0
        } else {
            hurst.memory_factor(t)
        };
        for (o, &x) in out.iter_mut().zip(xs) {
            let (fj, gj, hj) = (f.eval(t, x), g.eval(t, x), h.eval(t, x));
            // (u²)' = 2uu',  (uu')' = u'² + uu''
            let gg_x = gj.value * gj.dx;
            let gg_xx = gj.dx * gj.dx + gj.value * gj.dxx;
            let hh_x = hj.value * hj.dx;
            let hh_xx = hj.dx * hj.dx + hj.value * hj.dxx;
            *o = CoefSample {
                d1: fj.value + 0.5 * gg_x + kappa * hh_x,
                d1_x: fj.dx + 0.5 * gg_xx + kappa * hh_xx,
                d2: 0.5 * gj.value * gj.value + kappa * hj.value * hj.value,
                d2_x: gg_x + 2.0 * kappa * hh_x,
                d2_xx: gg_xx + 2.0 * kappa * hh_xx,
            };
        }
    });
    if static_fields {
        coefs.time_independent()
    } else {
        coefs
    }
}

fn linear_family(
    a: &TimeFunction,
    b: &TimeFunction,
    c: &TimeFunction,
    hurst: HurstParameter,
    quad: MemoryQuadrature,
) -> Result<PdeeCoefficients> {
    // Fail early on configurations the quadrature cannot handle.
    c_hat(1.0, c, hurst, quad)?;
    let (a, b, c) = (a.clone(), b.clone(), c.clone());
    Ok(PdeeCoefficients::from_sampler(
        Provenance::LinearTimeVarying,
        move |t, xs, out| {
            let memory = if t > 0.0 {
                c_hat(t, &c, hurst, quad).unwrap_or(f64::NAN)
            } else {
                0.0
            };
            let bt = b.eval(t);
            let diffusion = 0.5 * bt * bt + memory;
            let drift = a.eval(t) + diffusion;
            for (o, &x) in out.iter_mut().zip(xs) {
                *o = CoefSample {
                    d1: drift * x,
                    d1_x: drift,
                    d2: diffusion * x * x,
                    d2_x: 2.0 * diffusion * x,
                    d2_xx: 2.0 * diffusion,
                };
            }
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hp(h: f64) -> HurstParameter {
        HurstParameter::new(h).unwrap()
    }

    #[test]
    fn phi_examples() {
        assert!((phi_kernel(1.0, 0.0, hp(0.8)).unwrap() - 0.48).abs() < 1e-15);
        assert_eq!(phi_kernel(1.0, 0.0, hp(0.5)).unwrap(), 0.0);
        assert_eq!(
            phi_kernel(2.0, 1.0, hp(0.7)).unwrap(),
            phi_kernel(1.0, 2.0, hp(0.7)).unwrap()
        );
        assert!(phi_kernel(1.0, 1.0, hp(0.7)).is_err());
    }

    #[test]
    fn c_hat_constant_closed_form() {
        let v = c_hat(
            1.0,
            &TimeFunction::constant(0.25),
            hp(0.8),
            MemoryQuadrature::default(),
        )
        .unwrap();
        assert!((v - 0.05).abs() < 1e-15);
    }

    #[test]
    fn c_hat_power_law_value() {
        let v = c_hat(
            1.0,
            &TimeFunction::power_law(0.25, 0.8),
            hp(0.8),
            MemoryQuadrature::default(),
        )
        .unwrap();
        assert!((v - 3.35e-2).abs() < 5e-5, "{v}");
    }

    #[test]
    fn c_hat_vanishes_for_brownian() {
        let c = TimeFunction::general(|t| 1.0 + t);
        assert_eq!(
            c_hat(0.7, &c, hp(0.5), MemoryQuadrature::default()).unwrap(),
            0.0
        );
    }

    #[test]
    fn c_hat_rejects_nonpositive_time() {
        let c = TimeFunction::constant(1.0);
        assert!(c_hat(0.0, &c, hp(0.7), MemoryQuadrature::default()).is_err());
    }

    #[test]
    fn quadrature_handles_general_c() {
        // C_r = 1 + r: ∫₀ᵗ H(2H-1)(t-r)^{2H-2}(1+r) dr
        //   = H t^{2H-1} + H t^{2H} / (2H)   (Beta-function identity)
        let h = hp(0.7);
        let c = TimeFunction::general(|r| 1.0 + r);
        let t: f64 = 1.3;
        let hv = 0.7;
        let integral = hv * t.powf(2.0 * hv - 1.0) + hv * t.powf(2.0 * hv) / (2.0 * hv);
        let got = c_hat(t, &c, h, MemoryQuadrature::default()).unwrap();
        assert!((got - (1.0 + t) * integral).abs() < 1e-10 * got, "{got}");
    }

    #[test]
    fn commutativity_examples() {
        let cubic = |k: f64, d: f64| {
            SpaceTimeField::autonomous(move |x| {
                Jet::new(
                    k * (x - d * x.powi(3)),
                    k * (1.0 - 3.0 * d * x * x),
                    -6.0 * k * d * x,
                )
            })
        };
        let grid: Vec<f64> = (0..=20).map(|i| -1.0 + 0.1 * i as f64).collect();
        let m = SdeModel::nonlinear_commutative(
            cubic(-1.0, 0.5),
            cubic(0.5, 0.5),
            cubic(0.5, 0.5),
            0.4,
            hp(0.8),
        );
        let r = check_commutativity(&m, &grid, 1e-8);
        assert!(r.pass && r.max_residual < 1e-12);

        let m = SdeModel::pure_gwn(
            SpaceTimeField::linear(1.0),
            SpaceTimeField::constant(1.0),
            0.0,
        );
        let r = check_commutativity(&m, &grid, 1e-8);
        assert!(!r.pass);
        assert!((r.max_residual - 1.0).abs() < 1e-15);

        let m = SdeModel::pure_gwn(SpaceTimeField::zero(), SpaceTimeField::zero(), 0.0);
        assert!(check_commutativity(&m, &grid, 1e-8).pass);
    }

    #[test]
    fn non_commuting_model_is_rejected() {
        let m = SdeModel::nonlinear_commutative(
            SpaceTimeField::linear(1.0),
            SpaceTimeField::constant(1.0),
            SpaceTimeField::zero(),
            0.0,
            hp(0.8),
        );
        match build_pdee(&m) {
            Err(Error::NotCommutative { max_residual, .. }) => {
                assert!((max_residual - 1.0).abs() < 1e-12)
            }
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn time_dependent_fgn_model_is_rejected() {
        let h = SpaceTimeField::time_dependent(|t, x| Jet::new(t * x, t, 0.0));
        let m = SdeModel::pure_fgn(h, 1.0, hp(0.8));
        assert!(build_pdee(&m).is_err());
    }

    #[test]
    fn double_well_family() {
        let (a, b, s) = (1.0, 1.0, 1.0);
        let f = SpaceTimeField::autonomous(move |x| {
            Jet::new(a * x - b * x.powi(3), a - 3.0 * b * x * x, -6.0 * b * x)
        });
        let m = SdeModel::pure_gwn(f, SpaceTimeField::constant(s), 0.0);
        let c = build_pdee(&m).unwrap();
        assert_eq!(c.provenance(), Provenance::FpkStratonovich);
        for x in [-2.0, -0.3, 0.0, 1.7] {
            let v = c.at(x, 3.0);
            assert!((v.d1 - (x - x * x * x)).abs() < 1e-14);
            assert!((v.d1_x - (1.0 - 3.0 * x * x)).abs() < 1e-14);
            assert_eq!(v.d2, 0.5);
            assert_eq!((v.d2_x, v.d2_xx), (0.0, 0.0));
        }
    }

    #[test]
    fn linear_constant_family() {
        let (a, b, cc, h) = (-0.5, 0.25, 0.25, 0.8);
        let m = SdeModel::linear_tv(
            TimeFunction::constant(a),
            TimeFunction::constant(b),
            TimeFunction::constant(cc),
            2.0,
            hp(h),
        );
        let coefs = build_pdee(&m).unwrap();
        for t in [0.1, 1.0, 2.5] {
            let k = h * f64::powf(t, 2.0 * h - 1.0) * cc * cc;
            for x in [0.5, 2.0, 4.0] {
                let v = coefs.at(x, t);
                assert!((v.d1 - (a + 0.5 * b * b + k) * x).abs() < 1e-14);
                assert!((v.d2 - (0.5 * b * b + k) * x * x).abs() < 1e-14);
                assert!((v.d2_xx - 2.0 * (0.5 * b * b + k)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn fgn_only_family() {
        let sigma = 0.1;
        let h = SpaceTimeField::autonomous(move |x| {
            let s = (1.0 + sigma * x * x).sqrt();
            Jet::new(s, sigma * x / s, sigma / (s * s * s))
        });
        let m = SdeModel::pure_fgn(h, 0.0, hp(0.8));
        let c = build_pdee(&m).unwrap();
        assert_eq!(c.provenance(), Provenance::FgnOnly);
        for t in [0.2, 1.0] {
            let k = 0.8 * f64::powf(t, 0.6);
            for x in [-3.0, 0.0, 1.5] {
                let v = c.at(x, t);
                assert!((v.d1 - k * sigma * x).abs() < 1e-14);
                assert!((v.d2 - k * (1.0 + sigma * x * x)).abs() < 1e-14);
                assert!((v.d1_x - k * sigma).abs() < 1e-14);
                assert!((v.d2_x - 2.0 * k * sigma * x).abs() < 1e-14);
                assert!((v.d2_xx - 2.0 * k * sigma).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn brownian_limit_of_commutative_family() {
        // h = g̃ on the fractional channel at H -> 1/2 reproduces the white-noise
        // family with g = g̃.
        let gt = || SpaceTimeField::autonomous(|x| Jet::new(1.0 + 0.2 * x * x, 0.4 * x, 0.4));
        // Drift proportional to g̃ keeps the fields commuting.
        let f =
            || SpaceTimeField::autonomous(|x| Jet::new(-0.5 * (1.0 + 0.2 * x * x), -0.2 * x, -0.2));
        let white = build_pdee(&SdeModel::pure_gwn(f(), gt(), 0.0)).unwrap();
        let mut prev = f64::INFINITY;
        for eps in [1e-2, 1e-3, 1e-4, 1e-6] {
            let h = hp(0.5 + eps);
            assert!((h.memory_factor(1.0) - 0.5).abs() <= eps * 1.0001);
            let frac = build_pdee(&SdeModel::nonlinear_commutative(
                f(),
                SpaceTimeField::zero(),
                gt(),
                0.0,
                h,
            ))
            .unwrap();
            let mut gap: f64 = 0.0;
            for x in [-2.0, -0.5, 0.0, 1.0, 2.5] {
                let (u, v) = (white.at(x, 1.0), frac.at(x, 1.0));
                gap = gap.max((u.d1 - v.d1).abs()).max((u.d2 - v.d2).abs());
            }
            assert!(gap < prev && gap < 10.0 * eps, "eps {eps}: gap {gap}");
            prev = gap;
        }
    }

    #[test]
    fn diffusion_nonnegative_on_domains() {
        let cubic = |k: f64| {
            SpaceTimeField::autonomous(move |x| {
                Jet::new(
                    k * (x - 0.5 * x.powi(3)),
                    k * (1.0 - 1.5 * x * x),
                    -3.0 * k * x,
                )
            })
        };
        let m = SdeModel::nonlinear_commutative(cubic(-1.0), cubic(0.5), cubic(0.5), 0.4, hp(0.8));
        let c = build_pdee(&m).unwrap();
        for i in 0..=60 {
            let x = 1.5 * i as f64 / 60.0;
            for t in [0.0, 0.01, 0.5, 2.0] {
                assert!(c.at(x, t).d2 >= 0.0);
            }
        }
    }
}

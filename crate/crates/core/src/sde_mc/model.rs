use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::noise::HurstParameter;

/// Value of a scalar field together with its first two `x`-derivatives.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub dx: f64,
    pub dxx: f64,
}

impl Jet {
    pub const ZERO: Jet = Jet {
        value: 0.0,
        dx: 0.0,
        dxx: 0.0,
    };

    pub fn new(value: f64, dx: f64, dxx: f64) -> Self {
        Self { value, dx, dxx }
    }

    pub fn constant(value: f64) -> Self {
        Self::new(value, 0.0, 0.0)
    }
}

type JetFn = dyn Fn(f64, f64) -> Jet + Send + Sync;

/// Scalar field `u(t, x)` with analytic first and second `x`-derivatives.
#[derive(Clone)]
pub struct SpaceTimeField {
    eval: Arc<JetFn>,
    autonomous: bool,
    zero: bool,
}

impl SpaceTimeField {
    /// Field that does not depend on `t`.
    pub fn autonomous(f: impl Fn(f64) -> Jet + Send + Sync + 'static) -> Self {
        Self {
            eval: Arc::new(move |_t, x| f(x)),
            autonomous: true,
            zero: false,
        }
    }

    pub fn time_dependent(f: impl Fn(f64, f64) -> Jet + Send + Sync + 'static) -> Self {
        Self {
            eval: Arc::new(f),
            autonomous: false,
            zero: false,
        }
    }

    pub fn zero() -> Self {
        Self {
            eval: Arc::new(|_, _| Jet::ZERO),
            autonomous: true,
            zero: true,
        }
    }

    pub fn constant(c: f64) -> Self {
        if c == 0.0 {
            return Self::zero();
        }
        Self::autonomous(move |_| Jet::constant(c))
    }

    /// `c · x`.
    pub fn linear(c: f64) -> Self {
        if c == 0.0 {
            return Self::zero();
        }
        Self::autonomous(move |x| Jet::new(c * x, c, 0.0))
    }

    #[inline]
    pub fn eval(&self, t: f64, x: f64) -> Jet {
        (self.eval)(t, x)
    }

    #[inline]
    pub fn value(&self, t: f64, x: f64) -> f64 {
        (self.eval)(t, x).value
    }

    pub fn is_autonomous(&self) -> bool {
        self.autonomous
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }
}

impl fmt::Debug for SpaceTimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpaceTimeField")
            .field("autonomous", &self.autonomous)
            .field("zero", &self.zero)
            .finish_non_exhaustive()
    }
}

/// Closed forms recognised for the memory integral of a time coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedForm {
    /// `C_t = c`
    Constant(f64),
    /// `C_t = c · t^d`
    PowerLaw { c: f64, d: f64 },
}

/// Scalar coefficient of time, optionally tagged with a closed form.
#[derive(Clone)]
pub struct TimeFunction {
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    form: Option<ClosedForm>,
}

impl TimeFunction {
    pub fn constant(c: f64) -> Self {
        Self {
            eval: Arc::new(move |_| c),
            form: Some(ClosedForm::Constant(c)),
        }
    }

    pub fn power_law(c: f64, d: f64) -> Self {
        Self {
            eval: Arc::new(move |t: f64| c * t.powf(d)),
            form: Some(ClosedForm::PowerLaw { c, d }),
        }
    }

    pub fn general(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            eval: Arc::new(f),
            form: None,
        }
    }

    /// Same values, closed-form tag dropped (forces quadrature).
    pub fn untagged(&self) -> Self {
        Self {
            eval: self.eval.clone(),
            form: None,
        }
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        (self.eval)(t)
    }

    pub fn closed_form(&self) -> Option<ClosedForm> {
        self.form
    }
}

impl fmt::Debug for TimeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TimeFunction")
            .field("form", &self.form)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelClass {
    /// `dX = f dt + g ∘ dW`
    PureGwn,
    /// `dX = h ∘ dB^H`
    PureFgn,
    /// `dX = A_t X dt + B_t X ∘ dW + C_t X ∘ dB^H`
    LinearTv,
    /// `dX = f dt + g ∘ dW + h ∘ dB^H` with pairwise commuting fields.
    NonlinearCommutative,
}

#[derive(Debug, Clone)]
pub enum ModelCoefficients {
    Fields {
        f: SpaceTimeField,
        g: SpaceTimeField,
        h: SpaceTimeField,
    },
    Linear {
        a: TimeFunction,
        b: TimeFunction,
        c: TimeFunction,
    },
}

/// A scalar Langevin model with deterministic initial state.
///
/// This is the single description both the Monte Carlo integrator and the
/// density-equation builder consume.
#[derive(Debug, Clone)]
pub struct SdeModel {
    class: ModelClass,
    coefficients: ModelCoefficients,
    x0: f64,
    hurst: HurstParameter,
    check_domain: (f64, f64),
}

impl SdeModel {
    /// Drift `f` and Stratonovich white-noise diffusion `g`.
    pub fn pure_gwn(f: SpaceTimeField, g: SpaceTimeField, x0: f64) -> Self {
        Self::from_fields(
            ModelClass::PureGwn,
            f,
            g,
            SpaceTimeField::zero(),
            x0,
            HurstParameter::BROWNIAN,
        )
    }

    /// Driftless model excited only by FGN through `h`.
    pub fn pure_fgn(h: SpaceTimeField, x0: f64, hurst: HurstParameter) -> Self {
        Self::from_fields(
            ModelClass::PureFgn,
            SpaceTimeField::zero(),
            SpaceTimeField::zero(),
            h,
            x0,
            hurst,
        )
    }

    pub fn nonlinear_commutative(
        f: SpaceTimeField,
        g: SpaceTimeField,
        h: SpaceTimeField,
        x0: f64,
        hurst: HurstParameter,
    ) -> Self {
        Self::from_fields(ModelClass::NonlinearCommutative, f, g, h, x0, hurst)
    }

    pub fn linear_tv(
        a: TimeFunction,
        b: TimeFunction,
        c: TimeFunction,
        x0: f64,
        hurst: HurstParameter,
    ) -> Self {
        Self {
            class: ModelClass::LinearTv,
            coefficients: ModelCoefficients::Linear { a, b, c },
            x0,
            hurst,
            check_domain: default_domain(x0),
        }
    }

    fn from_fields(
        class: ModelClass,
        f: SpaceTimeField,
        g: SpaceTimeField,
        h: SpaceTimeField,
        x0: f64,
        hurst: HurstParameter,
    ) -> Self {
        Self {
            class,
            coefficients: ModelCoefficients::Fields { f, g, h },
            x0,
            hurst,
            check_domain: default_domain(x0),
        }
    }

    /// Interval on which structural conditions (commutativity) are checked.
    pub fn with_check_domain(mut self, a: f64, b: f64) -> Result<Self> {
        if !(a < b) {
            return Err(Error::InvalidInput(format!(
                "check domain needs a < b, got [{a}, {b}]"
            )));
        }
        self.check_domain = (a, b);
        Ok(self)
    }

    pub fn class(&self) -> ModelClass {
        self.class
    }

    pub fn coefficients(&self) -> &ModelCoefficients {
        &self.coefficients
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn hurst(&self) -> HurstParameter {
        self.hurst
    }

    pub fn check_domain(&self) -> (f64, f64) {
        self.check_domain
    }

    /// `(f, g, h)` values at `(t, x)`.
    #[inline]
    pub fn channels(&self, t: f64, x: f64) -> [f64; 3] {
        match &self.coefficients {
            ModelCoefficients::Fields { f, g, h } => [f.value(t, x), g.value(t, x), h.value(t, x)],
            ModelCoefficients::Linear { a, b, c } => [a.eval(t) * x, b.eval(t) * x, c.eval(t) * x],
        }
    }

    /// Whether the fractional channel is identically zero.
    pub fn has_fgn(&self) -> bool {
        match &self.coefficients {
            ModelCoefficients::Fields { h, .. } => !h.is_zero(),
            ModelCoefficients::Linear { c, .. } => {
                c.closed_form() != Some(ClosedForm::Constant(0.0))
            }
        }
    }

    pub fn has_gwn(&self) -> bool {
        match &self.coefficients {
            ModelCoefficients::Fields { g, .. } => !g.is_zero(),
            ModelCoefficients::Linear { b, .. } => {
                b.closed_form() != Some(ClosedForm::Constant(0.0))
            }
        }
    }
}

fn default_domain(x0: f64) -> (f64, f64) {
    (x0 - 4.0, x0 + 4.0)
}

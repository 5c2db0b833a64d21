//! Model families: configuration parameters to SDE models and reference
//! densities.

use std::sync::Arc;

use crate::error::Result;
use crate::exact::{ExactDensity, FgnOnlyGeneral, LinearFbmVariant, StationaryDoubleWell};
use crate::noise::HurstParameter;
use crate::sde_mc::{Jet, SdeModel, SpaceTimeField, TimeFunction};

use super::config::{Family, ModelSection};

/// `u = x - d x³` with its derivatives.
fn cubic(scale: f64, d: f64) -> SpaceTimeField {
    if scale == 0.0 {
        return SpaceTimeField::zero();
    }
    SpaceTimeField::autonomous(move |x| {
        Jet::new(
            scale * (x - d * x * x * x),
            scale * (1.0 - 3.0 * d * x * x),
            -6.0 * scale * d * x,
        )
    })
}

/// The SDE described by a validated model section, with structural checks
/// performed on `domain`.
pub fn build_model(m: &ModelSection, domain: (f64, f64)) -> Result<SdeModel> {
    let hurst = HurstParameter::new(m.hurst_value())?;
    let p = |name| m.param(name);
    let model = match m.family {
        Family::DoubleWell => {
            let (a, b) = (p("a"), p("b"));
            let drift = SpaceTimeField::autonomous(move |x| {
                Jet::new(a * x - b * x * x * x, a - 3.0 * b * x * x, -6.0 * b * x)
            });
            SdeModel::pure_gwn(drift, SpaceTimeField::constant(p("sigma")), m.x0)
        }
        Family::Ou => SdeModel::pure_gwn(
            SpaceTimeField::linear(p("a")),
            SpaceTimeField::constant(p("sigma")),
            m.x0,
        ),
        Family::GbmTimeVarying => SdeModel::linear_tv(
            TimeFunction::constant(0.0),
            TimeFunction::power_law(p("a").sqrt(), p("b")),
            TimeFunction::constant(0.0),
            m.x0,
            HurstParameter::BROWNIAN,
        ),
        Family::LinearFgn => SdeModel::linear_tv(
            TimeFunction::constant(p("a")),
            TimeFunction::constant(p("b")),
            TimeFunction::constant(p("c")),
            m.x0,
            hurst,
        ),
        Family::LinearTvPower => SdeModel::linear_tv(
            TimeFunction::power_law(p("a"), 1.0),
            TimeFunction::power_law(p("b"), 0.5),
            TimeFunction::power_law(p("c"), p("d")),
            m.x0,
            hurst,
        ),
        Family::NonlinearFgn => {
            let d = p("d");
            SdeModel::nonlinear_commutative(
                cubic(p("a"), d),
                cubic(p("b"), d),
                cubic(p("c"), d),
                m.x0,
                hurst,
            )
        }
        Family::FgnOnly => {
            let sigma = p("sigma");
            // h = √(1 + σx²), h' = σx / h, h'' = σ / h³
            let h = SpaceTimeField::autonomous(move |x| {
                let hv = (1.0 + sigma * x * x).sqrt();
                Jet::new(hv, sigma * x / hv, sigma / (hv * hv * hv))
            });
            SdeModel::pure_fgn(h, m.x0, hurst)
        }
    };
    model.with_check_domain(domain.0, domain.1)
}

/// The closed-form density, when the family has one for these parameters.
pub fn build_exact(m: &ModelSection, domain: (f64, f64)) -> Result<Option<ExactDensity>> {
    if !m.family.has_exact(m) {
        return Ok(None);
    }
    let p = |name| m.param(name);
    let exact = match m.family {
        Family::DoubleWell => ExactDensity::StationaryDoubleWell(StationaryDoubleWell::new(
            p("a"),
            p("b"),
            p("sigma"),
            domain,
        )?),
        Family::Ou => ExactDensity::OuTransient {
            a: p("a"),
            sigma: p("sigma"),
        },
        Family::GbmTimeVarying => ExactDensity::GbmTimeVarying {
            a: p("a"),
            b: p("b"),
            x0: m.x0,
        },
        Family::LinearFgn => ExactDensity::LinearFbmLognormal {
            a: p("a"),
            c: p("c"),
            hurst: HurstParameter::new(p("hurst"))?,
            x0: m.x0,
            variant: m.exact_variant.unwrap_or(LinearFbmVariant::Corrected),
        },
        Family::FgnOnly => ExactDensity::FgnOnlyGeneral(Arc::new(FgnOnlyGeneral::sqrt_quadratic(
            p("sigma"),
            HurstParameter::new(p("hurst"))?,
            m.x0,
            domain,
        )?)),
        Family::LinearTvPower | Family::NonlinearFgn => unreachable!("has_exact is false"),
    };
    Ok(Some(exact))
}

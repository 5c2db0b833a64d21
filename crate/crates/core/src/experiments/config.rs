//! Experiment configuration, read from TOML.
//!
//! ```toml
//! name = "table2"
//! seed = 7
//!
//! [model]
//! family = "ou"
//! a = -1.0
//! sigma = 1.0
//!
//! [solver]
//! methods = ["ldg", "fd", "exact"]
//! dt = 0.001
//!
//! [grid]
//! a = -6.0
//! b = 6.0
//! cells = 240
//! record_times = [0.2, 0.5, 1.0]
//! ```
//!
//! Unknown keys are rejected and every error carries the dotted path of the
//! offending field.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::LinearFbmVariant;
use crate::ldg::{CflPolicy, EvalGrid, Formulation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `dX = (aX - bX³) dt + σ ∘ dW`, compared at steady state.
    DoubleWell,
    /// `dX = aX dt + σ ∘ dW` with `a < 0`.
    Ou,
    /// `dX = √a t^b X ∘ dW`.
    GbmTimeVarying,
    /// `dX = aX dt + bX ∘ dW + cX ∘ dB^H`.
    LinearFgn,
    /// `dX = a t X dt + b √t X ∘ dW + c t^d X ∘ dB^H`.
    LinearTvPower,
    /// `f, g, h = a u, b u, c u` with `u = x - d x³`.
    NonlinearFgn,
    /// `dX = √(1 + σX²) ∘ dB^H`.
    FgnOnly,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::DoubleWell,
        Family::Ou,
        Family::GbmTimeVarying,
        Family::LinearFgn,
        Family::LinearTvPower,
        Family::NonlinearFgn,
        Family::FgnOnly,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::DoubleWell => "double_well",
            Family::Ou => "ou",
            Family::GbmTimeVarying => "gbm_time_varying",
            Family::LinearFgn => "linear_fgn",
            Family::LinearTvPower => "linear_tv_power",
            Family::NonlinearFgn => "nonlinear_fgn",
            Family::FgnOnly => "fgn_only",
        }
    }

    /// Parameters the family requires; `x0` is always accepted.
    pub fn parameters(self) -> &'static [&'static str] {
        match self {
            Family::DoubleWell => &["a", "b", "sigma"],
            Family::Ou => &["a", "sigma"],
            Family::GbmTimeVarying => &["a", "b"],
            Family::LinearFgn => &["a", "b", "c", "hurst"],
            Family::LinearTvPower | Family::NonlinearFgn => &["a", "b", "c", "d", "hurst"],
            Family::FgnOnly => &["sigma", "hurst"],
        }
    }

    /// Whether a closed-form density is available for these parameters.
    pub fn has_exact(self, model: &ModelSection) -> bool {
        match self {
            Family::LinearFgn => model.b == Some(0.0),
            Family::LinearTvPower | Family::NonlinearFgn => false,
            _ => true,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ldg,
    Fd,
    Mc,
    Exact,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Ldg => "LDG",
            Method::Fd => "FD",
            Method::Mc => "MC",
            Method::Exact => "EXACT",
        }
    }

    /// Output subdirectory.
    pub fn dir_name(self) -> &'static str {
        match self {
            Method::Ldg => "ldg",
            Method::Fd => "fd",
            Method::Mc => "mc",
            Method::Exact => "exact",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    /// `δ(x - x0)` regularized as a Gaussian of width `delta_width`.
    #[default]
    Delta,
    /// The point mass projected exactly onto each solver's space.
    Dirac,
    /// The exact density at `t0 > 0`.
    WarmStart,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub family: Family,
    #[serde(default)]
    pub x0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hurst: Option<f64>,
    /// Which reading of the printed lognormal formula serves as the exact
    /// density of `linear_fgn` with `b = 0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_variant: Option<LinearFbmVariant>,
}

impl ModelSection {
    fn slot(&self, name: &str) -> Option<f64> {
        match name {
            "a" => self.a,
            "b" => self.b,
            "c" => self.c,
            "d" => self.d,
            "sigma" => self.sigma,
            "hurst" => self.hurst,
            _ => None,
        }
    }

    /// Value of a parameter the family requires. Only valid after
    /// [`ExperimentConfig::validate`].
    pub fn param(&self, name: &str) -> f64 {
        self.slot(name)
            .unwrap_or_else(|| panic!("parameter `{name}` missing from a validated config"))
    }

    /// The Hurst index, `1/2` for white-noise-only families.
    pub fn hurst_value(&self) -> f64 {
        self.hurst.unwrap_or(0.5)
    }
}

fn default_degree() -> usize {
    2
}

fn default_mc_paths() -> usize {
    100_000
}

fn default_mc_dt() -> f64 {
    0.004
}

fn strict() -> CflPolicy {
    CflPolicy::Strict
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub methods: Vec<Method>,
    /// Benchmark for the error table; defaults to `exact` when run, else `mc`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<Method>,
    #[serde(default = "default_degree")]
    pub degree: usize,
    /// LDG macro step.
    pub dt: f64,
    /// Start time of the grid solvers.
    #[serde(default)]
    pub t0: f64,
    #[serde(default)]
    pub initial: InitialKind,
    /// Standard deviation of the regularized delta; defaults to `2Δx`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_width: Option<f64>,
    #[serde(default)]
    pub formulation: Formulation,
    #[serde(default)]
    pub eval_grid: EvalGrid,
    #[serde(default)]
    pub cfl_policy: CflPolicy,
    /// Finite-difference step; defaults to `dt`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fd_dt: Option<f64>,
    #[serde(default = "strict")]
    pub fd_cfl_policy: CflPolicy,
    #[serde(default = "default_mc_paths")]
    pub mc_paths: usize,
    #[serde(default = "default_mc_dt")]
    pub mc_dt: f64,
    /// Histogram bins over `[grid.a, grid.b]`; defaults to `grid.cells`,
    /// i.e. bin width `Δx`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc_bins: Option<usize>,
}

impl SolverSection {
    pub fn runs(&self, method: Method) -> bool {
        self.methods.contains(&method)
    }

    /// The designated benchmark, if any solver can serve as one.
    pub fn reference_method(&self) -> Option<Method> {
        self.reference.or_else(|| {
            [Method::Exact, Method::Mc]
                .into_iter()
                .find(|m| self.runs(*m))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub a: f64,
    pub b: f64,
    /// LDG cells; finite differences use the `cells + 1` nodes.
    pub cells: usize,
    pub record_times: Vec<f64>,
}

impl GridSection {
    pub fn spacing(&self) -> f64 {
        (self.b - self.a) / self.cells as f64
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Defaults to `out/<name>`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
}

/// Repeats the experiment once per Hurst index, each in its own
/// subdirectory `H<value>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub hurst: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    #[serde(default)]
    pub seed: u64,
    pub model: ModelSection,
    pub solver: SolverSection,
    pub grid: GridSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
}

fn bad(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::config(path, message)
}

fn positive(path: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(bad(path, format!("must be positive and finite, got {v}")))
    }
}

fn hurst_in_range(path: &str, h: f64) -> Result<()> {
    if (0.5..1.0).contains(&h) {
        Ok(())
    } else {
        Err(bad(path, format!("must lie in [0.5, 1), got {h}")))
    }
}

/// Whether `t` is an integer multiple of `dt`.
fn on_grid(t: f64, dt: f64) -> bool {
    let k = (t / dt).round();
    (k * dt - t).abs() <= 1e-9 * t.max(1.0)
}

impl ExperimentConfig {
    /// Parses and validates a TOML document.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: toml::Table =
            toml::from_str(text).map_err(|e| bad("<document>", e.to_string().trim_end()))?;
        let config: Self =
            serde_path_to_error::deserialize(toml::Value::Table(table)).map_err(|e| {
                let path = e.path().to_string();
                bad(
                    if path == "." {
                        "<document>".into()
                    } else {
                        path
                    },
                    e.into_inner().to_string(),
                )
            })?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configs serialize to TOML")
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(bad("name", "must not be empty"));
        }
        self.validate_model()?;
        self.validate_grid()?;
        self.validate_solver()?;
        if let Some(sweep) = &self.sweep {
            if sweep.hurst.is_empty() {
                return Err(bad("sweep.hurst", "must list at least one value"));
            }
            if !self.model.family.parameters().contains(&"hurst") {
                return Err(bad(
                    "sweep.hurst",
                    format!("family `{}` has no Hurst parameter", self.model.family),
                ));
            }
            for (i, &h) in sweep.hurst.iter().enumerate() {
                hurst_in_range(&format!("sweep.hurst[{i}]"), h)?;
            }
        }
        Ok(())
    }

    fn validate_model(&self) -> Result<()> {
        let m = &self.model;
        let family = m.family;
        let allowed = family.parameters();
        for name in ["a", "b", "c", "d", "sigma", "hurst"] {
            let path = format!("model.{name}");
            match (m.slot(name), allowed.contains(&name)) {
                (Some(_), false) => {
                    return Err(bad(
                        path,
                        format!(
                            "not a parameter of family `{family}` (expected {}, x0)",
                            allowed.join(", ")
                        ),
                    ))
                }
                (None, true) if !(name == "hurst" && self.sweep.is_some()) => {
                    return Err(bad(path, format!("required by family `{family}`")))
                }
                (Some(v), true) if !v.is_finite() => return Err(bad(path, "must be finite")),
                _ => {}
            }
        }
        if !m.x0.is_finite() {
            return Err(bad("model.x0", "must be finite"));
        }
        if let Some(h) = m.hurst {
            hurst_in_range("model.hurst", h)?;
        }
        match family {
            Family::DoubleWell => {
                if m.param("sigma") == 0.0 {
                    return Err(bad("model.sigma", "must be nonzero"));
                }
                if !(m.param("b") > 0.0) {
                    return Err(bad("model.b", "the stationary density needs b > 0"));
                }
            }
            Family::Ou => {
                if !(m.param("a") < 0.0) {
                    return Err(bad("model.a", "must be negative"));
                }
                if m.param("sigma") == 0.0 {
                    return Err(bad("model.sigma", "must be nonzero"));
                }
            }
            Family::GbmTimeVarying => {
                positive("model.a", m.param("a"))?;
                if !(m.param("b") > -0.5) {
                    return Err(bad("model.b", "must exceed -1/2"));
                }
                positive("model.x0", m.x0)?;
            }
            Family::LinearFgn | Family::LinearTvPower => {
                if family == Family::LinearTvPower && !(m.param("d") > -0.5) {
                    return Err(bad("model.d", "must exceed -1/2"));
                }
                positive("model.x0", m.x0)?;
            }
            Family::NonlinearFgn => {}
            Family::FgnOnly => {
                if !(m.param("sigma") >= 0.0) {
                    return Err(bad("model.sigma", "must be nonnegative"));
                }
            }
        }
        if m.exact_variant.is_some() && family != Family::LinearFgn {
            return Err(bad(
                "model.exact_variant",
                "only applies to family `linear_fgn`",
            ));
        }
        Ok(())
    }

    fn validate_grid(&self) -> Result<()> {
        let g = &self.grid;
        if !(g.a < g.b) || !g.a.is_finite() || !g.b.is_finite() {
            return Err(bad(
                "grid.b",
                format!("need finite a < b, got [{}, {}]", g.a, g.b),
            ));
        }
        if g.cells < 2 {
            return Err(bad(
                "grid.cells",
                format!("need at least 2 cells, got {}", g.cells),
            ));
        }
        if !(g.a..=g.b).contains(&self.model.x0) {
            return Err(bad(
                "model.x0",
                format!("{} lies outside the grid [{}, {}]", self.model.x0, g.a, g.b),
            ));
        }
        if g.record_times.is_empty() {
            return Err(bad("grid.record_times", "must not be empty"));
        }
        for (i, &t) in g.record_times.iter().enumerate() {
            let path = format!("grid.record_times[{i}]");
            positive(&path, t)?;
            if i > 0 && !(t > g.record_times[i - 1]) {
                return Err(bad(path, "record times must increase strictly"));
            }
        }
        Ok(())
    }

    fn validate_solver(&self) -> Result<()> {
        let s = &self.solver;
        if s.methods.is_empty() {
            return Err(bad(
                "solver.methods",
                "select at least one of ldg, fd, mc, exact",
            ));
        }
        for (i, m) in s.methods.iter().enumerate() {
            if s.methods[..i].contains(m) {
                return Err(bad(
                    format!("solver.methods[{i}]"),
                    format!("`{}` listed twice", m.dir_name()),
                ));
            }
        }
        let exact_possible = self.model.family.has_exact(&self.model);
        if s.runs(Method::Exact) && !exact_possible {
            let why = match self.model.family {
                Family::LinearFgn => "needs b = 0",
                _ => "has no closed-form density",
            };
            return Err(bad(
                "solver.methods",
                format!("`exact`: family `{}` {why}", self.model.family),
            ));
        }
        if let Some(r) = s.reference {
            if !matches!(r, Method::Exact | Method::Mc) {
                return Err(bad("solver.reference", "must be `exact` or `mc`"));
            }
            if !s.runs(r) {
                return Err(bad(
                    "solver.reference",
                    format!("`{}` is not among the methods", r.dir_name()),
                ));
            }
        }
        positive("solver.dt", s.dt)?;
        if let Some(dt) = s.fd_dt {
            positive("solver.fd_dt", dt)?;
        }
        if !(s.t0 >= 0.0 && s.t0.is_finite()) {
            return Err(bad(
                "solver.t0",
                format!("must be nonnegative, got {}", s.t0),
            ));
        }
        if s.degree > 6 {
            return Err(bad(
                "solver.degree",
                format!("supported degrees are 0..=6, got {}", s.degree),
            ));
        }
        if let Some(w) = s.delta_width {
            positive("solver.delta_width", w)?;
        }
        let grid_solver = s.runs(Method::Ldg) || s.runs(Method::Fd);
        if grid_solver {
            if let Some(i) = self.grid.record_times.iter().position(|&t| t < s.t0) {
                return Err(bad(
                    format!("grid.record_times[{i}]"),
                    format!("precedes the start time solver.t0 = {}", s.t0),
                ));
            }
        }
        if s.initial == InitialKind::WarmStart {
            if !exact_possible || self.model.family == Family::DoubleWell {
                return Err(bad(
                    "solver.initial",
                    "warm start needs a transient exact density",
                ));
            }
            if !(s.t0 > 0.0) {
                return Err(bad("solver.t0", "warm start needs t0 > 0"));
            }
        }
        if s.runs(Method::Mc) {
            if s.mc_paths == 0 {
                return Err(bad("solver.mc_paths", "must be positive"));
            }
            positive("solver.mc_dt", s.mc_dt)?;
            if let Some(i) = self
                .grid
                .record_times
                .iter()
                .position(|&t| !on_grid(t, s.mc_dt))
            {
                return Err(bad(
                    format!("grid.record_times[{i}]"),
                    format!("not a multiple of solver.mc_dt = {}", s.mc_dt),
                ));
            }
            if let Some(n) = s.mc_bins {
                if n < 10 {
                    return Err(bad("solver.mc_bins", "need at least 10 bins"));
                }
            } else if self.grid.cells < 10 {
                return Err(bad("solver.mc_bins", "set explicitly when grid.cells < 10"));
            }
        }
        Ok(())
    }

    /// Copy with a new Hurst index (one leg of a sweep).
    pub fn with_hurst(&self, h: f64) -> Self {
        let mut c = self.clone();
        c.model.hurst = Some(h);
        c.sweep = None;
        c
    }
}

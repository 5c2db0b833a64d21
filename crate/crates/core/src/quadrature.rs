//! Gauss–Legendre rules and composite integration helpers shared by the
//! projection, normalization and memory-kernel code.

use gauss_quad::GaussLegendre;

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on the reference interval [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussRule {
    /// `n`-point rule, exact for polynomials of degree `2n - 1`.
    pub fn legendre(n: usize) -> Self {
        assert!(n >= 1, "a quadrature rule needs at least one node");
        if n == 1 {
            return Self {
                nodes: vec![0.0],
                weights: vec![2.0],
            };
        }
        let rule = GaussLegendre::new(n.try_into().expect("n >= 2"));
        let (nodes, weights) = rule.iter().map(|(x, w)| (*x, *w)).unzip();
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integral of `f` over `[a, b]` with a single application of the rule.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

/// Composite rule over `panels` equal sub-intervals of `[a, b]`.
pub fn composite<F: FnMut(f64) -> f64>(
    rule: &GaussRule,
    a: f64,
    b: f64,
    panels: usize,
    mut f: F,
) -> f64 {
    let width = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let lo = a + i as f64 * width;
            rule.integrate(lo, lo + width, &mut f)
        })
        .sum()
}

/// Integrates `f` over `[a, b]`, doubling the panel count until two
/// successive composite estimates agree to `rel_tol` (relative to the
/// magnitude of the estimate, with `abs_floor` guarding zero integrals).
pub fn integrate_refined<F: FnMut(f64) -> f64>(
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_floor: f64,
    mut f: F,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let rule = GaussRule::legendre(12);
    let mut panels = 8;
    let mut previous = composite(&rule, a, b, panels, &mut f);
    while panels < 1 << 16 {
        panels *= 2;
        let current = composite(&rule, a, b, panels, &mut f);
        if !current.is_finite() {
            return Err(Error::Domain(format!(
                "integrand is not finite on [{a}, {b}]"
            )));
        }
        if (current - previous).abs() <= rel_tol * current.abs() + abs_floor {
            return Ok(current);
        }
        previous = current;
    }
    Err(Error::Domain(format!(
        "quadrature on [{a}, {b}] did not reach relative tolerance {rel_tol:e}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_is_exact_for_its_degree() {
        for n in 1..=8 {
            let rule = GaussRule::legendre(n);
            let degree = 2 * n - 1;
            let approx = rule.integrate(0.0, 2.0, |x| x.powi(degree as i32));
            let exact = 2f64.powi(degree as i32 + 1) / (degree as f64 + 1.0);
            assert!((approx - exact).abs() < 1e-12 * exact, "n = {n}");
        }
    }

    #[test]
    fn refined_integration_of_gaussian() {
        let val = integrate_refined(-10.0, 10.0, 1e-12, 0.0, |x| (-x * x).exp()).unwrap();
        assert!((val - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }
}

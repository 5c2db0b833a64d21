//! Orthonormal Legendre modal basis on the reference cell `[-1, 1]`.
//!
//! `φ_m(ξ) = √(2m+1) P_m(ξ)`, normalized so that `∫_cell φ_m φ_n dx = h δ_mn`.

use crate::quadrature::GaussRule;

/// `P_0..=P_k` and their derivatives at `xi`.
pub(crate) fn legendre_with_derivative(k: usize, xi: f64, p: &mut [f64], dp: &mut [f64]) {
    p[0] = 1.0;
    dp[0] = 0.0;
    if k == 0 {
        return;
    }
    p[1] = xi;
    dp[1] = 1.0;
    for m in 1..k {
        let mf = m as f64;
        p[m + 1] = ((2.0 * mf + 1.0) * xi * p[m] - mf * p[m - 1]) / (mf + 1.0);
        dp[m + 1] = dp[m - 1] + (2.0 * mf + 1.0) * p[m];
    }
}

/// Evaluates `Σ c_m φ_m(ξ)`.
pub(crate) fn eval_modal(coeffs: &[f64], xi: f64) -> f64 {
    let (mut p_prev, mut p) = (1.0, xi);
    let mut sum = coeffs[0];
    for (m, &c) in coeffs.iter().enumerate().skip(1) {
        if m > 1 {
            let mf = (m - 1) as f64;
            let next = ((2.0 * mf + 1.0) * xi * p - mf * p_prev) / (mf + 1.0);
            p_prev = p;
            p = next;
        }
        sum += c * ((2 * m + 1) as f64).sqrt() * p;
    }
    sum
}

/// Basis tabulated at a Gauss rule, plus end values and the stiffness
/// matrix `S[m][n] = ∫ φ_n φ_m' dξ`.
#[derive(Debug, Clone)]
pub(crate) struct Basis {
    pub k: usize,
    pub xi: Vec<f64>,
    pub w: Vec<f64>,
    /// `phi[q * (k+1) + m]`
    pub phi: Vec<f64>,
    /// `dphi[q * (k+1) + m]`, derivative in `ξ`.
    pub dphi: Vec<f64>,
    pub right: Vec<f64>,
    pub left: Vec<f64>,
    pub stiff: Vec<f64>,
}

impl Basis {
    pub fn new(k: usize, n_quad: usize) -> Self {
        let rule = GaussRule::legendre(n_quad);
        let nb = k + 1;
        let mut phi = vec![0.0; n_quad * nb];
        let mut dphi = vec![0.0; n_quad * nb];
        let (mut p, mut dp) = (vec![0.0; nb], vec![0.0; nb]);
        for (q, &xi) in rule.nodes().iter().enumerate() {
            legendre_with_derivative(k, xi, &mut p, &mut dp);
            for m in 0..nb {
                let s = ((2 * m + 1) as f64).sqrt();
                phi[q * nb + m] = s * p[m];
                dphi[q * nb + m] = s * dp[m];
            }
        }
        let right = (0..nb)
            .map(|m| ((2 * m + 1) as f64).sqrt())
            .collect::<Vec<_>>();
        let left = right
            .iter()
            .enumerate()
            .map(|(m, r)| if m % 2 == 0 { *r } else { -r })
            .collect();
        // Exact for n_quad >= k + 1 (integrand degree 2k - 1).
        let mut stiff = vec![0.0; nb * nb];
        for (q, &wq) in rule.weights().iter().enumerate() {
            for m in 0..nb {
                for n in 0..nb {
                    stiff[m * nb + n] += wq * phi[q * nb + n] * dphi[q * nb + m];
                }
            }
        }
        Self {
            k,
            xi: rule.nodes().to_vec(),
            w: rule.weights().to_vec(),
            phi,
            dphi,
            right,
            left,
            stiff,
        }
    }

    pub fn n_basis(&self) -> usize {
        self.k + 1
    }

    pub fn n_quad(&self) -> usize {
        self.xi.len()
    }

    /// Values of `Σ c_m φ_m` at the quadrature nodes.
    pub fn at_nodes(&self, coeffs: &[f64], out: &mut [f64]) {
        let nb = self.n_basis();
        for (q, o) in out.iter_mut().enumerate() {
            *o = coeffs
                .iter()
                .zip(&self.phi[q * nb..(q + 1) * nb])
                .map(|(c, f)| c * f)
                .sum();
        }
    }

    pub fn right_value(&self, coeffs: &[f64]) -> f64 {
        coeffs.iter().zip(&self.right).map(|(c, f)| c * f).sum()
    }

    pub fn left_value(&self, coeffs: &[f64]) -> f64 {
        coeffs.iter().zip(&self.left).map(|(c, f)| c * f).sum()
    }
}

//! Local discontinuous Galerkin solver for `∂t p = -∂x(D1 p) + ∂xx(D2 p)`.
//!
//! The equation is rewritten as the first-order system
//!
//! ```text
//! p_t = w_x + ψ,   w = D2 v,   v = p_x,
//! ψ = (∂x D2 - D1) v + (∂xx D2 - ∂x D1) p
//! ```
//!
//! discretized with piecewise polynomials of degree `k` and alternating
//! fluxes (`p̂` from the left, `ŵ` from the right). Traces outside `[a, b]`
//! are zero. Time stepping is explicit SSP-RK3.
//!
//! The numerical flux `p̂` at the nodes converges at order `2k + 1` for
//! smooth solutions, well above the `k + 1` of point values inside cells,
//! so snapshots are taken at the nodes unless asked otherwise.

mod basis;
mod operator;
mod solve;

use std::fmt;

use crate::error::{Error, Result};
use crate::quadrature::GaussRule;

pub use operator::{ldg_rhs, ldg_rhs_with, Formulation};
pub use solve::{
    default_c_adv, default_c_cfl, solve, solve_field, solve_states, CflPolicy, DensityFn, EvalGrid,
    InitialCondition, LdgProblem,
};

/// Uniform partition `a = x_{1/2} < … < x_{N+1/2} = b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mesh {
    a: f64,
    b: f64,
    n: usize,
}

pub fn build_mesh(a: f64, b: f64, n_cells: usize) -> Result<Mesh> {
    if n_cells < 2 {
        return Err(Error::InvalidInput(format!(
            "a mesh needs at least 2 cells, got {n_cells}"
        )));
    }
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidInput(format!(
            "mesh needs finite a < b, got [{a}, {b}]"
        )));
    }
    Ok(Mesh { a, b, n: n_cells })
}

impl Mesh {
    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn n_cells(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        (self.b - self.a) / self.n as f64
    }

    /// Node `x_{j+1/2}` for `j = 0..=N`.
    pub fn node(&self, j: usize) -> f64 {
        if j == self.n {
            self.b
        } else {
            self.a + j as f64 * self.h()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n).map(|j| self.node(j)).collect()
    }

    pub fn center(&self, j: usize) -> f64 {
        self.a + (j as f64 + 0.5) * self.h()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.center(j)).collect()
    }

    /// Cell holding `x` and the reference coordinate in it. Interior nodes
    /// belong to the cell on their left.
    fn locate(&self, x: f64) -> Result<(usize, f64)> {
        if !(x >= self.a && x <= self.b) {
            return Err(Error::Domain(format!(
                "x = {x} lies outside [{}, {}]",
                self.a, self.b
            )));
        }
        let s = (x - self.a) / self.h();
        let r = s.round();
        let j = if (s - r).abs() <= 1e-12 * r.max(1.0) {
            (r as usize).max(1) - 1
        } else {
            s.floor() as usize
        }
        .min(self.n - 1);
        let xi = 2.0 * (x - self.center(j)) / self.h();
        Ok((j, xi.clamp(-1.0, 1.0)))
    }
}

/// Piecewise polynomial of degree `k` in the orthonormal modal basis,
/// coefficients stored cell by cell.
#[derive(Clone, PartialEq)]
pub struct DgField {
    mesh: Mesh,
    k: usize,
    coeffs: Vec<f64>,
}

impl fmt::Debug for DgField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DgField")
            .field("mesh", &self.mesh)
            .field("k", &self.k)
            .finish_non_exhaustive()
    }
}

impl DgField {
    pub fn zeros(mesh: Mesh, k: usize) -> Self {
        Self {
            mesh,
            k,
            coeffs: vec![0.0; mesh.n * (k + 1)],
        }
    }

    pub fn from_coeffs(mesh: Mesh, k: usize, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != mesh.n * (k + 1) {
            return Err(Error::InvalidInput(format!(
                "expected {} coefficients, got {}",
                mesh.n * (k + 1),
                coeffs.len()
            )));
        }
        Ok(Self { mesh, k, coeffs })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn cell(&self, j: usize) -> &[f64] {
        let nb = self.k + 1;
        &self.coeffs[j * nb..(j + 1) * nb]
    }

    /// Point value; at interior nodes the left trace.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        let (j, xi) = self.mesh.locate(x)?;
        Ok(basis::eval_modal(self.cell(j), xi))
    }

    /// `∫_a^b p dx`.
    pub fn mass(&self) -> f64 {
        let h = self.mesh.h();
        self.coeffs.chunks(self.k + 1).map(|c| h * c[0]).sum()
    }

    /// Values at the nodes `x_{1/2}, …, x_{N+1/2}`: the numerical flux
    /// `p̂` (left trace) at interior nodes, the inner trace at the ends.
    pub fn node_values(&self) -> Vec<f64> {
        let nb = self.k + 1;
        let mut out = Vec::with_capacity(self.mesh.n + 1);
        out.push(basis::eval_modal(&self.coeffs[..nb], -1.0));
        out.extend(self.coeffs.chunks(nb).map(|c| basis::eval_modal(c, 1.0)));
        out
    }

    /// Mean of `p_h` over each cell.
    pub fn cell_averages(&self) -> Vec<f64> {
        self.coeffs.chunks(self.k + 1).map(|c| c[0]).collect()
    }

    /// Values at the cell centers.
    pub fn midpoint_values(&self) -> Vec<f64> {
        self.coeffs
            .chunks(self.k + 1)
            .map(|c| basis::eval_modal(c, 0.0))
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }
}

/// Cell-wise L² projection of `f`, using `k + 4` Gauss points per cell
/// (exact for polynomials of degree `≤ k`).
pub fn project(f: impl Fn(f64) -> f64, mesh: &Mesh, k: usize) -> DgField {
    let b = basis::Basis::new(k, k + 4);
    let nb = k + 1;
    let h = mesh.h();
    let mut field = DgField::zeros(*mesh, k);
    for j in 0..mesh.n {
        let xc = mesh.center(j);
        let c = &mut field.coeffs[j * nb..(j + 1) * nb];
        for q in 0..b.n_quad() {
            let fx = f(xc + 0.5 * h * b.xi[q]);
            for (cm, phi) in c.iter_mut().zip(&b.phi[q * nb..(q + 1) * nb]) {
                *cm += 0.5 * b.w[q] * fx * phi;
            }
        }
    }
    field
}

/// L² projection of the point mass `δ(x - x0)`: `c_m = φ_m(ξ0) / h` in the
/// containing cell. A mass sitting on an interior node is split evenly
/// between its two cells.
pub fn project_point_mass(x0: f64, mesh: &Mesh, k: usize) -> Result<DgField> {
    let (j, xi) = mesh.locate(x0)?;
    let nb = k + 1;
    let mut field = DgField::zeros(*mesh, k);
    let (mut p, mut dp) = (vec![0.0; nb], vec![0.0; nb]);
    let mut deposit = |cell: usize, xi: f64, weight: f64| {
        basis::legendre_with_derivative(k, xi, &mut p, &mut dp);
        let c = &mut field.coeffs[cell * nb..(cell + 1) * nb];
        for (m, (cm, pm)) in c.iter_mut().zip(&p).enumerate() {
            *cm += weight * ((2 * m + 1) as f64).sqrt() * pm / mesh.h();
        }
    };
    if xi == 1.0 && j + 1 < mesh.n {
        deposit(j, 1.0, 0.5);
        deposit(j + 1, -1.0, 0.5);
    } else {
        deposit(j, xi, 1.0);
    }
    Ok(field)
}

/// `(∫_a^b |f - p_h|² dx)^{1/2}` evaluated with a high-order rule per cell.
pub fn l2_distance(field: &DgField, f: impl Fn(f64) -> f64) -> f64 {
    let rule = GaussRule::legendre(field.k + 6);
    let h = field.mesh.h();
    let mut sum = 0.0;
    for j in 0..field.mesh.n {
        let xc = field.mesh.center(j);
        for (xi, w) in rule.nodes().iter().zip(rule.weights()) {
            let e = basis::eval_modal(field.cell(j), *xi) - f(xc + 0.5 * h * xi);
            sum += 0.5 * h * w * e * e;
        }
    }
    sum.sqrt()
}

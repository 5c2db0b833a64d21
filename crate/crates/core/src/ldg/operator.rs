use serde::{Deserialize, Serialize};

use crate::coefficients::{CoefSample, PdeeCoefficients};

use super::basis::Basis;
use super::{DgField, Mesh};

/// How the first-order part `b = ∂x D2 - D1` of the operator is discretized.
/// All three share the diffusive stages `v = p_x` (flux `p̂` from the left)
/// and `w = D2 v` (flux `ŵ` from the right).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formulation {
    /// `p_t = w_x + b v + b_x p` with the same `v` as the diffusive stage.
    /// Where `b > 0` the left trace is the downwind one, and the scheme
    /// slowly amplifies high-frequency modes on long runs.
    SourceAlternating,
    /// `p_t = w_x + b ṽ + b_x p`, where `ṽ` is a second derivative
    /// reconstruction taking `p̂` from the upwind side of each node.
    SourceUpwind,
    /// `p_t = ∂x(w + b p)` with an upwind trace for `b p`. Mass changes only
    /// through the two boundary fluxes.
    #[default]
    Conservative,
}

/// Semi-discrete LDG operator with its scratch space.
pub(crate) struct LdgOperator {
    basis: Basis,
    mesh: Mesh,
    formulation: Formulation,
    /// Quadrature points cell by cell, then the `N + 1` nodes.
    xs: Vec<f64>,
    coef: Vec<CoefSample>,
    v: Vec<f64>,
    v_adv: Vec<f64>,
    w: Vec<f64>,
    p_right: Vec<f64>,
    p_left: Vec<f64>,
    w_left: Vec<f64>,
    vq: Vec<f64>,
    pq: Vec<f64>,
    wq: Vec<f64>,
    node_flux: Vec<f64>,
    /// Extremes of the last load when the fields are time independent.
    frozen: Option<(f64, f64)>,
    /// Assembled operator for frozen coefficients.
    banded: Option<Banded>,
}

/// Cells interact only with their immediate neighbours; one extra cell on
/// each side keeps the probe honest.
const HALF_BAND: usize = 2;

/// Block-banded matrix: row `j * nb + m` holds the columns of cells
/// `j - HALF_BAND ..= j + HALF_BAND`.
struct Banded {
    nb: usize,
    n: usize,
    vals: Vec<f64>,
}

impl Banded {
    fn width(&self) -> usize {
        (2 * HALF_BAND + 1) * self.nb
    }

    fn apply(&self, p: &[f64], out: &mut [f64]) {
        let nb = self.nb;
        let width = self.width();
        for j in 0..self.n {
            let lo = j.saturating_sub(HALF_BAND);
            let hi = (j + HALF_BAND).min(self.n - 1);
            let offset = (lo + HALF_BAND - j) * nb;
            let cols = &p[lo * nb..(hi + 1) * nb];
            for m in 0..nb {
                let row = &self.vals[(j * nb + m) * width + offset..][..cols.len()];
                out[j * nb + m] = row.iter().zip(cols).map(|(a, x)| a * x).sum();
            }
        }
    }
}

impl LdgOperator {
    pub fn new(mesh: Mesh, k: usize, n_quad: usize, formulation: Formulation) -> Self {
        let basis = Basis::new(k, n_quad.max(k + 2));
        let h = mesh.h();
        let mut xs = Vec::with_capacity(mesh.n_cells() * basis.n_quad() + mesh.n_cells() + 1);
        for j in 0..mesh.n_cells() {
            let xc = mesh.center(j);
            xs.extend(basis.xi.iter().map(|xi| xc + 0.5 * h * xi));
        }
        xs.extend(mesh.nodes());
        let nq = basis.n_quad();
        let n = mesh.n_cells() * (k + 1);
        Self {
            coef: vec![CoefSample::default(); xs.len()],
            v: vec![0.0; n],
            v_adv: vec![0.0; n],
            w: vec![0.0; n],
            p_right: vec![0.0; mesh.n_cells()],
            p_left: vec![0.0; mesh.n_cells()],
            w_left: vec![0.0; mesh.n_cells()],
            vq: vec![0.0; nq],
            pq: vec![0.0; nq],
            wq: vec![0.0; nq],
            node_flux: vec![0.0; mesh.n_cells() + 1],
            frozen: None,
            banded: None,
            basis,
            mesh,
            formulation,
            xs,
        }
    }

    /// Samples the coefficients at time `t` and returns
    /// `(max D2, max |∂x D2 - D1|)` over the sample points.
    /// Time-independent fields are sampled only once per operator.
    pub fn load_coefficients(&mut self, coefs: &PdeeCoefficients, t: f64) -> (f64, f64) {
        if let Some(extremes) = self.frozen {
            return extremes;
        }
        coefs.sample(t, &self.xs, &mut self.coef);
        let extremes = self.coef.iter().fold((0.0f64, 0.0f64), |(d, a), c| {
            (d.max(c.d2.abs()), a.max((c.d2_x - c.d1).abs()))
        });
        if coefs.is_time_independent() {
            self.frozen = Some(extremes);
            self.assemble();
        }
        extremes
    }

    /// Probes the linear operator with one unit vector per basis function
    /// and residue class of the cell index modulo the stencil width.
    fn assemble(&mut self) {
        let nb = self.basis.n_basis();
        let n = self.mesh.n_cells();
        let stride = 2 * HALF_BAND + 1;
        let mut banded = Banded {
            nb,
            n,
            vals: vec![0.0; n * nb * stride * nb],
        };
        let width = banded.width();
        let mut e = vec![0.0; n * nb];
        let mut col = vec![0.0; n * nb];
        for colour in 0..stride.min(n) {
            for l in 0..nb {
                e.iter_mut().for_each(|x| *x = 0.0);
                for jj in (colour..n).step_by(stride) {
                    e[jj * nb + l] = 1.0;
                }
                self.apply_general(&e, &mut col);
                // Row j sees exactly one probed cell within its band.
                for j in 0..n {
                    let Some(jj) = (j.saturating_sub(HALF_BAND)..=(j + HALF_BAND).min(n - 1))
                        .find(|jj| jj % stride == colour)
                    else {
                        continue;
                    };
                    let c = (jj + HALF_BAND - j) * nb + l;
                    for m in 0..nb {
                        banded.vals[(j * nb + m) * width + c] = col[j * nb + m];
                    }
                }
            }
        }
        self.banded = Some(banded);
    }

    pub fn coefficients_finite(&self) -> bool {
        self.coef.iter().all(|c| {
            c.d1.is_finite()
                && c.d1_x.is_finite()
                && c.d2.is_finite()
                && c.d2_x.is_finite()
                && c.d2_xx.is_finite()
        })
    }

    /// `b = ∂x D2 - D1` at node `i`.
    fn b_node(&self, i: usize) -> f64 {
        let c = &self.coef[self.mesh.n_cells() * self.basis.n_quad() + i];
        c.d2_x - c.d1
    }

    /// Upwind trace of `p` at node `i` for `p_t = (b p)_x`-type transport,
    /// which moves with velocity `-b`. Exterior states are zero.
    fn upwind_trace(&self, i: usize) -> f64 {
        let n = self.mesh.n_cells();
        if self.b_node(i) <= 0.0 {
            if i == 0 {
                0.0
            } else {
                self.p_right[i - 1]
            }
        } else if i == n {
            0.0
        } else {
            self.p_left[i]
        }
    }

    /// `h ∫ v φ_m = -∫ p φ_m' + p̂_R φ_m(1) - p̂_L φ_m(-1)` for every cell.
    fn derivative(&self, p: &[f64], trace: impl Fn(usize) -> f64, out: &mut [f64]) {
        let b = &self.basis;
        let nb = b.n_basis();
        let inv_h = 1.0 / self.mesh.h();
        for j in 0..self.mesh.n_cells() {
            let pc = &p[j * nb..(j + 1) * nb];
            let (hat_l, hat_r) = (trace(j), trace(j + 1));
            for m in 0..nb {
                let s: f64 = (0..nb).map(|l| b.stiff[m * nb + l] * pc[l]).sum();
                out[j * nb + m] = inv_h * (-s + hat_r * b.right[m] - hat_l * b.left[m]);
            }
        }
    }

    /// `out = dp/dt` using the coefficients from the last
    /// [`load_coefficients`](Self::load_coefficients) call.
    pub fn apply(&mut self, p: &[f64], out: &mut [f64]) {
        match &self.banded {
            Some(banded) => banded.apply(p, out),
            None => self.apply_general(p, out),
        }
    }

    fn apply_general(&mut self, p: &[f64], out: &mut [f64]) {
        let nb = self.basis.n_basis();
        let nq = self.basis.n_quad();
        let n = self.mesh.n_cells();
        let inv_h = 1.0 / self.mesh.h();

        for j in 0..n {
            let pc = &p[j * nb..(j + 1) * nb];
            self.p_right[j] = self.basis.right_value(pc);
            self.p_left[j] = self.basis.left_value(pc);
        }
        // v = p_x with p̂ from the left, zero at x_{1/2}.
        let mut v = std::mem::take(&mut self.v);
        self.derivative(
            p,
            |i| if i == 0 { 0.0 } else { self.p_right[i - 1] },
            &mut v,
        );
        self.v = v;
        if self.formulation == Formulation::SourceUpwind {
            let mut v_adv = std::mem::take(&mut self.v_adv);
            self.derivative(p, |i| self.upwind_trace(i), &mut v_adv);
            self.v_adv = v_adv;
        }

        let b = &self.basis;
        // w = Π(D2 v)
        for j in 0..n {
            b.at_nodes(&self.v[j * nb..(j + 1) * nb], &mut self.vq);
            let cq = &self.coef[j * nq..(j + 1) * nq];
            for m in 0..nb {
                self.w[j * nb + m] = 0.5
                    * (0..nq)
                        .map(|q| b.w[q] * cq[q].d2 * self.vq[q] * b.phi[q * nb + m])
                        .sum::<f64>();
            }
        }
        for j in 0..n {
            self.w_left[j] = b.left_value(&self.w[j * nb..(j + 1) * nb]);
        }
        // ŵ from the right, zero at x_{N+1/2}.
        let w_hat = |i: usize| if i == n { 0.0 } else { self.w_left[i] };

        match self.formulation {
            Formulation::SourceAlternating | Formulation::SourceUpwind => {
                let v_adv = if self.formulation == Formulation::SourceUpwind {
                    &self.v_adv
                } else {
                    &self.v
                };
                for j in 0..n {
                    b.at_nodes(&v_adv[j * nb..(j + 1) * nb], &mut self.vq);
                    b.at_nodes(&p[j * nb..(j + 1) * nb], &mut self.pq);
                    let cq = &self.coef[j * nq..(j + 1) * nq];
                    let wc = &self.w[j * nb..(j + 1) * nb];
                    let (w_hat_l, w_hat_r) = (w_hat(j), w_hat(j + 1));
                    for m in 0..nb {
                        let s: f64 = (0..nb).map(|l| b.stiff[m * nb + l] * wc[l]).sum();
                        let src: f64 = (0..nq)
                            .map(|q| {
                                let c = &cq[q];
                                let psi =
                                    (c.d2_x - c.d1) * self.vq[q] + (c.d2_xx - c.d1_x) * self.pq[q];
                                b.w[q] * psi * b.phi[q * nb + m]
                            })
                            .sum();
                        out[j * nb + m] =
                            inv_h * (-s + w_hat_r * b.right[m] - w_hat_l * b.left[m]) + 0.5 * src;
                    }
                }
            }
            Formulation::Conservative => {
                for i in 0..=n {
                    self.node_flux[i] = w_hat(i) + self.b_node(i) * self.upwind_trace(i);
                }
                let b = &self.basis;
                for j in 0..n {
                    b.at_nodes(&self.w[j * nb..(j + 1) * nb], &mut self.wq);
                    b.at_nodes(&p[j * nb..(j + 1) * nb], &mut self.pq);
                    let cq = &self.coef[j * nq..(j + 1) * nq];
                    let (f_l, f_r) = (self.node_flux[j], self.node_flux[j + 1]);
                    for m in 0..nb {
                        let vol: f64 = (0..nq)
                            .map(|q| {
                                let flux = self.wq[q] + (cq[q].d2_x - cq[q].d1) * self.pq[q];
                                b.w[q] * flux * b.dphi[q * nb + m]
                            })
                            .sum();
                        out[j * nb + m] = inv_h * (-vol + f_r * b.right[m] - f_l * b.left[m]);
                    }
                }
            }
        }
    }
}

/// Time derivative of `field` at time `t` under the default formulation.
pub fn ldg_rhs(field: &DgField, coefs: &PdeeCoefficients, t: f64) -> DgField {
    ldg_rhs_with(field, coefs, t, Formulation::default())
}

pub fn ldg_rhs_with(
    field: &DgField,
    coefs: &PdeeCoefficients,
    t: f64,
    formulation: Formulation,
) -> DgField {
    let mut op = LdgOperator::new(field.mesh, field.k, field.k + 2, formulation);
    op.load_coefficients(coefs, t);
    let mut out = DgField::zeros(field.mesh, field.k);
    op.apply(&field.coeffs, &mut out.coeffs);
    out
}

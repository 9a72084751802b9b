//! Dense primal-dual interior point solver for small semidefinite programs.
//!
//! Problems have one PSD block `X` and one nonnegative block `x`:
//!
//! ```text
//! minimize    <C, X> + c'x
//! subject to  <A_k, X> + a_k'x = b_k,   X psd,  x >= 0
//! ```
//!
//! with dual `maximize b'y` subject to `Z = C - sum y_k A_k psd` and
//! `z = c - sum y_k a_k >= 0`. Constraint matrices are sparse: an entry
//! `(i, j, v)` contributes `v * X_ij` (symmetrised when `i != j`).
//! Directions are HKM with Mehrotra's predictor-corrector.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

#[derive(Clone, Debug, Default)]
pub struct Constraint {
    pub psd: Vec<(usize, usize, f64)>,
    pub lp: Vec<(usize, f64)>,
    pub rhs: f64,
}

#[derive(Clone, Debug)]
pub struct SdpProblem {
    pub dim: usize,
    pub lp_dim: usize,
    pub c: DMatrix<f64>,
    pub c_lp: DVector<f64>,
    pub constraints: Vec<Constraint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    IterationLimit,
    NumericalFailure,
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub status: SdpStatus,
    pub x: DMatrix<f64>,
    pub x_lp: DVector<f64>,
    pub y: DVector<f64>,
    pub z: DMatrix<f64>,
    pub z_lp: DVector<f64>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub iterations: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct SdpOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self { tolerance: 1e-9, max_iterations: 150 }
    }
}

impl SdpProblem {
    pub fn new(dim: usize, lp_dim: usize) -> Self {
        Self {
            dim,
            lp_dim,
            c: DMatrix::zeros(dim, dim),
            c_lp: DVector::zeros(lp_dim),
            constraints: Vec::new(),
        }
    }

    pub fn add_constraint(&mut self, psd: Vec<(usize, usize, f64)>, lp: Vec<(usize, f64)>, rhs: f64) -> usize {
        self.constraints.push(Constraint { psd, lp, rhs });
        self.constraints.len() - 1
    }

    fn apply(&self, g: &DMatrix<f64>, g_lp: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.constraints.len(),
            self.constraints.iter().map(|k| {
                let s: f64 = k.psd.iter().map(|&(i, j, v)| v * 0.5 * (g[(i, j)] + g[(j, i)])).sum();
                s + k.lp.iter().map(|&(p, v)| v * g_lp[p]).sum::<f64>()
            }),
        )
    }

    fn adjoint(&self, y: &DVector<f64>) -> (DMatrix<f64>, DVector<f64>) {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        let mut v = DVector::zeros(self.lp_dim);
        for (k, con) in self.constraints.iter().enumerate() {
            for &(i, j, a) in &con.psd {
                if i == j {
                    m[(i, i)] += y[k] * a;
                } else {
                    m[(i, j)] += 0.5 * y[k] * a;
                    m[(j, i)] += 0.5 * y[k] * a;
                }
            }
            for &(p, a) in &con.lp {
                v[p] += y[k] * a;
            }
        }
        (m, v)
    }

    fn rhs(&self) -> DVector<f64> {
        DVector::from_iterator(self.constraints.len(), self.constraints.iter().map(|k| k.rhs))
    }

    fn schur(&self, x: &DMatrix<f64>, w: &DMatrix<f64>, ratio: &DVector<f64>) -> DMatrix<f64> {
        let m = self.constraints.len();
        let mut s = DMatrix::zeros(m, m);
        for k in 0..m {
            for l in k..m {
                let mut acc = 0.0;
                for &(a, b, v) in &self.constraints[k].psd {
                    for &(c, d, u) in &self.constraints[l].psd {
                        acc += v
                            * u
                            * 0.25
                            * (x[(b, c)] * w[(d, a)] + x[(b, d)] * w[(c, a)] + x[(a, c)] * w[(d, b)] + x[(a, d)] * w[(c, b)]);
                    }
                }
                for &(p, v) in &self.constraints[k].lp {
                    for &(q, u) in &self.constraints[l].lp {
                        if p == q {
                            acc += v * u * ratio[p];
                        }
                    }
                }
                s[(k, l)] = acc;
                s[(l, k)] = acc;
            }
        }
        s
    }

    fn scale(&self) -> (f64, f64) {
        let n = (self.dim + self.lp_dim).max(1) as f64;
        let mut xi: f64 = 10f64.max(n.sqrt());
        let mut eta: f64 = 10f64.max(n.sqrt()).max(self.c.norm()).max(self.c_lp.norm());
        for k in &self.constraints {
            let norm = (k.psd.iter().map(|t| t.2 * t.2).sum::<f64>() + k.lp.iter().map(|t| t.1 * t.1).sum::<f64>()).sqrt();
            xi = xi.max(n * (1.0 + k.rhs.abs()) / (1.0 + norm));
            eta = eta.max(norm);
        }
        (xi, eta)
    }

    pub fn solve(&self, opts: &SdpOptions) -> SdpSolution {
        let (xi, eta) = self.scale();
        let n = self.dim;
        let mut x = DMatrix::identity(n, n) * xi;
        let mut z = DMatrix::identity(n, n) * eta;
        let mut x_lp = DVector::from_element(self.lp_dim, xi);
        let mut z_lp = DVector::from_element(self.lp_dim, eta);
        let mut y = DVector::zeros(self.constraints.len());
        let b = self.rhs();
        let order = (n + self.lp_dim).max(1) as f64;
        let b_norm = 1.0 + b.norm();
        let c_norm = 1.0 + self.c.norm() + self.c_lp.norm();
        let mut status = SdpStatus::IterationLimit;
        let mut iterations = 0;
        for it in 0..opts.max_iterations {
            iterations = it;
            let rp = &b - self.apply(&x, &x_lp);
            let (aty, aty_lp) = self.adjoint(&y);
            let rd = &self.c - &z - aty;
            let rd_lp = &self.c_lp - &z_lp - aty_lp;
            let pobj = self.c.dot(&x) + self.c_lp.dot(&x_lp);
            let dobj = b.dot(&y);
            let pinf = rp.norm() / b_norm;
            let dinf = (rd.norm() + rd_lp.norm()) / c_norm;
            let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
            if pinf < opts.tolerance && dinf < opts.tolerance && gap < opts.tolerance {
                status = SdpStatus::Optimal;
                break;
            }
            let mu = (x.dot(&z) + x_lp.dot(&z_lp)) / order;
            let Some(w) = spd_inverse(&z) else {
                status = SdpStatus::NumericalFailure;
                break;
            };
            let ratio = x_lp.component_div(&z_lp);
            let schur = self.schur(&x, &w, &ratio);
            let Some(chol) = regularised_cholesky(schur) else {
                status = SdpStatus::NumericalFailure;
                break;
            };
            let xrw = sym(&(&x * &rd * &w));
            let xrw_lp = x_lp.component_mul(&rd_lp).component_div(&z_lp);
            let base = &b + self.apply(&xrw, &xrw_lp);
            let direction = |d: &DMatrix<f64>, d_lp: &DVector<f64>| {
                let dy = chol.solve(&(&base - self.apply(d, d_lp)));
                let (ady, ady_lp) = self.adjoint(&dy);
                let dz = &rd - ady;
                let dz_lp = &rd_lp - ady_lp;
                let dx = d - &x - sym(&(&x * &dz * &w));
                let dx_lp = d_lp - &x_lp - x_lp.component_mul(&dz_lp).component_div(&z_lp);
                (dx, dx_lp, dy, dz, dz_lp)
            };
            let (ax, ax_lp, _, az, az_lp) = direction(&DMatrix::zeros(n, n), &DVector::zeros(self.lp_dim));
            let ap = step_length(&x, &ax).min(lp_step(&x_lp, &ax_lp));
            let ad = step_length(&z, &az).min(lp_step(&z_lp, &az_lp));
            let mu_aff = ((&x + &ax * ap).dot(&(&z + &az * ad)) + (&x_lp + &ax_lp * ap).dot(&(&z_lp + &az_lp * ad)))
                / order;
            let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);
            let d = &w * (sigma * mu) - sym(&(&ax * &az * &w));
            let d_lp = z_lp.map(|v| sigma * mu / v) - ax_lp.component_mul(&az_lp).component_div(&z_lp);
            let (dx, dx_lp, dy, dz, dz_lp) = direction(&d, &d_lp);
            let ap = (0.95 * step_length(&x, &dx).min(lp_step(&x_lp, &dx_lp))).min(1.0);
            let ad = (0.95 * step_length(&z, &dz).min(lp_step(&z_lp, &dz_lp))).min(1.0);
            x += dx * ap;
            x_lp += dx_lp * ap;
            y += dy * ad;
            z += dz * ad;
            z_lp += dz_lp * ad;
            x = sym(&x);
            z = sym(&z);
        }
        let rp = &b - self.apply(&x, &x_lp);
        let (aty, aty_lp) = self.adjoint(&y);
        SdpSolution {
            status,
            primal_objective: self.c.dot(&x) + self.c_lp.dot(&x_lp),
            dual_objective: b.dot(&y),
            primal_infeasibility: rp.norm() / b_norm,
            dual_infeasibility: ((&self.c - &z - aty).norm() + (&self.c_lp - &z_lp - aty_lp).norm()) / c_norm,
            x,
            x_lp,
            y,
            z,
            z_lp,
            iterations,
        }
    }
}

pub fn sym(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn spd_inverse(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    Cholesky::new(m.clone()).map(|c| sym(&c.inverse()))
}

fn regularised_cholesky(m: DMatrix<f64>) -> Option<Cholesky<f64, nalgebra::Dyn>> {
    let scale = m.diagonal().iter().fold(0.0f64, |a, &v| a.max(v.abs())).max(1e-300);
    let mut reg = 0.0;
    for _ in 0..8 {
        let mut t = m.clone();
        for i in 0..t.nrows() {
            t[(i, i)] += reg;
        }
        if let Some(c) = Cholesky::new(t) {
            return Some(c);
        }
        reg = if reg == 0.0 { scale * 1e-14 } else { reg * 100.0 };
    }
    None
}

/// Largest `alpha` with `m + alpha * d` still positive semidefinite.
fn step_length(m: &DMatrix<f64>, d: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    let Some(chol) = Cholesky::new(m.clone()) else { return 0.0 };
    let l = chol.l();
    let Some(linv) = l.clone().try_inverse() else { return 0.0 };
    let s = sym(&(&linv * d * linv.transpose()));
    let lmin = SymmetricEigen::new(s).eigenvalues.min();
    if lmin < 0.0 {
        -1.0 / lmin
    } else {
        f64::INFINITY
    }
}

fn lp_step(v: &DVector<f64>, d: &DVector<f64>) -> f64 {
    v.iter().zip(d.iter()).filter(|(_, &dv)| dv < 0.0).map(|(&a, &dv)| -a / dv).fold(f64::INFINITY, f64::min)
}

/// Eigendecomposition with eigenvalues below `-clip` treated as zero and the rest clamped at 0.
/// Returns `V` with `V V^T` equal to the clipped matrix.
pub fn psd_factor(m: &DMatrix<f64>, clip: f64) -> DMatrix<f64> {
    let e = SymmetricEigen::new(sym(m));
    let n = m.nrows();
    let mut v = DMatrix::zeros(n, n);
    for k in 0..n {
        let lambda = e.eigenvalues[k];
        if lambda > -clip {
            let s = lambda.max(0.0).sqrt();
            for i in 0..n {
                v[(i, k)] = e.eigenvectors[(i, k)] * s;
            }
        }
    }
    v
}

pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    SymmetricEigen::new(sym(m)).eigenvalues.min()
}

pub fn max_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    SymmetricEigen::new(sym(m)).eigenvalues.max()
}

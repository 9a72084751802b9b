//! The factorization norm `gamma_2`, its dual, and its approximate versions,
//! each returned with primal and dual evidence.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::approx_lp::{hadamard_reduction_poly, UnivariatePolynomial};
use crate::boolean_core::linalg::max_abs;
use crate::boolean_core::{classic_matrix_norms, PartialSignMatrix};
use crate::error::{Error, Result};
use crate::rational::{to_f64, Rational};
use crate::sdp::{max_eigenvalue, min_eigenvalue, psd_factor, SdpOptions, SdpProblem, SdpStatus};

pub const DEFAULT_SDP_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_DIM: usize = 64;
const CLIP: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormConfig {
    pub tolerance: f64,
    pub max_dim: usize,
}

impl Default for NormConfig {
    fn default() -> Self {
        Self { tolerance: DEFAULT_SDP_TOL, max_dim: DEFAULT_MAX_DIM }
    }
}

impl NormConfig {
    fn check(&self, rows: usize, cols: usize) -> Result<()> {
        if rows > self.max_dim || cols > self.max_dim {
            return Err(Error::TooLarge(format!("{rows}x{cols} matrix exceeds the {0}x{0} cap", self.max_dim)));
        }
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInput("empty matrix".into()));
        }
        Ok(())
    }

    fn options(&self) -> SdpOptions {
        SdpOptions { tolerance: self.tolerance, ..SdpOptions::default() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NormCertificate {
    pub norm: String,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub gap: f64,
    /// Rows of the left factor (or the unit vectors `u_i` for the dual norm).
    pub factor_rows: Vec<Vec<f64>>,
    /// Rows of the right factor (or the unit vectors `v_j`).
    pub factor_cols: Vec<Vec<f64>>,
    /// `target - approximant` on defined entries, for the approximate norms.
    pub perturbation: Option<Vec<Vec<f64>>>,
    #[serde(skip)]
    pub approximant: Option<DMatrix<f64>>,
}

impl NormCertificate {
    pub fn relative_gap(&self) -> f64 {
        self.gap / self.value.abs().max(1.0)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("serialisable")
    }

    fn bracket(norm: &str, lower: f64, upper: f64) -> Self {
        let lower = lower.min(upper);
        Self {
            norm: norm.into(),
            value: 0.5 * (lower + upper),
            lower,
            upper,
            gap: upper - lower,
            factor_rows: Vec::new(),
            factor_cols: Vec::new(),
            perturbation: None,
            approximant: None,
        }
    }
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn nonzero_columns(v: &DMatrix<f64>) -> DMatrix<f64> {
    let keep: Vec<usize> = (0..v.ncols()).filter(|&k| v.column(k).norm() > 0.0).collect();
    DMatrix::from_fn(v.nrows(), keep.len(), |i, k| v[(i, keep[k])])
}

fn row_norm_max(m: &DMatrix<f64>) -> f64 {
    (0..m.nrows()).map(|i| m.row(i).norm()).fold(0.0, f64::max)
}

/// `min gamma_2(X)` over matrices with `lo <= X <= hi` entrywise.
fn gamma2_interval(norm: &str, lo: &DMatrix<f64>, hi: &DMatrix<f64>, target: Option<&DMatrix<f64>>, cfg: &NormConfig) -> Result<NormCertificate> {
    let (m, n) = lo.shape();
    cfg.check(m, n)?;
    let dim = m + n;
    let loose: Vec<(usize, usize)> =
        (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| hi[(i, j)] > lo[(i, j)]).collect();
    let t = 0;
    let diag_slack = |i: usize| 1 + i;
    let lp_dim = 1 + dim + 2 * loose.len();
    let mut p = SdpProblem::new(dim, lp_dim);
    p.c_lp[t] = 1.0;
    for i in 0..dim {
        p.add_constraint(vec![(i, i, 1.0)], vec![(diag_slack(i), 1.0), (t, -1.0)], 0.0);
    }
    let mut slack = 1 + dim;
    for i in 0..m {
        for j in 0..n {
            if hi[(i, j)] > lo[(i, j)] {
                p.add_constraint(vec![(i, m + j, 1.0)], vec![(slack, -1.0)], lo[(i, j)]);
                p.add_constraint(vec![(i, m + j, 1.0)], vec![(slack + 1, 1.0)], hi[(i, j)]);
                slack += 2;
            } else {
                p.add_constraint(vec![(i, m + j, 1.0)], vec![], lo[(i, j)]);
            }
        }
    }
    let sol = p.solve(&cfg.options());
    if sol.status == SdpStatus::NumericalFailure && !sol.x.iter().all(|v| v.is_finite()) {
        return Err(Error::Solver("interior point iteration broke down".into()));
    }

    let x12 = sol.x.view((0, m), (m, n)).into_owned();
    let approx = DMatrix::from_fn(m, n, |i, j| x12[(i, j)].clamp(lo[(i, j)], hi[(i, j)]));
    let v = nonzero_columns(&psd_factor(&sol.x, CLIP));
    let a = v.rows(0, m).into_owned();
    let b = v.rows(m, n).into_owned();
    let residual = &approx - &a * b.transpose();
    let (ra, rb) = (row_norm_max(&a), row_norm_max(&b));
    let spectral = classic_matrix_norms(&residual).spectral;
    let upper = ra * rb + spectral;
    let (sa, sb) = if ra > 0.0 && rb > 0.0 { ((rb / ra).sqrt(), (ra / rb).sqrt()) } else { (1.0, 1.0) };

    // Dual evidence rebuilt from y so that its block structure is exact.
    let mut z = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        z[(i, i)] = -sol.y[i];
    }
    let mut k = dim;
    let mut w = DMatrix::zeros(m, n);
    for i in 0..m {
        for j in 0..n {
            let val = if hi[(i, j)] > lo[(i, j)] {
                let s = sol.y[k] + sol.y[k + 1];
                k += 2;
                s
            } else {
                k += 1;
                sol.y[k - 1]
            };
            w[(i, j)] = -0.5 * val;
            z[(i, m + j)] = -0.5 * val;
            z[(m + j, i)] = -0.5 * val;
        }
    }
    let shift = (-min_eigenvalue(&z)).max(0.0);
    let mass: f64 = (0..dim).map(|i| z[(i, i)] + shift).sum();
    let mut lower = 0.0f64;
    if mass > 0.0 {
        for sign in [1.0, -1.0] {
            let s: f64 = (0..m)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .map(|(i, j)| {
                    let c = -2.0 * sign * w[(i, j)];
                    (c * lo[(i, j)]).min(c * hi[(i, j)])
                })
                .sum();
            lower = lower.max(s / mass);
        }
    }
    let mut cert = NormCertificate::bracket(norm, lower, upper);
    cert.factor_rows = rows_of(&(a * sa));
    cert.factor_cols = rows_of(&(b * sb));
    if let Some(target) = target {
        cert.perturbation = Some(rows_of(&DMatrix::from_fn(m, n, |i, j| {
            if target[(i, j)].is_nan() {
                0.0
            } else {
                target[(i, j)] - approx[(i, j)]
            }
        })));
    }
    cert.approximant = Some(approx);
    Ok(cert)
}

/// `gamma_2(M)` of a real matrix.
pub fn gamma2(m: &DMatrix<f64>, cfg: &NormConfig) -> Result<NormCertificate> {
    gamma2_interval("gamma2", m, m, None, cfg)
}

/// `gamma_2` of a total sign matrix.
pub fn gamma2_sign(f: &PartialSignMatrix, cfg: &NormConfig) -> Result<NormCertificate> {
    gamma2(&f.to_real()?, cfg)
}

/// `gamma_{2,eps}(M) = min { gamma_2(M - E) : |E_ij| <= eps }` of a real matrix.
pub fn gamma2_eps_real(m: &DMatrix<f64>, eps: f64, cfg: &NormConfig) -> Result<NormCertificate> {
    if eps < 0.0 {
        return Err(Error::OutOfRange(format!("epsilon {eps} is negative")));
    }
    let lo = m.map(|v| v - eps);
    let hi = m.map(|v| v + eps);
    gamma2_interval("gamma2_eps", &lo, &hi, Some(m), cfg)
}

/// `gamma_{2,eps}(F)` of a partial sign matrix: defined entries move by at most
/// `eps`, undefined entries range over `[-1-eps, 1+eps]`.
pub fn gamma2_eps(f: &PartialSignMatrix, eps: f64, cfg: &NormConfig) -> Result<NormCertificate> {
    if eps < 0.0 {
        return Err(Error::OutOfRange(format!("epsilon {eps} is negative")));
    }
    let (m, n) = (f.rows(), f.cols());
    cfg.check(m, n)?;
    let target = DMatrix::from_fn(m, n, |i, j| f.get(i, j).map(f64::from).unwrap_or(f64::NAN));
    let lo = target.map(|v| if v.is_nan() { -1.0 - eps } else { v - eps });
    let hi = target.map(|v| if v.is_nan() { 1.0 + eps } else { v + eps });
    gamma2_interval("gamma2_eps", &lo, &hi, Some(&target), cfg)
}

/// `gamma_2^*(M) = max sum M_ij <u_i, v_j>` over unit vectors.
pub fn gamma2_dual(mat: &DMatrix<f64>, cfg: &NormConfig) -> Result<NormCertificate> {
    let (m, n) = mat.shape();
    cfg.check(m, n)?;
    let dim = m + n;
    let mut bmat = DMatrix::zeros(dim, dim);
    for i in 0..m {
        for j in 0..n {
            bmat[(i, m + j)] = 0.5 * mat[(i, j)];
            bmat[(m + j, i)] = 0.5 * mat[(i, j)];
        }
    }
    let mut p = SdpProblem::new(dim, 0);
    p.c = -&bmat;
    for i in 0..dim {
        p.add_constraint(vec![(i, i, 1.0)], vec![], 1.0);
    }
    let sol = p.solve(&cfg.options());
    if !sol.x.iter().all(|v| v.is_finite()) {
        return Err(Error::Solver("interior point iteration broke down".into()));
    }
    let mut v = nonzero_columns(&psd_factor(&sol.x, CLIP));
    for i in 0..dim {
        let r = v.row(i).norm();
        if r > 1.0 {
            v.row_mut(i).scale_mut(1.0 / r);
        }
    }
    let u = v.rows(0, m).into_owned();
    let w = v.rows(m, n).into_owned();
    let lower = (&u * w.transpose()).component_mul(mat).sum();
    let mut d = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        d[(i, i)] = -sol.y[i];
    }
    let shift = max_eigenvalue(&(&bmat - &d)).max(0.0);
    let upper = -sol.y.sum() + shift * dim as f64;
    let mut cert = NormCertificate::bracket("gamma2_dual", lower, upper);
    cert.factor_rows = rows_of(&u);
    cert.factor_cols = rows_of(&w);
    Ok(cert)
}

#[derive(Clone, Debug, Serialize)]
pub struct GdmBound {
    pub value: f64,
    pub epsilon: String,
    /// `eps / (1 - eps)`.
    pub eps_prime: String,
    pub total: bool,
    pub gamma: NormCertificate,
}

/// Generalized-discrepancy value: `log2(gamma_{2,e'}(F)) / 4` for total `F`,
/// `log2(gamma_{2,e'}(F)) - 3` otherwise, floored at 0, with `e' = eps/(1-eps)`.
pub fn gdm_bound(f: &PartialSignMatrix, eps: &Rational, cfg: &NormConfig) -> Result<GdmBound> {
    let half = Rational::new(1.into(), 2.into());
    if eps <= &Rational::from_integer(0.into()) || eps >= &half {
        return Err(Error::OutOfRange(format!("epsilon {eps} outside (0, 1/2)")));
    }
    let eps_prime = eps / (Rational::from_integer(1.into()) - eps);
    let gamma = gamma2_eps(f, to_f64(&eps_prime), cfg)?;
    let total = f.is_total();
    let log = gamma.value.max(f64::MIN_POSITIVE).log2();
    let value = if total { 0.25 * log } else { log - 3.0 }.max(0.0);
    Ok(GdmBound {
        value,
        epsilon: crate::rational::format_rational(eps),
        eps_prime: crate::rational::format_rational(&eps_prime),
        total,
        gamma,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrorReduction {
    pub epsilon: String,
    pub polynomial: UnivariatePolynomial,
    pub base: NormCertificate,
    /// `sum |a_i| gamma_2(A)^i` with `gamma_2(A)` bounded by the base certificate.
    pub bound: f64,
    /// `max |F_ij - B_ij|`.
    pub max_deviation: f64,
    pub ok: bool,
}

/// Upper bound on `gamma_{2,eps}(F)` obtained from a `gamma_{2,1/4}` approximant
/// `A` through entrywise application of an odd polynomial.
pub fn gamma2_error_reduce(f: &PartialSignMatrix, eps: &Rational, cfg: &NormConfig) -> Result<ErrorReduction> {
    let real = f.to_real()?;
    if f.rank()? < 2 {
        return Err(Error::InvalidInput("sign matrix of rank 1 has no error-reduction step".into()));
    }
    let poly = hadamard_reduction_poly(eps)?;
    let base = gamma2_eps(f, 0.25, cfg)?;
    let a = base.approximant.clone().expect("approximant");
    let g = base.upper;
    let coeffs: Vec<f64> = poly.coefficients().iter().map(to_f64).collect();
    let mut b = DMatrix::zeros(a.nrows(), a.ncols());
    let mut power = DMatrix::from_element(a.nrows(), a.ncols(), 1.0);
    let mut bound = 0.0;
    for (i, c) in coeffs.iter().enumerate() {
        if i > 0 {
            power = power.component_mul(&a);
        }
        b += &power * *c;
        bound += c.abs() * g.powi(i as i32);
    }
    let max_deviation = max_abs(&(&real - &b));
    Ok(ErrorReduction {
        epsilon: crate::rational::format_rational(eps),
        polynomial: poly,
        ok: max_deviation <= to_f64(eps) + 1e-9,
        base,
        bound,
        max_deviation,
    })
}

/// Constants of a norm used by the generic tensor-product bounds: `C1` from the
/// tensor inequality and `C2` from domination of the entrywise maximum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormContext {
    pub c1: f64,
    pub c2: f64,
}

pub trait NormOracle {
    fn name(&self) -> &'static str;
    fn context(&self) -> NormContext;
    fn norm(&self, m: &DMatrix<f64>) -> Result<f64>;
    /// Least norm of a matrix within `eps` of `F` on its defined entries.
    fn approx_norm(&self, f: &PartialSignMatrix, eps: f64) -> Result<f64>;
}

pub struct Gamma2Oracle(pub NormConfig);

impl NormOracle for Gamma2Oracle {
    fn name(&self) -> &'static str {
        "gamma2"
    }

    fn context(&self) -> NormContext {
        NormContext { c1: 1.0, c2: 1.0 }
    }

    fn norm(&self, m: &DMatrix<f64>) -> Result<f64> {
        Ok(gamma2(m, &self.0)?.value)
    }

    fn approx_norm(&self, f: &PartialSignMatrix, eps: f64) -> Result<f64> {
        Ok(gamma2_eps(f, eps, &self.0)?.value)
    }
}

/// Entrywise maximum, for exercising the generic interface.
pub struct LinfOracle;

impl NormOracle for LinfOracle {
    fn name(&self) -> &'static str {
        "linf"
    }

    fn context(&self) -> NormContext {
        NormContext { c1: 1.0, c2: 1.0 }
    }

    fn norm(&self, m: &DMatrix<f64>) -> Result<f64> {
        Ok(max_abs(m))
    }

    fn approx_norm(&self, f: &PartialSignMatrix, eps: f64) -> Result<f64> {
        Ok(if f.is_all_star() { 0.0 } else { (1.0 - eps).max(0.0) })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Fact23Item {
    pub item: String,
    pub instance: String,
    pub lhs: f64,
    pub rhs: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn item(name: &str, instance: String, lhs: f64, rhs: f64, tolerance: f64) -> Fact23Item {
    Fact23Item { item: name.into(), instance, lhs, rhs, tolerance, pass: lhs >= rhs - tolerance }
}

fn random_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0))
}

fn fmt_matrix(m: &DMatrix<f64>) -> String {
    let rows: Vec<String> = (0..m.nrows())
        .map(|i| m.row(i).iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>().join(","))
        .collect();
    format!("[{}]", rows.join(";"))
}

/// Standard properties of `gamma_2` checked on structured and seeded random instances.
/// Each item reports `lhs >= rhs - tolerance`; equalities appear as two items.
pub fn fact23_suite(seed: u64, cfg: &NormConfig) -> Result<Vec<Fact23Item>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let g = |m: &DMatrix<f64>| gamma2(m, cfg);
    let tol = |a: &NormCertificate, b: &NormCertificate| a.gap + b.gap + 1e-7 * (1.0 + a.value.max(b.value));

    for trial in 0..3 {
        let a = random_matrix(3, 4, &mut rng);
        let ga = g(&a)?;
        let d1: Vec<f64> = (0..3).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect();
        let d2: Vec<f64> = (0..4).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect();
        let scaled = DMatrix::from_fn(3, 4, |i, j| a[(i, j)] * d1[i] * d2[j]);
        let gs = g(&scaled)?;
        let inst = format!("random#{trial} {}", fmt_matrix(&a));
        out.push(item("signature_scaling", inst.clone(), gs.value, ga.value, tol(&ga, &gs)));
        out.push(item("signature_scaling", inst.clone(), ga.value, gs.value, tol(&ga, &gs)));

        let sub = a.view((0, 1), (2, 3)).into_owned();
        let gsub = g(&sub)?;
        out.push(item("submatrix", inst.clone(), ga.value, gsub.value, tol(&ga, &gsub)));

        let mut dup = DMatrix::zeros(4, 5);
        for i in 0..4 {
            for j in 0..5 {
                dup[(i, j)] = a[(i.min(2), j.min(3))];
            }
        }
        let gd = g(&dup)?;
        out.push(item("duplication", inst.clone(), gd.value, ga.value, tol(&ga, &gd)));
        out.push(item("duplication", inst.clone(), ga.value, gd.value, tol(&ga, &gd)));

        out.push(item("entry_bound", inst.clone(), ga.value, max_abs(&a), ga.gap + 1e-7));
        let norms = classic_matrix_norms(&a);
        out.push(item("trace_bound", inst.clone(), ga.value, norms.trace / 12f64.sqrt(), ga.gap + 1e-7));
        let gdual = gamma2_dual(&a, cfg)?;
        out.push(item("dual_trace_bound", inst.clone(), norms.trace * 12f64.sqrt(), gdual.value, gdual.gap + 1e-7));

        let b = random_matrix(3, 3, &mut rng);
        let c = random_matrix(3, 3, &mut rng);
        let (gb, gc) = (g(&b)?, g(&c)?);
        let gk = g(&b.kronecker(&c))?;
        let pair = format!("random#{trial} {} {}", fmt_matrix(&b), fmt_matrix(&c));
        let t3 = gb.gap * gc.value + gc.gap * gb.value + gk.gap + 1e-7 * (1.0 + gk.value);
        out.push(item("tensor", pair.clone(), gb.value * gc.value, gk.value, t3));
        let gh = g(&b.component_mul(&c))?;
        let t4 = gb.gap * gc.value + gc.gap * gb.value + gh.gap + 1e-7 * (1.0 + gh.value);
        out.push(item("hadamard_product", pair, gb.value * gc.value, gh.value, t4));
    }

    let structured = [
        PartialSignMatrix::hadamard(1),
        PartialSignMatrix::hadamard(2),
        PartialSignMatrix::identity_sign(3),
        PartialSignMatrix::disjointness(2),
    ];
    for f in &structured {
        let a = f.to_real()?;
        let (r, c) = a.shape();
        let name = format!("{f:?}");
        let ga = g(&a)?;
        let norms = classic_matrix_norms(&a);
        out.push(item("entry_bound", name.clone(), ga.value, 1.0, ga.gap + 1e-7));
        out.push(item("trace_bound", name.clone(), ga.value, norms.trace / ((r * c) as f64).sqrt(), ga.gap + 1e-7));
        for eps in [0.0, 0.25, 0.5] {
            let ge = gamma2_eps(f, eps, cfg)?;
            let rhs = (1.0 - eps) * ((r * c) as f64).sqrt() / norms.spectral;
            out.push(item("eps_spectral_bound", format!("{name} eps={eps}"), ge.value, rhs, ge.gap + 1e-7));
        }
        let mut dup = DMatrix::zeros(r + 1, c);
        for i in 0..=r {
            dup.set_row(i, &a.row(i.min(r - 1)));
        }
        let gd = g(&dup)?;
        out.push(item("duplication", name.clone(), gd.value, ga.value, tol(&ga, &gd)));
        out.push(item("duplication", name, ga.value, gd.value, tol(&ga, &gd)));
    }
    Ok(out)
}

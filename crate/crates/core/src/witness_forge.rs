//! Composite dual witnesses built from per-instance witnesses, with exact
//! evaluation of the inequalities that accompany them.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::Serialize;

use crate::approx_lp::parity::parity_error;
use crate::approx_lp::{symmetrize_to_cube, SymmetrizedPolynomial, UnivariatePolynomial};
use crate::boolean_core::{
    eval_symmetric, eval_symmetric_f64, join_point, split_point, DualWitness, MultilinearPolynomial,
    PartialBooleanFunction, ProductDistribution, TableEntry, MAX_VARS,
};
use crate::error::{Error, Result};
use crate::rational::{binomial, factorial, format_rational, int, pow, Rational};

/// `p_k(z) = (-1)^k prod_{i=1..k} (|z| - i)` on the cube, with its multilinear extension.
#[derive(Clone, Debug)]
pub struct SymmetricFallingPolynomial {
    n: usize,
    k: usize,
    levels: Vec<Rational>,
    fourier: SymmetrizedPolynomial,
}

pub fn pk_poly(n: usize, k: usize) -> Result<SymmetricFallingPolynomial> {
    if n == 0 || k >= n {
        return Err(Error::OutOfRange(format!("need 0 <= k <= n - 1 (n={n}, k={k})")));
    }
    let mut q = UnivariatePolynomial::constant(int(if k.is_multiple_of(2) { 1 } else { -1 }));
    for i in 1..=k {
        q = q.mul(&UnivariatePolynomial::linear_root(&int(i as i64)));
    }
    let levels = (0..=n).map(|j| q.eval(&int(j as i64))).collect();
    let fourier = symmetrize_to_cube(&q, n)?;
    Ok(SymmetricFallingPolynomial { n, k, levels, fourier })
}

impl SymmetricFallingPolynomial {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Value at any vertex with `j` coordinates equal to `-1`.
    pub fn levels(&self) -> &[Rational] {
        &self.levels
    }

    pub fn level(&self, j: usize) -> &Rational {
        &self.levels[j]
    }

    pub fn fourier_l1(&self) -> &Rational {
        &self.fourier.fourier_l1
    }

    /// `k! C(n+k, k)`.
    pub fn l1_bound(&self) -> BigInt {
        factorial(self.k as u64) * binomial((self.n + self.k) as i64, self.k as i64)
    }

    pub fn l1_ok(&self) -> bool {
        *self.fourier_l1() <= Rational::from_integer(self.l1_bound())
    }

    pub fn degree(&self) -> Option<usize> {
        self.fourier.degree
    }

    /// Dense Fourier form (available for small `n`).
    pub fn multilinear(&self) -> Option<&MultilinearPolynomial> {
        self.fourier.dense.as_ref()
    }

    pub fn eval(&self, z: &[Rational]) -> Result<Rational> {
        eval_symmetric(&self.levels, z)
    }

    pub fn eval_f64(&self, z: &[f64]) -> f64 {
        let levels: Vec<f64> = self.levels.iter().map(crate::rational::to_f64).collect();
        eval_symmetric_f64(&levels, z)
    }

    /// `p_k(c, c, ..., c)`.
    pub fn eval_diagonal(&self, c: &Rational) -> Rational {
        let bias = (Rational::one() - c) / int(2);
        ProductDistribution::uniform_bias(self.n, bias).expect("bias in range").expect_level(&self.levels)
    }

    pub fn expectation_abs(&self, mu: &ProductDistribution) -> Rational {
        let abs: Vec<Rational> = self.levels.iter().map(|v| v.abs()).collect();
        mu.expect_level(&abs)
    }

    /// `p_k(1^n) mu(1^n) {1 + C(n,k+1) eta^{k+1} / (1-eta)^n}` with `eta = max eta_i`.
    pub fn expectation_bound(&self, etas: &[Rational]) -> Rational {
        let eta = etas.iter().max().cloned().unwrap_or_else(Rational::zero);
        let mu_ones: Rational = etas.iter().map(|e| Rational::one() - e).product();
        let tail = Rational::from_integer(binomial(self.n as i64, self.k as i64 + 1)) * pow(&eta, self.k as u32 + 1)
            / pow(&(Rational::one() - &eta), self.n as u32);
        &self.levels[0] * mu_ones * (Rational::one() + tail)
    }

    /// Exact vertex values: `k!` at level 0, zero on levels `1..=k`, and the
    /// binomial form together with its upper bound above level `k`.
    pub fn vertex_values_ok(&self) -> bool {
        let (n, k) = (self.n as i64, self.k as i64);
        let kf = Rational::from_integer(factorial(self.k as u64));
        if self.levels[0] != kf {
            return false;
        }
        (1..=n).all(|j| {
            let v = self.levels[j as usize].abs();
            if j <= k {
                return v.is_zero();
            }
            let exact = &kf * Rational::from_integer(binomial(j - 1, k));
            let bound = &kf
                * Rational::new(binomial(n, k + 1) * binomial(n - k - 1, j - k - 1), binomial(n, j));
            v == exact && v <= bound
        })
    }

    /// Agreement of the level values with the dense Fourier form at every vertex.
    pub fn dense_form_ok(&self) -> Option<bool> {
        self.multilinear().map(|p| {
            p.to_table().iter().enumerate().all(|(x, v)| *v == self.levels[x.count_ones() as usize])
        })
    }

    /// Nonnegativity of the extension at `samples` random dyadic interior points
    /// and at every vertex (meaningful for even `k`).
    pub fn nonnegative_on_samples(&self, samples: usize, rng: &mut impl Rng) -> bool {
        if self.levels.iter().any(|v| v.is_negative()) {
            return false;
        }
        let den = BigInt::from(1u32 << 12);
        (0..samples).all(|_| {
            let z: Vec<Rational> = (0..self.n)
                .map(|_| Rational::new(BigInt::from(rng.gen_range(-4095i64..=4095)), den.clone()))
                .collect();
            !self.eval(&z).expect("arity").is_negative()
        })
    }

    pub fn summary(&self) -> PkSummary {
        PkSummary {
            n: self.n,
            k: self.k,
            levels: self.levels.iter().map(format_rational).collect(),
            fourier_l1: format_rational(self.fourier_l1()),
            l1_bound: self.l1_bound().to_string(),
            l1_ok: self.l1_ok(),
            vertex_values_ok: self.vertex_values_ok(),
            dense_form_ok: self.dense_form_ok(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PkSummary {
    pub n: usize,
    pub k: usize,
    pub levels: Vec<String>,
    pub fourier_l1: String,
    pub l1_bound: String,
    pub l1_ok: bool,
    pub vertex_values_ok: bool,
    pub dense_form_ok: Option<bool>,
}

/// An exact inequality `lhs > rhs` (or `>=` when not strict).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactInequality {
    #[serde(serialize_with = "crate::rational::serde_rational")]
    pub lhs: Rational,
    #[serde(serialize_with = "crate::rational::serde_rational")]
    pub rhs: Rational,
    pub strict: bool,
    pub holds: bool,
}

impl ExactInequality {
    pub fn new(lhs: Rational, rhs: Rational, strict: bool) -> Self {
        let holds = if strict { lhs > rhs } else { lhs >= rhs };
        Self { lhs, rhs, strict, holds }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    PsiK,
    PhiEll,
    Zeta,
}

#[derive(Clone, Debug)]
pub struct CompositeWitness {
    pub kind: WitnessKind,
    pub params: BTreeMap<String, String>,
    pub witness: DualWitness,
    pub checks: BTreeMap<String, bool>,
}

#[derive(Serialize)]
struct WitnessDump<'a> {
    kind: WitnessKind,
    params: &'a BTreeMap<String, String>,
    table: Vec<TableEntry>,
    l1_num: String,
    l1_den: String,
    phd_order: usize,
    checks: &'a BTreeMap<String, bool>,
}

impl CompositeWitness {
    fn new(kind: WitnessKind, table: Vec<Rational>) -> Result<Self> {
        Ok(Self { kind, params: BTreeMap::new(), witness: DualWitness::new(table)?, checks: BTreeMap::new() })
    }

    fn param(&mut self, key: &str, value: impl ToString) {
        self.params.insert(key.into(), value.to_string());
    }

    fn check(&mut self, key: &str, ok: bool) {
        self.checks.insert(key.into(), ok);
    }

    pub fn table(&self) -> &[Rational] {
        self.witness.table()
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks.values().all(|&b| b)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let l1 = self.witness.l1_norm();
        serde_json::to_value(WitnessDump {
            kind: self.kind,
            params: &self.params,
            table: self.witness.entries(),
            l1_num: l1.numer().to_string(),
            l1_den: l1.denom().to_string(),
            phd_order: self.witness.phd_order(),
            checks: &self.checks,
        })
        .expect("serialisable")
    }
}

fn arities_of(psis: &[DualWitness]) -> Result<(Vec<usize>, usize)> {
    let arities: Vec<usize> = psis.iter().map(|p| p.num_vars()).collect();
    let total: usize = arities.iter().sum();
    if total > MAX_VARS {
        return Err(Error::TooLarge(format!("{total} variables (max {MAX_VARS})")));
    }
    Ok((arities, total))
}

fn sign(v: &Rational) -> i8 {
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

/// Sum of the `count` smallest entries (0 when `count == 0`).
pub fn smallest_sum(values: &[usize], count: usize) -> usize {
    let mut v = values.to_vec();
    v.sort_unstable();
    v.iter().take(count).sum()
}

/// Extension of `g` by `-sgn~ psi` off its domain, where `sgn~ 0 = 1`.
pub fn extend_by_witness(g: &PartialBooleanFunction, psi: &DualWitness) -> Result<PartialBooleanFunction> {
    g.extend(|x| if psi.value(x).is_negative() { 1 } else { -1 })
}

fn check_unit_witness(i: usize, psi: &DualWitness, g: &PartialBooleanFunction, eps: &Rational) -> Result<()> {
    if psi.num_vars() != g.num_vars() {
        return Err(Error::Precondition { index: i, reason: "witness and function have different arity".into() });
    }
    if !psi.l1_norm().is_one() {
        return Err(Error::Precondition { index: i, reason: format!("l1 norm is {}, not 1", psi.l1_norm()) });
    }
    let corr = psi.correlation(g)?;
    if corr <= Rational::one() - eps {
        return Err(Error::Precondition {
            index: i,
            reason: format!("correlation {} does not exceed 1 - eps = {}", corr, Rational::one() - eps),
        });
    }
    Ok(())
}

/// `Psi_k(x) = p_k(..., f_i(x_i) sgn psi_i(x_i), ...) prod psi_i(x_i)` with its metadata.
#[derive(Clone, Debug)]
pub struct PsiK {
    pub composite: CompositeWitness,
    pub pk: SymmetricFallingPolynomial,
    pub extensions: Vec<PartialBooleanFunction>,
    /// `eta_i = 1/2 - <f_i, psi_i>/2`.
    pub etas: Vec<Rational>,
    pub epsilon: Rational,
    /// `min over |S| = n - k` of the summed orders of the `psi_i`.
    pub claimed_order: usize,
}

pub fn build_psi_k(psis: &[DualWitness], gs: &[PartialBooleanFunction], k: usize, eps: &Rational) -> Result<PsiK> {
    let n = psis.len();
    if n == 0 || gs.len() != n {
        return Err(Error::Arity { expected: n, actual: gs.len() });
    }
    if eps <= &Rational::zero() || eps >= &Rational::one() {
        return Err(Error::OutOfRange(format!("epsilon {eps} outside (0, 1)")));
    }
    for (i, (psi, g)) in psis.iter().zip(gs).enumerate() {
        check_unit_witness(i, psi, g, eps)?;
    }
    let pk = pk_poly(n, k)?;
    let (arities, total) = arities_of(psis)?;
    let extensions = gs.iter().zip(psis).map(|(g, p)| extend_by_witness(g, p)).collect::<Result<Vec<_>>>()?;
    let table: Vec<Rational> = (0..1usize << total)
        .map(|x| {
            let parts = split_point(x, &arities);
            let mut prod = Rational::one();
            let mut level = 0;
            for (i, &xi) in parts.iter().enumerate() {
                let v = psis[i].value(xi);
                if v.is_zero() {
                    return Rational::zero();
                }
                prod *= v;
                if extensions[i].get(xi) != Some(sign(v)) {
                    level += 1;
                }
            }
            pk.level(level) * prod
        })
        .collect();
    let etas: Vec<Rational> = extensions
        .iter()
        .zip(psis)
        .map(|(f, p)| (Rational::one() - p.correlation(f).expect("arity")) / int(2))
        .collect();
    let orders: Vec<usize> = psis.iter().map(|p| p.phd_order()).collect();
    let claimed_order = smallest_sum(&orders, n - k);

    let mut composite = CompositeWitness::new(WitnessKind::PsiK, table)?;
    composite.param("n", n);
    composite.param("k", k);
    composite.param("epsilon", format_rational(eps));
    composite.param("claimed_order", claimed_order);
    let mu = ProductDistribution::new(etas.clone())?;
    let l1_ok = *composite.witness.l1_norm() == pk.expectation_abs(&mu);
    composite.check("l1_equals_expectation", l1_ok);
    composite.check("order_at_least_claimed", composite.witness.phd_order() >= claimed_order);
    composite.check("order_exact", composite.witness.verify_order());
    composite.check("eta_below_half_eps", etas.iter().all(|e| e * int(2) < *eps));
    Ok(PsiK { composite, pk, extensions, etas, epsilon: eps.clone(), claimed_order })
}

fn product_of(gs: &[PartialBooleanFunction], arities: &[usize], x: usize) -> Option<i8> {
    split_point(x, arities).iter().zip(gs).try_fold(1i8, |acc, (&xi, g)| g.get(xi).map(|v| acc * v))
}

impl PsiK {
    pub fn n(&self) -> usize {
        self.etas.len()
    }

    /// The two sides of the correlation bound
    /// `sum_dom Psi prod g - sum_off |Psi| - delta ||Psi||_1 > k! (1-eps/2)^n {1 - delta - (1+delta) C(n,k+1) (eps/2)^{k+1} / (1-eps/2)^n}`.
    pub fn correlation_bound(&self, gs: &[PartialBooleanFunction], delta: &Rational) -> ExactInequality {
        let arities: Vec<usize> = gs.iter().map(|g| g.num_vars()).collect();
        let psi = &self.composite.witness;
        let mut lhs = Rational::zero();
        for (x, v) in psi.table().iter().enumerate() {
            match product_of(gs, &arities, x) {
                Some(s) => lhs += v * int(s as i64),
                None => lhs -= v.abs(),
            }
        }
        lhs -= delta * psi.l1_norm();
        let rhs = self.correlation_rhs(delta);
        ExactInequality::new(lhs, rhs, true)
    }

    fn correlation_rhs(&self, delta: &Rational) -> Rational {
        let (n, k) = (self.n(), self.pk.k());
        let half = &self.epsilon / int(2);
        let base = Rational::from_integer(factorial(k as u64)) * pow(&(Rational::one() - &half), n as u32);
        let tail = tail_term(n, k, &half);
        base * (Rational::one() - delta - (Rational::one() + delta) * tail)
    }
}

/// `C(n, k+1) h^{k+1} / (1-h)^n`.
pub fn tail_term(n: usize, k: usize, h: &Rational) -> Rational {
    Rational::from_integer(binomial(n as i64, k as i64 + 1)) * pow(h, k as u32 + 1) / pow(&(Rational::one() - h), n as u32)
}

/// `Phi_ell(x) = sum_z phi_z(x) q(..., z_i f_i(x_i), ...) prod z_i` with `q(w) = Q(|w|)`.
#[derive(Clone, Debug)]
pub struct PhiEll {
    pub table: Vec<Rational>,
    pub q: UnivariatePolynomial,
    pub m: usize,
    /// Achieved parity-approximation error of `Q` with slack `m`.
    pub q_delta: Rational,
    pub q_range_ok: bool,
    pub linf: Rational,
    pub composite: CompositeWitness,
}

pub fn build_phi_ell(
    system: &[MultilinearPolynomial],
    fs: &[PartialBooleanFunction],
    q: &UnivariatePolynomial,
    m: usize,
) -> Result<PhiEll> {
    let n = fs.len();
    if system.len() != 1 << n {
        return Err(Error::Arity { expected: 1 << n, actual: system.len() });
    }
    if let Some(i) = fs.iter().position(|f| !f.is_total()) {
        return Err(Error::Precondition { index: i, reason: "extension must be total".into() });
    }
    let arities: Vec<usize> = fs.iter().map(|f| f.num_vars()).collect();
    let total: usize = arities.iter().sum();
    if total > MAX_VARS {
        return Err(Error::TooLarge(format!("{total} variables (max {MAX_VARS})")));
    }
    if let Some(z) = system.iter().position(|p| p.num_vars() != total) {
        return Err(Error::Precondition { index: z, reason: "polynomial on the wrong number of variables".into() });
    }
    let tables: Vec<Vec<Rational>> = system.iter().map(|p| p.to_table()).collect();
    for x in 0..1usize << total {
        let mass: Rational = tables.iter().map(|t| t[x].abs()).sum();
        if mass > Rational::one() {
            return Err(Error::Precondition {
                index: x,
                reason: format!("total mass {mass} of the system exceeds 1 at this point"),
            });
        }
    }
    let qvals: Vec<Rational> = (0..=n).map(|j| q.eval(&int(j as i64))).collect();
    let table: Vec<Rational> = (0..1usize << total)
        .map(|x| {
            let parts = split_point(x, &arities);
            let fmask = parts
                .iter()
                .enumerate()
                .fold(0usize, |acc, (i, &xi)| if fs[i].get(xi) == Some(-1) { acc | 1 << i } else { acc });
            (0..1usize << n)
                .filter(|&z| !tables[z][x].is_zero())
                .map(|z| {
                    let v = &tables[z][x] * &qvals[(z ^ fmask).count_ones() as usize];
                    if z.count_ones() % 2 == 0 {
                        v
                    } else {
                        -v
                    }
                })
                .sum()
        })
        .collect();
    let (q_delta, q_range_ok) = parity_error(q, n, m);
    let linf = table.iter().map(|v| v.abs()).max().unwrap_or_else(Rational::zero);
    let mut composite = CompositeWitness::new(WitnessKind::PhiEll, table.clone())?;
    composite.param("n", n);
    composite.param("m", m);
    composite.param("q_delta", format_rational(&q_delta));
    composite.check("sup_norm_at_most_one", linf <= Rational::one());
    Ok(PhiEll { table, q: q.clone(), m, q_delta, q_range_ok, linf, composite })
}

impl PhiEll {
    /// `max_{x in prod dom g_i} |Phi(x) - prod g_i(x_i)| <= 1 - sigma + delta_Q`.
    pub fn approximation_bound(&self, gs: &[PartialBooleanFunction], sigma: &Rational) -> ExactInequality {
        let arities: Vec<usize> = gs.iter().map(|g| g.num_vars()).collect();
        let worst = self
            .table
            .iter()
            .enumerate()
            .filter_map(|(x, v)| product_of(gs, &arities, x).map(|s| (v - int(s as i64)).abs()))
            .max()
            .unwrap_or_else(Rational::zero);
        let bound = Rational::one() - sigma + &self.q_delta;
        ExactInequality::new(bound, worst, false)
    }

    pub fn inner(&self, other: &[Rational]) -> Rational {
        self.table.iter().zip(other).map(|(a, b)| a * b).sum()
    }

    /// `<Phi, Psi_k> > k!(1-eps/2)^n {2 - (2 - sigma + delta_Q)(1 + C(n,k+1)(eps/2)^{k+1}/(1-eps/2)^n)}`.
    pub fn correlation_bound(&self, psi: &PsiK, sigma: &Rational) -> ExactInequality {
        let (n, k) = (psi.n(), psi.pk.k());
        let half = &psi.epsilon / int(2);
        let base = Rational::from_integer(factorial(k as u64)) * pow(&(Rational::one() - &half), n as u32);
        let factor = Rational::one() + tail_term(n, k, &half);
        let rhs = base * (int(2) - (int(2) - sigma + &self.q_delta) * factor);
        ExactInequality::new(self.inner(psi.composite.table()), rhs, true)
    }
}

/// `zeta(x) = Psi(..., sgn psi_i(x_i), ...) p_k(..., alpha_i(x_i), ...) prod |psi_i(x_i)|`.
#[derive(Clone, Debug)]
pub struct Zeta {
    pub composite: CompositeWitness,
    /// `(eps_{i,+1}, eps_{i,-1})` per coordinate.
    pub conditional_errors: Vec<(Rational, Rational)>,
    pub claimed_order: usize,
    /// `2^{-n} p_k(1 - 2 eps, ..., 1 - 2 eps)`.
    pub expected_l1: Rational,
    /// Exact correlation with `F(f_1, ..., f_n)` against the lower bound
    /// `2^{-n} p_k(1-2eps) {delta - 2 eps^{k+1}/(1-eps)^n C(n,k+1)}`.
    pub correlation: ExactInequality,
    pub composed: PartialBooleanFunction,
    /// `delta - C(n,k+1) 2 eps^{k+1} / (1-eps)^n`.
    pub reduced_error: Rational,
}

#[allow(clippy::too_many_arguments)]
pub fn build_zeta(
    outer_witness: &DualWitness,
    outer: &PartialBooleanFunction,
    delta: &Rational,
    psis: &[DualWitness],
    fs: &[PartialBooleanFunction],
    eps: &Rational,
    k: usize,
) -> Result<Zeta> {
    let n = psis.len();
    if k % 2 == 1 {
        return Err(Error::OutOfRange(format!("k = {k} must be even")));
    }
    if outer.num_vars() != n || outer_witness.num_vars() != n || fs.len() != n {
        return Err(Error::Arity { expected: n, actual: outer.num_vars() });
    }
    if !outer_witness.l1_norm().is_one() {
        return Err(Error::InvalidInput("outer witness must have unit l1 norm".into()));
    }
    if outer_witness.correlation(outer)? <= *delta {
        return Err(Error::InvalidInput("outer witness correlation does not exceed delta".into()));
    }
    if outer_witness.phd_order() == 0 {
        return Err(Error::InvalidInput("outer witness has order 0".into()));
    }
    if eps <= &Rational::zero() || eps >= &Rational::one() {
        return Err(Error::OutOfRange(format!("epsilon {eps} outside (0, 1)")));
    }
    for (i, (psi, f)) in psis.iter().zip(fs).enumerate() {
        if !f.is_total() {
            return Err(Error::Precondition { index: i, reason: "inner function must be total".into() });
        }
        check_unit_witness(i, psi, f, eps)?;
        if psi.phd_order() == 0 {
            return Err(Error::Precondition { index: i, reason: "witness is not orthogonal to constants".into() });
        }
    }
    let pk = pk_poly(n, k)?;
    let (arities, total) = arities_of(psis)?;
    let one = Rational::one();
    let two_eps = eps * int(2);

    let mut conditional_errors = Vec::with_capacity(n);
    let mut alphas: Vec<Vec<Rational>> = Vec::with_capacity(n);
    let mut balance_ok = true;
    let mut alpha_mean_ok = true;
    for (psi, f) in psis.iter().zip(fs) {
        let mut mass = [Rational::zero(), Rational::zero()];
        let mut wrong = [Rational::zero(), Rational::zero()];
        for (x, v) in psi.table().iter().enumerate() {
            let s = sign(v);
            if s == 0 {
                continue;
            }
            let idx = usize::from(s < 0);
            mass[idx] += v.abs();
            if f.get(x) != Some(s) {
                wrong[idx] += v.abs();
            }
        }
        balance_ok &= mass[0] == Rational::new(1.into(), 2.into()) && mass[1] == mass[0];
        let e_plus = &wrong[0] / &mass[0];
        let e_minus = &wrong[1] / &mass[1];
        let a_plus = (&one - &two_eps + &e_plus) / (&one - &e_plus);
        let a_minus = (&one - &two_eps + &e_minus) / (&one - &e_minus);
        let alpha: Vec<Rational> = psi
            .table()
            .iter()
            .enumerate()
            .map(|(x, v)| match (sign(v), f.get(x)) {
                (1, Some(1)) => a_plus.clone(),
                (-1, Some(-1)) => a_minus.clone(),
                _ => -one.clone(),
            })
            .collect();
        for (s, m) in [(1i8, &mass[0]), (-1i8, &mass[1])] {
            let mean: Rational = psi
                .table()
                .iter()
                .zip(&alpha)
                .filter(|(v, _)| sign(v) == s)
                .map(|(v, a)| v.abs() * a)
                .sum::<Rational>()
                / m;
            alpha_mean_ok &= mean == &one - &two_eps;
        }
        conditional_errors.push((e_plus, e_minus));
        alphas.push(alpha);
    }

    let table: Vec<Rational> = (0..1usize << total)
        .map(|x| {
            let parts = split_point(x, &arities);
            let mut weight = Rational::one();
            let mut zmask = 0usize;
            let mut args = Vec::with_capacity(n);
            for (i, &xi) in parts.iter().enumerate() {
                let v = psis[i].value(xi);
                if v.is_zero() {
                    return Rational::zero();
                }
                weight *= v.abs();
                if v.is_negative() {
                    zmask |= 1 << i;
                }
                args.push(alphas[i][xi].clone());
            }
            let outer_value = outer_witness.value(zmask);
            if outer_value.is_zero() {
                return Rational::zero();
            }
            outer_value * pk.eval(&args).expect("arity") * weight
        })
        .collect();

    let scale = Rational::new(1.into(), BigInt::one() << n);
    let pk_center = pk.eval_diagonal(&(&one - &two_eps));
    let expected_l1 = &scale * &pk_center;
    let d = outer_witness.phd_order();
    let orders: Vec<usize> = psis.iter().map(|p| p.phd_order()).collect();
    let claimed_order = if d > k { smallest_sum(&orders, d - k) } else { 0 };
    let composed = crate::boolean_core::compose(outer, fs)?;
    let mut composite = CompositeWitness::new(WitnessKind::Zeta, table)?;
    let corr = composite.witness.correlation(&composed)?;
    let tail = Rational::from_integer(binomial(n as i64, k as i64 + 1)) * int(2) * pow(eps, k as u32 + 1)
        / pow(&(&one - eps), n as u32);
    let reduced_error = delta - &tail;
    let correlation = ExactInequality::new(corr, &expected_l1 * &reduced_error, true);

    composite.param("n", n);
    composite.param("k", k);
    composite.param("epsilon", format_rational(eps));
    composite.param("delta", format_rational(delta));
    composite.param("outer_order", d);
    composite.param("claimed_order", claimed_order);
    composite.check("l1_equals_claim", *composite.witness.l1_norm() == expected_l1);
    composite.check("order_at_least_claimed", composite.witness.phd_order() >= claimed_order);
    composite.check("order_exact", composite.witness.verify_order());
    composite.check("sign_balance", balance_ok);
    composite.check("alpha_means", alpha_mean_ok);
    composite.check("correlation_bound", correlation.holds);
    Ok(Zeta { composite, conditional_errors, claimed_order, expected_l1, correlation, composed, reduced_error })
}

/// Joins per-factor points into a product-space point.
pub fn product_point(parts: &[usize], witnesses: &[DualWitness]) -> usize {
    let arities: Vec<usize> = witnesses.iter().map(|w| w.num_vars()).collect();
    join_point(parts, &arities)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx_lp::{approx_degree, dual_witness_at, indicator_system, parity_approximant, ParityMethod};
    use crate::boolean_core::{tensor_xor, ProductDistribution};
    use crate::rational::ratio;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unit_witness(f: &PartialBooleanFunction, eps: &Rational) -> DualWitness {
        let d = approx_degree(f, &(Rational::one() - eps)).unwrap().degree;
        dual_witness_at(f, &(Rational::one() - eps), d - 1).unwrap().unwrap()
    }

    #[test]
    fn pk_basic_values() {
        let p0 = pk_poly(4, 0).unwrap();
        assert!(p0.levels().iter().all(|v| v.is_one()));
        for n in 1..=7 {
            for k in 0..n {
                let p = pk_poly(n, k).unwrap();
                assert!(p.vertex_values_ok());
                assert!(p.l1_ok());
                assert_eq!(p.dense_form_ok(), Some(true));
                assert_eq!(p.degree(), Some(k));
            }
        }
        assert!(pk_poly(3, 3).is_err());
    }

    #[test]
    fn pk_expectation_bound_exhaustive() {
        let p = pk_poly(6, 2).unwrap();
        let dense = p.multilinear().unwrap().to_table();
        for eta in [ratio(1, 10), ratio(3, 10)] {
            let mu = ProductDistribution::uniform_bias(6, eta.clone()).unwrap();
            let brute: Rational = (0..64).map(|x| mu.prob(x) * dense[x].abs()).sum();
            assert_eq!(brute, p.expectation_abs(&mu));
            assert!(brute <= p.expectation_bound(&vec![eta.clone(); 6]));
        }
    }

    #[test]
    fn pk_even_nonnegative() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for k in [0, 2, 4] {
            assert!(pk_poly(6, k).unwrap().nonnegative_on_samples(200, &mut rng));
        }
    }

    #[test]
    fn psi_zero_is_tensor_product() {
        let eps = ratio(1, 2);
        let maj = PartialBooleanFunction::majority(3);
        let w = unit_witness(&maj, &eps);
        let psi = build_psi_k(&[w.clone(), w.clone()], &[maj.clone(), maj.clone()], 0, &eps).unwrap();
        for x in 0..64usize {
            assert_eq!(psi.composite.table()[x], w.value(x & 7) * w.value(x >> 3));
        }
        assert!(psi.composite.all_checks_pass(), "{:?}", psi.composite.checks);
    }

    #[test]
    fn psi_correlation_bound_maj_pair() {
        let eps = ratio(1, 3);
        let maj = PartialBooleanFunction::majority(3);
        let w = unit_witness(&maj, &eps);
        let gs = [maj.clone(), maj];
        for k in [0, 1] {
            let psi = build_psi_k(&[w.clone(), w.clone()], &gs, k, &eps).unwrap();
            assert!(psi.composite.all_checks_pass());
            let r = psi.correlation_bound(&gs, &ratio(1, 2));
            assert!(r.holds && r.strict, "{r:?}");
        }
    }

    #[test]
    fn psi_rejects_bad_inputs() {
        let eps = ratio(1, 3);
        let maj = PartialBooleanFunction::majority(3);
        let w = unit_witness(&maj, &eps);
        let scaled = DualWitness::new(w.table().iter().map(|v| v * int(2)).collect()).unwrap();
        let err = build_psi_k(&[w.clone(), scaled], &[maj.clone(), maj.clone()], 0, &eps).unwrap_err();
        assert!(matches!(err, Error::Precondition { index: 1, .. }));
        let neg = DualWitness::new(w.table().iter().map(|v| -v).collect()).unwrap();
        let err = build_psi_k(&[neg, w], &[maj.clone(), maj], 0, &eps).unwrap_err();
        assert!(matches!(err, Error::Precondition { index: 0, .. }));
    }

    #[test]
    fn phi_indicator_with_interpolant_is_product() {
        let gs = [PartialBooleanFunction::majority(3), PartialBooleanFunction::or(2)];
        let system = indicator_system(&gs).unwrap();
        let q = parity_approximant(2, 2, 2, ParityMethod::Lp).unwrap().polynomial;
        let phi = build_phi_ell(&system, &gs, &q, 2).unwrap();
        let prod = tensor_xor(&gs).unwrap();
        for (x, v) in phi.table.iter().enumerate() {
            assert_eq!(*v, int(prod.get(x).unwrap() as i64));
        }
        assert!(phi.approximation_bound(&gs, &int(1)).holds);
    }

    #[test]
    fn phi_rejects_heavy_system() {
        let gs = [PartialBooleanFunction::identity()];
        let heavy = vec![MultilinearPolynomial::constant(1, int(1)); 2];
        let q = UnivariatePolynomial::constant(int(1));
        assert!(matches!(build_phi_ell(&heavy, &gs, &q, 0), Err(Error::Precondition { .. })));
    }

    #[test]
    fn zeta_with_k_zero() {
        let eps = ratio(1, 2);
        let maj = PartialBooleanFunction::majority(3);
        let w = unit_witness(&maj, &eps);
        let and2 = PartialBooleanFunction::and(2);
        let delta = ratio(1, 3);
        let big = dual_witness_at(&and2, &delta, approx_degree(&and2, &delta).unwrap().degree - 1).unwrap().unwrap();
        let z = build_zeta(&big, &and2, &delta, &[w.clone(), w.clone()], &[maj.clone(), maj], &eps, 0).unwrap();
        assert!(z.composite.all_checks_pass(), "{:?}", z.composite.checks);
        for x in 0..64usize {
            let (a, b) = (w.value(x & 7), w.value(x >> 3));
            let zmask = usize::from(a.is_negative()) | usize::from(b.is_negative()) << 1;
            assert_eq!(z.composite.table()[x], big.value(zmask) * a.abs() * b.abs());
        }
        assert!(build_zeta(&big, &and2, &delta, &[w.clone(), w.clone()], &vec![PartialBooleanFunction::majority(3); 2], &eps, 1).is_err());
    }
}

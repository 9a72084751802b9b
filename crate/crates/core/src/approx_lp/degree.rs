use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::boolean_core::{character, DualWitness, MultilinearPolynomial, PartialBooleanFunction};
use crate::error::{Error, Result};
use crate::lp::{Cmp, LinearProgram};
use crate::rational::{format_rational, int, Rational};

/// Subset masks of size at most `d`, in increasing mask order.
pub fn monomials(n: usize, d: usize) -> Vec<usize> {
    (0..1usize << n).filter(|s| s.count_ones() as usize <= d).collect()
}

#[derive(Clone, Debug)]
pub struct ApproxDegreeResult {
    pub degree: usize,
    pub epsilon: Rational,
    pub approximant: MultilinearPolynomial,
    /// Least uniform error achievable at `degree`.
    pub achieved_error: Rational,
    /// Certificate that no polynomial of degree `degree - 1` works.
    pub witness: Option<DualWitness>,
    pub primal_ok: bool,
    pub dual_ok: bool,
}

#[derive(Serialize)]
struct ApproxDegreeJson {
    degree: usize,
    epsilon: String,
    approximant_coeffs: Vec<(usize, String)>,
    witness_table: Option<Vec<String>>,
    checks: Checks,
}

#[derive(Serialize)]
struct Checks {
    primal_ok: bool,
    dual_ok: bool,
}

impl ApproxDegreeResult {
    pub fn to_json(&self) -> serde_json::Value {
        let j = ApproxDegreeJson {
            degree: self.degree,
            epsilon: format_rational(&self.epsilon),
            approximant_coeffs: self
                .approximant
                .coefficients()
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(s, c)| (s, format_rational(c)))
                .collect(),
            witness_table: self
                .witness
                .as_ref()
                .map(|w| w.table().iter().map(format_rational).collect()),
            checks: Checks { primal_ok: self.primal_ok, dual_ok: self.dual_ok },
        };
        serde_json::to_value(j).expect("serialisable")
    }
}

/// Exact check of the partial-function approximation conditions.
pub fn verify_approximant(p: &MultilinearPolynomial, f: &PartialBooleanFunction, eps: &Rational) -> bool {
    if p.num_vars() != f.num_vars() {
        return false;
    }
    let bound = Rational::one() + eps;
    p.to_table().iter().enumerate().all(|(x, v)| match f.get(x) {
        Some(fx) => (int(fx as i64) - v).abs() <= *eps,
        None => v.abs() <= bound,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualWitnessReport {
    pub correlation: String,
    pub l1_norm: String,
    /// Correlation minus off-domain mass exceeds `eps * ||psi||_1`.
    pub strict_ok: bool,
    /// Orthogonal to every polynomial of degree at most `d`.
    pub orthogonal_ok: bool,
    /// Weaker criterion `sum_dom f psi > (1 + eps)/2 * ||psi||_1`.
    pub weak_ok: bool,
    pub pass: bool,
}

/// Checks that `psi` certifies `deg_eps(f) > d`.
pub fn verify_dual_witness(
    psi: &DualWitness,
    f: &PartialBooleanFunction,
    eps: &Rational,
    d: usize,
) -> DualWitnessReport {
    let fail = DualWitnessReport {
        correlation: "0".into(),
        l1_norm: "0".into(),
        strict_ok: false,
        orthogonal_ok: false,
        weak_ok: false,
        pass: false,
    };
    let Ok(corr) = psi.correlation(f) else {
        return fail;
    };
    let l1 = psi.l1_norm().clone();
    let on_domain: Rational = f
        .domain()
        .map(|x| psi.value(x) * int(f.get(x).unwrap_or(0) as i64))
        .sum();
    let strict_ok = corr > eps * &l1;
    let weak_ok = on_domain > (Rational::one() + eps) / int(2) * &l1;
    let orthogonal_ok = psi.verify_order() && psi.phd_order() > d;
    DualWitnessReport {
        correlation: format_rational(&corr),
        l1_norm: format_rational(&l1),
        strict_ok,
        orthogonal_ok,
        weak_ok,
        pass: strict_ok && orthogonal_ok,
    }
}

struct ErrorLp {
    lp: LinearProgram,
    monos: Vec<usize>,
    /// `(point, sign of p in the row)` for each row.
    rows: Vec<(usize, i8)>,
}

/// `min delta` s.t. `|f - p| <= delta` on the domain and `|p| <= 1 + delta` off it.
fn error_lp(f: &PartialBooleanFunction, d: usize) -> ErrorLp {
    let n = f.num_vars();
    let monos = monomials(n, d);
    let mut lp = LinearProgram::new();
    let vars: Vec<usize> = monos.iter().map(|_| lp.add_var(true, Rational::zero())).collect();
    let delta = lp.add_var(false, Rational::one());
    let mut rows = Vec::new();
    for x in 0..f.num_points() {
        for sign in [1i8, -1] {
            let mut coeffs: Vec<(usize, Rational)> = monos
                .iter()
                .zip(&vars)
                .map(|(&s, &v)| (v, int((sign * character(s, x)) as i64)))
                .collect();
            coeffs.push((delta, int(-1)));
            let rhs = match f.get(x) {
                Some(fx) => int((sign * fx) as i64),
                None => int(1),
            };
            lp.add_row(coeffs, Cmp::Le, rhs);
            rows.push((x, sign));
        }
    }
    ErrorLp { lp, monos, rows }
}

/// Optimal error at degree `d` with the primal polynomial and the dual function.
fn solve_error_lp(f: &PartialBooleanFunction, d: usize) -> Result<(Rational, MultilinearPolynomial, Vec<Rational>)> {
    let e = error_lp(f, d);
    let sol = e
        .lp
        .solve()
        .optimal()
        .ok_or_else(|| Error::Solver("approximation LP has no optimum".into()))?;
    let mut coeffs = vec![Rational::zero(); f.num_points()];
    for (i, &s) in e.monos.iter().enumerate() {
        coeffs[s] = sol.x[i].clone();
    }
    let p = MultilinearPolynomial::from_coefficients(f.num_vars(), coeffs)?;
    let mut psi = vec![Rational::zero(); f.num_points()];
    for ((x, sign), y) in e.rows.iter().zip(&sol.duals) {
        if *sign > 0 {
            psi[*x] += y;
        } else {
            psi[*x] -= y;
        }
    }
    Ok((sol.objective, p, psi))
}

/// Least uniform error of a degree-`d` polynomial for `f` (partial definition).
pub fn best_error(f: &PartialBooleanFunction, d: usize) -> Result<Rational> {
    Ok(solve_error_lp(f, d)?.0)
}

fn normalise(psi: Vec<Rational>) -> Result<DualWitness> {
    let l1: Rational = psi.iter().map(|v| v.abs()).sum();
    if l1.is_zero() {
        return Err(Error::Solver("dual solution is identically zero".into()));
    }
    DualWitness::new(psi.into_iter().map(|v| v / &l1).collect())
}

/// `eps`-approximate degree with a verified approximant and dual witness.
pub fn approx_degree(f: &PartialBooleanFunction, eps: &Rational) -> Result<ApproxDegreeResult> {
    if eps.is_negative() {
        return Err(Error::OutOfRange(format!("epsilon {eps} is negative")));
    }
    let n = f.num_vars();
    if f.is_constant() || eps >= &Rational::one() {
        let c = if f.is_constant() && eps < &Rational::one() {
            int(f.domain().next().and_then(|x| f.get(x)).unwrap_or(1) as i64)
        } else {
            Rational::zero()
        };
        let p = MultilinearPolynomial::constant(n, c);
        let primal_ok = verify_approximant(&p, f, eps);
        return Ok(ApproxDegreeResult {
            degree: 0,
            epsilon: eps.clone(),
            approximant: p,
            achieved_error: if f.is_constant() { Rational::zero() } else { Rational::one() },
            witness: None,
            primal_ok,
            dual_ok: true,
        });
    }
    let mut previous: Option<Vec<Rational>> = None;
    for d in 0..=n {
        let (delta, p, psi) = solve_error_lp(f, d)?;
        if &delta <= eps {
            let witness = match previous {
                Some(psi) => Some(normalise(psi)?),
                None => None,
            };
            let primal_ok = verify_approximant(&p, f, eps);
            let dual_ok = match &witness {
                Some(w) => verify_dual_witness(w, f, eps, d - 1).pass,
                None => d == 0,
            };
            return Ok(ApproxDegreeResult {
                degree: d,
                epsilon: eps.clone(),
                approximant: p,
                achieved_error: delta,
                witness,
                primal_ok,
                dual_ok,
            });
        }
        previous = Some(psi);
    }
    Err(Error::Solver("no approximant up to full degree".into()))
}

/// Dual witness certifying `deg_eps(f) > d`, if one exists.
pub fn dual_witness_at(f: &PartialBooleanFunction, eps: &Rational, d: usize) -> Result<Option<DualWitness>> {
    let (delta, _, psi) = solve_error_lp(f, d)?;
    if &delta <= eps {
        return Ok(None);
    }
    normalise(psi).map(Some)
}

#[derive(Clone, Debug)]
pub struct ThresholdDegreeResult {
    pub degree: usize,
    /// Polynomial with `f(x) p(x) >= 1` everywhere.
    pub polynomial: MultilinearPolynomial,
    /// Nonzero `psi` with `f psi >= 0` orthogonal to degree `< degree`.
    pub witness: Option<DualWitness>,
    pub primal_ok: bool,
    pub dual_ok: bool,
}

fn sign_lp(f: &PartialBooleanFunction, d: usize) -> Option<MultilinearPolynomial> {
    let monos = monomials(f.num_vars(), d);
    let mut lp = LinearProgram::new();
    let vars: Vec<usize> = monos.iter().map(|_| lp.add_var(true, Rational::zero())).collect();
    for x in 0..f.num_points() {
        let fx = f.get(x)? as i64;
        let coeffs = monos.iter().zip(&vars).map(|(&s, &v)| (v, int(fx * character(s, x) as i64))).collect();
        lp.add_row(coeffs, Cmp::Ge, int(1));
    }
    let sol = lp.solve().optimal()?;
    let mut coeffs = vec![Rational::zero(); f.num_points()];
    for (i, &s) in monos.iter().enumerate() {
        coeffs[s] = sol.x[i].clone();
    }
    MultilinearPolynomial::from_coefficients(f.num_vars(), coeffs).ok()
}

/// `max sum w` with `w = f psi` in `[0, 1]` and `psi` orthogonal to degree `<= d`.
fn sign_certificate(f: &PartialBooleanFunction, d: usize) -> Option<DualWitness> {
    let mut lp = LinearProgram::new();
    let w: Vec<usize> = (0..f.num_points()).map(|_| lp.add_var(false, int(-1))).collect();
    for &v in &w {
        lp.add_row(vec![(v, int(1))], Cmp::Le, int(1));
    }
    for s in monomials(f.num_vars(), d) {
        let coeffs = (0..f.num_points())
            .map(|x| (w[x], int((f.get(x).unwrap_or(1) * character(s, x)) as i64)))
            .collect();
        lp.add_row(coeffs, Cmp::Eq, int(0));
    }
    let sol = lp.solve().optimal()?;
    if sol.objective.is_zero() {
        return None;
    }
    let table = (0..f.num_points()).map(|x| &sol.x[w[x]] * int(f.get(x).unwrap_or(1) as i64)).collect();
    DualWitness::new(table).ok()
}

/// Checks that `psi` certifies `deg_pm(f) > d`.
pub fn verify_sign_witness(psi: &DualWitness, f: &PartialBooleanFunction, d: usize) -> bool {
    !psi.is_zero()
        && (0..f.num_points()).all(|x| !(psi.value(x) * int(f.get(x).unwrap_or(0) as i64)).is_negative())
        && psi.verify_order()
        && psi.phd_order() > d
}

/// Threshold degree of a total function.
pub fn threshold_degree(f: &PartialBooleanFunction) -> Result<ThresholdDegreeResult> {
    if !f.is_total() {
        return Err(Error::PartialFunction);
    }
    for d in 0..=f.num_vars() {
        if let Some(p) = sign_lp(f, d) {
            let primal_ok = p.degree().unwrap_or(0) <= d
                && p.to_table().iter().enumerate().all(|(x, v)| v * int(f.get(x).unwrap_or(0) as i64) >= Rational::one());
            let witness = if d == 0 { None } else { sign_certificate(f, d - 1) };
            let dual_ok = match &witness {
                Some(w) => verify_sign_witness(w, f, d - 1),
                None => d == 0,
            };
            return Ok(ThresholdDegreeResult { degree: d, polynomial: p, witness, primal_ok, dual_ok });
        }
    }
    Err(Error::Solver("sign representation LP failed at full degree".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    /// Best error of a symmetric degree-1 polynomial `a + b (x1 + x2)` for OR2,
    /// scanned over a fine grid; an upper-level oracle independent of the LP.
    fn or2_best_linear_error_lower_bound() -> f64 {
        let mut best = f64::INFINITY;
        for ai in -200..=200 {
            for bi in -200..=200 {
                let (a, b) = (ai as f64 / 100.0, bi as f64 / 100.0);
                // OR2 values: |x|=0 -> 1, else -1; sum x = 2, 0, -2
                let e = [(1.0, 2.0), (-1.0, 0.0), (-1.0, 0.0), (-1.0, -2.0)]
                    .iter()
                    .map(|(fv, s)| (fv - (a + b * s)).abs())
                    .fold(0.0, f64::max);
                best = best.min(e);
            }
        }
        best
    }

    #[test]
    fn constant_function_has_degree_zero() {
        for eps in [ratio(0, 1), ratio(1, 3), ratio(9, 10)] {
            let r = approx_degree(&PartialBooleanFunction::constant(3, -1), &eps).unwrap();
            assert_eq!(r.degree, 0);
            assert!(r.witness.is_none() && r.primal_ok);
        }
    }

    #[test]
    fn parity3_third() {
        let f = PartialBooleanFunction::parity(3);
        let r = approx_degree(&f, &ratio(1, 3)).unwrap();
        assert_eq!(r.degree, 3);
        assert!(r.primal_ok && r.dual_ok);
        let expected: Vec<Rational> = f.values().iter().map(|&v| ratio(v as i64, 8)).collect();
        assert_eq!(r.witness.unwrap().table(), expected.as_slice());
    }

    #[test]
    fn or2_third() {
        let r = approx_degree(&PartialBooleanFunction::or(2), &ratio(1, 3)).unwrap();
        assert_eq!(r.degree, 2);
        assert!(r.primal_ok && r.dual_ok);
        // Symmetrisation loses nothing, so the best symmetric linear error is the best linear error.
        assert!(or2_best_linear_error_lower_bound() > 1.0 / 3.0);
        assert_eq!(best_error(&PartialBooleanFunction::or(2), 1).unwrap(), ratio(1, 2));
    }

    #[test]
    fn partial_function_degree() {
        // x1 defined only where x2 = +1: a constant-free approximant x1 works off the domain.
        let f = PartialBooleanFunction::from_values(2, vec![1, -1, 0, 0]).unwrap();
        let r = approx_degree(&f, &ratio(1, 3)).unwrap();
        assert_eq!(r.degree, 1);
        assert!(r.primal_ok && r.dual_ok);
    }

    #[test]
    fn monotone_in_epsilon() {
        for f in [PartialBooleanFunction::or(3), PartialBooleanFunction::majority(3), PartialBooleanFunction::and(2)] {
            let mut last = usize::MAX;
            for e in [0, 1, 2, 3, 5, 8, 9] {
                let d = approx_degree(&f, &ratio(e, 10)).unwrap().degree;
                assert!(d <= last);
                last = d;
            }
        }
    }

    #[test]
    fn witness_verification_cases() {
        let f = PartialBooleanFunction::parity(3);
        let psi = DualWitness::new(f.values().iter().map(|&v| ratio(v as i64, 8)).collect()).unwrap();
        assert!(verify_dual_witness(&psi, &f, &ratio(1, 2), 2).pass);
        // f 2^-n against a nonbalanced f: constant coefficient is nonzero.
        let or2 = PartialBooleanFunction::or(2);
        let psi = DualWitness::new(or2.values().iter().map(|&v| ratio(v as i64, 4)).collect()).unwrap();
        let rep = verify_dual_witness(&psi, &or2, &ratio(1, 2), 0);
        assert!(!rep.orthogonal_ok && !rep.pass);
        // balanced f passes at d = 0 (orthogonal to constants)
        let id = PartialBooleanFunction::from_values(2, vec![1, -1, 1, -1]).unwrap();
        let psi = DualWitness::new(id.values().iter().map(|&v| ratio(v as i64, 4)).collect()).unwrap();
        assert!(verify_dual_witness(&psi, &id, &ratio(1, 2), 0).pass);
        let zero = DualWitness::new(vec![int(0); 8]).unwrap();
        assert!(!verify_dual_witness(&zero, &f, &int(0), 2).pass);
    }

    #[test]
    fn threshold_degrees() {
        let r = threshold_degree(&PartialBooleanFunction::identity()).unwrap();
        assert_eq!(r.degree, 1);
        for n in 1..=4 {
            let r = threshold_degree(&PartialBooleanFunction::parity(n)).unwrap();
            assert_eq!(r.degree, n);
            assert!(r.primal_ok && r.dual_ok);
        }
        let maj = PartialBooleanFunction::majority(3);
        let r = threshold_degree(&maj).unwrap();
        assert_eq!(r.degree, 1);
        assert!(r.primal_ok && r.dual_ok);
        // x1 + x2 + x3 sign-represents MAJ3 (in the -1 = true convention)
        for x in 0..8usize {
            let s: i64 = (0..3).map(|i| if x >> i & 1 == 1 { -1 } else { 1 }).sum();
            assert_eq!(s.signum() as i8, maj.get(x).unwrap());
        }
        assert!(threshold_degree(&PartialBooleanFunction::from_values(1, vec![1, 0]).unwrap()).is_err());
    }
}

use num_traits::{One, Zero};
use serde::Serialize;

use super::degree::monomials;
use crate::boolean_core::{character, split_point, MultilinearPolynomial, PartialBooleanFunction};
use crate::error::{Error, Result};
use crate::lp::{Cmp, LinearProgram};
use crate::rational::{int, Rational};

/// Success threshold `sigma` and the number `m` of instances allowed to be answered wrongly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ApproximantSpec {
    #[serde(serialize_with = "crate::rational::serde_rational")]
    pub sigma: Rational,
    pub m: usize,
}

impl ApproximantSpec {
    pub fn new(sigma: Rational, m: usize) -> Result<Self> {
        if sigma <= Rational::zero() || sigma > Rational::one() {
            return Err(Error::OutOfRange(format!("sigma must lie in (0, 1], got {sigma}")));
        }
        Ok(Self { sigma, m })
    }
}

/// Largest total number of variables across the instances.
pub const MAX_ORACLE_VARS: usize = 12;

#[derive(Clone, Debug)]
pub struct ApproximantSystem {
    pub degree: usize,
    /// `phi[z]` for every `z` in `{-1,1}^n`, indexed by the usual bit mask.
    pub phi: Vec<MultilinearPolynomial>,
}

fn answer_mask(gs: &[PartialBooleanFunction], arities: &[usize], x: usize) -> Option<usize> {
    let parts = split_point(x, arities);
    let mut mask = 0;
    for (i, (g, &xi)) in gs.iter().zip(&parts).enumerate() {
        if g.get(xi)? < 0 {
            mask |= 1 << i;
        }
    }
    Some(mask)
}

fn slack_masks(n: usize, m: usize) -> Vec<usize> {
    (0..1usize << n).filter(|w| w.count_ones() as usize <= m).collect()
}

/// Exact check of the two defining constraints of a `(sigma, m)`-approximant.
pub fn verify_system(gs: &[PartialBooleanFunction], spec: &ApproximantSpec, phi: &[MultilinearPolynomial]) -> bool {
    let n = gs.len();
    let arities: Vec<usize> = gs.iter().map(|g| g.num_vars()).collect();
    let total: usize = arities.iter().sum();
    if phi.len() != 1 << n || phi.iter().any(|p| p.num_vars() != total) {
        return false;
    }
    let tables: Vec<Vec<Rational>> = phi.iter().map(|p| p.to_table()).collect();
    let slack = slack_masks(n, spec.m);
    (0..1usize << total).all(|x| {
        let mass: Rational = tables.iter().map(|t| num_traits::Signed::abs(&t[x])).sum();
        if mass > Rational::one() {
            return false;
        }
        match answer_mask(gs, &arities, x) {
            None => true,
            Some(a) => slack.iter().map(|w| &tables[w ^ a][x]).sum::<Rational>() >= spec.sigma,
        }
    })
}

/// Largest `sigma` for which `phi` meets the success constraint with slack `m`.
pub fn achieved_sigma(gs: &[PartialBooleanFunction], m: usize, phi: &[MultilinearPolynomial]) -> Option<Rational> {
    let n = gs.len();
    let arities: Vec<usize> = gs.iter().map(|g| g.num_vars()).collect();
    let total: usize = arities.iter().sum();
    let tables: Vec<Vec<Rational>> = phi.iter().map(|p| p.to_table()).collect();
    let slack = slack_masks(n, m);
    (0..1usize << total)
        .filter_map(|x| answer_mask(gs, &arities, x).map(|a| slack.iter().map(|w| &tables[w ^ a][x]).sum::<Rational>()))
        .min()
}

/// `phi_z(x) = 1` exactly when `z` is the answer vector of `x` (total inputs).
pub fn indicator_system(gs: &[PartialBooleanFunction]) -> Result<Vec<MultilinearPolynomial>> {
    let n = gs.len();
    let arities: Vec<usize> = gs.iter().map(|g| g.num_vars()).collect();
    let total: usize = arities.iter().sum();
    (0..1usize << n)
        .map(|z| {
            let table: Vec<Rational> = (0..1usize << total)
                .map(|x| match answer_mask(gs, &arities, x) {
                    Some(a) if a == z => Rational::one(),
                    Some(_) => Rational::zero(),
                    None => Rational::zero(),
                })
                .collect();
            MultilinearPolynomial::from_table(&table)
        })
        .collect()
}

fn solve_at(gs: &[PartialBooleanFunction], spec: &ApproximantSpec, d: usize) -> Result<Option<Vec<MultilinearPolynomial>>> {
    let n = gs.len();
    let arities: Vec<usize> = gs.iter().map(|g| g.num_vars()).collect();
    let total: usize = arities.iter().sum();
    let points = 1usize << total;
    let mons = monomials(total, d);
    let mut lp = LinearProgram::new();
    let coef: Vec<Vec<usize>> =
        (0..1usize << n).map(|_| mons.iter().map(|_| lp.add_var(true, Rational::zero())).collect()).collect();
    let abs: Vec<Vec<usize>> =
        (0..1usize << n).map(|_| (0..points).map(|_| lp.add_var(false, Rational::zero())).collect()).collect();
    let value_row = |z: usize, x: usize| -> Vec<(usize, Rational)> {
        mons.iter().enumerate().map(|(k, &s)| (coef[z][k], int(character(s, x) as i64))).collect()
    };
    for x in 0..points {
        for z in 0..1usize << n {
            let mut up = value_row(z, x);
            up.push((abs[z][x], int(-1)));
            lp.add_row(up, Cmp::Le, Rational::zero());
            let mut down: Vec<(usize, Rational)> = value_row(z, x).into_iter().map(|(v, c)| (v, -c)).collect();
            down.push((abs[z][x], int(-1)));
            lp.add_row(down, Cmp::Le, Rational::zero());
        }
        lp.add_row((0..1usize << n).map(|z| (abs[z][x], int(1))).collect(), Cmp::Le, Rational::one());
    }
    let slack = slack_masks(n, spec.m);
    for x in 0..points {
        if let Some(a) = answer_mask(gs, &arities, x) {
            let row: Vec<(usize, Rational)> = slack.iter().flat_map(|w| value_row(w ^ a, x)).collect();
            lp.add_row(row, Cmp::Ge, spec.sigma.clone());
        }
    }
    let Some(sol) = lp.solve().optimal() else { return Ok(None) };
    let phi = (0..1usize << n)
        .map(|z| {
            let mut coeffs = vec![Rational::zero(); points];
            for (k, &s) in mons.iter().enumerate() {
                coeffs[s] = sol.x[coef[z][k]].clone();
            }
            MultilinearPolynomial::from_coefficients(total, coeffs)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Some(phi))
}

/// Least degree of a `(sigma, m)`-approximant for `(g_1, ..., g_n)`, by binary search.
pub fn approximant_degree_oracle(gs: &[PartialBooleanFunction], spec: &ApproximantSpec) -> Result<ApproximantSystem> {
    let n = gs.len();
    if n == 0 {
        return Err(Error::InvalidInput("need at least one function".into()));
    }
    if spec.m > n {
        return Err(Error::OutOfRange(format!("m = {} exceeds n = {n}", spec.m)));
    }
    let total: usize = gs.iter().map(|g| g.num_vars()).sum();
    if total > MAX_ORACLE_VARS || n > 4 {
        return Err(Error::TooLarge(format!("{n} functions on {total} variables")));
    }
    let mut hi = total;
    let mut best = solve_at(gs, spec, hi)?.ok_or_else(|| Error::Solver("full degree infeasible".into()))?;
    let mut lo = 0;
    while lo < hi {
        let mid = (lo + hi) / 2;
        match solve_at(gs, spec, mid)? {
            Some(phi) => {
                hi = mid;
                best = phi;
            }
            None => lo = mid + 1,
        }
    }
    if !verify_system(gs, spec, &best) {
        return Err(Error::Solver("approximant system failed exact verification".into()));
    }
    Ok(ApproximantSystem { degree: hi, phi: best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn spec(sigma: Rational, m: usize) -> ApproximantSpec {
        ApproximantSpec::new(sigma, m).unwrap()
    }

    #[test]
    fn constant_instance_has_degree_zero() {
        let g = PartialBooleanFunction::constant(1, 1);
        assert_eq!(approximant_degree_oracle(&[g], &spec(int(1), 0)).unwrap().degree, 0);
    }

    #[test]
    fn full_slack_has_degree_zero() {
        let id = PartialBooleanFunction::identity();
        let or2 = PartialBooleanFunction::or(2);
        for sigma in [ratio(1, 3), int(1)] {
            let r = approximant_degree_oracle(&[id.clone(), or2.clone()], &spec(sigma, 2)).unwrap();
            assert_eq!(r.degree, 0);
        }
    }

    #[test]
    fn exact_identity_pair_matches_indicator_degree() {
        // With sigma = 1 and m = 0 every phi_z is forced to be the indicator of g(x) = z.
        let id = PartialBooleanFunction::identity();
        let gs = [id.clone(), id];
        let oracle = (0..4usize)
            .map(|z| {
                let table: Vec<Rational> = (0..4usize).map(|x| if x == z { int(1) } else { int(0) }).collect();
                MultilinearPolynomial::from_table(&table).unwrap().degree().unwrap()
            })
            .max()
            .unwrap();
        let r = approximant_degree_oracle(&gs, &spec(int(1), 0)).unwrap();
        assert_eq!(r.degree, oracle);
        assert_eq!(r.degree, 2);
    }

    #[test]
    fn weaker_requirements_never_raise_degree() {
        let id = PartialBooleanFunction::identity();
        let gs = [id.clone(), id];
        let strict = approximant_degree_oracle(&gs, &spec(int(1), 0)).unwrap().degree;
        let loose = approximant_degree_oracle(&gs, &spec(ratio(1, 2), 0)).unwrap().degree;
        let slack = approximant_degree_oracle(&gs, &spec(int(1), 1)).unwrap().degree;
        assert!(loose <= strict && slack <= strict);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(ApproximantSpec::new(int(0), 0).is_err());
        assert!(ApproximantSpec::new(ratio(3, 2), 0).is_err());
        let id = PartialBooleanFunction::identity();
        assert!(approximant_degree_oracle(&[id], &spec(int(1), 2)).is_err());
    }
}

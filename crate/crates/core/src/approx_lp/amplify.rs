use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use super::univariate::UnivariatePolynomial;
use crate::error::{Error, Result};
use crate::lp::{Cmp, LinearProgram};
use crate::rational::{from_f64, int, pow, ratio, to_f64, Rational};

/// Requirement that `p([a, b])` lies inside `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalMap {
    pub a: Rational,
    pub b: Rational,
    pub lo: Rational,
    pub hi: Rational,
}

impl IntervalMap {
    pub fn new(a: Rational, b: Rational, lo: Rational, hi: Rational) -> Self {
        Self { a, b, lo, hi }
    }

    fn mirrored(&self) -> Self {
        Self::new(-&self.b, -&self.a, -&self.hi, -&self.lo)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AmplificationKind {
    ErrorReduction,
    SignAmplify,
}

#[derive(Clone, Debug, Serialize)]
pub struct AmplificationPolynomial {
    pub kind: AmplificationKind,
    pub epsilon: String,
    pub polynomial: UnivariatePolynomial,
    pub degree: usize,
    pub grid_ok: bool,
    pub exact_ok: bool,
}

/// Grid resolution (as a power of two) for the containment checks.
pub const GRID_BITS: u32 = 8;
const SYNTH_POINTS: i64 = 48;
const FINE_POINTS: usize = 2048;
const MAX_EXCHANGES: usize = 200;
const MAX_SYNTH_DEGREE: usize = 61;

/// Interval requirements for the given amplification kind.
pub fn amplification_targets(kind: AmplificationKind, eps: &Rational) -> Vec<IntervalMap> {
    let one = Rational::one();
    match kind {
        AmplificationKind::ErrorReduction => vec![
            IntervalMap::new(ratio(-4, 3), ratio(4, 3), -&one - eps, &one + eps),
            IntervalMap::new(ratio(-4, 3), ratio(-2, 3), -&one - eps, -&one + eps),
            IntervalMap::new(ratio(2, 3), ratio(4, 3), &one - eps, &one + eps),
        ],
        AmplificationKind::SignAmplify => vec![
            IntervalMap::new(-&one, one.clone(), -&one, one.clone()),
            IntervalMap::new(-&one, -eps, -&one, ratio(-2, 3)),
            IntervalMap::new(eps.clone(), one.clone(), ratio(2, 3), one.clone()),
        ],
    }
}

/// Checks every requirement exactly and on the dyadic grid.
pub fn check_targets(p: &UnivariatePolynomial, targets: &[IntervalMap]) -> (bool, bool) {
    let grid = targets.iter().all(|m| p.maps_into_on_grid(&m.a, &m.b, &m.lo, &m.hi, GRID_BITS));
    let exact = grid && targets.iter().all(|m| p.maps_into(&m.a, &m.b, &m.lo, &m.hi));
    (grid, exact)
}

/// Lowest-degree odd polynomial (found by an LP on a sample grid, then
/// verified exactly) meeting requirements stated for `t >= 0`; the mirrored
/// requirements on `t <= 0` follow by oddness and are verified as well.
pub fn synthesize_odd(positive: &[IntervalMap], max_degree: usize) -> Result<UnivariatePolynomial> {
    let mut all: Vec<IntervalMap> = positive.to_vec();
    all.extend(positive.iter().map(IntervalMap::mirrored));
    let identity = UnivariatePolynomial::identity();
    if check_targets(&identity, &all).1 {
        return Ok(identity);
    }
    let scale = positive.iter().map(|m| m.b.clone()).max().unwrap_or_else(Rational::one);
    let mut degree = 3;
    while degree <= max_degree {
        if let Some(p) = fit_odd(positive, degree, &scale) {
            if check_targets(&p, &all).1 {
                return Ok(p);
            }
        }
        degree += 2;
    }
    Err(Error::Solver(format!("no odd polynomial of degree <= {max_degree} meets the interval requirements")))
}

/// Minimax fit in the scaled variable `s = t / scale`, returned in `t`.
///
/// Sample points are exchanged: the LP runs on a small dyadic set, the worst
/// point of a fine grid is added, and the loop repeats until the fit holds on
/// the fine grid or the sampled LP already needs `theta > 1`.
fn fit_odd(targets: &[IntervalMap], degree: usize, scale: &Rational) -> Option<UnivariatePolynomial> {
    let powers: Vec<usize> = (1..=degree).step_by(2).collect();
    let init = (powers.len() as i64 + 2).min(SYNTH_POINTS);
    let mut samples: Vec<Vec<Rational>> = targets
        .iter()
        .map(|m| (0..=init).map(|j| dyadic_between(&m.a, &m.b, j, init)).collect())
        .collect();
    let fine: Vec<Vec<f64>> = targets
        .iter()
        .map(|m| {
            let (a, b) = (to_f64(&m.a), to_f64(&m.b));
            (0..=FINE_POINTS).map(|j| a + (b - a) * j as f64 / FINE_POINTS as f64).collect()
        })
        .collect();
    for _ in 0..MAX_EXCHANGES {
        let (coeffs, theta) = solve_fit(targets, &samples, &powers, scale)?;
        if theta > Rational::one() {
            return None;
        }
        let p = UnivariatePolynomial::new(coeffs);
        let mut added = false;
        for (k, m) in targets.iter().enumerate() {
            let (c, r) = (to_f64(&((&m.lo + &m.hi) / int(2))), to_f64(&((&m.hi - &m.lo) / int(2))));
            let (worst, err) = fine[k]
                .iter()
                .map(|&t| (t, (p.eval_f64(t) - c).abs() / r))
                .fold((0.0, f64::MIN), |acc, v| if v.1 > acc.1 { v } else { acc });
            if err > 1.0 - 1e-12 {
                let den = BigInt::from(1u64 << 16);
                let point = Rational::new((from_f64(worst) * Rational::from_integer(den.clone())).round().to_integer(), den)
                    .clamp(m.a.clone(), m.b.clone());
                if !samples[k].contains(&point) {
                    samples[k].push(point);
                    added = true;
                }
            }
        }
        if !added {
            return Some(round_coefficients(&p, targets).unwrap_or(p));
        }
    }
    None
}

fn dyadic_between(a: &Rational, b: &Rational, j: i64, n: i64) -> Rational {
    let t = a + (b - a) * ratio(j, n);
    let den = BigInt::from(1u64 << 16);
    Rational::new((t * Rational::from_integer(den.clone())).round().to_integer(), den)
}

fn solve_fit(
    targets: &[IntervalMap],
    samples: &[Vec<Rational>],
    powers: &[usize],
    scale: &Rational,
) -> Option<(Vec<Rational>, Rational)> {
    let mut lp = LinearProgram::new();
    let vars: Vec<usize> = powers.iter().map(|_| lp.add_var(true, Rational::zero())).collect();
    let theta = lp.add_var(false, Rational::one());
    for (m, pts) in targets.iter().zip(samples) {
        let center = (&m.lo + &m.hi) / int(2);
        let radius = (&m.hi - &m.lo) / int(2);
        for t in pts {
            let s = t / scale;
            let row: Vec<(usize, Rational)> =
                powers.iter().zip(&vars).map(|(&k, &v)| (v, pow(&s, k as u32))).collect();
            let mut up = row.clone();
            up.push((theta, -&radius));
            lp.add_row(up, Cmp::Le, center.clone());
            let mut down: Vec<(usize, Rational)> = row.into_iter().map(|(v, c)| (v, -c)).collect();
            down.push((theta, -&radius));
            lp.add_row(down, Cmp::Le, -&center);
        }
    }
    let sol = lp.solve().optimal()?;
    let degree = *powers.last()?;
    let mut coeffs = vec![Rational::zero(); degree + 1];
    for (&k, &v) in powers.iter().zip(&vars) {
        coeffs[k] = &sol.x[v] / pow(scale, k as u32);
    }
    Some((coeffs, sol.objective))
}

/// Coefficients rounded to a `2^-40` grid, kept only if the result still verifies.
fn round_coefficients(p: &UnivariatePolynomial, targets: &[IntervalMap]) -> Option<UnivariatePolynomial> {
    let den = BigInt::one() << 40u32;
    let coeffs = p
        .coefficients()
        .iter()
        .map(|c| Rational::new((c * Rational::from_integer(den.clone())).round().to_integer(), den.clone()))
        .collect();
    let q = UnivariatePolynomial::new(coeffs);
    let mut all = targets.to_vec();
    all.extend(targets.iter().map(IntervalMap::mirrored));
    check_targets(&q, &all).1.then_some(q)
}

/// Amplification polynomials: `ErrorReduction` for `0 < eps <= 1/3`,
/// `SignAmplify` for `0 < eps <= 2/3`.
pub fn amplification_poly(kind: AmplificationKind, eps: &Rational) -> Result<AmplificationPolynomial> {
    let upper = match kind {
        AmplificationKind::ErrorReduction => ratio(1, 3),
        AmplificationKind::SignAmplify => ratio(2, 3),
    };
    if eps <= &Rational::zero() || eps > &upper {
        return Err(Error::OutOfRange(format!("epsilon {eps} outside (0, {upper}]")));
    }
    let targets = amplification_targets(kind, eps);
    let positive: Vec<IntervalMap> = match kind {
        AmplificationKind::ErrorReduction => {
            let one = Rational::one();
            vec![
                IntervalMap::new(int(0), ratio(2, 3), -&one - eps, &one + eps),
                IntervalMap::new(ratio(2, 3), ratio(4, 3), &one - eps, &one + eps),
            ]
        }
        AmplificationKind::SignAmplify => vec![
            IntervalMap::new(int(0), eps.clone(), int(-1), int(1)),
            IntervalMap::new(eps.clone(), int(1), ratio(2, 3), int(1)),
        ],
    };
    let p = synthesize_odd(&positive, MAX_SYNTH_DEGREE)?;
    let (grid_ok, exact_ok) = check_targets(&p, &targets);
    Ok(AmplificationPolynomial {
        kind,
        epsilon: crate::rational::format_rational(eps),
        degree: p.degree().unwrap_or(0),
        polynomial: p,
        grid_ok,
        exact_ok,
    })
}

/// Odd polynomial sending `[3/4, 5/4]` into `[1 - eps, 1 + eps]` (and the
/// mirrored interval into its mirror), for `0 < eps <= 1/4`.
pub fn hadamard_reduction_poly(eps: &Rational) -> Result<UnivariatePolynomial> {
    if eps <= &Rational::zero() || eps > &ratio(1, 4) {
        return Err(Error::OutOfRange(format!("epsilon {eps} outside (0, 1/4]")));
    }
    let one = Rational::one();
    synthesize_odd(
        &[IntervalMap::new(ratio(3, 4), ratio(5, 4), &one - eps, &one + eps)],
        MAX_SYNTH_DEGREE,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_valid_at_the_top_of_each_range() {
        let er = amplification_poly(AmplificationKind::ErrorReduction, &ratio(1, 3)).unwrap();
        assert_eq!(er.polynomial, UnivariatePolynomial::identity());
        let sa = amplification_poly(AmplificationKind::SignAmplify, &ratio(2, 3)).unwrap();
        assert_eq!(sa.degree, 1);
        assert!(sa.exact_ok && sa.grid_ok);
        assert_eq!(hadamard_reduction_poly(&ratio(1, 4)).unwrap(), UnivariatePolynomial::identity());
    }

    #[test]
    fn parameter_ranges() {
        assert!(amplification_poly(AmplificationKind::ErrorReduction, &ratio(1, 2)).is_err());
        assert!(amplification_poly(AmplificationKind::SignAmplify, &int(0)).is_err());
        assert!(hadamard_reduction_poly(&ratio(1, 3)).is_err());
    }

    #[test]
    fn error_reduction_small_epsilon_has_logarithmic_degree() {
        let eps = ratio(1, 64);
        let r = amplification_poly(AmplificationKind::ErrorReduction, &eps).unwrap();
        assert!(r.exact_ok && r.grid_ok);
        // fixed constant c = 4 against log2(1/eps) = 6
        assert!(r.degree <= 4 * 6, "degree {}", r.degree);
    }

    #[test]
    fn sign_amplify_one_tenth() {
        let r = amplification_poly(AmplificationKind::SignAmplify, &ratio(1, 10)).unwrap();
        assert!(r.exact_ok);
        assert!(r.degree <= 6 * 10);
    }

    #[test]
    fn hadamard_reduction_eighth() {
        let p = hadamard_reduction_poly(&ratio(1, 8)).unwrap();
        assert!(p.degree().unwrap() > 1);
        assert!(p.maps_into(&ratio(3, 4), &ratio(5, 4), &ratio(7, 8), &ratio(9, 8)));
        assert!(p.maps_into(&ratio(-5, 4), &ratio(-3, 4), &ratio(-9, 8), &ratio(-7, 8)));
    }
}

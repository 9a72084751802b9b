use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::univariate::UnivariatePolynomial;
use crate::boolean_core::MultilinearPolynomial;
use crate::error::{Error, Result};
use crate::lp::{Cmp, LinearProgram};
use crate::rational::{binomial, binomial_prefix, factorial, int, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ParityMethod {
    Lp,
    Kkl,
}

#[derive(Clone, Debug, Serialize)]
pub struct ParityApproximant {
    pub n: usize,
    pub m: usize,
    pub ell: usize,
    pub method: ParityMethod,
    pub polynomial: UnivariatePolynomial,
    /// `max(max_{i<=m} |Q(i) - (-1)^i|, max_{i>m} |Q(i)|)`.
    #[serde(serialize_with = "crate::rational::serde_rational")]
    pub delta: Rational,
    /// `|Q(i)| <= 1` for every `i` in `0..=n`.
    pub range_ok: bool,
}

fn parity_sign(i: usize) -> Rational {
    if i.is_multiple_of(2) {
        int(1)
    } else {
        int(-1)
    }
}

/// Achieved error and range flag of `q` as a `(., m)` parity approximant on `0..=n`.
pub fn parity_error(q: &UnivariatePolynomial, n: usize, m: usize) -> (Rational, bool) {
    let mut delta = Rational::zero();
    let mut range_ok = true;
    for i in 0..=n {
        let v = q.eval(&int(i as i64));
        let err = if i <= m { (&v - parity_sign(i)).abs() } else { v.abs() };
        if err > delta {
            delta = err;
        }
        range_ok &= v.abs() <= Rational::one();
    }
    (delta, range_ok)
}

/// `C(t, j)` as a polynomial in `t`.
pub fn binomial_poly(j: usize) -> UnivariatePolynomial {
    let mut p = UnivariatePolynomial::constant(int(1));
    for i in 0..j {
        p = p.mul(&UnivariatePolynomial::linear_root(&int(i as i64)));
    }
    p.scale(&(Rational::one() / Rational::from_integer(factorial(j as u64))))
}

/// The closed form `prod_{i<r} (t-i-1)(t-n+i) / (r! r! C(n,r))` with `r = floor(ell/2)`.
pub fn kkl_polynomial(n: usize, ell: usize) -> UnivariatePolynomial {
    let r = ell / 2;
    let mut p = UnivariatePolynomial::constant(int(1));
    for i in 0..r {
        p = p
            .mul(&UnivariatePolynomial::linear_root(&int(i as i64 + 1)))
            .mul(&UnivariatePolynomial::linear_root(&int(n as i64 - i as i64)));
    }
    let rf = Rational::from_integer(factorial(r as u64));
    let norm = &rf * &rf * Rational::from_integer(binomial(n as i64, r as i64));
    p.scale(&(Rational::one() / norm))
}

/// The middle-range bound `C(n-r, r)^2 / C(n, r)`.
pub fn kkl_middle_bound(n: usize, r: usize) -> Rational {
    let a = binomial(n as i64 - r as i64, r as i64);
    Rational::new(&a * &a, binomial(n as i64, r as i64))
}

fn lp_polynomial(n: usize, m: usize, ell: usize) -> Result<UnivariatePolynomial> {
    let deg = ell.min(n);
    let mut lp = LinearProgram::new();
    let b: Vec<usize> = (0..=deg).map(|_| lp.add_var(true, Rational::zero())).collect();
    let delta = lp.add_var(false, Rational::one());
    for i in 0..=n {
        let row: Vec<(usize, Rational)> = (0..=deg)
            .map(|j| (b[j], Rational::from_integer(binomial(i as i64, j as i64))))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        let target = if i <= m { parity_sign(i) } else { Rational::zero() };
        let mut up = row.clone();
        up.push((delta, int(-1)));
        lp.add_row(up, Cmp::Le, target.clone());
        let mut down: Vec<(usize, Rational)> = row.iter().map(|(v, c)| (*v, -c)).collect();
        down.push((delta, int(-1)));
        lp.add_row(down, Cmp::Le, -target);
        lp.add_row(row.clone(), Cmp::Le, int(1));
        lp.add_row(row.iter().map(|(v, c)| (*v, -c)).collect(), Cmp::Le, int(1));
    }
    let sol = lp.solve().optimal().ok_or_else(|| Error::Solver("parity LP failed".into()))?;
    Ok((0..=deg).fold(UnivariatePolynomial::zero(), |acc, j| acc.add(&binomial_poly(j).scale(&sol.x[b[j]]))))
}

/// Univariate polynomial approximating parity on `0..=m` and vanishing approximately on `m+1..=n`.
pub fn parity_approximant(n: usize, m: usize, ell: usize, method: ParityMethod) -> Result<ParityApproximant> {
    if n == 0 || m > n {
        return Err(Error::OutOfRange(format!("need 0 <= m <= n and n >= 1 (n={n}, m={m})")));
    }
    let polynomial = match method {
        ParityMethod::Lp => lp_polynomial(n, m, ell)?,
        ParityMethod::Kkl => {
            if m != 0 {
                return Err(Error::OutOfRange("the closed form covers only m = 0".into()));
            }
            kkl_polynomial(n, ell)
        }
    };
    let (delta, range_ok) = parity_error(&polynomial, n, m);
    Ok(ParityApproximant { n, m, ell, method, polynomial, delta, range_ok })
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetrizedPolynomial {
    pub n: usize,
    /// Fourier coefficient shared by all sets of size `j`.
    #[serde(serialize_with = "crate::rational::serde_rationals")]
    pub level_coefficients: Vec<Rational>,
    pub degree: Option<usize>,
    #[serde(serialize_with = "crate::rational::serde_rational")]
    pub fourier_l1: Rational,
    /// `C(n, <= deg)`: the square of the Parseval bound.
    pub bound_squared: String,
    /// Present when `Q` maps `0..=n` into `[-1, 1]`.
    pub bound_ok: Option<bool>,
    #[serde(skip)]
    pub dense: Option<MultilinearPolynomial>,
}

/// Largest `n` for which the dense `2^n` form is also built.
pub const DENSE_LIMIT: usize = 12;

/// `q(z) = Q(|z|)` on the `n`-cube, via Krawtchouk sums over levels.
pub fn symmetrize_to_cube(q: &UnivariatePolynomial, n: usize) -> Result<SymmetrizedPolynomial> {
    if q.degree().unwrap_or(0) > n {
        return Err(Error::OutOfRange(format!("degree {:?} exceeds n = {n}", q.degree())));
    }
    let values: Vec<Rational> = (0..=n).map(|w| q.eval(&int(w as i64))).collect();
    let scale = Rational::from_integer(BigInt::one() << n);
    let level_coefficients: Vec<Rational> = (0..=n)
        .map(|j| {
            let sum: Rational = (0..=n)
                .map(|w| {
                    let k: BigInt = (0..=j)
                        .map(|i| {
                            let t = binomial(j as i64, i as i64) * binomial((n - j) as i64, w as i64 - i as i64);
                            if i % 2 == 0 {
                                t
                            } else {
                                -t
                            }
                        })
                        .sum();
                    Rational::from_integer(k) * &values[w]
                })
                .sum();
            sum / &scale
        })
        .collect();
    let fourier_l1: Rational = level_coefficients
        .iter()
        .enumerate()
        .map(|(j, c)| c.abs() * Rational::from_integer(binomial(n as i64, j as i64)))
        .sum();
    let degree = level_coefficients.iter().rposition(|c| !c.is_zero());
    let deg = degree.unwrap_or(0);
    let bound_sq = Rational::from_integer(binomial_prefix(n as i64, deg as i64));
    let in_range = values.iter().all(|v| v.abs() <= Rational::one());
    let bound_ok = in_range.then(|| &fourier_l1 * &fourier_l1 <= bound_sq);
    let dense = if n <= DENSE_LIMIT {
        let table: Vec<Rational> = (0..1usize << n).map(|x| values[x.count_ones() as usize].clone()).collect();
        Some(MultilinearPolynomial::from_table(&table)?)
    } else {
        None
    };
    Ok(SymmetrizedPolynomial {
        n,
        level_coefficients,
        degree,
        fourier_l1,
        bound_squared: bound_sq.to_string(),
        bound_ok,
        dense,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn full_degree_interpolates_exactly() {
        for n in 1..=5 {
            let r = parity_approximant(n, n, n, ParityMethod::Lp).unwrap();
            assert_eq!(r.delta, int(0));
            assert!(r.range_ok);
        }
    }

    #[test]
    fn kkl_closed_form_properties() {
        for n in 1..=20usize {
            for ell in 0..=n {
                let r = ell / 2;
                let q = kkl_polynomial(n, ell);
                assert_eq!(q.eval(&int(0)), int(1));
                let bound = kkl_middle_bound(n, r);
                for t in 1..=n {
                    let v = q.eval(&int(t as i64));
                    if t <= r || t > n - r {
                        assert!(v.is_zero(), "n={n} ell={ell} t={t}");
                    } else {
                        assert!(v.abs() <= bound);
                    }
                }
            }
        }
    }

    #[test]
    fn lp_never_worse_than_kkl() {
        for n in 1..=8 {
            for ell in 0..=n {
                let lp = parity_approximant(n, 0, ell, ParityMethod::Lp).unwrap();
                let kkl = parity_approximant(n, 0, ell, ParityMethod::Kkl).unwrap();
                assert!(lp.delta <= kkl.delta, "n={n} ell={ell}");
                assert!(lp.range_ok);
            }
        }
        assert!(parity_approximant(4, 1, 2, ParityMethod::Kkl).is_err());
        assert!(parity_approximant(4, 5, 2, ParityMethod::Lp).is_err());
    }

    #[test]
    fn symmetrize_linear() {
        // Q(t) = 1 - t on n = 2 gives (z1 + z2) / 2.
        let q = UnivariatePolynomial::new(vec![int(1), int(-1)]);
        let s = symmetrize_to_cube(&q, 2).unwrap();
        let dense = s.dense.unwrap();
        assert_eq!(dense.coefficients(), &[int(0), ratio(1, 2), ratio(1, 2), int(0)]);
        assert_eq!(s.fourier_l1, int(1));
        assert_eq!(s.degree, Some(1));
    }

    #[test]
    fn symmetrize_parity_interpolant_gives_character() {
        for n in 1..=6 {
            let q = parity_approximant(n, n, n, ParityMethod::Lp).unwrap().polynomial;
            let s = symmetrize_to_cube(&q, n).unwrap();
            let full = (1usize << n) - 1;
            assert_eq!(s.dense.unwrap(), MultilinearPolynomial::monomial(n, full));
            assert_eq!(s.bound_ok, Some(true));
        }
    }

    #[test]
    fn kkl_symmetrization_meets_parseval_bound() {
        for n in 1..=14 {
            for ell in 0..=n {
                let q = kkl_polynomial(n, ell);
                let s = symmetrize_to_cube(&q, n).unwrap();
                if let Some(ok) = s.bound_ok {
                    assert!(ok, "n={n} ell={ell}");
                }
                if let Some(d) = &s.dense {
                    assert_eq!(d.fourier_l1(), s.fourier_l1);
                }
            }
        }
    }
}

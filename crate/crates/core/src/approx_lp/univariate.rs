use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::rational::{format_rational, int, ratio, Rational};

/// Dense univariate polynomial with exact rational coefficients, lowest degree first.
#[derive(Clone, PartialEq, Eq)]
pub struct UnivariatePolynomial {
    coeffs: Vec<Rational>,
}

impl fmt::Debug for UnivariatePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self.coeffs.iter().map(format_rational).collect();
        write!(f, "UnivariatePolynomial[{}]", terms.join(", "))
    }
}

impl Serialize for UnivariatePolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<String> = self.coeffs.iter().map(format_rational).collect();
        v.serialize(s)
    }
}

impl UnivariatePolynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial `t`.
    pub fn identity() -> Self {
        Self::new(vec![int(0), int(1)])
    }

    /// `t - a`.
    pub fn linear_root(a: &Rational) -> Self {
        Self::new(vec![-a, int(1)])
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * t + c)
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + crate::rational::to_f64(c))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * int(i as i64))
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        Self::new(
            (0..len)
                .map(|i| {
                    let a = self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero);
                    let b = other.coeffs.get(i).cloned().unwrap_or_else(Rational::zero);
                    a + b
                })
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&int(-1)))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let dd = divisor.coeffs.len() - 1;
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let q = &rem[k + dd] / &lead;
            if !q.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    let delta = &q * d;
                    rem[k + j] -= delta;
                }
            }
            quot[k] = q;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        self.scale(&(Rational::one() / self.leading()))
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Product of the factors that occur with odd multiplicity (Yun's algorithm).
    pub fn odd_multiplicity_part(&self) -> Self {
        if self.degree().unwrap_or(0) == 0 {
            return Self::constant(int(1));
        }
        let d = self.derivative();
        let a0 = self.gcd(&d);
        let mut b = self.div_rem(&a0).0;
        let c = d.div_rem(&a0).0;
        let mut dd = c.sub(&b.derivative());
        let mut out = Self::constant(int(1));
        let mut i = 1;
        while b.degree().unwrap_or(0) > 0 {
            let a = b.gcd(&dd);
            let next_b = b.div_rem(&a).0;
            let next_c = dd.div_rem(&a).0;
            dd = next_c.sub(&next_b.derivative());
            b = next_b;
            if i % 2 == 1 {
                out = out.mul(&a);
            }
            i += 1;
        }
        out.monic()
    }

    fn sturm_chain(&self) -> Vec<Self> {
        let mut chain = vec![self.clone(), self.derivative()];
        while !chain.last().unwrap().is_zero() {
            let n = chain.len();
            let r = chain[n - 2].div_rem(&chain[n - 1]).1.scale(&int(-1));
            if r.is_zero() {
                break;
            }
            chain.push(r);
        }
        chain.retain(|p| !p.is_zero());
        chain
    }

    fn sign_changes(chain: &[Self], t: &Rational) -> usize {
        let signs: Vec<bool> = chain
            .iter()
            .map(|p| p.eval(t))
            .filter(|v| !v.is_zero())
            .map(|v| v.is_positive())
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Number of distinct real roots in the open interval `(a, b)`.
    pub fn count_roots_open(&self, a: &Rational, b: &Rational) -> usize {
        if self.degree().unwrap_or(0) == 0 || a >= b {
            return 0;
        }
        let mut h = self.squarefree_part();
        for end in [a, b] {
            while h.eval(end).is_zero() {
                h = h.div_rem(&Self::linear_root(end)).0;
            }
        }
        if h.degree().unwrap_or(0) == 0 {
            return 0;
        }
        let chain = h.sturm_chain();
        Self::sign_changes(&chain, a) - Self::sign_changes(&chain, b)
    }

    fn squarefree_part(&self) -> Self {
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0
    }

    /// Exact test of `p(t) >= 0` for all `t` in `[a, b]`.
    pub fn nonneg_on(&self, a: &Rational, b: &Rational) -> bool {
        if self.is_zero() {
            return true;
        }
        if a == b {
            return !self.eval(a).is_negative();
        }
        if self.eval(a).is_negative() || self.eval(b).is_negative() {
            return false;
        }
        let odd = self.odd_multiplicity_part();
        if odd.count_roots_open(a, b) > 0 {
            return false;
        }
        // No sign change inside: one sample that is not a root decides.
        let width = b - a;
        let mut denom = 2i64;
        loop {
            for k in 1..denom {
                if k % 2 == 0 && denom > 2 {
                    continue;
                }
                let t = a + &width * ratio(k, denom);
                let v = self.eval(&t);
                if !v.is_zero() {
                    return v.is_positive();
                }
            }
            denom *= 2;
        }
    }

    /// Exact test that `p([a, b])` lies inside `[lo, hi]`.
    pub fn maps_into(&self, a: &Rational, b: &Rational, lo: &Rational, hi: &Rational) -> bool {
        self.sub(&Self::constant(lo.clone())).nonneg_on(a, b)
            && Self::constant(hi.clone()).sub(self).nonneg_on(a, b)
    }

    /// Containment checked only on the grid `a + (b - a) j / 2^bits`.
    pub fn maps_into_on_grid(
        &self,
        a: &Rational,
        b: &Rational,
        lo: &Rational,
        hi: &Rational,
        bits: u32,
    ) -> bool {
        let steps = 1i64 << bits;
        (0..=steps).all(|j| {
            let t = a + (b - a) * ratio(j, steps);
            let v = self.eval(&t);
            &v >= lo && &v <= hi
        })
    }

    /// Composition `self(other(t))`.
    pub fn compose(&self, other: &Self) -> Self {
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(), |acc, c| acc.mul(other).add(&Self::constant(c.clone())))
    }

    pub fn sum_abs_coefficients(&self) -> Rational {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> UnivariatePolynomial {
        UnivariatePolynomial::new(c.iter().map(|&v| int(v)).collect())
    }

    #[test]
    fn arithmetic_and_division() {
        let p = poly(&[-1, 0, 1]);
        let q = poly(&[1, 1]);
        let (quot, rem) = p.div_rem(&q);
        assert_eq!(quot, poly(&[-1, 1]));
        assert!(rem.is_zero());
        assert_eq!(p.degree(), Some(2));
        assert_eq!(p.eval(&int(3)), int(8));
        assert_eq!(poly(&[0, 0, 0]).degree(), None);
    }

    #[test]
    fn odd_part_drops_squares() {
        // (t-1)^2 (t-2)^3 (t+1)
        let p = poly(&[-1, 1]).mul(&poly(&[-1, 1])).mul(&poly(&[-2, 1]).mul(&poly(&[-2, 1])).mul(&poly(&[-2, 1]))).mul(&poly(&[1, 1]));
        assert_eq!(p.odd_multiplicity_part(), poly(&[-2, 1]).mul(&poly(&[1, 1])));
    }

    #[test]
    fn root_counting() {
        let p = poly(&[0, -1, 0, 1]); // t^3 - t: roots -1, 0, 1
        assert_eq!(p.count_roots_open(&int(-2), &int(2)), 3);
        assert_eq!(p.count_roots_open(&int(-1), &int(1)), 1);
        assert_eq!(p.count_roots_open(&ratio(1, 2), &int(2)), 1);
        assert_eq!(poly(&[1, 0, 1]).count_roots_open(&int(-5), &int(5)), 0);
    }

    #[test]
    fn nonnegativity() {
        let sq = poly(&[1, -2, 1]); // (t-1)^2
        assert!(sq.nonneg_on(&int(-3), &int(3)));
        assert!(!poly(&[0, 1]).nonneg_on(&int(-1), &int(1)));
        assert!(poly(&[0, 1]).nonneg_on(&int(0), &int(1)));
        // 1/1000 dip below zero between grid points
        let p = poly(&[-1, 0, 1000]).mul(&poly(&[-1, 0, 1000])).sub(&UnivariatePolynomial::constant(ratio(1, 1000)));
        assert!(!p.nonneg_on(&int(0), &int(1)));
    }

    #[test]
    fn identity_maps_intervals() {
        let t = UnivariatePolynomial::identity();
        assert!(t.maps_into(&ratio(2, 3), &ratio(4, 3), &ratio(2, 3), &ratio(4, 3)));
        assert!(!t.maps_into(&ratio(2, 3), &ratio(4, 3), &ratio(2, 3), &int(1)));
    }
}

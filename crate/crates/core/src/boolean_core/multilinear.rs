use num_traits::{One, Signed, Zero};

use super::function::PartialBooleanFunction;
use crate::error::{Error, Result};
use crate::rational::{int, Rational};

/// In-place Walsh-Hadamard butterfly: `out[S] = sum_x in[x] * chi_S(x)`.
pub fn walsh_hadamard(values: &mut [Rational]) {
    let n = values.len();
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for i in block..block + h {
                let a = values[i].clone();
                let b = values[i + h].clone();
                values[i] = &a + &b;
                values[i + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// `chi_S(x)` for subset mask `s` and point `x`.
pub fn character(s: usize, x: usize) -> i8 {
    if (s & x).count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Multilinear polynomial in the Fourier basis, coefficients indexed by subset mask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultilinearPolynomial {
    num_vars: usize,
    coeffs: Vec<Rational>,
}

impl MultilinearPolynomial {
    pub fn from_coefficients(num_vars: usize, coeffs: Vec<Rational>) -> Result<Self> {
        if coeffs.len() != 1 << num_vars {
            return Err(Error::InvalidInput(format!(
                "expected {} coefficients, got {}",
                1usize << num_vars,
                coeffs.len()
            )));
        }
        Ok(Self { num_vars, coeffs })
    }

    pub fn zero(num_vars: usize) -> Self {
        Self { num_vars, coeffs: vec![Rational::zero(); 1 << num_vars] }
    }

    pub fn constant(num_vars: usize, c: Rational) -> Self {
        let mut p = Self::zero(num_vars);
        p.coeffs[0] = c;
        p
    }

    /// The character `chi_S`.
    pub fn monomial(num_vars: usize, s: usize) -> Self {
        let mut p = Self::zero(num_vars);
        p.coeffs[s] = Rational::one();
        p
    }

    /// Fourier expansion of a real table on the cube. Parseval is asserted.
    pub fn from_table(table: &[Rational]) -> Result<Self> {
        let len = table.len();
        if !len.is_power_of_two() {
            return Err(Error::InvalidInput(format!("table length {len} is not a power of two")));
        }
        let num_vars = len.trailing_zeros() as usize;
        let mut coeffs = table.to_vec();
        walsh_hadamard(&mut coeffs);
        let scale = Rational::from_integer((len as i64).into());
        for c in coeffs.iter_mut() {
            *c /= &scale;
        }
        let p = Self { num_vars, coeffs };
        let energy: Rational = table.iter().map(|v| v * v).sum::<Rational>() / &scale;
        let parseval: Rational = p.coeffs.iter().map(|c| c * c).sum();
        debug_assert_eq!(energy, parseval);
        if energy != parseval {
            return Err(Error::Solver("Parseval identity violated".into()));
        }
        Ok(p)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coefficient(&self, s: usize) -> &Rational {
        &self.coeffs[s]
    }

    /// Degree of the polynomial; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(s, _)| s.count_ones() as usize)
            .max()
    }

    /// Smallest `|S|` with a nonzero coefficient; `n + 1` for the zero polynomial.
    pub fn min_degree(&self) -> usize {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(s, _)| s.count_ones() as usize)
            .min()
            .unwrap_or(self.num_vars + 1)
    }

    /// `sum_S |p^(S)|`.
    pub fn fourier_l1(&self) -> Rational {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    pub fn parseval_sum(&self) -> Rational {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// Values on all `2^n` vertices.
    pub fn to_table(&self) -> Vec<Rational> {
        let mut t = self.coeffs.clone();
        walsh_hadamard(&mut t);
        t
    }

    pub fn eval_vertex(&self, x: usize) -> Rational {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(s, c)| if character(s, x) == 1 { c.clone() } else { -c })
            .sum()
    }

    /// Multilinear extension at `z` in `[-1,1]^n`.
    pub fn eval(&self, z: &[Rational]) -> Result<Rational> {
        if z.len() != self.num_vars {
            return Err(Error::Arity { expected: self.num_vars, actual: z.len() });
        }
        let one = Rational::one();
        if let Some(i) = z.iter().position(|zi| zi.abs() > one) {
            return Err(Error::OutOfRange(format!("z[{i}] = {} outside [-1,1]", z[i])));
        }
        let mut layer = self.coeffs.clone();
        for (i, zi) in z.iter().enumerate().rev() {
            let half = 1usize << i;
            let next: Vec<Rational> =
                (0..half).map(|s| &layer[s] + &layer[s | half] * zi).collect();
            layer = next;
        }
        Ok(layer.into_iter().next().unwrap_or_else(Rational::zero))
    }

    pub fn eval_f64(&self, z: &[f64]) -> f64 {
        let mut layer: Vec<f64> = self.coeffs.iter().map(crate::rational::to_f64).collect();
        for (i, zi) in z.iter().enumerate().rev() {
            let half = 1usize << i;
            layer = (0..half).map(|s| layer[s] + layer[s | half] * zi).collect();
        }
        layer[0]
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        Ok(Self {
            num_vars: self.num_vars,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self { num_vars: self.num_vars, coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    /// Pointwise product on the cube (multilinear reduction of the product).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        let mut out = vec![Rational::zero(); self.coeffs.len()];
        for (s, a) in self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            for (t, b) in other.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                out[s ^ t] += a * b;
            }
        }
        Ok(Self { num_vars: self.num_vars, coeffs: out })
    }

    fn check_vars(&self, other: &Self) -> Result<()> {
        if self.num_vars != other.num_vars {
            return Err(Error::Arity { expected: self.num_vars, actual: other.num_vars });
        }
        Ok(())
    }
}

/// Fourier transform of a total Boolean function.
pub fn fourier_transform(f: &PartialBooleanFunction) -> Result<MultilinearPolynomial> {
    if !f.is_total() {
        return Err(Error::PartialFunction);
    }
    let table: Vec<Rational> = f.values().iter().map(|&v| int(v as i64)).collect();
    MultilinearPolynomial::from_table(&table)
}

/// Inner product `sum_x a(x) b(x)`.
pub fn inner(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use proptest::prelude::*;

    fn table_of(values: &[i8]) -> Vec<Rational> {
        values.iter().map(|&v| int(v as i64)).collect()
    }

    #[test]
    fn dictator_and_character() {
        let p = fourier_transform(&PartialBooleanFunction::identity()).unwrap();
        assert_eq!(p.coefficients(), &[int(0), int(1)]);
        let chi12 = PartialBooleanFunction::parity(2);
        let p = fourier_transform(&chi12).unwrap();
        assert_eq!(p.coefficient(3), &int(1));
        assert_eq!(p.fourier_l1(), int(1));
    }

    #[test]
    fn partial_input_rejected() {
        let g = PartialBooleanFunction::from_values(1, vec![1, 0]).unwrap();
        assert_eq!(fourier_transform(&g), Err(Error::PartialFunction));
    }

    #[test]
    fn eval_out_of_range_rejected() {
        let p = MultilinearPolynomial::monomial(2, 3);
        assert!(p.eval(&[int(2), int(0)]).is_err());
        assert!(p.eval(&[int(0)]).is_err());
        assert_eq!(p.eval(&[ratio(1, 2), ratio(-1, 3)]).unwrap(), ratio(-1, 6));
    }

    #[test]
    fn eval_is_expectation_under_product_measure() {
        // Independent oracle: E[p(x)] with P[x_i = -1] = (1 - z_i) / 2.
        let f = PartialBooleanFunction::majority(3);
        let p = fourier_transform(&f).unwrap();
        let z = [ratio(1, 3), ratio(-1, 2), ratio(1, 5)];
        let mut expected = Rational::zero();
        for x in 0..8usize {
            let mut w = Rational::one();
            for (i, zi) in z.iter().enumerate() {
                let pm = (Rational::one() - zi) / int(2);
                w *= if x >> i & 1 == 1 { pm.clone() } else { Rational::one() - pm };
            }
            expected += w * int(f.get(x).unwrap() as i64);
        }
        assert_eq!(p.eval(&z).unwrap(), expected);
    }

    #[test]
    fn product_matches_pointwise() {
        let a = fourier_transform(&PartialBooleanFunction::or(3)).unwrap();
        let b = fourier_transform(&PartialBooleanFunction::majority(3)).unwrap();
        let prod = a.mul(&b).unwrap().to_table();
        let (ta, tb) = (a.to_table(), b.to_table());
        for x in 0..8 {
            assert_eq!(prod[x], &ta[x] * &tb[x]);
        }
    }

    proptest! {
        #[test]
        fn round_trip_is_exact(n in 0usize..=12, seed in any::<u64>()) {
            let values: Vec<i8> = (0..1usize << n)
                .map(|x| if (seed.rotate_left((x % 64) as u32) ^ (x as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)) & 1 == 0 { 1 } else { -1 })
                .collect();
            let f = PartialBooleanFunction::from_values(n, values.clone()).unwrap();
            let p = fourier_transform(&f).unwrap();
            prop_assert_eq!(p.to_table(), table_of(&values));
            prop_assert_eq!(p.parseval_sum(), int(1));
        }

        #[test]
        fn vertex_eval_matches_table(values in proptest::collection::vec(-5i64..=5, 16)) {
            let table: Vec<Rational> = values.iter().map(|&v| int(v)).collect();
            let p = MultilinearPolynomial::from_table(&table).unwrap();
            for x in 0..16usize {
                let z: Vec<Rational> = (0..4).map(|i| if x >> i & 1 == 1 { int(-1) } else { int(1) }).collect();
                prop_assert_eq!(p.eval(&z).unwrap(), table[x].clone());
                prop_assert_eq!(p.eval_vertex(x), table[x].clone());
            }
        }

        #[test]
        fn fourier_l1_sub_additive_and_multiplicative(
            n in 1usize..=8,
            a in proptest::collection::vec(-3i64..=3, 256),
            b in proptest::collection::vec(-3i64..=3, 256),
        ) {
            let size = 1usize << n;
            let ta: Vec<Rational> = a[..size].iter().map(|&v| int(v)).collect();
            let tb: Vec<Rational> = b[..size].iter().map(|&v| int(v)).collect();
            let pa = MultilinearPolynomial::from_table(&ta).unwrap();
            let pb = MultilinearPolynomial::from_table(&tb).unwrap();
            let sum: Vec<Rational> = ta.iter().zip(&tb).map(|(x, y)| x + y).collect();
            let prod: Vec<Rational> = ta.iter().zip(&tb).map(|(x, y)| x * y).collect();
            let psum = MultilinearPolynomial::from_table(&sum).unwrap();
            let pprod = MultilinearPolynomial::from_table(&prod).unwrap();
            prop_assert!(psum.fourier_l1() <= pa.fourier_l1() + pb.fourier_l1());
            prop_assert!(pprod.fourier_l1() <= pa.fourier_l1() * pb.fourier_l1());
        }
    }

    #[test]
    fn random_four_variable_parseval() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let values: Vec<i8> = (0..16).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
            let p = fourier_transform(&PartialBooleanFunction::from_values(4, values.clone()).unwrap()).unwrap();
            // Direct summation oracle for each coefficient.
            let mut total = Rational::zero();
            for s in 0..16usize {
                let c: i64 = (0..16usize).map(|x| values[x] as i64 * character(s, x) as i64).sum();
                let c = ratio(c, 16);
                assert_eq!(&c, p.coefficient(s));
                total += &c * &c;
            }
            assert_eq!(total, int(1));
        }
    }
}

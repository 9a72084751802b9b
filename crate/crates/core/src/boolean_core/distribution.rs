use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{int, Rational};

/// Product distribution on `{-1,+1}^n`; `biases[i] = P[x_{i+1} = -1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductDistribution {
    biases: Vec<Rational>,
}

impl ProductDistribution {
    pub fn new(biases: Vec<Rational>) -> Result<Self> {
        let one = Rational::one();
        if let Some(i) = biases.iter().position(|b| b < &Rational::zero() || b > &one) {
            return Err(Error::OutOfRange(format!("bias {} at index {i}", biases[i])));
        }
        Ok(Self { biases })
    }

    pub fn uniform_bias(n: usize, bias: Rational) -> Result<Self> {
        Self::new(vec![bias; n])
    }

    /// The distribution whose coordinate means are `z_i`, i.e. bias `(1 - z_i)/2`.
    pub fn with_means(z: &[Rational]) -> Result<Self> {
        Self::new(z.iter().map(|zi| (Rational::one() - zi) / int(2)).collect())
    }

    pub fn biases(&self) -> &[Rational] {
        &self.biases
    }

    pub fn num_vars(&self) -> usize {
        self.biases.len()
    }

    pub fn prob(&self, x: usize) -> Rational {
        self.biases
            .iter()
            .enumerate()
            .map(|(i, b)| if x >> i & 1 == 1 { b.clone() } else { Rational::one() - b })
            .product()
    }

    /// `P[|x| = j]` for `j = 0..=n` via the Poisson-binomial recurrence.
    pub fn level_weights(&self) -> Vec<Rational> {
        let n = self.biases.len();
        let mut w = vec![Rational::zero(); n + 1];
        w[0] = Rational::one();
        for (i, b) in self.biases.iter().enumerate() {
            let stay = Rational::one() - b;
            for j in (0..=i + 1).rev() {
                let mut v = &w[j] * &stay;
                if j > 0 {
                    v += &w[j - 1] * b;
                }
                w[j] = v;
            }
        }
        w
    }

    /// `E[f(x)]` by enumeration over the cube.
    pub fn expectation(&self, table: &[Rational]) -> Rational {
        table.iter().enumerate().map(|(x, v)| self.prob(x) * v).sum()
    }

    /// `E[g(|x|)]` for a function of the Hamming weight.
    pub fn expect_level(&self, levels: &[Rational]) -> Rational {
        self.level_weights().iter().zip(levels).map(|(w, v)| w * v).sum()
    }
}

/// Multilinear extension of a symmetric function given by its level values,
/// evaluated at `z` in `[-1,1]^n`.
pub fn eval_symmetric(levels: &[Rational], z: &[Rational]) -> Result<Rational> {
    if levels.len() != z.len() + 1 {
        return Err(Error::Arity { expected: z.len() + 1, actual: levels.len() });
    }
    let mu = ProductDistribution::with_means(z)?;
    Ok(mu.expect_level(levels))
}

/// Floating-point variant of [`eval_symmetric`].
pub fn eval_symmetric_f64(levels: &[f64], z: &[f64]) -> f64 {
    let n = z.len();
    let mut w = vec![0.0; n + 1];
    w[0] = 1.0;
    for (i, zi) in z.iter().enumerate() {
        let b = (1.0 - zi) / 2.0;
        for j in (0..=i + 1).rev() {
            let mut v = w[j] * (1.0 - b);
            if j > 0 {
                v += w[j - 1] * b;
            }
            w[j] = v;
        }
    }
    w.iter().zip(levels).map(|(a, b)| a * b).sum()
}

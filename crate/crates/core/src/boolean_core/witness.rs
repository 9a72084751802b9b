use num_traits::{Signed, Zero};
use serde::Serialize;

use super::function::PartialBooleanFunction;
use super::multilinear::MultilinearPolynomial;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// A real function on `{-1,+1}^n` with its `l1` norm and pure-high-degree order.
///
/// The order `d` is the largest value such that the function is orthogonal to
/// every polynomial of degree `< d`; the zero function has order `n + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualWitness {
    num_vars: usize,
    table: Vec<Rational>,
    l1: Rational,
    order: usize,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct TableEntry {
    pub point: usize,
    pub value_num: String,
    pub value_den: String,
}

impl DualWitness {
    pub fn new(table: Vec<Rational>) -> Result<Self> {
        let p = MultilinearPolynomial::from_table(&table)?;
        let l1 = table.iter().map(|v| v.abs()).sum();
        Ok(Self { num_vars: p.num_vars(), order: p.min_degree(), table, l1 })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn domain_size(&self) -> usize {
        self.table.len()
    }

    pub fn table(&self) -> &[Rational] {
        &self.table
    }

    pub fn value(&self, x: usize) -> &Rational {
        &self.table[x]
    }

    pub fn l1_norm(&self) -> &Rational {
        &self.l1
    }

    pub fn phd_order(&self) -> usize {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.table.iter().all(Zero::is_zero)
    }

    /// `sum_{x in dom f} f(x) psi(x) - sum_{x not in dom f} |psi(x)|`.
    pub fn correlation(&self, f: &PartialBooleanFunction) -> Result<Rational> {
        if f.num_points() != self.table.len() {
            return Err(Error::Arity { expected: self.table.len(), actual: f.num_points() });
        }
        Ok(self
            .table
            .iter()
            .enumerate()
            .map(|(x, v)| match f.get(x) {
                Some(1) => v.clone(),
                Some(_) => -v,
                None => -v.abs(),
            })
            .sum())
    }

    /// `<f, psi>` over the whole cube for a real table `f`.
    pub fn inner(&self, other: &[Rational]) -> Rational {
        self.table.iter().zip(other).map(|(a, b)| a * b).sum()
    }

    /// Exhaustive check that the cached order is exactly right: orthogonal to
    /// every character of degree `< order`, and (unless zero) not orthogonal to
    /// some character of degree `order`.
    pub fn verify_order(&self) -> bool {
        let n = self.num_vars;
        let mut hit = false;
        for s in 0..1usize << n {
            let deg = s.count_ones() as usize;
            if deg > self.order {
                continue;
            }
            let corr: Rational = self
                .table
                .iter()
                .enumerate()
                .map(|(x, v)| if (s & x).count_ones() % 2 == 0 { v.clone() } else { -v })
                .sum();
            if deg < self.order && !corr.is_zero() {
                return false;
            }
            if deg == self.order && !corr.is_zero() {
                hit = true;
            }
        }
        hit || self.order == n + 1
    }

    pub fn verify_l1(&self) -> bool {
        self.l1 == self.table.iter().map(|v| v.abs()).sum::<Rational>()
    }

    pub fn entries(&self) -> Vec<TableEntry> {
        self.table
            .iter()
            .enumerate()
            .map(|(point, v)| TableEntry {
                point,
                value_num: v.numer().to_string(),
                value_den: v.denom().to_string(),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn parity_witness() {
        let f = PartialBooleanFunction::parity(3);
        let t: Vec<Rational> = f.values().iter().map(|&v| ratio(v as i64, 8)).collect();
        let w = DualWitness::new(t).unwrap();
        assert_eq!(w.phd_order(), 3);
        assert_eq!(w.l1_norm(), &int(1));
        assert_eq!(w.correlation(&f).unwrap(), int(1));
        assert!(w.verify_order() && w.verify_l1());
    }

    #[test]
    fn zero_witness_order() {
        let w = DualWitness::new(vec![int(0); 4]).unwrap();
        assert_eq!(w.phd_order(), 3);
        assert!(w.verify_order());
    }

    #[test]
    fn off_domain_mass_is_penalised() {
        let f = PartialBooleanFunction::from_values(1, vec![1, 0]).unwrap();
        let w = DualWitness::new(vec![ratio(1, 2), ratio(-1, 2)]).unwrap();
        assert_eq!(w.correlation(&f).unwrap(), int(0));
    }
}

use std::fmt;

use crate::error::{Error, Result};

/// Largest number of variables any table in the toolkit may have.
pub const MAX_VARS: usize = 16;

/// A Boolean function on a subset of `{-1,+1}^n`.
///
/// Points are encoded as `n`-bit integers: bit `i` set means `x_{i+1} = -1`,
/// so `|x|` is the popcount. Each stored value is `+1`, `-1`, or `0` for a
/// point outside the domain.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PartialBooleanFunction {
    num_vars: usize,
    values: Vec<i8>,
}

impl fmt::Debug for PartialBooleanFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PartialBooleanFunction(n={}, [", self.num_vars)?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            match v {
                1 => write!(f, "+")?,
                -1 => write!(f, "-")?,
                _ => write!(f, "*")?,
            }
        }
        write!(f, "])")
    }
}

impl PartialBooleanFunction {
    /// Builds a function from a value table with entries in `{-1, 0, +1}`
    /// (`0` meaning undefined).
    pub fn from_values(num_vars: usize, values: Vec<i8>) -> Result<Self> {
        if num_vars > MAX_VARS {
            return Err(Error::TooLarge(format!("{num_vars} variables (max {MAX_VARS})")));
        }
        if values.len() != 1 << num_vars {
            return Err(Error::InvalidInput(format!(
                "table has {} entries, expected {}",
                values.len(),
                1usize << num_vars
            )));
        }
        if let Some(v) = values.iter().find(|v| !matches!(v, -1..=1)) {
            return Err(Error::InvalidInput(format!("table value {v} not in {{-1,0,1}}")));
        }
        if values.iter().all(|&v| v == 0) {
            return Err(Error::InvalidInput("domain is empty".into()));
        }
        Ok(Self { num_vars, values })
    }

    pub fn from_fn(num_vars: usize, f: impl Fn(usize) -> i8) -> Result<Self> {
        Self::from_values(num_vars, (0..1usize << num_vars).map(f).collect())
    }

    pub fn constant(num_vars: usize, value: i8) -> Self {
        Self::from_fn(num_vars, |_| value).expect("constant")
    }

    /// The dictator `x_1` on a single variable.
    pub fn identity() -> Self {
        Self::from_values(1, vec![1, -1]).expect("identity")
    }

    pub fn parity(n: usize) -> Self {
        Self::from_fn(n, |x| if x.count_ones() % 2 == 0 { 1 } else { -1 }).expect("parity")
    }

    pub fn or(n: usize) -> Self {
        Self::from_fn(n, |x| if x != 0 { -1 } else { 1 }).expect("or")
    }

    pub fn and(n: usize) -> Self {
        let full = (1usize << n) - 1;
        Self::from_fn(n, |x| if x == full { -1 } else { 1 }).expect("and")
    }

    /// Majority; ties (even `n`) evaluate to `+1`.
    pub fn majority(n: usize) -> Self {
        Self::from_fn(n, |x| if 2 * x.count_ones() as usize > n { -1 } else { 1 }).expect("maj")
    }

    /// Looks up a built-in function by name: `or<n>`, `and<n>`, `maj<n>`,
    /// `parity<n>`, `const1`, `const-1`, `id`.
    pub fn catalog(name: &str) -> Result<Self> {
        let name = name.trim().to_ascii_lowercase();
        let arity = |prefix: &str| -> Option<usize> {
            name.strip_prefix(prefix).and_then(|s| s.parse::<usize>().ok())
        };
        let checked = |n: usize| -> Result<usize> {
            if n == 0 || n > 12 {
                Err(Error::OutOfRange(format!("arity {n} in `{name}`")))
            } else {
                Ok(n)
            }
        };
        match name.as_str() {
            "const1" | "const+1" => return Ok(Self::constant(1, 1)),
            "const-1" => return Ok(Self::constant(1, -1)),
            "id" | "x1" => return Ok(Self::identity()),
            _ => {}
        }
        if let Some(n) = arity("parity") {
            return Ok(Self::parity(checked(n)?));
        }
        if let Some(n) = arity("maj") {
            return Ok(Self::majority(checked(n)?));
        }
        if let Some(n) = arity("and") {
            return Ok(Self::and(checked(n)?));
        }
        if let Some(n) = arity("or") {
            return Ok(Self::or(checked(n)?));
        }
        Err(Error::InvalidInput(format!("unknown catalog function `{name}`")))
    }

    pub fn catalog_names() -> Vec<&'static str> {
        vec![
            "const1", "const-1", "id", "or2", "or3", "or4", "and2", "and3", "and4", "maj3",
            "parity1", "parity2", "parity3", "parity4",
        ]
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_points(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    /// `Some(±1)` on the domain, `None` elsewhere.
    pub fn get(&self, x: usize) -> Option<i8> {
        match self.values[x] {
            0 => None,
            v => Some(v),
        }
    }

    pub fn in_domain(&self, x: usize) -> bool {
        self.values[x] != 0
    }

    pub fn is_total(&self) -> bool {
        self.values.iter().all(|&v| v != 0)
    }

    pub fn domain_size(&self) -> usize {
        self.values.iter().filter(|&&v| v != 0).count()
    }

    pub fn domain(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.values.len()).filter(move |&x| self.values[x] != 0)
    }

    /// Constant on its domain.
    pub fn is_constant(&self) -> bool {
        let mut it = self.values.iter().filter(|&&v| v != 0);
        let first = it.next().copied();
        it.all(|&v| Some(v) == first)
    }

    /// Restricts the domain to the points where `keep` holds.
    pub fn restrict(&self, keep: impl Fn(usize) -> bool) -> Result<Self> {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(x, &v)| if keep(x) { v } else { 0 })
            .collect();
        Self::from_values(self.num_vars, values)
    }

    /// Total extension of a partial function; `fill(x)` supplies values off the domain.
    pub fn extend(&self, fill: impl Fn(usize) -> i8) -> Result<Self> {
        Self::from_fn(self.num_vars, |x| match self.values[x] {
            0 => fill(x),
            v => v,
        })
    }
}

/// Splits a product-space point into its per-factor coordinates.
pub fn split_point(x: usize, arities: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(arities.len());
    let mut shift = 0;
    for &a in arities {
        out.push((x >> shift) & ((1usize << a) - 1));
        shift += a;
    }
    out
}

/// Inverse of [`split_point`].
pub fn join_point(parts: &[usize], arities: &[usize]) -> usize {
    let mut x = 0;
    let mut shift = 0;
    for (&p, &a) in parts.iter().zip(arities) {
        x |= p << shift;
        shift += a;
    }
    x
}

/// XOR (tensor product) of independent copies: variables are concatenated in
/// order, the domain is the product of domains, and values multiply.
pub fn tensor_xor(parts: &[PartialBooleanFunction]) -> Result<PartialBooleanFunction> {
    if parts.is_empty() {
        return Err(Error::InvalidInput("tensor of zero functions".into()));
    }
    let arities: Vec<usize> = parts.iter().map(|g| g.num_vars).collect();
    let total: usize = arities.iter().sum();
    if total > MAX_VARS {
        return Err(Error::TooLarge(format!("{total} variables (max {MAX_VARS})")));
    }
    PartialBooleanFunction::from_fn(total, |x| {
        let coords = split_point(x, &arities);
        parts
            .iter()
            .zip(&coords)
            .try_fold(1i8, |acc, (g, &xi)| g.get(xi).map(|v| acc * v))
            .unwrap_or(0)
    })
}

/// Block composition `F(f_1(x_1), ..., f_n(x_n))` defined on `prod dom f_i`.
pub fn compose(
    outer: &PartialBooleanFunction,
    inner: &[PartialBooleanFunction],
) -> Result<PartialBooleanFunction> {
    if !outer.is_total() {
        return Err(Error::PartialFunction);
    }
    if inner.len() != outer.num_vars {
        return Err(Error::Arity { expected: outer.num_vars, actual: inner.len() });
    }
    let arities: Vec<usize> = inner.iter().map(|g| g.num_vars).collect();
    let total: usize = arities.iter().sum();
    if total > MAX_VARS {
        return Err(Error::TooLarge(format!("{total} variables (max {MAX_VARS})")));
    }
    PartialBooleanFunction::from_fn(total, |x| {
        let coords = split_point(x, &arities);
        let mut z = 0usize;
        for (i, (g, &xi)) in inner.iter().zip(&coords).enumerate() {
            match g.get(xi) {
                Some(-1) => z |= 1 << i,
                Some(_) => {}
                None => return 0,
            }
        }
        outer.values[z]
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_lookups() {
        assert_eq!(PartialBooleanFunction::catalog("parity3").unwrap(), PartialBooleanFunction::parity(3));
        assert!(PartialBooleanFunction::catalog("const1").unwrap().is_constant());
        assert!(PartialBooleanFunction::catalog("nope").is_err());
        assert!(PartialBooleanFunction::catalog("or0").is_err());
    }

    #[test]
    fn empty_domain_is_rejected() {
        assert!(PartialBooleanFunction::from_values(1, vec![0, 0]).is_err());
        assert!(PartialBooleanFunction::from_values(1, vec![2, 1]).is_err());
        assert!(PartialBooleanFunction::from_values(2, vec![1, 1]).is_err());
    }

    #[test]
    fn xor_of_two_dictators_is_parity() {
        let id = PartialBooleanFunction::identity();
        let t = tensor_xor(&[id.clone(), id]).unwrap();
        assert_eq!(t, PartialBooleanFunction::parity(2));
    }

    #[test]
    fn product_domain_cardinality() {
        let g1 = PartialBooleanFunction::from_values(2, vec![1, -1, 1, 0]).unwrap();
        let g2 = PartialBooleanFunction::from_values(3, vec![1, 0, 0, -1, 1, 0, 1, -1]).unwrap();
        assert_eq!(g1.domain_size(), 3);
        assert_eq!(g2.domain_size(), 5);
        assert_eq!(tensor_xor(&[g1, g2]).unwrap().domain_size(), 15);
    }

    #[test]
    fn or_tensor_or_matches_pointwise_product() {
        let or2 = PartialBooleanFunction::or(2);
        let t = tensor_xor(&[or2.clone(), or2.clone()]).unwrap();
        for x in 0..16usize {
            let (a, b) = (x & 3, x >> 2);
            assert_eq!(t.get(x).unwrap(), or2.get(a).unwrap() * or2.get(b).unwrap());
        }
    }

    #[test]
    fn compose_identity_and_parity() {
        let f = PartialBooleanFunction::majority(3);
        let c = compose(&PartialBooleanFunction::identity(), std::slice::from_ref(&f)).unwrap();
        assert_eq!(c, f);
        let gs = vec![PartialBooleanFunction::or(2), PartialBooleanFunction::majority(3)];
        assert_eq!(
            compose(&PartialBooleanFunction::parity(2), &gs).unwrap(),
            tensor_xor(&gs).unwrap()
        );
    }

    #[test]
    fn compose_and_of_ors_matches_enumeration() {
        let or2 = PartialBooleanFunction::or(2);
        let c = compose(&PartialBooleanFunction::and(2), &[or2.clone(), or2]).unwrap();
        for x in 0..16usize {
            // -1 means true: AND of two ORs over bit pairs.
            let or_a = (x & 3) != 0;
            let or_b = (x >> 2) != 0;
            let expected = if or_a && or_b { -1 } else { 1 };
            assert_eq!(c.get(x), Some(expected));
        }
    }

    #[test]
    fn compose_rejects_bad_arity_and_partial_outer() {
        let id = PartialBooleanFunction::identity();
        assert!(matches!(
            compose(&PartialBooleanFunction::and(2), std::slice::from_ref(&id)),
            Err(Error::Arity { expected: 2, actual: 1 })
        ));
        let partial = PartialBooleanFunction::from_values(1, vec![1, 0]).unwrap();
        assert!(compose(&partial, &[id]).is_err());
    }

    #[test]
    fn compose_with_partial_inner_restricts_domain() {
        let g = PartialBooleanFunction::from_values(1, vec![1, 0]).unwrap();
        let c = compose(&PartialBooleanFunction::and(2), &[g.clone(), PartialBooleanFunction::identity()]).unwrap();
        assert_eq!(c.domain_size(), 2);
    }
}

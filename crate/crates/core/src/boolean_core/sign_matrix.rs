use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_traits::Zero;
use rand::Rng;

use super::linalg::{classic_matrix_norms, ClassicNorms};
use crate::error::{Error, Result};
use crate::rational::{int, Rational};

/// Matrix with entries in `{-1, +1, *}`; `*` is stored as `0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartialSignMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<i8>,
}

impl PartialSignMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<i8>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInput("matrix dimensions must be positive".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::InvalidInput(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if let Some(v) = entries.iter().find(|v| !matches!(v, -1..=1)) {
            return Err(Error::InvalidInput(format!("entry {v} not in {{-1,1,*}}")));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> i8) -> Result<Self> {
        let entries = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        Self::new(rows, cols, entries)
    }

    /// `H^{(x)k}` with `H = [[1,1],[1,-1]]`.
    pub fn hadamard(k: usize) -> Self {
        let n = 1usize << k;
        Self::from_fn(n, n, |i, j| if (i & j).count_ones() % 2 == 0 { 1 } else { -1 })
            .expect("hadamard")
    }

    pub fn all_ones(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| 1).expect("ones")
    }

    /// Sign pattern of the identity: `+1` on the diagonal, `-1` elsewhere.
    pub fn identity_sign(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1 } else { -1 }).expect("identity sign")
    }

    /// Disjointness on `k`-bit sets: `-1` (true) when the sets are disjoint.
    pub fn disjointness(k: usize) -> Self {
        let n = 1usize << k;
        Self::from_fn(n, n, |i, j| if i & j == 0 { -1 } else { 1 }).expect("disj")
    }

    pub fn random(rows: usize, cols: usize, rng: &mut impl Rng) -> Self {
        let entries = (0..rows * cols).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
        Self::new(rows, cols, entries).expect("random")
    }

    /// Random sign matrix of rank at least two (needs `rows, cols >= 2`).
    pub fn random_rank2(rows: usize, cols: usize, rng: &mut impl Rng) -> Self {
        loop {
            let m = Self::random(rows, cols, rng);
            if m.rank().map(|r| r >= 2).unwrap_or(false) {
                return m;
            }
        }
    }

    /// Built-in matrices: `H<N>` (N a power of two), `J<r>x<c>`, `J<n>`, `I<n>`, `DISJ<k>`.
    pub fn catalog(name: &str) -> Result<Self> {
        let upper = name.trim().to_ascii_uppercase();
        let bad = || Error::InvalidInput(format!("unknown catalog matrix `{name}`"));
        let dim = |s: &str| -> Result<usize> {
            let v: usize = s.parse().map_err(|_| bad())?;
            if v == 0 || v > 64 {
                return Err(Error::OutOfRange(format!("dimension {v} in `{name}`")));
            }
            Ok(v)
        };
        if let Some(rest) = upper.strip_prefix("DISJ") {
            let k = dim(rest)?;
            if k > 6 {
                return Err(Error::OutOfRange(format!("`{name}` too large")));
            }
            return Ok(Self::disjointness(k));
        }
        if let Some(rest) = upper.strip_prefix('H') {
            let n = dim(rest)?;
            if !n.is_power_of_two() {
                return Err(Error::InvalidInput(format!("`{name}`: order must be a power of two")));
            }
            return Ok(Self::hadamard(n.trailing_zeros() as usize));
        }
        if let Some(rest) = upper.strip_prefix('J') {
            return match rest.split_once('X') {
                Some((r, c)) => Ok(Self::all_ones(dim(r)?, dim(c)?)),
                None => {
                    let n = dim(rest)?;
                    Ok(Self::all_ones(n, n))
                }
            };
        }
        if let Some(rest) = upper.strip_prefix('I') {
            return Ok(Self::identity_sign(dim(rest)?));
        }
        Err(bad())
    }

    pub fn catalog_names() -> Vec<&'static str> {
        vec!["H2", "H4", "H8", "H16", "J2", "J3x5", "I3", "I4", "DISJ2"]
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[i8] {
        &self.entries
    }

    /// `Some(±1)` or `None` for `*`.
    pub fn get(&self, i: usize, j: usize) -> Option<i8> {
        match self.entries[i * self.cols + j] {
            0 => None,
            v => Some(v),
        }
    }

    pub fn is_total(&self) -> bool {
        self.entries.iter().all(|&v| v != 0)
    }

    pub fn is_all_star(&self) -> bool {
        self.entries.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.entries[j * self.cols + i]).expect("t")
    }

    /// Kronecker product; `*` absorbs.
    pub fn kron(&self, other: &Self) -> Self {
        Self::from_fn(self.rows * other.rows, self.cols * other.cols, |i, j| {
            self.entries[(i / other.rows) * self.cols + j / other.cols]
                * other.entries[(i % other.rows) * other.cols + j % other.cols]
        })
        .expect("kron")
    }

    pub fn kron_all(parts: &[Self]) -> Result<Self> {
        let (first, rest) = parts
            .split_first()
            .ok_or_else(|| Error::InvalidInput("tensor of zero matrices".into()))?;
        Ok(rest.iter().fold(first.clone(), |acc, m| acc.kron(m)))
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        if rows.iter().any(|&r| r >= self.rows) || cols.iter().any(|&c| c >= self.cols) {
            return Err(Error::OutOfRange("submatrix index".into()));
        }
        Self::from_fn(rows.len(), cols.len(), |i, j| self.entries[rows[i] * self.cols + cols[j]])
    }

    /// Real matrix view of a total sign matrix.
    pub fn to_real(&self) -> Result<DMatrix<f64>> {
        if !self.is_total() {
            return Err(Error::PartialMatrix);
        }
        Ok(DMatrix::from_fn(self.rows, self.cols, |i, j| self.entries[i * self.cols + j] as f64))
    }

    pub fn classic_norms(&self) -> Result<ClassicNorms> {
        Ok(classic_matrix_norms(&self.to_real()?))
    }

    /// Exact rank; only defined for total matrices.
    pub fn rank(&self) -> Result<usize> {
        if !self.is_total() {
            return Err(Error::PartialMatrix);
        }
        let mut m: Vec<Vec<Rational>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| int(self.entries[i * self.cols + j] as i64)).collect())
            .collect();
        Ok(rational_rank(&mut m))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                if j > 0 {
                    out.push(',');
                }
                let cell = match self.entries[i * self.cols + j] {
                    1 => "1",
                    -1 => "-1",
                    _ => "*",
                };
                out.push_str(cell);
            }
            let _ = writeln!(out);
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rows = 0;
        let mut cols = None;
        let mut entries = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let cells: Vec<&str> = line.split(',').collect();
            match cols {
                None => cols = Some(cells.len()),
                Some(c) if c != cells.len() => {
                    return Err(Error::Parse(format!(
                        "line {}: expected {c} cells, found {}",
                        lineno + 1,
                        cells.len()
                    )))
                }
                _ => {}
            }
            for cell in cells {
                entries.push(match cell.trim() {
                    "1" | "+1" => 1,
                    "-1" => -1,
                    "*" => 0,
                    other => {
                        return Err(Error::Parse(format!("line {}: bad cell `{other}`", lineno + 1)))
                    }
                });
            }
            rows += 1;
        }
        let cols = cols.ok_or_else(|| Error::Parse("empty matrix file".into()))?;
        Self::new(rows, cols, entries).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Rank by fraction-free elimination over the rationals (destroys `m`).
pub fn rational_rank(m: &mut [Vec<Rational>]) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank][c].clone();
        for r in 0..rows {
            if r != rank && !m[r][c].is_zero() {
                let factor = &m[r][c] / &pivot;
                for k in c..cols {
                    let delta = &factor * &m[rank][k];
                    m[r][k] -= delta;
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

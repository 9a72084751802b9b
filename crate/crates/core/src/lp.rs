//! Exact two-phase simplex over the rationals with a dense tableau.
//!
//! Pivoting uses the most negative reduced cost and falls back to Bland's rule
//! after a run of degenerate pivots, which rules out cycling.

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug)]
pub struct Row {
    pub coeffs: Vec<(usize, Rational)>,
    pub cmp: Cmp,
    pub rhs: Rational,
}

/// `minimize c^T x` subject to linear rows; each variable is free or `>= 0`.
#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    cost: Vec<Rational>,
    free: Vec<bool>,
    rows: Vec<Row>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub x: Vec<Rational>,
    pub objective: Rational,
    /// One multiplier per row: `c - A^T y` is zero on free variables and
    /// nonnegative on the others, and `b^T y` equals the objective.
    pub duals: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(self) -> Option<LpSolution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, free: bool, cost: Rational) -> usize {
        self.cost.push(cost);
        self.free.push(free);
        self.cost.len() - 1
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, Rational)>, cmp: Cmp, rhs: Rational) -> usize {
        debug_assert!(coeffs.iter().all(|(j, _)| *j < self.cost.len()));
        self.rows.push(Row { coeffs, cmp, rhs });
        self.rows.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.cost.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).run(self)
    }

    /// Exact primal feasibility of `x`.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        if x.len() != self.cost.len() {
            return false;
        }
        if self.free.iter().zip(x).any(|(&f, v)| !f && v.is_negative()) {
            return false;
        }
        self.rows.iter().all(|r| {
            let lhs: Rational = r.coeffs.iter().map(|(j, a)| a * &x[*j]).sum();
            match r.cmp {
                Cmp::Le => lhs <= r.rhs,
                Cmp::Eq => lhs == r.rhs,
                Cmp::Ge => lhs >= r.rhs,
            }
        })
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        self.cost.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ColKind {
    Structural,
    Slack,
    Artificial,
}

struct Tableau {
    /// `m` rows of `ncols + 1` entries; the last entry is the right-hand side.
    t: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    kinds: Vec<ColKind>,
    /// Column of the identity block for each row (slack or artificial).
    initial: Vec<usize>,
    /// `-1` when the row was negated to make the right-hand side nonnegative.
    flip: Vec<bool>,
    /// Columns `(plus, minus)` of each original variable.
    var_cols: Vec<(usize, Option<usize>)>,
    cost: Vec<Rational>,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let mut kinds = Vec::new();
        let mut cost = Vec::new();
        let mut var_cols = Vec::new();
        for (j, &free) in lp.free.iter().enumerate() {
            let plus = kinds.len();
            kinds.push(ColKind::Structural);
            cost.push(lp.cost[j].clone());
            let minus = free.then(|| {
                kinds.push(ColKind::Structural);
                cost.push(-&lp.cost[j]);
                kinds.len() - 1
            });
            var_cols.push((plus, minus));
        }
        let m = lp.rows.len();
        let flip: Vec<bool> = lp.rows.iter().map(|r| r.rhs.is_negative()).collect();
        let mut slack_of = vec![None; m];
        for (i, r) in lp.rows.iter().enumerate() {
            if r.cmp != Cmp::Eq {
                slack_of[i] = Some(kinds.len());
                kinds.push(ColKind::Slack);
                cost.push(Rational::zero());
            }
        }
        let mut initial = vec![0; m];
        for (i, r) in lp.rows.iter().enumerate() {
            let slack_sign_positive = match r.cmp {
                Cmp::Le => !flip[i],
                Cmp::Ge => flip[i],
                Cmp::Eq => false,
            };
            if slack_sign_positive {
                initial[i] = slack_of[i].expect("slack");
            } else {
                initial[i] = kinds.len();
                kinds.push(ColKind::Artificial);
                cost.push(Rational::zero());
            }
        }
        let ncols = kinds.len();
        let mut t = vec![vec![Rational::zero(); ncols + 1]; m];
        for (i, r) in lp.rows.iter().enumerate() {
            let s = if flip[i] { -Rational::one() } else { Rational::one() };
            for (j, a) in &r.coeffs {
                let (plus, minus) = var_cols[*j];
                t[i][plus] += a * &s;
                if let Some(mc) = minus {
                    t[i][mc] -= a * &s;
                }
            }
            if let Some(sc) = slack_of[i] {
                let sign = if r.cmp == Cmp::Le { Rational::one() } else { -Rational::one() };
                t[i][sc] = sign * &s;
            }
            t[i][initial[i]] = Rational::one();
            t[i][ncols] = &r.rhs * &s;
        }
        Tableau { t, basis: initial.clone(), kinds, initial, flip, var_cols, cost }
    }

    fn ncols(&self) -> usize {
        self.kinds.len()
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let width = self.ncols() + 1;
        let inv = Rational::one() / &self.t[row][col];
        let nz: Vec<usize> = (0..width).filter(|&k| !self.t[row][k].is_zero()).collect();
        for &k in &nz {
            self.t[row][k] *= &inv;
        }
        let prow: Vec<(usize, Rational)> = nz.iter().map(|&k| (k, self.t[row][k].clone())).collect();
        for r in 0..self.t.len() {
            if r == row || self.t[r][col].is_zero() {
                continue;
            }
            let factor = self.t[r][col].clone();
            for (k, v) in &prow {
                let delta = &factor * v;
                self.t[r][*k] -= delta;
            }
        }
        self.basis[row] = col;
    }

    fn reduced_costs(&self, cost: &[Rational]) -> Vec<Rational> {
        let mut d: Vec<Rational> = cost.to_vec();
        d.push(Rational::zero());
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for (k, v) in self.t[r].iter().enumerate() {
                if !v.is_zero() {
                    d[k] -= cb * v;
                }
            }
        }
        d
    }

    /// Runs simplex iterations minimising `cost` over columns allowed by `enter_ok`.
    /// Returns `false` if the problem is unbounded.
    fn optimise(&mut self, cost: &[Rational], enter_ok: impl Fn(ColKind) -> bool) -> bool {
        let ncols = self.ncols();
        let mut d = self.reduced_costs(cost);
        let mut degenerate_run = 0usize;
        loop {
            let bland = degenerate_run > 20;
            let mut entering: Option<usize> = None;
            for j in 0..ncols {
                if !enter_ok(self.kinds[j]) || !d[j].is_negative() {
                    continue;
                }
                match entering {
                    None => entering = Some(j),
                    Some(e) if !bland && d[j] < d[e] => entering = Some(j),
                    _ => {}
                }
                if bland {
                    break;
                }
            }
            let Some(q) = entering else {
                return true;
            };
            let mut leaving: Option<(usize, Rational)> = None;
            for r in 0..self.t.len() {
                let a = &self.t[r][q];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.t[r][ncols] / a;
                let better = match &leaving {
                    None => true,
                    Some((lr, lv)) => ratio < *lv || (ratio == *lv && self.basis[r] < self.basis[*lr]),
                };
                if better {
                    leaving = Some((r, ratio));
                }
            }
            let Some((p, ratio)) = leaving else {
                return false;
            };
            degenerate_run = if ratio.is_zero() { degenerate_run + 1 } else { 0 };
            let dq = d[q].clone();
            self.pivot(p, q);
            for (k, v) in self.t[p].iter().enumerate() {
                if !v.is_zero() {
                    d[k] -= &dq * v;
                }
            }
        }
    }

    fn run(mut self, lp: &LinearProgram) -> LpOutcome {
        let ncols = self.ncols();
        if self.kinds.contains(&ColKind::Artificial) {
            let phase1: Vec<Rational> = self
                .kinds
                .iter()
                .map(|k| if *k == ColKind::Artificial { Rational::one() } else { Rational::zero() })
                .collect();
            self.optimise(&phase1, |_| true);
            let infeas: Rational = self
                .basis
                .iter()
                .enumerate()
                .filter(|(_, &b)| self.kinds[b] == ColKind::Artificial)
                .map(|(r, _)| self.t[r][ncols].clone())
                .sum();
            if infeas.is_positive() {
                return LpOutcome::Infeasible;
            }
            for r in 0..self.t.len() {
                if self.kinds[self.basis[r]] != ColKind::Artificial {
                    continue;
                }
                if let Some(q) =
                    (0..ncols).find(|&j| self.kinds[j] != ColKind::Artificial && !self.t[r][j].is_zero())
                {
                    self.pivot(r, q);
                }
            }
        }
        let cost = self.cost.clone();
        if !self.optimise(&cost, |k| k != ColKind::Artificial) {
            return LpOutcome::Unbounded;
        }
        let mut col_value = vec![Rational::zero(); ncols];
        for (r, &b) in self.basis.iter().enumerate() {
            col_value[b] = self.t[r][ncols].clone();
        }
        let x: Vec<Rational> = self
            .var_cols
            .iter()
            .map(|&(p, m)| match m {
                Some(m) => &col_value[p] - &col_value[m],
                None => col_value[p].clone(),
            })
            .collect();
        let d = self.reduced_costs(&cost);
        let duals: Vec<Rational> = self
            .initial
            .iter()
            .zip(&self.flip)
            .map(|(&c, &f)| if f { d[c].clone() } else { -&d[c] })
            .collect();
        let objective = lp.objective_value(&x);
        LpOutcome::Optimal(LpSolution { x, objective, duals })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn dual_objective(lp: &LinearProgram, y: &[Rational]) -> Rational {
        lp.rows.iter().zip(y).map(|(r, v)| &r.rhs * v).sum()
    }

    fn dual_feasible(lp: &LinearProgram, y: &[Rational]) -> bool {
        for j in 0..lp.num_vars() {
            let aty: Rational = lp
                .rows
                .iter()
                .zip(y)
                .map(|(r, v)| r.coeffs.iter().filter(|(k, _)| *k == j).map(|(_, a)| a * v).sum::<Rational>())
                .sum();
            let red = &lp.cost[j] - aty;
            if lp.free[j] && !red.is_zero() || !lp.free[j] && red.is_negative() {
                return false;
            }
        }
        lp.rows.iter().zip(y).all(|(r, v)| match r.cmp {
            Cmp::Le => !v.is_positive(),
            Cmp::Ge => !v.is_negative(),
            Cmp::Eq => true,
        })
    }

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18  -> 36 at (2, 6)
        let mut lp = LinearProgram::new();
        let x = lp.add_var(false, int(-3));
        let y = lp.add_var(false, int(-5));
        lp.add_row(vec![(x, int(1))], Cmp::Le, int(4));
        lp.add_row(vec![(y, int(2))], Cmp::Le, int(12));
        lp.add_row(vec![(x, int(3)), (y, int(2))], Cmp::Le, int(18));
        let s = lp.solve().optimal().unwrap();
        assert_eq!(s.x, vec![int(2), int(6)]);
        assert_eq!(s.objective, int(-36));
        assert_eq!(dual_objective(&lp, &s.duals), int(-36));
        assert!(dual_feasible(&lp, &s.duals));
    }

    #[test]
    fn free_variables_equalities_and_negative_rhs() {
        // min |x - 1/3| style: min t, t >= x - 1/3, t >= 1/3 - x, x + z = -2, z >= -5 (free x)
        let mut lp = LinearProgram::new();
        let x = lp.add_var(true, int(0));
        let t = lp.add_var(false, int(1));
        let z = lp.add_var(true, int(0));
        lp.add_row(vec![(t, int(1)), (x, int(-1))], Cmp::Ge, ratio(-1, 3));
        lp.add_row(vec![(t, int(1)), (x, int(1))], Cmp::Ge, ratio(1, 3));
        lp.add_row(vec![(x, int(1)), (z, int(1))], Cmp::Eq, int(-2));
        lp.add_row(vec![(z, int(1))], Cmp::Ge, int(-5));
        let s = lp.solve().optimal().unwrap();
        assert_eq!(s.objective, int(0));
        assert_eq!(s.x[x], ratio(1, 3));
        assert!(lp.is_feasible(&s.x));
        assert_eq!(dual_objective(&lp, &s.duals), s.objective);
        assert!(dual_feasible(&lp, &s.duals));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var(false, int(1));
        lp.add_row(vec![(x, int(1))], Cmp::Le, int(-1));
        assert_eq!(lp.solve(), LpOutcome::Infeasible);

        let mut lp = LinearProgram::new();
        let x = lp.add_var(true, int(1));
        lp.add_row(vec![(x, int(1))], Cmp::Le, int(3));
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Beale's cycling example.
        let mut lp = LinearProgram::new();
        let v: Vec<usize> = [ratio(-3, 4), int(150), ratio(-1, 50), int(6)]
            .into_iter()
            .map(|c| lp.add_var(false, c))
            .collect();
        lp.add_row(
            vec![(v[0], ratio(1, 4)), (v[1], int(-60)), (v[2], ratio(-1, 25)), (v[3], int(9))],
            Cmp::Le,
            int(0),
        );
        lp.add_row(
            vec![(v[0], ratio(1, 2)), (v[1], int(-90)), (v[2], ratio(-1, 50)), (v[3], int(3))],
            Cmp::Le,
            int(0),
        );
        lp.add_row(vec![(v[2], int(1))], Cmp::Le, int(1));
        let s = lp.solve().optimal().unwrap();
        assert_eq!(s.objective, ratio(-1, 20));
        assert!(dual_feasible(&lp, &s.duals));
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var(false, int(1));
        let y = lp.add_var(false, int(2));
        lp.add_row(vec![(x, int(1)), (y, int(1))], Cmp::Eq, int(2));
        lp.add_row(vec![(x, int(2)), (y, int(2))], Cmp::Eq, int(4));
        let s = lp.solve().optimal().unwrap();
        assert_eq!(s.objective, int(2));
        assert_eq!(dual_objective(&lp, &s.duals), int(2));
        assert!(dual_feasible(&lp, &s.duals));
    }
}

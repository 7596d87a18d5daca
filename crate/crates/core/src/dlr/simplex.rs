//! Dense two-phase simplex over exact rationals with Bland's rule.
//!
//! Solves `maximize c·x` subject to `A x ≤ b` and `A' x = b'` where every
//! variable is free. Free variables are split into `x⁺ − x⁻`.

use num_traits::{Signed, Zero};

use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum RowKind {
    Le,
    Eq,
}

#[derive(Debug, Clone)]
pub(crate) struct Row {
    pub coefficients: Vec<Rational>,
    pub kind: RowKind,
    pub rhs: Rational,
}

#[derive(Debug, Clone)]
pub(crate) struct LinearProgram {
    pub num_vars: usize,
    pub rows: Vec<Row>,
    pub objective: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum LpOutcome {
    Optimal { x: Vec<Rational>, value: Rational },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rational {
        &self.rows[i][self.width]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v /= &p;
            }
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &factor * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes `cost · columns[..allowed]`. Returns `false` if unbounded.
    fn optimize(&mut self, cost: &[Rational], allowed: usize) -> bool {
        loop {
            let mut is_basic = vec![false; self.width];
            for &b in &self.basis {
                is_basic[b] = true;
            }
            // Bland: smallest improving column.
            let entering = (0..allowed).find(|&j| {
                if is_basic[j] {
                    return false;
                }
                let mut d = cost[j].clone();
                for (i, row) in self.rows.iter().enumerate() {
                    let cb = &cost[self.basis[i]];
                    if !cb.is_zero() && !row[j].is_zero() {
                        d -= cb * &row[j];
                    }
                }
                d.is_positive()
            });
            let Some(c) = entering else {
                return true;
            };
            // Bland: among minimal ratios, smallest basic index leaves.
            let mut leaving: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &leaving {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
            match leaving {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }
}

impl LinearProgram {
    pub fn solve(&self) -> LpOutcome {
        let n = self.num_vars;
        let m = self.rows.len();
        let slack_count = self.rows.iter().filter(|r| r.kind == RowKind::Le).count();
        let structural = 2 * n + slack_count;

        // Rows needing an artificial start variable.
        let mut needs_artificial = Vec::with_capacity(m);
        for row in &self.rows {
            needs_artificial.push(row.kind == RowKind::Eq || row.rhs.is_negative());
        }
        let artificial_count = needs_artificial.iter().filter(|&&a| a).count();
        let width = structural + artificial_count;

        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut slack = 2 * n;
        let mut artificial = structural;
        for (i, row) in self.rows.iter().enumerate() {
            let mut t = vec![Rational::zero(); width + 1];
            let sign = if row.rhs.is_negative() { -Rational::from_integer(1.into()) } else { Rational::from_integer(1.into()) };
            for (j, a) in row.coefficients.iter().enumerate() {
                if !a.is_zero() {
                    t[2 * j] = a * &sign;
                    t[2 * j + 1] = -(a * &sign);
                }
            }
            let mut slack_col = None;
            if row.kind == RowKind::Le {
                t[slack] = sign.clone();
                slack_col = Some(slack);
                slack += 1;
            }
            t[width] = &row.rhs * &sign;
            if needs_artificial[i] {
                t[artificial] = Rational::from_integer(1.into());
                basis.push(artificial);
                artificial += 1;
            } else {
                basis.push(slack_col.expect("non-artificial rows are inequalities"));
            }
            rows.push(t);
        }
        let mut tab = Tableau { rows, basis, width };

        if artificial_count > 0 {
            let mut cost = vec![Rational::zero(); width];
            for c in cost.iter_mut().skip(structural) {
                *c = -Rational::from_integer(1.into());
            }
            let bounded = tab.optimize(&cost, width);
            debug_assert!(bounded, "phase one is bounded by zero");
            let infeasibility: Rational = (0..tab.rows.len())
                .filter(|&i| tab.basis[i] >= structural)
                .map(|i| tab.rhs(i).clone())
                .sum();
            if infeasibility.is_positive() {
                return LpOutcome::Infeasible;
            }
            // Drive remaining (zero-level) artificials out of the basis.
            let mut i = 0;
            while i < tab.rows.len() {
                if tab.basis[i] >= structural {
                    match (0..structural).find(|&j| !tab.rows[i][j].is_zero()) {
                        Some(j) => {
                            tab.pivot(i, j);
                            i += 1;
                        }
                        None => {
                            tab.rows.remove(i);
                            tab.basis.remove(i);
                        }
                    }
                } else {
                    i += 1;
                }
            }
            for row in tab.rows.iter_mut() {
                let rhs = row[width].clone();
                row.truncate(structural);
                row.push(rhs);
            }
            tab.width = structural;
        }

        let mut cost = vec![Rational::zero(); tab.width];
        for (j, c) in self.objective.iter().enumerate() {
            cost[2 * j] = c.clone();
            cost[2 * j + 1] = -c.clone();
        }
        if !tab.optimize(&cost, structural) {
            return LpOutcome::Unbounded;
        }

        let mut values = vec![Rational::zero(); structural];
        for (i, &b) in tab.basis.iter().enumerate() {
            values[b] = tab.rhs(i).clone();
        }
        let x: Vec<Rational> = (0..n)
            .map(|j| &values[2 * j] - &values[2 * j + 1])
            .collect();
        let value = self
            .objective
            .iter()
            .zip(&x)
            .map(|(c, v)| c * v)
            .sum();
        LpOutcome::Optimal { x, value }
    }
}

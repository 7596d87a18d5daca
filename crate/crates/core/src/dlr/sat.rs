//! Feasibility of convex linear systems (with strict inequalities) and the
//! Horn-DLR satisfiability procedure built on top of it.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::linear::{HornDlr, LinearOp, LinearPolynomial, LinearRelation, Var};
use super::simplex::{LinearProgram, LpOutcome, Row, RowKind};
use crate::Rational;

/// An exact assignment of rationals to variables.
pub type Assignment = BTreeMap<Var, Rational>;

/// Reads a variable from an assignment, treating absent variables as zero.
pub fn value_of(assignment: &Assignment, v: Var) -> Rational {
    assignment.get(&v).cloned().unwrap_or_else(Rational::zero)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpFeasibility {
    Feasible(Assignment),
    Infeasible,
}

impl LpFeasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, LpFeasibility::Feasible(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HornOutcome {
    Sat(Assignment),
    Unsat,
}

impl HornOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, HornOutcome::Sat(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SatError {
    #[error("disequality `{0}` cannot appear in a convex system")]
    Disequality(String),
    #[error("internal error: witness violates `{0}`")]
    WitnessViolation(String),
}

/// Decides whether a conjunction of `<, ≤, =, ≥, >` relations has a
/// rational solution, returning one if so.
///
/// Every strict `α < β` is relaxed to `α + t ≤ β` for a shared slack `t`,
/// and `t` is maximized subject to `0 ≤ t ≤ 1`. The strict system is
/// feasible exactly when the optimum is positive.
pub fn lp_feasible(constraints: &[LinearRelation]) -> Result<LpFeasibility, SatError> {
    if let Some(bad) = constraints.iter().find(|c| c.is_disequality()) {
        return Err(SatError::Disequality(bad.to_string()));
    }
    let vars: BTreeSet<Var> = constraints
        .iter()
        .flat_map(|c| c.lhs.vars().chain(c.rhs.vars()))
        .collect();
    let index: BTreeMap<Var, usize> = vars.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let has_strict = constraints.iter().any(|c| c.op.is_strict());
    let n = vars.len();
    let num_vars = n + usize::from(has_strict);
    let one = Rational::one();

    let mut rows = Vec::with_capacity(constraints.len() + 2);
    for c in constraints {
        let d = c.difference();
        let mut coefficients = vec![Rational::zero(); num_vars];
        for (v, a) in d.terms() {
            coefficients[index[&v]] = a.clone();
        }
        let k = d.constant_term().clone();
        // d(x) op 0 with d(x) = a·x + k.
        let (kind, negate, strict) = match c.op {
            LinearOp::Lt => (RowKind::Le, false, true),
            LinearOp::Le => (RowKind::Le, false, false),
            LinearOp::Eq => (RowKind::Eq, false, false),
            LinearOp::Ge => (RowKind::Le, true, false),
            LinearOp::Gt => (RowKind::Le, true, true),
            LinearOp::Ne => unreachable!(),
        };
        let rhs = if negate {
            for a in coefficients.iter_mut() {
                *a = -a.clone();
            }
            k
        } else {
            -k
        };
        if strict {
            coefficients[n] = one.clone();
        }
        rows.push(Row { coefficients, kind, rhs });
    }
    let mut objective = vec![Rational::zero(); num_vars];
    if has_strict {
        let mut cap = vec![Rational::zero(); num_vars];
        cap[n] = one.clone();
        rows.push(Row { coefficients: cap.clone(), kind: RowKind::Le, rhs: one.clone() });
        cap[n] = -one.clone();
        rows.push(Row { coefficients: cap, kind: RowKind::Le, rhs: Rational::zero() });
        objective[n] = one.clone();
    }

    let lp = LinearProgram { num_vars, rows, objective };
    let x = match lp.solve() {
        LpOutcome::Optimal { x, value } => {
            if has_strict && !value.is_positive() {
                return Ok(LpFeasibility::Infeasible);
            }
            x
        }
        LpOutcome::Infeasible => return Ok(LpFeasibility::Infeasible),
        LpOutcome::Unbounded => unreachable!("the slack is capped"),
    };
    let witness: Assignment = vars.into_iter().zip(x).collect();
    for c in constraints {
        if !c.holds(|v| value_of(&witness, v)) {
            return Err(SatError::WitnessViolation(c.to_string()));
        }
    }
    Ok(LpFeasibility::Feasible(witness))
}

/// True iff every solution of the (feasible) system `constraints`
/// satisfies `alpha = beta`.
pub fn entails_equality(
    constraints: &[LinearRelation],
    alpha: &LinearPolynomial,
    beta: &LinearPolynomial,
) -> Result<bool, SatError> {
    Ok(off_hyperplane_point(constraints, alpha, beta)?.is_none())
}

/// A solution of `constraints` with `alpha ≠ beta`, if there is one.
fn off_hyperplane_point(
    constraints: &[LinearRelation],
    alpha: &LinearPolynomial,
    beta: &LinearPolynomial,
) -> Result<Option<Assignment>, SatError> {
    let mut system = constraints.to_vec();
    for op in [LinearOp::Lt, LinearOp::Gt] {
        system.push(LinearRelation::new(alpha.clone(), op, beta.clone()));
        if let LpFeasibility::Feasible(w) = lp_feasible(&system)? {
            return Ok(Some(w));
        }
        system.pop();
    }
    Ok(None)
}

struct PendingClause {
    convex: Option<LinearRelation>,
    disequalities: Vec<LinearRelation>,
}

/// Satisfiability of a finite set of Horn DLRs, with an exact witness.
///
/// Convex unit clauses form the system `C`. Every other clause keeps its
/// disequality disjuncts until `C` entails that one of them is false;
/// a clause left with only its convex disjunct joins `C` and the process
/// restarts, and a clause left with nothing is a refutation. Once stable,
/// each remaining clause has a disequality that is individually consistent
/// with `C`, and all of them can be satisfied together.
pub fn horn_dlr_sat(clauses: &[HornDlr]) -> Result<HornOutcome, SatError> {
    let mut convex: Vec<LinearRelation> = Vec::new();
    let mut pending: Vec<PendingClause> = Vec::new();
    for clause in clauses {
        match clause.disjuncts() {
            [single] if !single.is_disequality() => convex.push(single.clone()),
            disjuncts => pending.push(PendingClause {
                convex: clause.convex_disjunct().cloned(),
                disequalities: disjuncts.iter().filter(|d| d.is_disequality()).cloned().collect(),
            }),
        }
    }

    let base = 'restart: loop {
        let base = match lp_feasible(&convex)? {
            LpFeasibility::Feasible(w) => w,
            LpFeasibility::Infeasible => return Ok(HornOutcome::Unsat),
        };
        for idx in 0..pending.len() {
            let mut kept = Vec::with_capacity(pending[idx].disequalities.len());
            for d in std::mem::take(&mut pending[idx].disequalities) {
                if !entails_equality(&convex, &d.lhs, &d.rhs)? {
                    kept.push(d);
                }
            }
            pending[idx].disequalities = kept;
            if pending[idx].disequalities.is_empty() {
                let clause = pending.remove(idx);
                match clause.convex {
                    Some(c) => {
                        convex.push(c);
                        continue 'restart;
                    }
                    None => return Ok(HornOutcome::Unsat),
                }
            }
        }
        break base;
    };

    let all_vars: BTreeSet<Var> = clauses.iter().flat_map(|c| c.as_dlr().vars()).collect();
    let mut point: Assignment = all_vars.iter().map(|v| (*v, value_of(&base, *v))).collect();

    // One surviving disequality per clause; the point must leave every
    // one of their hyperplanes.
    let hyperplanes: Vec<(LinearPolynomial, &LinearRelation)> = pending
        .iter()
        .map(|c| {
            let d = &c.disequalities[0];
            (d.difference(), d)
        })
        .collect();
    let k = hyperplanes.len();
    let on = |p: &Assignment, h: &LinearPolynomial| h.evaluate(|v| value_of(p, v)).is_zero();
    while let Some(hit) = hyperplanes.iter().position(|(h, _)| on(&point, h)) {
        let (_, d) = &hyperplanes[hit];
        let other = off_hyperplane_point(&convex, &d.lhs, &d.rhs)?
            .expect("surviving disequalities are individually consistent");
        let avoided: Vec<usize> = (0..k).filter(|&j| !on(&point, &hyperplanes[j].0)).collect();
        let denominator = Rational::from_integer((k as i64 + 2).into());
        let mut moved = false;
        for i in 1..=(k as i64 + 1) {
            let theta = Rational::from_integer(i.into()) / &denominator;
            let candidate: Assignment = all_vars
                .iter()
                .map(|v| {
                    let a = value_of(&point, *v);
                    let b = value_of(&other, *v);
                    (*v, &theta * a + (Rational::one() - &theta) * b)
                })
                .collect();
            if !on(&candidate, &hyperplanes[hit].0)
                && avoided.iter().all(|&j| !on(&candidate, &hyperplanes[j].0))
            {
                point = candidate;
                moved = true;
                break;
            }
        }
        if !moved {
            return Err(SatError::WitnessViolation(d.to_string()));
        }
    }

    for clause in clauses {
        if !clause.holds(|v| value_of(&point, v)) {
            return Err(SatError::WitnessViolation(clause.to_string()));
        }
    }
    Ok(HornOutcome::Sat(point))
}

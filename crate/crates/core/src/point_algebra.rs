//! Satisfiability of point-algebra constraint sets in linear time.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::dlr::{HornDlr, LinearOp, LinearPolynomial, LinearRelation, Var};
use crate::relation::PointRelation;

/// `lhs rel rhs` between two point variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PointConstraint {
    pub lhs: Var,
    pub rel: PointRelation,
    pub rhs: Var,
}

impl PointConstraint {
    pub fn new(lhs: Var, rel: PointRelation, rhs: Var) -> Self {
        PointConstraint { lhs, rel, rhs }
    }

    pub fn holds(&self, value: impl Fn(Var) -> i64) -> bool {
        self.rel.admits(value(self.lhs).cmp(&value(self.rhs)))
    }

    /// The same constraint as a Horn DLR: `⊥` becomes `0 < 0` and `⊤`
    /// becomes `0 = 0`.
    pub fn to_horn(&self) -> HornDlr {
        let zero = LinearPolynomial::zero;
        let relation = if self.rel == PointRelation::NONE {
            LinearRelation::new(zero(), LinearOp::Lt, zero())
        } else if self.rel == PointRelation::ALL {
            LinearRelation::new(zero(), LinearOp::Eq, zero())
        } else {
            let op = LinearOp::from_point_relation(self.rel).expect("proper point relation");
            LinearRelation::vars(self.lhs, op, self.rhs)
        };
        HornDlr::from(relation)
    }
}

impl fmt::Display for PointConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.rel.symbol(), self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PaOutcome {
    Sat(BTreeMap<Var, i64>),
    Unsat,
}

impl PaOutcome {
    pub fn is_sat(&self) -> bool {
        matches!(self, PaOutcome::Sat(_))
    }
}

/// Decides a set of point constraints, returning an integer witness.
///
/// Variables tied by `≤` cycles form equality classes; classes receive
/// distinct consecutive integers in topological order, so every `≠`
/// between different classes holds automatically.
///
/// ```
/// use allen_metric::dlr::Var;
/// use allen_metric::point_algebra::{pa_sat, PointConstraint};
/// use allen_metric::relation::PointRelation;
/// let (x, y) = (Var::Free(0), Var::Free(1));
/// let p = [
///     PointConstraint::new(x, PointRelation::LE, y),
///     PointConstraint::new(y, PointRelation::LE, x),
/// ];
/// assert!(pa_sat(&p).is_sat());
/// let q = [p[0], p[1], PointConstraint::new(x, PointRelation::NE, y)];
/// assert!(!pa_sat(&q).is_sat());
/// ```
pub fn pa_sat(constraints: &[PointConstraint]) -> PaOutcome {
    let mut vars: Vec<Var> = constraints.iter().flat_map(|c| [c.lhs, c.rhs]).collect();
    vars.sort();
    vars.dedup();
    let index = |v: Var| vars.binary_search(&v).expect("collected above");
    let indexed: Vec<_> = constraints
        .iter()
        .map(|c| (index(c.lhs), c.rel, index(c.rhs)))
        .collect();
    match pa_sat_indexed(vars.len(), &indexed) {
        Some(values) => PaOutcome::Sat(vars.iter().copied().zip(values).collect()),
        None => PaOutcome::Unsat,
    }
}

/// [`pa_sat`] over variables `0..n`.
pub fn pa_sat_indexed(n: usize, constraints: &[(usize, PointRelation, usize)]) -> Option<Vec<i64>> {
    let mut graph: DiGraph<(), ()> = DiGraph::with_capacity(n, constraints.len());
    let nodes: Vec<NodeIndex> = (0..n).map(|_| graph.add_node(())).collect();

    // Strict and disequality pairs, checked after contraction.
    let mut separated: Vec<(usize, usize)> = Vec::new();
    for &(a, rel, b) in constraints {
        if rel == PointRelation::NONE {
            return None;
        }
        if rel == PointRelation::ALL {
            continue;
        }
        // Normalize > and ≥ by swapping sides.
        let (rel, a, b) = if rel.admits(Ordering::Greater) && rel != PointRelation::NE {
            (rel.inverse(), b, a)
        } else {
            (rel, a, b)
        };
        if rel == PointRelation::NE {
            separated.push((a, b));
            continue;
        }
        graph.add_edge(nodes[a], nodes[b], ());
        if rel == PointRelation::EQ {
            graph.add_edge(nodes[b], nodes[a], ());
        }
        if rel == PointRelation::LT {
            separated.push((a, b));
        }
    }

    // tarjan_scc yields components in reverse topological order.
    let components = tarjan_scc(&graph);
    let mut class = vec![0usize; n];
    for (k, comp) in components.iter().enumerate() {
        for node in comp {
            class[node.index()] = k;
        }
    }
    if separated.iter().any(|&(a, b)| class[a] == class[b]) {
        return None;
    }
    let last = components.len() as i64 - 1;
    Some(class.iter().map(|&k| last - k as i64).collect())
}

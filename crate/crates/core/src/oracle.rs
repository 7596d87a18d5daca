//! Brute-force ground truth over weak orderings of endpoints.
//!
//! Whether a qualitative network (plus point-algebra side constraints) is
//! satisfiable depends only on how its endpoints are ordered, so
//! enumerating every weak ordering of the `2n` endpoints decides it
//! exactly. Nothing here reuses the fast classifiers of
//! [`crate::relation`]: endpoint formulas are evaluated literally.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::ops::ControlFlow;

use thiserror::Error;

use crate::composition::CompositionTable;
use crate::dlr::{Dlr, PointForm, Var};
use crate::instance::{IntervalId, MIsatInstance};
use crate::point_algebra::PointConstraint;
use crate::relation::{BasicRelation, IntervalRelation, PointRelation};

/// Largest instance handled by [`exhaustive_isat`].
pub const EXHAUSTIVE_MAX_INTERVALS: usize = 4;
/// Largest instance handled by [`brute_force_isat`].
pub const BACKTRACKING_MAX_INTERVALS: usize = 5;

/// The endpoint formula of a basic relation, evaluated literally on
/// `x = [xs, xe]`, `y = [ys, ye]`. Does not check `xs < xe` or `ys < ye`.
pub fn endpoint_formula<T: Ord>(b: BasicRelation, xs: &T, xe: &T, ys: &T, ye: &T) -> bool {
    use BasicRelation::*;
    match b {
        Before => xe < ys,
        After => ye < xs,
        Meets => xe == ys,
        MetBy => ye == xs,
        Overlaps => xs < ys && ys < xe && xe < ye,
        OverlappedBy => ys < xs && xs < ye && ye < xe,
        During => xs > ys && xe < ye,
        Includes => ys > xs && ye < xe,
        Starts => xs == ys && xe < ye,
        StartedBy => xs == ys && ye < xe,
        Finishes => xe == ye && xs > ys,
        FinishedBy => xe == ye && ys > xs,
        Equals => xs == ys && xe == ye,
    }
}

/// The unique basic relation holding between two proper intervals, found
/// by testing all thirteen endpoint formulas.
fn classify<T: Ord>(xs: &T, xe: &T, ys: &T, ye: &T) -> Option<BasicRelation> {
    if !(xs < xe && ys < ye) {
        return None;
    }
    let mut found = None;
    for b in BasicRelation::ALL {
        if endpoint_formula(b, xs, xe, ys, ye) {
            assert!(found.is_none(), "endpoint formulas overlap at {b} and {found:?}");
            found = Some(b);
        }
    }
    assert!(found.is_some(), "endpoint formulas are not exhaustive");
    found
}

/// A ranking of points with ties: equal rank means equal, smaller rank
/// means earlier. Ranks are exactly `0..levels`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeakOrdering {
    ranks: Vec<u8>,
}

impl WeakOrdering {
    pub fn ranks(&self) -> &[u8] {
        &self.ranks
    }

    pub fn levels(&self) -> usize {
        self.ranks.iter().map(|&r| r as usize + 1).max().unwrap_or(0)
    }

    /// Relation of interval `u` to interval `v`, where interval `i` owns
    /// points `2i` (start) and `2i + 1` (end).
    pub fn basic_relation_of(&self, u: usize, v: usize) -> Option<BasicRelation> {
        basic_relation_of_ranks(&self.ranks, u, v)
    }
}

fn basic_relation_of_ranks(ranks: &[u8], u: usize, v: usize) -> Option<BasicRelation> {
    classify(&ranks[2 * u], &ranks[2 * u + 1], &ranks[2 * v], &ranks[2 * v + 1])
}

/// Visits every weak ordering of `n` points.
///
/// Points are placed one at a time; each new point either joins one of the
/// current levels or opens a new level in one of the gaps. This produces
/// every ordered set partition exactly once. `visit` sees the ranks of the
/// first `k` points after each placement through `partial`; returning
/// `false` from `partial` prunes that branch.
fn search(
    ranks: &mut Vec<u8>,
    levels: u8,
    n: usize,
    partial: &mut dyn FnMut(&[u8]) -> bool,
    complete: &mut dyn FnMut(&[u8]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    if ranks.len() == n {
        return complete(ranks);
    }
    // Join an existing level.
    for level in 0..levels {
        ranks.push(level);
        if partial(ranks) {
            search(ranks, levels, n, partial, complete)?;
        }
        ranks.pop();
    }
    // Open a new level below `gap`.
    for gap in 0..=levels {
        for r in ranks.iter_mut() {
            if *r >= gap {
                *r += 1;
            }
        }
        ranks.push(gap);
        let keep = partial(ranks);
        let flow = if keep {
            search(ranks, levels + 1, n, partial, complete)
        } else {
            ControlFlow::Continue(())
        };
        ranks.pop();
        for r in ranks.iter_mut() {
            if *r > gap {
                *r -= 1;
            }
        }
        flow?;
    }
    ControlFlow::Continue(())
}

/// Calls `f` once for every weak ordering of `n` points.
pub fn for_each_weak_ordering(n: usize, mut f: impl FnMut(&WeakOrdering) -> ControlFlow<()>) {
    let mut ranks = Vec::with_capacity(n);
    let mut scratch = WeakOrdering { ranks: Vec::new() };
    let _ = search(&mut ranks, 0, n, &mut |_| true, &mut |r| {
        scratch.ranks.clear();
        scratch.ranks.extend_from_slice(r);
        f(&scratch)
    });
}

pub fn weak_orderings(n: usize) -> Vec<WeakOrdering> {
    let mut out = Vec::new();
    for_each_weak_ordering(n, |w| {
        out.push(w.clone());
        ControlFlow::Continue(())
    });
    out
}

/// Composition table derived from all weak orderings of three intervals.
pub fn derive_composition_table() -> CompositionTable {
    let mut entries = [[IntervalRelation::EMPTY; 13]; 13];
    for_each_weak_ordering(6, |w| {
        let xy = w.basic_relation_of(0, 1);
        let yz = w.basic_relation_of(1, 2);
        let xz = w.basic_relation_of(0, 2);
        if let (Some(a), Some(b), Some(c)) = (xy, yz, xz) {
            let e = &mut entries[a.index()][b.index()];
            *e = e.union(c.into());
        }
        ControlFlow::Continue(())
    });
    CompositionTable::from_entries(entries)
}

/// The relation between two point values on their own, for checking a
/// relation's endpoint projections against literal formulas.
pub fn start_relation_by_enumeration(b: BasicRelation) -> PointRelation {
    projection_by_enumeration(b, |r| r[0].cmp(&r[2]))
}

pub fn end_relation_by_enumeration(b: BasicRelation) -> PointRelation {
    projection_by_enumeration(b, |r| r[1].cmp(&r[3]))
}

fn projection_by_enumeration(b: BasicRelation, pick: impl Fn(&[u8]) -> Ordering) -> PointRelation {
    let mut out = PointRelation::NONE;
    for_each_weak_ordering(4, |w| {
        if w.basic_relation_of(0, 1) == Some(b) {
            out = out.union(PointRelation::from_ordering(pick(w.ranks())));
        }
        ControlFlow::Continue(())
    });
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance has {found} intervals; this oracle handles at most {max}")]
    TooLarge { found: usize, max: usize },
    #[error("metric constraint `{0}` is not a point-algebra formula")]
    NotPointAlgebra(String),
    #[error("metric constraint `{0}` mentions a free variable")]
    FreeVariable(String),
    #[error("edge mentions an undeclared interval")]
    UnknownInterval,
}

/// Verdict of the brute-force oracle; a model uses ranks as coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleVerdict {
    Sat(Vec<(i64, i64)>),
    Unsat,
}

impl OracleVerdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, OracleVerdict::Sat(_))
    }
}

#[derive(Clone, Copy)]
enum Atom {
    Const(bool),
    Cmp(usize, PointRelation, usize),
}

struct Check {
    atoms: Vec<Atom>,
}

impl Check {
    fn holds(&self, ranks: &[u8]) -> bool {
        self.atoms.iter().any(|a| match *a {
            Atom::Const(b) => b,
            Atom::Cmp(x, rel, y) => rel.admits(ranks[x].cmp(&ranks[y])),
        })
    }

    fn last_point(&self) -> usize {
        self.atoms
            .iter()
            .map(|a| match *a {
                Atom::Const(_) => 0,
                Atom::Cmp(x, _, y) => x.max(y),
            })
            .max()
            .unwrap_or(0)
    }
}

fn point_index(v: Var, n: usize) -> Option<usize> {
    match v {
        Var::Start(i) if i.index() < n => Some(2 * i.index()),
        Var::End(i) if i.index() < n => Some(2 * i.index() + 1),
        _ => None,
    }
}

fn compile_dlr(dlr: &Dlr, n: usize) -> Result<Check, OracleError> {
    let mut atoms = Vec::new();
    for d in dlr.disjuncts() {
        match d.point_form() {
            Some(PointForm::Trivial(b)) => atoms.push(Atom::Const(b)),
            Some(PointForm::Point { lhs, rel, rhs }) => {
                let (Some(x), Some(y)) = (point_index(lhs, n), point_index(rhs, n)) else {
                    return Err(OracleError::FreeVariable(dlr.to_string()));
                };
                atoms.push(Atom::Cmp(x, rel, y));
            }
            None => return Err(OracleError::NotPointAlgebra(dlr.to_string())),
        }
    }
    Ok(Check { atoms })
}

struct Compiled {
    n: usize,
    edges: Vec<(usize, IntervalRelation, usize)>,
    checks: Vec<Check>,
}

fn compile(inst: &MIsatInstance, max: usize) -> Result<Compiled, OracleError> {
    let n = inst.num_intervals();
    if n > max {
        return Err(OracleError::TooLarge { found: n, max });
    }
    let mut edges = Vec::with_capacity(inst.edges.len());
    for e in &inst.edges {
        if e.from.index() >= n || e.to.index() >= n {
            return Err(OracleError::UnknownInterval);
        }
        edges.push((e.from.index(), e.label, e.to.index()));
    }
    let checks = inst
        .metric
        .iter()
        .map(|d| compile_dlr(d, n))
        .collect::<Result<_, _>>()?;
    Ok(Compiled { n, edges, checks })
}

impl Compiled {
    fn edge_holds(&self, ranks: &[u8], &(u, label, v): &(usize, IntervalRelation, usize)) -> bool {
        basic_relation_of_ranks(ranks, u, v).is_some_and(|b| label.contains(b))
    }

    fn all_hold(&self, ranks: &[u8]) -> bool {
        (0..self.n).all(|i| ranks[2 * i] < ranks[2 * i + 1])
            && self.edges.iter().all(|e| self.edge_holds(ranks, e))
            && self.checks.iter().all(|c| c.holds(ranks))
    }

    fn model(&self, ranks: &[u8]) -> Vec<(i64, i64)> {
        (0..self.n)
            .map(|i| (ranks[2 * i] as i64, ranks[2 * i + 1] as i64))
            .collect()
    }
}

/// Decides an instance by checking every weak ordering of its endpoints.
///
/// Every metric constraint must be a disjunction of point-algebra formulas
/// over endpoint variables.
pub fn exhaustive_isat(inst: &MIsatInstance) -> Result<OracleVerdict, OracleError> {
    let c = compile(inst, EXHAUSTIVE_MAX_INTERVALS)?;
    let mut verdict = OracleVerdict::Unsat;
    for_each_weak_ordering(2 * c.n, |w| {
        if c.all_hold(w.ranks()) {
            verdict = OracleVerdict::Sat(c.model(w.ranks()));
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    Ok(verdict)
}

/// Decides an instance by depth-first placement of endpoints, rejecting a
/// partial ordering as soon as a fully placed constraint fails.
pub fn brute_force_isat(inst: &MIsatInstance) -> Result<OracleVerdict, OracleError> {
    let c = compile(inst, BACKTRACKING_MAX_INTERVALS)?;
    let points = 2 * c.n;
    // Constraints grouped by the last point they mention.
    let mut edges_at: Vec<Vec<usize>> = vec![Vec::new(); points];
    for (k, &(u, _, v)) in c.edges.iter().enumerate() {
        edges_at[2 * u.max(v) + 1].push(k);
    }
    let mut checks_at: Vec<Vec<usize>> = vec![Vec::new(); points.max(1)];
    for (k, check) in c.checks.iter().enumerate() {
        checks_at[check.last_point()].push(k);
    }
    // Constant-only constraints are checked before anything is placed.
    if points == 0 {
        return Ok(if c.checks.iter().all(|ch| ch.holds(&[])) {
            OracleVerdict::Sat(Vec::new())
        } else {
            OracleVerdict::Unsat
        });
    }

    let mut partial = |ranks: &[u8]| {
        let p = ranks.len() - 1;
        if p % 2 == 1 && ranks[p - 1] >= ranks[p] {
            return false;
        }
        edges_at[p].iter().all(|&k| c.edge_holds(ranks, &c.edges[k]))
            && checks_at[p].iter().all(|&k| c.checks[k].holds(ranks))
    };
    let mut verdict = OracleVerdict::Unsat;
    let mut complete = |ranks: &[u8]| {
        verdict = OracleVerdict::Sat(c.model(ranks));
        ControlFlow::Break(())
    };
    let mut ranks = Vec::with_capacity(points);
    let _ = search(&mut ranks, 0, points, &mut partial, &mut complete);
    Ok(verdict)
}

/// Brute-force satisfiability of point-algebra formulas over weak
/// orderings of the variables they mention.
pub fn brute_force_points(constraints: &[PointConstraint]) -> Option<BTreeMap<Var, i64>> {
    let mut vars: Vec<Var> = constraints.iter().flat_map(|c| [c.lhs, c.rhs]).collect();
    vars.sort();
    vars.dedup();
    let index = |v: Var| vars.binary_search(&v).unwrap();
    let compiled: Vec<(usize, PointRelation, usize)> = constraints
        .iter()
        .map(|c| (index(c.lhs), c.rel, index(c.rhs)))
        .collect();
    let mut found = None;
    for_each_weak_ordering(vars.len(), |w| {
        let r = w.ranks();
        if compiled.iter().all(|&(x, rel, y)| rel.admits(r[x].cmp(&r[y]))) {
            found = Some(vars.iter().zip(r).map(|(v, &k)| (*v, k as i64)).collect());
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    found
}

/// Checks an oracle model against the instance using the literal formulas.
pub fn oracle_model_holds(inst: &MIsatInstance, model: &[(i64, i64)]) -> bool {
    if model.len() != inst.num_intervals() {
        return false;
    }
    let proper = model.iter().all(|(s, e)| s < e);
    let edges = inst.edges.iter().all(|e| {
        let (xs, xe) = model[e.from.index()];
        let (ys, ye) = model[e.to.index()];
        classify(&xs, &xe, &ys, &ye).is_some_and(|b| e.label.contains(b))
    });
    let value = |v: Var| match v {
        Var::Start(IntervalId(i)) => model[i as usize].0,
        Var::End(IntervalId(i)) => model[i as usize].1,
        Var::Free(_) => 0,
    };
    let metric = inst.metric.iter().all(|d| {
        d.holds(|v| crate::Rational::from_integer(value(v).into()))
    });
    proper && edges && metric
}

//! Turning the witnesses of an accepted start-mode instance into a model.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Zero};

use super::{Forced, SolveError};
use crate::catalog::{AlgebraId, R_S, START_EQUAL};
use crate::dlr::Var;
use crate::instance::{IntervalId, MIsatInstance, Model};
use crate::relation::{BasicRelation, IntervalRelation};
use crate::Rational;

fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Combines a starting-point witness `starts` with an ending-point witness
/// `ends`: starts are kept and ends are shifted so that the earliest one
/// lies one unit after the latest start.
///
/// Variables missing from a witness never occur in its constraints; a
/// missing start reads as zero and a missing end as the earliest end.
pub fn assemble_local_model(n: usize, starts: &HashMap<Var, Rational>, ends: &HashMap<Var, i64>) -> Model {
    let ids = (0..n as u32).map(IntervalId);
    let start_of = |id: IntervalId| starts.get(&id.start()).cloned().unwrap_or_else(Rational::zero);
    let x = ids
        .clone()
        .filter_map(|id| ends.get(&id.end()).copied())
        .min()
        .unwrap_or(0);
    let Some(y) = ids.clone().map(start_of).max() else {
        return Model::default();
    };
    let intervals = ids
        .map(|id| {
            let end = ends.get(&id.end()).copied().unwrap_or(x);
            (start_of(id), &y + q(end - x + 1))
        })
        .collect();
    Model::new(intervals)
}

/// The quantities the end-point formulas are built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionContext {
    /// Least nonzero distance between starting points, or 1 if there is
    /// none.
    pub epsilon: Rational,
    /// Number of distinct starting points.
    pub distinct_starts: usize,
    /// Rank of each interval's starting point among the distinct ones.
    pub start_rank: Vec<usize>,
    /// Number of distinct ending points among intervals sharing the start.
    pub group_ends: Vec<usize>,
    /// Rank of each interval's ending point within its start group.
    pub end_rank: Vec<usize>,
    /// Each edge label after fixing which starting points coincide.
    pub reduced_labels: Vec<IntervalRelation>,
}

impl ConstructionContext {
    pub fn from_local(local: &Model) -> Self {
        let starts: BTreeSet<&Rational> = local.intervals.iter().map(|(s, _)| s).collect();
        let starts: Vec<&Rational> = starts.into_iter().collect();
        let epsilon = starts
            .windows(2)
            .map(|w| w[1] - w[0])
            .min()
            .unwrap_or_else(Rational::one);
        let mut groups: BTreeMap<&Rational, BTreeSet<&Rational>> = BTreeMap::new();
        for (s, e) in &local.intervals {
            groups.entry(s).or_default().insert(e);
        }
        let mut start_rank = Vec::new();
        let mut group_ends = Vec::new();
        let mut end_rank = Vec::new();
        for (s, e) in &local.intervals {
            start_rank.push(starts.binary_search(&s).expect("collected"));
            let ends = &groups[s];
            group_ends.push(ends.len());
            end_rank.push(ends.iter().position(|x| *x == e).expect("collected"));
        }
        ConstructionContext {
            epsilon,
            distinct_starts: starts.len(),
            start_rank,
            group_ends,
            end_rank,
            reduced_labels: Vec::new(),
        }
    }

    fn fraction(&self, v: usize) -> Rational {
        Rational::new((self.end_rank[v] as i64).into(), (self.group_ends[v] as i64).into())
    }
}

/// Builds a model of a start-mode instance from a model `local` that
/// satisfies the metric constraints, the forced `=`/`≠` decisions and the
/// edges with forced-equal starts.
///
/// Starting points are kept; every ending point is reset by a formula
/// specific to the algebra so that each edge with distinct starts realizes
/// the algebra's distinguished basic relation. The result is always checked
/// with [`check_model`].
pub fn construct_model(
    inst: &MIsatInstance,
    algebra: AlgebraId,
    local: &Model,
    forced: &[Forced],
) -> Result<(Model, ConstructionContext), SolveError> {
    let internal = |msg: String| Err(SolveError::Internal(msg));
    if algebra.family() != inst.mode || local.len() != inst.num_intervals() {
        return internal(format!("construction called with {algebra} on a mismatched instance"));
    }
    let mut ctx = ConstructionContext::from_local(local);
    let target = algebra.distinguished().unwrap_or(BasicRelation::Finishes);

    // Fix which starting points coincide on every edge, then orient edges
    // with distinct starts so that the first interval starts later.
    for f in forced {
        let e = &inst.edges[f.edge];
        let reduced = if f.equal {
            e.label.intersect(START_EQUAL)
        } else {
            e.label.difference(START_EQUAL)
        };
        ctx.reduced_labels.push(reduced);
        if f.equal {
            continue;
        }
        let (su, sv) = (local.start(e.from), local.start(e.to));
        let oriented = match su.cmp(sv) {
            std::cmp::Ordering::Greater => reduced.intersect(R_S),
            std::cmp::Ordering::Less => reduced.converse().intersect(R_S),
            std::cmp::Ordering::Equal => {
                return internal(format!("edge #{} has distinct starts forced but equal in the local model", f.edge))
            }
        };
        if !oriented.contains(target) {
            return internal(format!("edge #{} label {} does not admit {target} once oriented", f.edge, e.label));
        }
    }

    let n = inst.num_intervals();
    let levels = q(ctx.distinct_starts.max(1) as i64);
    let latest = local.intervals.iter().map(|(s, _)| s).max().cloned().unwrap_or_else(Rational::zero);
    let half = Rational::new(1.into(), 2.into());
    let mut intervals = Vec::with_capacity(n);
    for v in 0..n {
        let (start, _) = &local.intervals[v];
        let f = ctx.fraction(v);
        let i = q(ctx.start_rank[v] as i64);
        let end = match algebra {
            AlgebraId::SAfter => start + &ctx.epsilon / q(4) * (Rational::one() + f),
            AlgebraId::SDuring => {
                let eps = (&ctx.epsilon).min(&Rational::one()).clone();
                &latest + Rational::one() + q(2) * &eps * (&levels - &i - Rational::one())
                    + &eps / q(2) * (f - Rational::one())
            }
            AlgebraId::SOverlappedBy => {
                &latest + (&i + Rational::one()) / &levels + (f - &half) / &levels
            }
            AlgebraId::SStar => &latest + Rational::one(),
            _ => return internal(format!("{algebra} is not a starting-point algebra")),
        };
        intervals.push((start.clone(), end));
    }
    Ok((Model::new(intervals), ctx))
}

/// The first way in which a model fails an instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Arity { expected: usize, found: usize },
    NotProper { interval: String },
    Edge { index: usize, realized: Option<BasicRelation> },
    Metric { index: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Arity { expected, found } => write!(f, "model has {found} intervals, expected {expected}"),
            Violation::NotProper { interval } => write!(f, "interval {interval} does not start before it ends"),
            Violation::Edge { index, realized: Some(b) } => {
                write!(f, "edge #{index} realizes {b}, which its label excludes")
            }
            Violation::Edge { index, realized: None } => write!(f, "edge #{index} relates an improper interval"),
            Violation::Metric { index } => write!(f, "metric constraint #{index} is false"),
        }
    }
}

/// Checks every interval, edge and metric constraint of `inst` under `m`.
///
/// ```
/// use allen_metric::instance::{IntervalId, MIsatInstance, Mode, Model};
/// use allen_metric::solver::check_model;
/// use allen_metric::Rational;
/// let q = |n: i64| Rational::from_integer(n.into());
/// let mut inst = MIsatInstance::with_intervals(Mode::Start, 2);
/// inst.relate(IntervalId(0), "{m}".parse().unwrap(), IntervalId(1));
/// assert!(check_model(&inst, &Model::new(vec![(q(0), q(1)), (q(1), q(2))])).is_ok());
/// assert!(check_model(&inst, &Model::new(vec![(q(0), q(1)), (q(0), q(1))])).is_err());
/// ```
pub fn check_model(inst: &MIsatInstance, m: &Model) -> Result<(), Violation> {
    if m.len() != inst.num_intervals() {
        return Err(Violation::Arity {
            expected: inst.num_intervals(),
            found: m.len(),
        });
    }
    for id in inst.intervals() {
        if m.start(id) >= m.end(id) {
            return Err(Violation::NotProper {
                interval: inst.name(id).to_string(),
            });
        }
    }
    for (index, e) in inst.edges.iter().enumerate() {
        let realized = BasicRelation::between(m.start(e.from), m.end(e.from), m.start(e.to), m.end(e.to));
        if !realized.is_some_and(|b| e.label.contains(b)) {
            return Err(Violation::Edge { index, realized });
        }
    }
    for (index, d) in inst.metric.iter().enumerate() {
        let value = |v: Var| m.value(v).cloned().unwrap_or_else(Rational::zero);
        if !d.holds(value) {
            return Err(Violation::Metric { index });
        }
    }
    Ok(())
}

//! Deciding and solving interval networks with metric constraints on one
//! side of every interval.
//!
//! Start-mode instances are decided by explicitating starting-point
//! relations, fixing which starting points must coincide, and checking the
//! ending points of coinciding intervals in the point algebra. End-mode
//! instances are solved through the time-reversed start-mode instance.

mod construct;

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::catalog::{member, AlgebraId};
use crate::dlr::{horn_dlr_sat, Dlr, HornDlr, HornOutcome, LinearPolynomial, PointForm, SatError, Var};
use crate::instance::{Edge, MIsatInstance, Mode, Model};
use crate::point_algebra::{pa_sat_indexed, PointConstraint};
use crate::relation::{IntervalRelation, PointRelation, Side};
use crate::Rational;

pub use construct::{assemble_local_model, check_model, construct_model, ConstructionContext, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("metric constraint #{index} `{text}` mentions {side} points in {mode} mode")]
    MixedEndpoint {
        index: usize,
        text: String,
        side: &'static str,
        mode: Mode,
    },
    #[error("metric constraint #{index} `{text}` mentions a variable that is not an interval endpoint")]
    FreeVariable { index: usize, text: String },
    #[error("metric constraint #{index} `{text}` is not a Horn DLR")]
    NonHorn { index: usize, text: String },
    #[error("reference to undeclared interval #{0}")]
    UnknownInterval(u32),
    #[error("label {label} lies outside every {family}-mode catalog algebra")]
    LabelOutsideCatalog { label: IntervalRelation, family: Mode },
    #[error("the labels do not fit in a single {family}-mode catalog algebra")]
    NoCommonAlgebra { family: Mode },
    #[error("declared algebra {algebra} does not contain label {label}")]
    DeclaredAlgebraMismatch { algebra: AlgebraId, label: IntervalRelation },
    #[error("declared algebra {algebra} belongs to {family} mode, but the instance is in {mode} mode")]
    DeclaredAlgebraFamily { algebra: AlgebraId, family: Mode, mode: Mode },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error("internal error: {0}")]
    Internal(String),
}

impl From<SatError> for SolveError {
    fn from(e: SatError) -> Self {
        SolveError::Internal(e.to_string())
    }
}

/// Where a rejection happened.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    /// The explicit point constraints are unsatisfiable.
    Line2,
    /// The ending points of intervals with forced-equal starts conflict.
    Line13,
    /// The instance is outside the tractable fragment.
    Validation,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Line2 => "line2",
            Stage::Line13 => "line13",
            Stage::Validation => "validation",
        })
    }
}

impl SolveError {
    pub fn stage(&self) -> Option<Stage> {
        match self {
            SolveError::Validation(_) => Some(Stage::Validation),
            SolveError::Internal(_) => None,
        }
    }
}

/// Which procedure answers the satisfiability queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    /// The point algebra when every metric constraint is a point formula,
    /// Horn DLRs otherwise.
    #[default]
    Auto,
    HornDlr,
    PointAlgebra,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    pub backend: Backend,
    /// Build and verify a model on acceptance.
    pub build_model: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            backend: Backend::Auto,
            build_model: true,
        }
    }
}

/// The forced relation between the mode-side endpoints of one edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Forced {
    pub edge: usize,
    pub equal: bool,
}

/// Intermediate sets of the decision procedure, in the coordinates of the
/// input instance.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Artifacts {
    /// Point relations added by explicitation, one per edge.
    pub explicit: Vec<PointConstraint>,
    /// One `=`/`≠` decision per edge.
    pub forced: Vec<Forced>,
    /// Point relations on the other side for edges with forced-equal ends.
    pub other_side: Vec<PointConstraint>,
}

impl Artifacts {
    /// `forced` as point constraints on the mode side.
    pub fn forced_constraints(&self, inst: &MIsatInstance) -> Vec<PointConstraint> {
        let side = inst.mode.side();
        self.forced
            .iter()
            .map(|k| {
                let e = &inst.edges[k.edge];
                let rel = if k.equal { PointRelation::EQ } else { PointRelation::NE };
                PointConstraint::new(e.from.endpoint(side), rel, e.to.endpoint(side))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Sat(Model),
    /// Accepted without building a model.
    Accepted,
    Unsat(Stage),
}

impl Verdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, Verdict::Sat(_) | Verdict::Accepted)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveReport {
    pub verdict: Verdict,
    pub algebra: AlgebraId,
    /// The backend that actually answered.
    pub backend: Backend,
    pub artifacts: Artifacts,
    pub construction: Option<ConstructionContext>,
}

/// Checks the instance against the tractable fragment and picks an algebra.
///
/// ```
/// use allen_metric::instance::{IntervalId, MIsatInstance, Mode};
/// use allen_metric::solver::validate;
/// use allen_metric::catalog::AlgebraId;
/// let mut inst = MIsatInstance::with_intervals(Mode::Start, 2);
/// inst.relate(IntervalId(0), "{p pi}".parse().unwrap(), IntervalId(1));
/// assert_eq!(validate(&inst).unwrap(), AlgebraId::SAfter);
/// ```
pub fn validate(inst: &MIsatInstance) -> Result<AlgebraId, ValidationError> {
    let n = inst.num_intervals() as u32;
    for e in &inst.edges {
        for id in [e.from, e.to] {
            if id.0 >= n {
                return Err(ValidationError::UnknownInterval(id.0));
            }
        }
    }
    for (index, dlr) in inst.metric.iter().enumerate() {
        let text = || dlr.display_with(&|v| endpoint_name(inst, v)).to_string();
        for v in dlr.vars() {
            match v {
                Var::Free(_) => return Err(ValidationError::FreeVariable { index, text: text() }),
                Var::Start(i) | Var::End(i) if i.0 >= n => return Err(ValidationError::UnknownInterval(i.0)),
                Var::Start(_) if inst.mode == Mode::End => {
                    return Err(ValidationError::MixedEndpoint { index, text: text(), side: "starting", mode: inst.mode })
                }
                Var::End(_) if inst.mode == Mode::Start => {
                    return Err(ValidationError::MixedEndpoint { index, text: text(), side: "ending", mode: inst.mode })
                }
                _ => {}
            }
        }
        if !dlr.is_horn() {
            return Err(ValidationError::NonHorn { index, text: text() });
        }
    }
    if let Some(algebra) = inst.algebra {
        if algebra.family() != inst.mode {
            return Err(ValidationError::DeclaredAlgebraFamily {
                algebra,
                family: algebra.family(),
                mode: inst.mode,
            });
        }
        if let Some(e) = inst.edges.iter().find(|e| !member(algebra, e.label)) {
            return Err(ValidationError::DeclaredAlgebraMismatch { algebra, label: e.label });
        }
        return Ok(algebra);
    }
    let family: Vec<_> = AlgebraId::in_family(inst.mode).collect();
    if let Some(e) = inst
        .edges
        .iter()
        .find(|e| family.iter().all(|&a| !member(a, e.label)))
    {
        return Err(ValidationError::LabelOutsideCatalog { label: e.label, family: inst.mode });
    }
    family
        .into_iter()
        .find(|&a| inst.edges.iter().all(|e| member(a, e.label)))
        .ok_or(ValidationError::NoCommonAlgebra { family: inst.mode })
}

fn endpoint_name(inst: &MIsatInstance, v: Var) -> String {
    match v.interval() {
        Some(i) if i.index() < inst.num_intervals() => inst.var_name(v),
        _ => v.to_string(),
    }
}

/// The point relation implied on the mode side by one edge, written with
/// `<`, `≤`, `=` or `≠` (sides swapped for `>` and `≥`). `⊤` yields
/// nothing and `⊥` yields the unsatisfiable constraint.
fn explicit_constraint(e: &Edge, side: Side) -> Option<PointConstraint> {
    let rel = e.label.endpoint_relation(side, false);
    let (u, v) = (e.from.endpoint(side), e.to.endpoint(side));
    if rel == PointRelation::ALL {
        None
    } else if rel.admits(std::cmp::Ordering::Greater) && rel != PointRelation::NE {
        Some(PointConstraint::new(v, rel.inverse(), u))
    } else {
        Some(PointConstraint::new(u, rel, v))
    }
}

/// Adds the mode-side point relation of every edge to the metric
/// constraints; satisfiability is unchanged.
pub fn explicit_points(inst: &MIsatInstance) -> MIsatInstance {
    let mut out = inst.clone();
    let side = inst.mode.side();
    for e in &inst.edges {
        if let Some(c) = explicit_constraint(e, side) {
            out.metric.push(c.to_horn().into_dlr());
        }
    }
    out
}

/// A satisfiability oracle for `H' ∪ extra` where `extra` is a handful of
/// point constraints.
enum Engine {
    Points {
        vars: Vec<Var>,
        index: HashMap<Var, usize>,
        base: Vec<(usize, PointRelation, usize)>,
    },
    Horn {
        base: Vec<HornDlr>,
    },
}

/// `d` as a point constraint, when it is a single point-form disjunct over
/// endpoint variables. A constant relation becomes `⊤` or `⊥` on a dummy
/// variable pair.
fn as_point_constraint(d: &Dlr) -> Option<PointConstraint> {
    let [only] = d.disjuncts() else {
        return None;
    };
    match only.point_form()? {
        PointForm::Point { lhs, rel, rhs } => Some(PointConstraint::new(lhs, rel, rhs)),
        PointForm::Trivial(b) => {
            let rel = if b { PointRelation::ALL } else { PointRelation::NONE };
            Some(PointConstraint::new(Var::Free(0), rel, Var::Free(0)))
        }
    }
}

impl Engine {
    fn new(metric: &[Dlr], explicit: &[PointConstraint], backend: Backend) -> Result<(Engine, Backend), SolveError> {
        let points: Option<Vec<PointConstraint>> = match backend {
            Backend::HornDlr => None,
            _ => metric.iter().map(as_point_constraint).collect(),
        };
        match points {
            Some(mut points) => {
                points.extend_from_slice(explicit);
                let mut engine = Engine::Points {
                    vars: Vec::new(),
                    index: HashMap::new(),
                    base: Vec::new(),
                };
                let indexed: Vec<_> = points.iter().map(|c| engine.index_of(c)).collect();
                if let Engine::Points { base, .. } = &mut engine {
                    *base = indexed;
                }
                Ok((engine, Backend::PointAlgebra))
            }
            None if backend == Backend::PointAlgebra => Err(SolveError::Internal(
                "point-algebra backend requested for constraints outside the point algebra".into(),
            )),
            None => {
                let mut base = Vec::with_capacity(metric.len() + explicit.len());
                for d in metric {
                    base.push(HornDlr::try_from(d.clone()).map_err(|e| SolveError::Internal(e.to_string()))?);
                }
                base.extend(explicit.iter().map(PointConstraint::to_horn));
                Ok((Engine::Horn { base }, Backend::HornDlr))
            }
        }
    }

    fn index_of(&mut self, c: &PointConstraint) -> (usize, PointRelation, usize) {
        let Engine::Points { vars, index, .. } = self else {
            unreachable!("only the point engine indexes variables")
        };
        let mut id = |v: Var| {
            *index.entry(v).or_insert_with(|| {
                vars.push(v);
                vars.len() - 1
            })
        };
        (id(c.lhs), c.rel, id(c.rhs))
    }

    /// A witness for `H' ∪ extra`, if any.
    fn sat(&mut self, extra: &[PointConstraint]) -> Result<Option<HashMap<Var, Rational>>, SolveError> {
        match self {
            Engine::Points { .. } => {
                let extra: Vec<_> = extra.iter().map(|c| self.index_of(c)).collect();
                let Engine::Points { vars, base, .. } = self else { unreachable!() };
                let mut all = base.clone();
                all.extend(extra);
                Ok(pa_sat_indexed(vars.len(), &all).map(|values| {
                    vars.iter()
                        .zip(values)
                        .map(|(v, k)| (*v, Rational::from_integer(k.into())))
                        .collect()
                }))
            }
            Engine::Horn { base } => {
                let mut all = base.clone();
                all.extend(extra.iter().map(PointConstraint::to_horn));
                Ok(match horn_dlr_sat(&all)? {
                    HornOutcome::Sat(a) => Some(a.into_iter().collect()),
                    HornOutcome::Unsat => None,
                })
            }
        }
    }

    /// Whether `H' ∪ extra` is satisfiable, without building a witness
    /// where that can be avoided.
    fn satisfiable(&mut self, extra: &[PointConstraint]) -> Result<bool, SolveError> {
        Ok(self.sat(extra)?.is_some())
    }
}

/// Outcome of the decision procedure on a start-mode instance.
pub(crate) struct StartDecision {
    pub verdict: Result<(), Stage>,
    pub backend: Backend,
    pub artifacts: Artifacts,
    /// Witness of `H' ∪ K` on starting points.
    pub starts: Option<HashMap<Var, Rational>>,
    /// Witness of the ending-point system.
    pub ends: Option<HashMap<Var, i64>>,
}

fn decide_start(inst: &MIsatInstance, backend: Backend, want_witnesses: bool) -> Result<StartDecision, SolveError> {
    debug_assert_eq!(inst.mode, Mode::Start);
    let explicit: Vec<_> = inst
        .edges
        .iter()
        .filter_map(|e| explicit_constraint(e, Side::Start))
        .collect();
    let (mut engine, used) = Engine::new(&inst.metric, &explicit, backend)?;
    let mut artifacts = Artifacts {
        explicit,
        ..Artifacts::default()
    };
    let reject = |stage, artifacts, used| StartDecision {
        verdict: Err(stage),
        backend: used,
        artifacts,
        starts: None,
        ends: None,
    };

    if !engine.satisfiable(&[])? {
        return Ok(reject(Stage::Line2, artifacts, used));
    }

    for (k, e) in inst.edges.iter().enumerate() {
        let ne = PointConstraint::new(e.from.start(), PointRelation::NE, e.to.start());
        let equal = !engine.satisfiable(&[ne])?;
        artifacts.forced.push(Forced { edge: k, equal });
    }

    for f in artifacts.forced.iter().filter(|f| f.equal) {
        let e = &inst.edges[f.edge];
        let rel = e.label.endpoint_relation(Side::End, true);
        artifacts.other_side.push(PointConstraint::new(e.from.end(), rel, e.to.end()));
    }
    let ends = crate::point_algebra::pa_sat(&artifacts.other_side);
    let crate::point_algebra::PaOutcome::Sat(ends) = ends else {
        return Ok(reject(Stage::Line13, artifacts, used));
    };

    let starts = if want_witnesses {
        let forced = artifacts.forced_constraints(inst);
        let starts = engine.sat(&forced)?.ok_or_else(|| {
            SolveError::Internal("explicit constraints with forced starts became unsatisfiable".into())
        })?;
        Some(starts)
    } else {
        None
    };
    Ok(StartDecision {
        verdict: Ok(()),
        backend: used,
        artifacts,
        starts,
        ends: want_witnesses.then(|| ends.into_iter().collect()),
    })
}

/// Reverses time: every interval `[a, b]` becomes `[-b, -a]`, labels take
/// their time mirror and the mode flips.
pub fn mirror_instance(inst: &MIsatInstance) -> MIsatInstance {
    let flip = |v: Var| match v {
        Var::Start(i) => LinearPolynomial::term(-Rational::from_integer(1.into()), Var::End(i)),
        Var::End(i) => LinearPolynomial::term(-Rational::from_integer(1.into()), Var::Start(i)),
        Var::Free(k) => LinearPolynomial::var(Var::Free(k)),
    };
    MIsatInstance {
        names: inst.names.clone(),
        edges: inst
            .edges
            .iter()
            .map(|e| Edge::new(e.from, e.label.time_mirror(), e.to))
            .collect(),
        metric: inst.metric.iter().map(|d| d.substitute(flip)).collect(),
        mode: inst.mode.mirrored(),
        algebra: inst.algebra.map(AlgebraId::mirrored),
    }
}

/// The model of the time-reversed instance.
pub fn mirror_model(m: &Model) -> Model {
    Model::new(m.intervals.iter().map(|(s, e)| (-e.clone(), -s.clone())).collect())
}

/// A point constraint read in reversed time.
fn mirror_constraint(c: &PointConstraint) -> PointConstraint {
    let swap = |v: Var| match v {
        Var::Start(i) => Var::End(i),
        Var::End(i) => Var::Start(i),
        other => other,
    };
    // x' = -x, so x' R y' holds iff y R x.
    PointConstraint::new(swap(c.rhs), c.rel, swap(c.lhs))
}

fn mirror_artifacts(a: Artifacts) -> Artifacts {
    Artifacts {
        explicit: a.explicit.iter().map(mirror_constraint).collect(),
        forced: a.forced,
        other_side: a.other_side.iter().map(mirror_constraint).collect(),
    }
}

/// Runs the decision procedure without building a model.
pub fn decide(inst: &MIsatInstance) -> Result<SolveReport, SolveError> {
    solve_with(
        inst,
        SolveOptions {
            build_model: false,
            ..SolveOptions::default()
        },
    )
}

/// Decides the instance and, when satisfiable, returns a verified model.
///
/// ```
/// use allen_metric::instance::{IntervalId, MIsatInstance, Mode};
/// use allen_metric::solver::{solve, Verdict};
/// let mut inst = MIsatInstance::with_intervals(Mode::Start, 2);
/// inst.relate(IntervalId(0), "{pi}".parse().unwrap(), IntervalId(1));
/// let report = solve(&inst).unwrap();
/// let Verdict::Sat(model) = report.verdict else { panic!() };
/// assert!(model.end(IntervalId(1)) < model.start(IntervalId(0)));
/// ```
pub fn solve(inst: &MIsatInstance) -> Result<SolveReport, SolveError> {
    solve_with(inst, SolveOptions::default())
}

pub fn solve_with(inst: &MIsatInstance, options: SolveOptions) -> Result<SolveReport, SolveError> {
    let algebra = validate(inst)?;
    let (start_inst, start_algebra) = match inst.mode {
        Mode::Start => (None, algebra),
        Mode::End => (Some(mirror_instance(inst)), algebra.mirrored()),
    };
    let working = start_inst.as_ref().unwrap_or(inst);
    let decision = decide_start(working, options.backend, options.build_model)?;
    let artifacts = match inst.mode {
        Mode::Start => decision.artifacts.clone(),
        Mode::End => mirror_artifacts(decision.artifacts.clone()),
    };
    let mut report = SolveReport {
        verdict: Verdict::Accepted,
        algebra,
        backend: decision.backend,
        artifacts,
        construction: None,
    };
    if let Err(stage) = decision.verdict {
        report.verdict = Verdict::Unsat(stage);
        return Ok(report);
    }
    if !options.build_model {
        return Ok(report);
    }
    let starts = decision.starts.as_ref().expect("witnesses requested");
    let ends = decision.ends.as_ref().expect("witnesses requested");
    let local = assemble_local_model(working.num_intervals(), starts, ends);
    let (model, context) = construct_model(working, start_algebra, &local, &decision.artifacts.forced)?;
    let model = match inst.mode {
        Mode::Start => model,
        Mode::End => mirror_model(&model),
    };
    check_model(inst, &model)
        .map_err(|v| SolveError::Internal(format!("constructed model fails verification: {v}")))?;
    report.verdict = Verdict::Sat(model);
    report.construction = Some(context);
    Ok(report)
}

//! Interval networks with metric side constraints, and their models.

use std::fmt;

use crate::catalog::AlgebraId;
use crate::dlr::{Dlr, Var};
use crate::relation::{IntervalRelation, Side};
use crate::Rational;

/// Index of an interval variable within an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntervalId(pub u32);

impl IntervalId {
    pub fn start(self) -> Var {
        Var::Start(self)
    }

    pub fn end(self) -> Var {
        Var::End(self)
    }

    pub fn endpoint(self, side: Side) -> Var {
        match side {
            Side::Start => Var::Start(self),
            Side::End => Var::End(self),
        }
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Which endpoints the metric constraints may mention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Mode {
    #[default]
    Start,
    End,
}

impl Mode {
    pub fn side(self) -> Side {
        match self {
            Mode::Start => Side::Start,
            Mode::End => Side::End,
        }
    }

    pub fn mirrored(self) -> Mode {
        match self {
            Mode::Start => Mode::End,
            Mode::End => Mode::Start,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Start => "start",
            Mode::End => "end",
        })
    }
}

/// A labelled edge `from label to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub from: IntervalId,
    pub label: IntervalRelation,
    pub to: IntervalId,
}

impl Edge {
    pub fn new(from: IntervalId, label: IntervalRelation, to: IntervalId) -> Self {
        Edge { from, label, to }
    }
}

/// An interval network `⟨V, E⟩` together with a set `H` of DLRs over the
/// endpoints of its intervals.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MIsatInstance {
    pub names: Vec<String>,
    pub edges: Vec<Edge>,
    pub metric: Vec<Dlr>,
    pub mode: Mode,
    /// A user-declared algebra; `None` means pick automatically.
    pub algebra: Option<AlgebraId>,
}

impl MIsatInstance {
    pub fn new(mode: Mode) -> Self {
        MIsatInstance {
            mode,
            ..Default::default()
        }
    }

    /// An instance with `n` anonymous intervals named `v0 … v{n-1}`.
    pub fn with_intervals(mode: Mode, n: usize) -> Self {
        let mut inst = Self::new(mode);
        for i in 0..n {
            inst.add_interval(format!("v{i}"));
        }
        inst
    }

    pub fn add_interval(&mut self, name: impl Into<String>) -> IntervalId {
        self.names.push(name.into());
        IntervalId(self.names.len() as u32 - 1)
    }

    pub fn relate(&mut self, from: IntervalId, label: IntervalRelation, to: IntervalId) {
        self.edges.push(Edge::new(from, label, to));
    }

    pub fn constrain(&mut self, dlr: impl Into<Dlr>) {
        self.metric.push(dlr.into());
    }

    pub fn num_intervals(&self) -> usize {
        self.names.len()
    }

    pub fn intervals(&self) -> impl Iterator<Item = IntervalId> {
        (0..self.names.len() as u32).map(IntervalId)
    }

    pub fn name(&self, id: IntervalId) -> &str {
        &self.names[id.index()]
    }

    pub fn find(&self, name: &str) -> Option<IntervalId> {
        self.names.iter().position(|n| n == name).map(|i| IntervalId(i as u32))
    }

    /// Endpoint variable names as written in instance files (`A-`, `A+`).
    pub fn var_name(&self, v: Var) -> String {
        match v {
            Var::Start(i) => format!("{}-", self.name(i)),
            Var::End(i) => format!("{}+", self.name(i)),
            Var::Free(k) => format!("x{k}"),
        }
    }
}

/// Exact endpoints for every interval of an instance.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Model {
    pub intervals: Vec<(Rational, Rational)>,
}

impl Model {
    pub fn new(intervals: Vec<(Rational, Rational)>) -> Self {
        Model { intervals }
    }

    pub fn start(&self, id: IntervalId) -> &Rational {
        &self.intervals[id.index()].0
    }

    pub fn end(&self, id: IntervalId) -> &Rational {
        &self.intervals[id.index()].1
    }

    /// Value of an endpoint variable. Free variables have no value here.
    pub fn value(&self, v: Var) -> Option<&Rational> {
        match v {
            Var::Start(i) => self.intervals.get(i.index()).map(|p| &p.0),
            Var::End(i) => self.intervals.get(i.index()).map(|p| &p.1),
            Var::Free(_) => None,
        }
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }
}

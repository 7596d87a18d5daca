//! Linear polynomials, linear relations and disjunctive linear relations
//! over exact rationals.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::instance::IntervalId;
use crate::relation::PointRelation;
use crate::Rational;

/// A real-valued variable: an interval endpoint or a free metric variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Start(IntervalId),
    End(IntervalId),
    Free(u32),
}

impl Var {
    pub fn interval(self) -> Option<IntervalId> {
        match self {
            Var::Start(i) | Var::End(i) => Some(i),
            Var::Free(_) => None,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Start(i) => write!(f, "v{}-", i.0),
            Var::End(i) => write!(f, "v{}+", i.0),
            Var::Free(k) => write!(f, "x{k}"),
        }
    }
}

/// `Σ cᵢ·xᵢ + c₀`. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct LinearPolynomial {
    terms: BTreeMap<Var, Rational>,
    constant: Rational,
}

impl LinearPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        LinearPolynomial {
            terms: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn var(v: Var) -> Self {
        Self::term(Rational::one(), v)
    }

    pub fn term(coefficient: Rational, v: Var) -> Self {
        let mut p = Self::zero();
        p.add_term(coefficient, v);
        p
    }

    pub fn add_term(&mut self, coefficient: Rational, v: Var) {
        let entry = self.terms.entry(v).or_insert_with(Rational::zero);
        *entry += coefficient;
        if entry.is_zero() {
            self.terms.remove(&v);
        }
    }

    pub fn add_constant(&mut self, c: &Rational) {
        self.constant += c;
    }

    pub fn terms(&self) -> impl Iterator<Item = (Var, &Rational)> + '_ {
        self.terms.iter().map(|(v, c)| (*v, c))
    }

    pub fn coefficient(&self, v: Var) -> Rational {
        self.terms.get(&v).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> &Rational {
        &self.constant
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.terms.keys().copied()
    }

    pub fn scaled(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        LinearPolynomial {
            terms: self.terms.iter().map(|(v, c)| (*v, c * k)).collect(),
            constant: &self.constant * k,
        }
    }

    pub fn plus(&self, other: &LinearPolynomial) -> Self {
        let mut out = self.clone();
        for (v, c) in &other.terms {
            out.add_term(c.clone(), *v);
        }
        out.constant += &other.constant;
        out
    }

    pub fn minus(&self, other: &LinearPolynomial) -> Self {
        self.plus(&other.scaled(&-Rational::one()))
    }

    /// Replaces every variable by `f(var)`.
    pub fn substitute(&self, f: impl Fn(Var) -> LinearPolynomial) -> Self {
        self.terms
            .iter()
            .fold(Self::constant(self.constant.clone()), |acc, (v, c)| {
                acc.plus(&f(*v).scaled(c))
            })
    }

    pub fn evaluate(&self, value: impl Fn(Var) -> Rational) -> Rational {
        self.terms
            .iter()
            .fold(self.constant.clone(), |acc, (v, c)| acc + c * value(*v))
    }

    pub fn display_with<'a>(&'a self, name: &'a dyn Fn(Var) -> String) -> impl fmt::Display + 'a {
        PolyDisplay { poly: self, name }
    }
}

struct PolyDisplay<'a> {
    poly: &'a LinearPolynomial,
    name: &'a dyn Fn(Var) -> String,
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, c) in &self.poly.terms {
            let magnitude = c.abs();
            match (first, c.is_negative()) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            if magnitude.is_one() {
                write!(f, "{}", (self.name)(*v))?;
            } else {
                write!(f, "{}*{}", magnitude, (self.name)(*v))?;
            }
            first = false;
        }
        let k = &self.poly.constant;
        if first {
            write!(f, "{k}")?;
        } else if !k.is_zero() {
            let sep = if k.is_negative() { " - " } else { " + " };
            write!(f, "{sep}{}", k.abs())?;
        }
        Ok(())
    }
}

impl fmt::Display for LinearPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |v: Var| v.to_string();
        let shown = self.display_with(&name);
        write!(f, "{shown}")
    }
}

/// Comparison operator of a linear relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LinearOp {
    Lt,
    Le,
    Eq,
    Ne,
    Ge,
    Gt,
}

impl LinearOp {
    pub const ALL: [LinearOp; 6] = [
        LinearOp::Lt,
        LinearOp::Le,
        LinearOp::Eq,
        LinearOp::Ne,
        LinearOp::Ge,
        LinearOp::Gt,
    ];

    pub const fn point_relation(self) -> PointRelation {
        match self {
            LinearOp::Lt => PointRelation::LT,
            LinearOp::Le => PointRelation::LE,
            LinearOp::Eq => PointRelation::EQ,
            LinearOp::Ne => PointRelation::NE,
            LinearOp::Ge => PointRelation::GE,
            LinearOp::Gt => PointRelation::GT,
        }
    }

    /// The operator for a non-trivial point relation symbol; `None` for `⊤`
    /// and `⊥`, which have no linear-operator spelling.
    pub const fn from_point_relation(rel: PointRelation) -> Option<LinearOp> {
        match rel.bits() {
            0b001 => Some(LinearOp::Lt),
            0b011 => Some(LinearOp::Le),
            0b010 => Some(LinearOp::Eq),
            0b101 => Some(LinearOp::Ne),
            0b110 => Some(LinearOp::Ge),
            0b100 => Some(LinearOp::Gt),
            _ => None,
        }
    }

    /// The operator with both sides exchanged.
    pub const fn flipped(self) -> LinearOp {
        match self {
            LinearOp::Lt => LinearOp::Gt,
            LinearOp::Le => LinearOp::Ge,
            LinearOp::Ge => LinearOp::Le,
            LinearOp::Gt => LinearOp::Lt,
            op => op,
        }
    }

    pub const fn holds(self, ord: Ordering) -> bool {
        self.point_relation().admits(ord)
    }

    pub const fn is_strict(self) -> bool {
        matches!(self, LinearOp::Lt | LinearOp::Gt)
    }

    pub const fn symbol(self) -> &'static str {
        match self {
            LinearOp::Lt => "<",
            LinearOp::Le => "<=",
            LinearOp::Eq => "=",
            LinearOp::Ne => "!=",
            LinearOp::Ge => ">=",
            LinearOp::Gt => ">",
        }
    }
}

impl fmt::Display for LinearOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// `lhs op rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearRelation {
    pub lhs: LinearPolynomial,
    pub op: LinearOp,
    pub rhs: LinearPolynomial,
}

/// The shape of a linear relation when read as a point-algebra formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointForm {
    /// Mentions no variable at all; always true or always false.
    Trivial(bool),
    /// `lhs rel rhs` between two variables (possibly the same one).
    Point { lhs: Var, rel: PointRelation, rhs: Var },
}

impl LinearRelation {
    pub fn new(lhs: LinearPolynomial, op: LinearOp, rhs: LinearPolynomial) -> Self {
        LinearRelation { lhs, op, rhs }
    }

    /// `x op y` for two variables.
    pub fn vars(x: Var, op: LinearOp, y: Var) -> Self {
        Self::new(LinearPolynomial::var(x), op, LinearPolynomial::var(y))
    }

    /// `lhs − rhs`, so that the relation reads `difference() op 0`.
    pub fn difference(&self) -> LinearPolynomial {
        self.lhs.minus(&self.rhs)
    }

    pub fn holds(&self, value: impl Fn(Var) -> Rational) -> bool {
        let d = self.difference().evaluate(value);
        self.op.holds(d.cmp(&Rational::zero()))
    }

    pub fn is_disequality(&self) -> bool {
        self.op == LinearOp::Ne
    }

    /// Reads the relation as `x R y` when `lhs − rhs` has the shape
    /// `c·x − c·y` (or is the zero polynomial).
    pub fn point_form(&self) -> Option<PointForm> {
        let d = self.difference();
        if !d.constant.is_zero() {
            return if d.is_constant() {
                Some(PointForm::Trivial(self.op.holds(d.constant.cmp(&Rational::zero()))))
            } else {
                None
            };
        }
        let terms: Vec<_> = d.terms().collect();
        match terms.as_slice() {
            [] => Some(PointForm::Trivial(self.op.holds(Ordering::Equal))),
            [(a, ca), (b, cb)] if (*ca + *cb).is_zero() => {
                let (x, y) = if ca.is_positive() { (*a, *b) } else { (*b, *a) };
                Some(PointForm::Point {
                    lhs: x,
                    rel: self.op.point_relation(),
                    rhs: y,
                })
            }
            _ => None,
        }
    }

    pub fn substitute(&self, f: impl Fn(Var) -> LinearPolynomial + Copy) -> Self {
        LinearRelation {
            lhs: self.lhs.substitute(f),
            op: self.op,
            rhs: self.rhs.substitute(f),
        }
    }

    pub fn display_with<'a>(&'a self, name: &'a dyn Fn(Var) -> String) -> impl fmt::Display + 'a {
        RelationDisplay { rel: self, name }
    }
}

struct RelationDisplay<'a> {
    rel: &'a LinearRelation,
    name: &'a dyn Fn(Var) -> String,
}

impl fmt::Display for RelationDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {}",
            self.rel.lhs.display_with(self.name),
            self.rel.op,
            self.rel.rhs.display_with(self.name)
        )
    }
}

impl fmt::Display for LinearRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |v: Var| v.to_string();
        let shown = self.display_with(&name);
        write!(f, "{shown}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DlrError {
    #[error("a disjunctive linear relation needs at least one disjunct")]
    Empty,
    #[error("not Horn: {0} disjuncts are not disequalities")]
    NotHorn(usize),
}

/// A disjunction of one or more linear relations.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dlr {
    disjuncts: Vec<LinearRelation>,
}

impl Dlr {
    pub fn new(disjuncts: Vec<LinearRelation>) -> Result<Self, DlrError> {
        if disjuncts.is_empty() {
            return Err(DlrError::Empty);
        }
        Ok(Dlr { disjuncts })
    }

    pub fn single(relation: LinearRelation) -> Self {
        Dlr {
            disjuncts: vec![relation],
        }
    }

    pub fn disjuncts(&self) -> &[LinearRelation] {
        &self.disjuncts
    }

    /// Horn iff at most one disjunct is not of the form `α ≠ β`.
    pub fn is_horn(&self) -> bool {
        self.convex_disjunct_count() <= 1
    }

    fn convex_disjunct_count(&self) -> usize {
        self.disjuncts.iter().filter(|d| !d.is_disequality()).count()
    }

    pub fn holds(&self, value: impl Fn(Var) -> Rational + Copy) -> bool {
        self.disjuncts.iter().any(|d| d.holds(value))
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.disjuncts
            .iter()
            .flat_map(|d| d.lhs.vars().chain(d.rhs.vars()))
    }

    pub fn substitute(&self, f: impl Fn(Var) -> LinearPolynomial + Copy) -> Self {
        Dlr {
            disjuncts: self.disjuncts.iter().map(|d| d.substitute(f)).collect(),
        }
    }

    pub fn display_with<'a>(&'a self, name: &'a dyn Fn(Var) -> String) -> impl fmt::Display + 'a {
        DlrDisplay { dlr: self, name }
    }
}

struct DlrDisplay<'a> {
    dlr: &'a Dlr,
    name: &'a dyn Fn(Var) -> String,
}

impl fmt::Display for DlrDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.dlr.disjuncts.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{}", d.display_with(self.name))?;
        }
        Ok(())
    }
}

impl fmt::Display for Dlr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |v: Var| v.to_string();
        let shown = self.display_with(&name);
        write!(f, "{shown}")
    }
}

impl From<LinearRelation> for Dlr {
    fn from(relation: LinearRelation) -> Self {
        Dlr::single(relation)
    }
}

/// A DLR known to be Horn.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HornDlr(Dlr);

impl HornDlr {
    pub fn as_dlr(&self) -> &Dlr {
        &self.0
    }

    pub fn into_dlr(self) -> Dlr {
        self.0
    }

    pub fn disjuncts(&self) -> &[LinearRelation] {
        self.0.disjuncts()
    }

    /// The disjunct that is not a disequality, if there is one.
    pub fn convex_disjunct(&self) -> Option<&LinearRelation> {
        self.0.disjuncts.iter().find(|d| !d.is_disequality())
    }

    pub fn holds(&self, value: impl Fn(Var) -> Rational + Copy) -> bool {
        self.0.holds(value)
    }
}

impl TryFrom<Dlr> for HornDlr {
    type Error = DlrError;

    fn try_from(dlr: Dlr) -> Result<Self, Self::Error> {
        match dlr.convex_disjunct_count() {
            0 | 1 => Ok(HornDlr(dlr)),
            n => Err(DlrError::NotHorn(n)),
        }
    }
}

impl From<LinearRelation> for HornDlr {
    fn from(relation: LinearRelation) -> Self {
        HornDlr(Dlr::single(relation))
    }
}

impl fmt::Display for HornDlr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

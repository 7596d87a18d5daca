//! Closure under converse, intersection and composition, and the
//! maximality harness built on it.

use std::fmt;

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::catalog::{algebra, np_witness, AlgebraId, WitnessName};
use crate::composition::compose;
use crate::relation::IntervalRelation;
use crate::relation_set::RelationSet;

#[derive(Debug, Clone)]
pub struct ClosureReport {
    pub input: Vec<IntervalRelation>,
    pub closed_set: RelationSet,
    /// Number of relations taken off the worklist.
    pub iterations: usize,
    /// Size of the set at the end of each round of the worklist.
    pub growth: Vec<usize>,
}

/// Worklist closure. Relations `members[..processed]` have already been
/// combined with each other; everything after is pending.
struct Worklist {
    members: Vec<IntervalRelation>,
    seen: RelationSet,
    processed: usize,
}

impl Worklist {
    fn new() -> Self {
        Worklist {
            members: Vec::new(),
            seen: RelationSet::new(),
            processed: 0,
        }
    }

    fn push(&mut self, r: IntervalRelation) {
        if self.seen.insert(r) {
            self.members.push(r);
        }
    }

    fn is_done(&self) -> bool {
        self.processed == self.members.len()
    }

    /// Combines the next pending relation with itself and every earlier one.
    fn step(&mut self) {
        let r = self.members[self.processed];
        self.push(r.converse());
        for j in 0..=self.processed {
            let m = self.members[j];
            self.push(r.intersect(m));
            self.push(compose(r, m));
            self.push(compose(m, r));
        }
        self.processed += 1;
    }
}

/// The least set containing `input` and closed under all three operations.
///
/// ```
/// use allen_metric::closure::close;
/// use allen_metric::relation::IntervalRelation;
/// let m: IntervalRelation = "{m}".parse().unwrap();
/// let report = close(&[m]);
/// assert!(report.closed_set.contains("{p}".parse().unwrap()));
/// ```
pub fn close(input: &[IntervalRelation]) -> ClosureReport {
    let mut w = Worklist::new();
    for &r in input {
        w.push(r);
    }
    let mut growth = Vec::new();
    let mut round_end = w.members.len();
    while !w.is_done() {
        w.step();
        if w.processed == round_end {
            growth.push(w.members.len());
            round_end = w.members.len();
        }
    }
    ClosureReport {
        input: input.to_vec(),
        iterations: w.processed,
        closed_set: w.seen,
        growth,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosureViolation {
    Converse(IntervalRelation),
    Intersection(IntervalRelation, IntervalRelation),
    Composition(IntervalRelation, IntervalRelation),
}

impl fmt::Display for ClosureViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ClosureViolation::Converse(r) => write!(f, "converse of {r} = {} is missing", r.converse()),
            ClosureViolation::Intersection(a, b) => {
                write!(f, "{a} ∩ {b} = {} is missing", a.intersect(b))
            }
            ClosureViolation::Composition(a, b) => {
                write!(f, "{a} ∘ {b} = {} is missing", compose(a, b))
            }
        }
    }
}

/// Checks closure exhaustively over all ordered pairs, returning the first
/// violation in member order.
pub fn verify_closed(set: &RelationSet) -> Result<(), ClosureViolation> {
    let members: Vec<_> = set.iter().collect();
    for &r in &members {
        if !set.contains(r.converse()) {
            return Err(ClosureViolation::Converse(r));
        }
    }
    let first = members.par_iter().find_map_first(|&a| {
        members.iter().find_map(|&b| {
            if !set.contains(a.intersect(b)) {
                Some(ClosureViolation::Intersection(a, b))
            } else if !set.contains(compose(a, b)) {
                Some(ClosureViolation::Composition(a, b))
            } else {
                None
            }
        })
    });
    first.map_or(Ok(()), Err)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaximalityMode {
    Full,
    Sample { n: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MaximalityOptions {
    pub mode: MaximalityMode,
    /// Stop each closure once a witness set is contained.
    pub early_exit: bool,
}

impl MaximalityOptions {
    pub fn sample(n: usize, seed: u64) -> Self {
        MaximalityOptions {
            mode: MaximalityMode::Sample { n, seed },
            early_exit: true,
        }
    }

    pub fn full() -> Self {
        MaximalityOptions {
            mode: MaximalityMode::Full,
            early_exit: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionResult {
    pub relation: IntervalRelation,
    pub witness: Option<WitnessName>,
    pub early_exit: bool,
    pub closure_size: usize,
}

impl fmt::Display for ExtensionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.witness {
            Some(w) => write!(f, "{} -> witness={w} closure_size={}", self.relation, self.closure_size),
            None => write!(f, "{} -> witness=none closure_size={}", self.relation, self.closure_size),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaximalityVerdict {
    Confirmed,
    VacuouslyConfirmed,
    Refuted,
}

impl fmt::Display for MaximalityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MaximalityVerdict::Confirmed => "maximal-confirmed",
            MaximalityVerdict::VacuouslyConfirmed => "vacuously-confirmed",
            MaximalityVerdict::Refuted => "refuted",
        })
    }
}

#[derive(Debug, Clone)]
pub struct MaximalityReport {
    pub algebra: AlgebraId,
    /// Number of relations outside the algebra.
    pub candidates: usize,
    /// Results in increasing relation order.
    pub extensions: Vec<ExtensionResult>,
}

impl MaximalityReport {
    pub fn verdict(&self) -> MaximalityVerdict {
        if self.extensions.is_empty() {
            MaximalityVerdict::VacuouslyConfirmed
        } else if self.extensions.iter().all(|e| e.witness.is_some()) {
            MaximalityVerdict::Confirmed
        } else {
            MaximalityVerdict::Refuted
        }
    }

    /// Extensions whose closure contained no witness.
    pub fn counterexamples(&self) -> impl Iterator<Item = &ExtensionResult> {
        self.extensions.iter().filter(|e| e.witness.is_none())
    }

    pub fn count(&self, name: WitnessName) -> usize {
        self.extensions.iter().filter(|e| e.witness == Some(name)).count()
    }
}

fn contained_witness(set: &RelationSet, witnesses: &[(WitnessName, Vec<IntervalRelation>)]) -> Option<WitnessName> {
    witnesses
        .iter()
        .find(|(_, members)| set.contains_all(members))
        .map(|(name, _)| *name)
}

/// Closes `base ∪ {r}` where `base` is already closed, optionally stopping
/// as soon as some witness set is contained.
pub fn close_extension(base: &RelationSet, r: IntervalRelation, early_exit: bool) -> ExtensionResult {
    let witnesses: Vec<_> = WitnessName::ALL
        .into_iter()
        .map(|w| (w, np_witness(w).members))
        .collect();
    let mut w = Worklist::new();
    for m in base.iter() {
        w.push(m);
    }
    w.processed = w.members.len();
    w.push(r);
    let mut stopped = false;
    while !w.is_done() {
        w.step();
        if early_exit && contained_witness(&w.seen, &witnesses).is_some() {
            stopped = true;
            break;
        }
    }
    ExtensionResult {
        relation: r,
        witness: contained_witness(&w.seen, &witnesses),
        early_exit: stopped,
        closure_size: w.seen.len(),
    }
}

/// Extends the algebra by single relations and looks for a witness set in
/// each closure. Extensions run in parallel on the current rayon pool.
pub fn verify_maximality(id: AlgebraId, options: MaximalityOptions) -> MaximalityReport {
    let base = algebra(id);
    let outside: Vec<_> = IntervalRelation::all().filter(|&r| !base.contains(r)).collect();
    let mut chosen: Vec<IntervalRelation> = match options.mode {
        MaximalityMode::Full => outside.clone(),
        MaximalityMode::Sample { n, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            outside.choose_multiple(&mut rng, n).copied().collect()
        }
    };
    chosen.sort();
    let extensions = chosen
        .par_iter()
        .map(|&r| close_extension(base.as_set(), r, options.early_exit))
        .collect();
    MaximalityReport {
        algebra: id,
        candidates: outside.len(),
        extensions,
    }
}

//! The eight maximal tractable algebras and the NP-hard witness sets.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use thiserror::Error;

use crate::instance::Mode;
use crate::relation::{BasicRelation, IntervalRelation};
use crate::relation_set::RelationSet;

use BasicRelation::*;

/// `(pi d oi mi f)`: basics forcing a strictly later start.
pub const R_S: IntervalRelation = IntervalRelation::of(&[After, During, OverlappedBy, MetBy, Finishes]);
/// `(p d o m s)`: basics forcing a strictly earlier end.
pub const R_E: IntervalRelation = IntervalRelation::of(&[Before, During, Overlaps, Meets, Starts]);
/// `(e s si)`
pub const START_EQUAL: IntervalRelation = IntervalRelation::START_EQUAL;
/// `(e f fi)`
pub const END_EQUAL: IntervalRelation = IntervalRelation::END_EQUAL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AlgebraId {
    SAfter,
    SDuring,
    SOverlappedBy,
    SStar,
    EBefore,
    EDuring,
    EOverlaps,
    EStar,
}

impl AlgebraId {
    /// Every algebra, in the order automatic selection tries them.
    pub const ALL: [AlgebraId; 8] = [
        AlgebraId::SAfter,
        AlgebraId::SDuring,
        AlgebraId::SOverlappedBy,
        AlgebraId::SStar,
        AlgebraId::EBefore,
        AlgebraId::EDuring,
        AlgebraId::EOverlaps,
        AlgebraId::EStar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AlgebraId::SAfter => "S(pi)",
            AlgebraId::SDuring => "S(d)",
            AlgebraId::SOverlappedBy => "S(oi)",
            AlgebraId::SStar => "S*",
            AlgebraId::EBefore => "E(p)",
            AlgebraId::EDuring => "E(d)",
            AlgebraId::EOverlaps => "E(o)",
            AlgebraId::EStar => "E*",
        }
    }

    /// Start-mode algebras belong to the S family.
    pub fn family(self) -> Mode {
        match self {
            AlgebraId::SAfter | AlgebraId::SDuring | AlgebraId::SOverlappedBy | AlgebraId::SStar => Mode::Start,
            _ => Mode::End,
        }
    }

    /// The distinguished basic relation `b` of `S(b)` or `E(b)`.
    pub fn distinguished(self) -> Option<BasicRelation> {
        match self {
            AlgebraId::SAfter => Some(After),
            AlgebraId::SDuring | AlgebraId::EDuring => Some(During),
            AlgebraId::SOverlappedBy => Some(OverlappedBy),
            AlgebraId::EBefore => Some(Before),
            AlgebraId::EOverlaps => Some(Overlaps),
            AlgebraId::SStar | AlgebraId::EStar => None,
        }
    }

    /// The algebra obtained by reversing time.
    pub fn mirrored(self) -> AlgebraId {
        match self {
            AlgebraId::SAfter => AlgebraId::EBefore,
            AlgebraId::SDuring => AlgebraId::EDuring,
            AlgebraId::SOverlappedBy => AlgebraId::EOverlaps,
            AlgebraId::SStar => AlgebraId::EStar,
            AlgebraId::EBefore => AlgebraId::SAfter,
            AlgebraId::EDuring => AlgebraId::SDuring,
            AlgebraId::EOverlaps => AlgebraId::SOverlappedBy,
            AlgebraId::EStar => AlgebraId::SStar,
        }
    }

    /// Expected number of members.
    pub fn expected_size(self) -> usize {
        match self {
            AlgebraId::SStar | AlgebraId::EStar => 1445,
            _ => 2312,
        }
    }

    pub fn in_family(mode: Mode) -> impl Iterator<Item = AlgebraId> {
        Self::ALL.into_iter().filter(move |a| a.family() == mode)
    }
}

impl fmt::Display for AlgebraId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown algebra `{0}`; expected one of S(pi) S(d) S(oi) E(p) E(d) E(o) S* E*")]
pub struct UnknownAlgebra(pub String);

impl FromStr for AlgebraId {
    type Err = UnknownAlgebra;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AlgebraId::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| UnknownAlgebra(s.to_string()))
    }
}

fn within(lower: IntervalRelation, r: IntervalRelation, upper: IntervalRelation) -> bool {
    lower.is_subset(r) && r.is_subset(upper)
}

/// The four case lines of `S(b)` (with `R_S`, `START_EQUAL`) or `E(b)`
/// (with `R_E`, `END_EQUAL`).
fn point_family_member(b: BasicRelation, r: IntervalRelation, rx: IntervalRelation, eq: IntervalRelation) -> bool {
    let pair = IntervalRelation::of(&[b, b.converse()]);
    pair.is_subset(r)
        || within(b.into(), r, rx.union(eq))
        || within(b.converse().into(), r, rx.converse().union(eq))
        || r.is_subset(eq)
}

/// The eight case lines of `S*` (or `E*`, given the start-side basics).
fn star_member(r: IntervalRelation, x: BasicRelation, xi: BasicRelation, rx: IntervalRelation, eq: IntervalRelation) -> bool {
    let e = IntervalRelation::basic(Equals);
    let x1 = IntervalRelation::basic(x);
    let xi1 = IntervalRelation::basic(xi);
    IntervalRelation::of(&[Equals, x, xi]).is_subset(r)
        || within(x1.union(xi1), r, rx.union(rx.converse()))
        || within(e.union(x1), r, rx.union(eq))
        || within(e.union(xi1), r, rx.converse().union(eq))
        || within(x1, r, rx)
        || within(xi1, r, rx.converse())
        || within(e, r, eq)
        || r.is_empty()
}

/// Whether `r` belongs to the algebra, by its defining case lines.
///
/// ```
/// use allen_metric::catalog::{member, AlgebraId};
/// let pp = "{p pi}".parse().unwrap();
/// assert!(member(AlgebraId::SAfter, pp));
/// assert!(!member(AlgebraId::SAfter, "{m}".parse().unwrap()));
/// ```
pub fn member(id: AlgebraId, r: IntervalRelation) -> bool {
    match id {
        AlgebraId::SStar => star_member(r, Finishes, FinishedBy, R_S, START_EQUAL),
        AlgebraId::EStar => star_member(r, Starts, StartedBy, R_E, END_EQUAL),
        _ => {
            let b = id.distinguished().expect("point families have a distinguished basic");
            match id.family() {
                Mode::Start => point_family_member(b, r, R_S, START_EQUAL),
                Mode::End => point_family_member(b, r, R_E, END_EQUAL),
            }
        }
    }
}

/// A generated algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraSet {
    pub id: AlgebraId,
    /// Members in increasing bit order.
    pub members: Vec<IntervalRelation>,
    set: RelationSet,
}

impl AlgebraSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, r: IntervalRelation) -> bool {
        self.set.contains(r)
    }

    pub fn as_set(&self) -> &RelationSet {
        &self.set
    }
}

/// Filters all 8192 relations through [`member`].
pub fn generate(id: AlgebraId) -> AlgebraSet {
    let members: Vec<_> = IntervalRelation::all().filter(|&r| member(id, r)).collect();
    let set = members.iter().copied().collect();
    AlgebraSet { id, members, set }
}

/// Cached result of [`generate`].
pub fn algebra(id: AlgebraId) -> &'static AlgebraSet {
    static CACHE: OnceLock<Vec<AlgebraSet>> = OnceLock::new();
    let all = CACHE.get_or_init(|| AlgebraId::ALL.into_iter().map(generate).collect());
    &all[AlgebraId::ALL.iter().position(|&a| a == id).expect("listed")]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WitnessName {
    N1,
    N2,
    Delta0,
}

impl WitnessName {
    pub const ALL: [WitnessName; 3] = [WitnessName::N1, WitnessName::N2, WitnessName::Delta0];
}

impl fmt::Display for WitnessName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WitnessName::N1 => "N1",
            WitnessName::N2 => "N2",
            WitnessName::Delta0 => "Delta0",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NpWitness {
    pub name: WitnessName,
    pub members: Vec<IntervalRelation>,
}

const A1: IntervalRelation = IntervalRelation::of(&[Before, Includes, Overlaps, Meets, FinishedBy]);
const A2: IntervalRelation = IntervalRelation::of(&[Before, During, Overlaps, Meets, Starts]);

pub fn np_witness(name: WitnessName) -> NpWitness {
    let members = match name {
        WitnessName::N1 => vec![
            A1,
            A2,
            IntervalRelation::of(&[During, Includes, OverlappedBy, StartedBy, Finishes]),
        ],
        WitnessName::N2 => vec![
            A1,
            A2,
            IntervalRelation::of(&[Includes, Overlaps, OverlappedBy, StartedBy, FinishedBy]),
        ],
        WitnessName::Delta0 => vec![
            IntervalRelation::FULL.difference(IntervalRelation::of(&[Before, After])),
            IntervalRelation::of(&[Before, After]),
        ],
    };
    NpWitness { name, members }
}

/// Every algebra containing all of `labels`, in selection order.
pub fn detect_algebras<'a>(labels: impl IntoIterator<Item = &'a IntervalRelation> + Clone) -> Vec<AlgebraId> {
    AlgebraId::ALL
        .into_iter()
        .filter(|&id| labels.clone().into_iter().all(|&r| member(id, r)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(s: &str) -> IntervalRelation {
        s.parse().unwrap()
    }

    #[test]
    fn sizes() {
        for id in AlgebraId::ALL {
            assert_eq!(generate(id).len(), id.expected_size(), "{id}");
        }
    }

    #[test]
    fn membership_examples() {
        assert!(member(AlgebraId::SAfter, rel("{p pi}")));
        assert!(member(AlgebraId::SDuring, rel("{d di}")));
        assert!(!member(AlgebraId::SAfter, rel("{m}")));
        for id in AlgebraId::ALL {
            assert!(member(id, IntervalRelation::EMPTY), "{id}");
            assert!(member(id, IntervalRelation::FULL), "{id}");
        }
    }

    #[test]
    fn basic_singletons() {
        for id in AlgebraId::ALL {
            let count = BasicRelation::ALL.iter().filter(|&&b| member(id, b.into())).count();
            let expected = if id.distinguished().is_some() { 5 } else { 3 };
            assert_eq!(count, expected, "{id}");
        }
    }

    #[test]
    fn time_mirror_maps_families() {
        for id in AlgebraId::ALL {
            let m = id.mirrored();
            assert_eq!(m.mirrored(), id);
            assert_ne!(m.family(), id.family());
            for r in IntervalRelation::all() {
                assert_eq!(member(id, r), member(m, r.time_mirror()), "{id} {r}");
            }
        }
        assert_eq!(R_S.time_mirror(), R_E);
        assert_eq!(START_EQUAL.time_mirror(), END_EQUAL);
    }

    #[test]
    fn non_horn_relations_are_members() {
        for s in ["{p pi}", "{d di}", "{o oi}", "{pi fi}", "{p s}"] {
            assert!(!detect_algebras(&[rel(s)]).is_empty(), "{s}");
        }
    }

    #[test]
    fn witnesses() {
        let n1 = np_witness(WitnessName::N1).members;
        let n2 = np_witness(WitnessName::N2).members;
        let d0 = np_witness(WitnessName::Delta0).members;
        assert_eq!(n1.len(), 3);
        assert_eq!(n2.len(), 3);
        assert_eq!(d0, vec![rel("{e d di o oi m mi s si f fi}"), rel("{p pi}")]);
        let shared: Vec<_> = n1.iter().filter(|r| n2.contains(r)).copied().collect();
        assert_eq!(shared, vec![rel("{p di o m fi}"), rel("{p d o m s}")]);
    }

    #[test]
    fn detection() {
        let found = detect_algebras(&[rel("{p pi}")]);
        assert!(found.contains(&AlgebraId::SAfter));
        assert!(found.contains(&AlgebraId::EBefore));
        assert_eq!(detect_algebras(&[]), AlgebraId::ALL.to_vec());
        assert!(detect_algebras(&[rel("{m}")]).is_empty());
    }

    #[test]
    fn names_round_trip() {
        for id in AlgebraId::ALL {
            assert_eq!(id.name().parse::<AlgebraId>().unwrap(), id);
        }
        assert!("S(x)".parse::<AlgebraId>().is_err());
    }
}

//! Basic Allen relations, interval relations as 13-bit sets, and the
//! point relations they induce on starting and ending points.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// One of the thirteen basic relations between two intervals `x` and `y`.
///
/// The discriminant is the bit index used by [`IntervalRelation`]. Each
/// relation sits next to its converse, so converse is `index ^ 1` for
/// everything except [`BasicRelation::Equals`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum BasicRelation {
    /// `x⁺ < y⁻`
    Before = 0,
    /// `y⁺ < x⁻`
    After = 1,
    /// `x⁺ = y⁻`
    Meets = 2,
    /// `y⁺ = x⁻`
    MetBy = 3,
    /// `x⁻ < y⁻ < x⁺ < y⁺`
    Overlaps = 4,
    /// `y⁻ < x⁻ < y⁺ < x⁺`
    OverlappedBy = 5,
    /// `y⁻ < x⁻`, `x⁺ < y⁺`
    During = 6,
    /// `x⁻ < y⁻`, `y⁺ < x⁺`
    Includes = 7,
    /// `x⁻ = y⁻`, `x⁺ < y⁺`
    Starts = 8,
    /// `x⁻ = y⁻`, `y⁺ < x⁺`
    StartedBy = 9,
    /// `x⁺ = y⁺`, `y⁻ < x⁻`
    Finishes = 10,
    /// `x⁺ = y⁺`, `x⁻ < y⁻`
    FinishedBy = 11,
    /// `x⁻ = y⁻`, `x⁺ = y⁺`
    Equals = 12,
}

use BasicRelation::*;

impl BasicRelation {
    /// All thirteen relations in canonical order.
    pub const ALL: [BasicRelation; 13] = [
        Before,
        After,
        Meets,
        MetBy,
        Overlaps,
        OverlappedBy,
        During,
        Includes,
        Starts,
        StartedBy,
        Finishes,
        FinishedBy,
        Equals,
    ];

    #[inline]
    pub const fn index(self) -> usize {
        self as usize
    }

    #[inline]
    pub const fn from_index(index: usize) -> BasicRelation {
        Self::ALL[index]
    }

    /// The relation obtained by exchanging `x` and `y`.
    #[inline]
    pub const fn converse(self) -> BasicRelation {
        match self {
            Equals => Equals,
            b => Self::ALL[b.index() ^ 1],
        }
    }

    /// The relation obtained by reversing the direction of time
    /// (`t ↦ −t`), which exchanges the roles of starting and ending points.
    #[inline]
    pub const fn time_mirror(self) -> BasicRelation {
        match self {
            Before => After,
            After => Before,
            Meets => MetBy,
            MetBy => Meets,
            Overlaps => OverlappedBy,
            OverlappedBy => Overlaps,
            During => During,
            Includes => Includes,
            Starts => Finishes,
            StartedBy => FinishedBy,
            Finishes => Starts,
            FinishedBy => StartedBy,
            Equals => Equals,
        }
    }

    /// Short ASCII symbol used by the text syntax.
    pub const fn symbol(self) -> &'static str {
        match self {
            Before => "p",
            After => "pi",
            Meets => "m",
            MetBy => "mi",
            Overlaps => "o",
            OverlappedBy => "oi",
            During => "d",
            Includes => "di",
            Starts => "s",
            StartedBy => "si",
            Finishes => "f",
            FinishedBy => "fi",
            Equals => "e",
        }
    }

    pub fn from_symbol(symbol: &str) -> Option<BasicRelation> {
        Self::ALL.into_iter().find(|b| b.symbol() == symbol)
    }

    /// Relation between the two starting points `x⁻ ? y⁻`.
    pub const fn start_relation(self) -> PointRelation {
        match self {
            Before | Meets | Overlaps | Includes | FinishedBy => PointRelation::LT,
            After | MetBy | OverlappedBy | During | Finishes => PointRelation::GT,
            Starts | StartedBy | Equals => PointRelation::EQ,
        }
    }

    /// Relation between the two ending points `x⁺ ? y⁺`.
    pub const fn end_relation(self) -> PointRelation {
        match self {
            Before | Meets | Overlaps | During | Starts => PointRelation::LT,
            After | MetBy | OverlappedBy | Includes | StartedBy => PointRelation::GT,
            Finishes | FinishedBy | Equals => PointRelation::EQ,
        }
    }

    /// Classifies two proper intervals `[xs, xe]` and `[ys, ye]`.
    ///
    /// Returns `None` when either interval is degenerate (`start >= end`).
    pub fn between<T: Ord>(xs: &T, xe: &T, ys: &T, ye: &T) -> Option<BasicRelation> {
        if xs >= xe || ys >= ye {
            return None;
        }
        match xe.cmp(ys) {
            Ordering::Less => return Some(Before),
            Ordering::Equal => return Some(Meets),
            Ordering::Greater => {}
        }
        match ye.cmp(xs) {
            Ordering::Less => return Some(After),
            Ordering::Equal => return Some(MetBy),
            Ordering::Greater => {}
        }
        Some(match (xs.cmp(ys), xe.cmp(ye)) {
            (Ordering::Less, Ordering::Less) => Overlaps,
            (Ordering::Greater, Ordering::Greater) => OverlappedBy,
            (Ordering::Greater, Ordering::Less) => During,
            (Ordering::Less, Ordering::Greater) => Includes,
            (Ordering::Equal, Ordering::Less) => Starts,
            (Ordering::Equal, Ordering::Greater) => StartedBy,
            (Ordering::Greater, Ordering::Equal) => Finishes,
            (Ordering::Less, Ordering::Equal) => FinishedBy,
            (Ordering::Equal, Ordering::Equal) => Equals,
        })
    }
}

impl fmt::Display for BasicRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// A disjunction of basic relations, stored as a 13-bit characteristic set.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct IntervalRelation(u16);

impl IntervalRelation {
    /// Number of distinct interval relations.
    pub const COUNT: usize = 1 << 13;
    const MASK: u16 = (1 << 13) - 1;

    /// `⊥`, the unsatisfiable relation.
    pub const EMPTY: IntervalRelation = IntervalRelation(0);
    /// `⊤`, the disjunction of all basic relations.
    pub const FULL: IntervalRelation = IntervalRelation(Self::MASK);

    /// `(≡ s s⌣)`: the relations forcing equal starting points.
    pub const START_EQUAL: IntervalRelation =
        IntervalRelation::of(&[Equals, Starts, StartedBy]);
    /// `(≡ f f⌣)`: the relations forcing equal ending points.
    pub const END_EQUAL: IntervalRelation =
        IntervalRelation::of(&[Equals, Finishes, FinishedBy]);

    pub const fn from_bits(bits: u16) -> Option<IntervalRelation> {
        if bits & !Self::MASK == 0 {
            Some(IntervalRelation(bits))
        } else {
            None
        }
    }

    /// Drops any bits above the thirteenth.
    pub const fn from_bits_truncate(bits: u16) -> IntervalRelation {
        IntervalRelation(bits & Self::MASK)
    }

    #[inline]
    pub const fn bits(self) -> u16 {
        self.0
    }

    pub const fn of(basics: &[BasicRelation]) -> IntervalRelation {
        let mut bits = 0u16;
        let mut i = 0;
        while i < basics.len() {
            bits |= 1 << basics[i] as u16;
            i += 1;
        }
        IntervalRelation(bits)
    }

    #[inline]
    pub const fn basic(b: BasicRelation) -> IntervalRelation {
        IntervalRelation(1 << b as u16)
    }

    /// Iterates over all 8192 relations in bit order.
    pub fn all() -> impl Iterator<Item = IntervalRelation> {
        (0..Self::COUNT as u16).map(IntervalRelation)
    }

    #[inline]
    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub const fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub const fn contains(self, b: BasicRelation) -> bool {
        self.0 & (1 << b as u16) != 0
    }

    #[inline]
    pub const fn is_subset(self, other: IntervalRelation) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub const fn intersect(self, other: IntervalRelation) -> IntervalRelation {
        IntervalRelation(self.0 & other.0)
    }

    #[inline]
    pub const fn union(self, other: IntervalRelation) -> IntervalRelation {
        IntervalRelation(self.0 | other.0)
    }

    #[inline]
    pub const fn difference(self, other: IntervalRelation) -> IntervalRelation {
        IntervalRelation(self.0 & !other.0)
    }

    pub fn basics(self) -> impl Iterator<Item = BasicRelation> {
        let bits = self.0;
        BasicRelation::ALL
            .into_iter()
            .filter(move |b| bits & (1 << *b as u16) != 0)
    }

    pub fn converse(self) -> IntervalRelation {
        self.map(BasicRelation::converse)
    }

    pub fn time_mirror(self) -> IntervalRelation {
        self.map(BasicRelation::time_mirror)
    }

    fn map(self, f: impl Fn(BasicRelation) -> BasicRelation) -> IntervalRelation {
        self.basics()
            .fold(IntervalRelation::EMPTY, |acc, b| acc.union(IntervalRelation::basic(f(b))))
    }

    /// The point relation implied on one pair of endpoints.
    ///
    /// With `restricted`, the relation is first intersected with the
    /// relations that force the *other* pair of endpoints to coincide:
    /// `(≡ f f⌣)` when asking about starting points, `(≡ s s⌣)` when asking
    /// about ending points.
    pub fn endpoint_relation(self, side: Side, restricted: bool) -> PointRelation {
        let r = match (restricted, side) {
            (false, _) => self,
            (true, Side::Start) => self.intersect(Self::END_EQUAL),
            (true, Side::End) => self.intersect(Self::START_EQUAL),
        };
        r.basics().fold(PointRelation::NONE, |acc, b| {
            acc.union(match side {
                Side::Start => b.start_relation(),
                Side::End => b.end_relation(),
            })
        })
    }

    /// Implied relation between starting points.
    pub fn sprel(self) -> PointRelation {
        self.endpoint_relation(Side::Start, false)
    }

    /// Implied relation between ending points.
    pub fn eprel(self) -> PointRelation {
        self.endpoint_relation(Side::End, false)
    }
}

impl From<BasicRelation> for IntervalRelation {
    fn from(b: BasicRelation) -> Self {
        IntervalRelation::basic(b)
    }
}

impl FromIterator<BasicRelation> for IntervalRelation {
    fn from_iter<I: IntoIterator<Item = BasicRelation>>(iter: I) -> Self {
        iter.into_iter()
            .fold(IntervalRelation::EMPTY, |acc, b| acc.union(b.into()))
    }
}

impl fmt::Display for IntervalRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, b) in self.basics().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(b.symbol())?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for IntervalRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelationParseError {
    #[error("expected `{{` or `top`")]
    MissingOpenBrace,
    #[error("missing closing `}}`")]
    MissingCloseBrace,
    #[error("unknown basic relation `{0}`")]
    UnknownBasic(String),
    #[error("unexpected trailing input `{0}`")]
    Trailing(String),
}

impl FromStr for IntervalRelation {
    type Err = RelationParseError;

    /// Parses `{p pi m ...}` (whitespace separated, any order) or `top`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "top" {
            return Ok(IntervalRelation::FULL);
        }
        let inner = s
            .strip_prefix('{')
            .ok_or(RelationParseError::MissingOpenBrace)?;
        let close = inner.find('}').ok_or(RelationParseError::MissingCloseBrace)?;
        let rest = inner[close + 1..].trim();
        if !rest.is_empty() {
            return Err(RelationParseError::Trailing(rest.to_string()));
        }
        inner[..close]
            .split_whitespace()
            .map(|tok| {
                BasicRelation::from_symbol(tok)
                    .ok_or_else(|| RelationParseError::UnknownBasic(tok.to_string()))
            })
            .collect()
    }
}

/// Which endpoint of an interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Start,
    End,
}

impl Side {
    pub const fn other(self) -> Side {
        match self {
            Side::Start => Side::End,
            Side::End => Side::Start,
        }
    }
}

/// A relation between two reals, as a subset of the outcomes `{<, =, >}`.
///
/// The eight subsets are exactly the symbols `⊥ < = > ≤ ≥ ≠ ⊤`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PointRelation(u8);

impl PointRelation {
    pub const NONE: PointRelation = PointRelation(0);
    pub const LT: PointRelation = PointRelation(0b001);
    pub const EQ: PointRelation = PointRelation(0b010);
    pub const GT: PointRelation = PointRelation(0b100);
    pub const LE: PointRelation = PointRelation(0b011);
    pub const GE: PointRelation = PointRelation(0b110);
    pub const NE: PointRelation = PointRelation(0b101);
    pub const ALL: PointRelation = PointRelation(0b111);

    pub const SYMBOLS: [PointRelation; 8] = [
        Self::NONE,
        Self::LT,
        Self::EQ,
        Self::LE,
        Self::GT,
        Self::NE,
        Self::GE,
        Self::ALL,
    ];

    pub const fn from_bits(bits: u8) -> PointRelation {
        PointRelation(bits & 0b111)
    }

    #[inline]
    pub const fn bits(self) -> u8 {
        self.0
    }

    pub const fn from_ordering(ord: Ordering) -> PointRelation {
        match ord {
            Ordering::Less => Self::LT,
            Ordering::Equal => Self::EQ,
            Ordering::Greater => Self::GT,
        }
    }

    #[inline]
    pub const fn union(self, other: PointRelation) -> PointRelation {
        PointRelation(self.0 | other.0)
    }

    #[inline]
    pub const fn intersect(self, other: PointRelation) -> PointRelation {
        PointRelation(self.0 & other.0)
    }

    /// The relation with its arguments exchanged (`<` becomes `>`).
    pub const fn inverse(self) -> PointRelation {
        let lt = self.0 & 0b001;
        let gt = self.0 & 0b100;
        PointRelation((self.0 & 0b010) | (lt << 2) | (gt >> 2))
    }

    #[inline]
    pub const fn admits(self, ord: Ordering) -> bool {
        self.0 & Self::from_ordering(ord).0 != 0
    }

    pub const fn symbol(self) -> &'static str {
        match self.0 {
            0b000 => "⊥",
            0b001 => "<",
            0b010 => "=",
            0b011 => "<=",
            0b100 => ">",
            0b101 => "!=",
            0b110 => ">=",
            _ => "⊤",
        }
    }
}

impl fmt::Display for PointRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl fmt::Debug for PointRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PointRelation({})", self.symbol())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(s: &str) -> IntervalRelation {
        s.parse().unwrap()
    }

    #[test]
    fn converse_pairs_rows() {
        assert_eq!(rel("{p m fi}").converse(), rel("{pi mi f}"));
        assert_eq!(IntervalRelation::FULL.converse(), IntervalRelation::FULL);
        assert_eq!(IntervalRelation::EMPTY.converse(), IntervalRelation::EMPTY);
        for b in BasicRelation::ALL {
            assert_eq!(b.converse().converse(), b);
            assert_eq!(b.converse() == b, b == Equals);
        }
    }

    #[test]
    fn intersection_examples() {
        assert_eq!(rel("{p fi}").intersect(rel("{p m fi}")), rel("{p fi}"));
        assert!(rel("{p fi}").is_subset(rel("{p m fi}")));
        assert_eq!(rel("{p}").intersect(rel("{pi}")), IntervalRelation::EMPTY);
    }

    #[test]
    fn endpoint_relation_examples() {
        assert_eq!(rel("{e}").endpoint_relation(Side::Start, false), PointRelation::EQ);
        assert_eq!(rel("{p pi}").endpoint_relation(Side::Start, false), PointRelation::NE);
        assert_eq!(rel("{e s}").endpoint_relation(Side::End, true), PointRelation::LE);
        assert_eq!(rel("{p}").endpoint_relation(Side::End, true), PointRelation::NONE);
        assert_eq!(IntervalRelation::FULL.sprel(), PointRelation::ALL);
        assert_eq!(IntervalRelation::EMPTY.eprel(), PointRelation::NONE);
    }

    #[test]
    fn converse_of_basic_inverts_endpoint_relations() {
        for b in BasicRelation::ALL {
            assert_eq!(b.converse().start_relation(), b.start_relation().inverse());
            assert_eq!(b.converse().end_relation(), b.end_relation().inverse());
        }
    }

    #[test]
    fn time_mirror_swaps_endpoint_roles() {
        for b in BasicRelation::ALL {
            let m = b.time_mirror();
            assert_eq!(m.time_mirror(), b);
            // Under t ↦ −t the new start is the negated old end.
            assert_eq!(m.start_relation(), b.end_relation().inverse());
            assert_eq!(m.end_relation(), b.start_relation().inverse());
        }
    }

    #[test]
    fn between_classifies_table_rows() {
        assert_eq!(BasicRelation::between(&0, &1, &1, &2), Some(Meets));
        assert_eq!(BasicRelation::between(&0, &2, &0, &2), Some(Equals));
        assert_eq!(BasicRelation::between(&0, &0, &1, &2), None);
        assert_eq!(BasicRelation::between(&1, &2, &0, &3), Some(During));
        assert_eq!(BasicRelation::between(&0, &2, &1, &3), Some(Overlaps));
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(rel("{}"), IntervalRelation::EMPTY);
        assert_eq!(rel("top"), IntervalRelation::FULL);
        assert_eq!(rel("{ fi  p m }").to_string(), "{p m fi}");
        assert_eq!(
            "{q}".parse::<IntervalRelation>(),
            Err(RelationParseError::UnknownBasic("q".into()))
        );
        assert!("p".parse::<IntervalRelation>().is_err());
        assert!("{p".parse::<IntervalRelation>().is_err());
        assert!("{p} x".parse::<IntervalRelation>().is_err());
    }

    #[test]
    fn point_relation_symbols() {
        assert_eq!(PointRelation::LT.inverse(), PointRelation::GT);
        assert_eq!(PointRelation::LE.inverse(), PointRelation::GE);
        assert_eq!(PointRelation::NE.inverse(), PointRelation::NE);
        assert_eq!(PointRelation::LT.union(PointRelation::GT), PointRelation::NE);
        assert!(PointRelation::LE.admits(Ordering::Equal));
        assert!(!PointRelation::LE.admits(Ordering::Greater));
    }

    fn any_relation() -> impl Strategy<Value = IntervalRelation> {
        (0u16..8192).prop_map(IntervalRelation::from_bits_truncate)
    }

    proptest! {
        #[test]
        fn converse_distributes_over_intersection(a in any_relation(), b in any_relation()) {
            prop_assert_eq!(a.intersect(b).converse(), a.converse().intersect(b.converse()));
        }

        #[test]
        fn endpoint_relation_is_a_union_homomorphism(
            a in any_relation(),
            b in any_relation(),
            end in any::<bool>(),
            restricted in any::<bool>(),
        ) {
            let side = if end { Side::End } else { Side::Start };
            prop_assert_eq!(
                a.union(b).endpoint_relation(side, restricted),
                a.endpoint_relation(side, restricted).union(b.endpoint_relation(side, restricted))
            );
        }

        #[test]
        fn display_parse_round_trip(a in any_relation()) {
            prop_assert_eq!(a.to_string().parse::<IntervalRelation>().unwrap(), a);
        }
    }

    #[test]
    fn converse_is_an_involution_on_all_relations() {
        for r in IntervalRelation::all() {
            assert_eq!(r.converse().converse(), r);
        }
    }
}

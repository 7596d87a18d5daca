//! Relational composition of Allen relations.

use std::sync::OnceLock;

use crate::relation::{BasicRelation, IntervalRelation};

/// Entry `[a][b]` is the set of `c` such that `x a y`, `y b z` and `x c z`
/// are jointly realizable. Rows and columns follow [`BasicRelation::ALL`].
///
/// Generated by [`crate::oracle::derive_composition_table`]; a test keeps
/// the two in agreement.
#[rustfmt::skip]
const BASIC_COMPOSITION: [[u16; 13]; 13] = [
    [0x0001, 0x1fff, 0x0001, 0x0155, 0x0001, 0x0155, 0x0155, 0x0001, 0x0001, 0x0001, 0x0155, 0x0001, 0x0001],
    [0x1fff, 0x0002, 0x046a, 0x0002, 0x046a, 0x0002, 0x046a, 0x0002, 0x046a, 0x0002, 0x0002, 0x0002, 0x0002],
    [0x0001, 0x02aa, 0x0001, 0x1c00, 0x0001, 0x0150, 0x0150, 0x0001, 0x0004, 0x0004, 0x0150, 0x0001, 0x0004],
    [0x0895, 0x0002, 0x1300, 0x0002, 0x0460, 0x0002, 0x0460, 0x0002, 0x0460, 0x0002, 0x0008, 0x0008, 0x0008],
    [0x0001, 0x02aa, 0x0001, 0x02a0, 0x0015, 0x1ff0, 0x0150, 0x0895, 0x0010, 0x0890, 0x0150, 0x0015, 0x0010],
    [0x0895, 0x0002, 0x0890, 0x0002, 0x1ff0, 0x002a, 0x0460, 0x02aa, 0x0460, 0x002a, 0x0020, 0x02a0, 0x0020],
    [0x0001, 0x0002, 0x0001, 0x0002, 0x0155, 0x046a, 0x0040, 0x1fff, 0x0040, 0x046a, 0x0040, 0x0155, 0x0040],
    [0x0895, 0x02aa, 0x0890, 0x02a0, 0x0890, 0x02a0, 0x1ff0, 0x0080, 0x0890, 0x0080, 0x02a0, 0x0080, 0x0080],
    [0x0001, 0x0002, 0x0001, 0x0008, 0x0015, 0x0460, 0x0040, 0x0895, 0x0100, 0x1300, 0x0040, 0x0015, 0x0100],
    [0x0895, 0x0002, 0x0890, 0x0008, 0x0890, 0x0020, 0x0460, 0x0080, 0x1300, 0x0200, 0x0020, 0x0080, 0x0200],
    [0x0001, 0x0002, 0x0004, 0x0002, 0x0150, 0x002a, 0x0040, 0x02aa, 0x0040, 0x002a, 0x0400, 0x1c00, 0x0400],
    [0x0001, 0x02aa, 0x0004, 0x02a0, 0x0010, 0x02a0, 0x0150, 0x0080, 0x0010, 0x0080, 0x1c00, 0x0800, 0x0800],
    [0x0001, 0x0002, 0x0004, 0x0008, 0x0010, 0x0020, 0x0040, 0x0080, 0x0100, 0x0200, 0x0400, 0x0800, 0x1000],
];

/// A 13 × 13 composition table of basic relations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompositionTable {
    entries: [[IntervalRelation; 13]; 13],
}

impl CompositionTable {
    pub fn from_entries(entries: [[IntervalRelation; 13]; 13]) -> Self {
        CompositionTable { entries }
    }

    /// The built-in table.
    pub fn standard() -> Self {
        let mut entries = [[IntervalRelation::EMPTY; 13]; 13];
        for (a, row) in BASIC_COMPOSITION.iter().enumerate() {
            for (b, &bits) in row.iter().enumerate() {
                entries[a][b] = IntervalRelation::from_bits_truncate(bits);
            }
        }
        CompositionTable { entries }
    }

    pub fn entry(&self, a: BasicRelation, b: BasicRelation) -> IntervalRelation {
        self.entries[a.index()][b.index()]
    }

    /// Union of `entry(a, b)` over `a ∈ r1`, `b ∈ r2`.
    pub fn compose(&self, r1: IntervalRelation, r2: IntervalRelation) -> IntervalRelation {
        let mut out = IntervalRelation::EMPTY;
        for a in r1.basics() {
            for b in r2.basics() {
                out = out.union(self.entry(a, b));
            }
        }
        out
    }

    /// Renders the table as Rust source for the embedded constant.
    pub fn to_rust_literal(&self) -> String {
        let mut s = String::from("[\n");
        for row in &self.entries {
            s.push_str("    [");
            for (j, r) in row.iter().enumerate() {
                if j > 0 {
                    s.push_str(", ");
                }
                s.push_str(&format!("0x{:04x}", r.bits()));
            }
            s.push_str("],\n");
        }
        s.push(']');
        s
    }
}

const LOW_BITS: u32 = 7;
const LOW: usize = 1 << LOW_BITS;
const HIGH: usize = 1 << (13 - LOW_BITS);

/// `r1 ∘ r2` split on the basics of `r2`: `low[r1][r2 & 0x7f]` covers its
/// first seven basics and `high[r1][r2 >> 7]` the remaining six.
struct SplitTable {
    low: Vec<[u16; LOW]>,
    high: Vec<[u16; HIGH]>,
}

/// Fills `out[mask]` with the union of `column(a)` over the set bits `a` of
/// `mask`, one new bit per entry.
fn unions(out: &mut [u16], column: impl Fn(usize) -> u16) {
    for mask in 1..out.len() {
        let low = mask.trailing_zeros() as usize;
        out[mask] = out[mask & (mask - 1)] | column(low);
    }
}

fn split_table() -> &'static SplitTable {
    static TABLE: OnceLock<SplitTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let table = CompositionTable::standard();
        // by_second[b][r1] = r1 ∘ {b}
        let mut by_second = vec![[0u16; IntervalRelation::COUNT]; 13];
        for b in BasicRelation::ALL {
            unions(&mut by_second[b.index()], |a| {
                table.entry(BasicRelation::from_index(a), b).bits()
            });
        }
        let mut low = vec![[0u16; LOW]; IntervalRelation::COUNT];
        let mut high = vec![[0u16; HIGH]; IntervalRelation::COUNT];
        for r1 in 0..IntervalRelation::COUNT {
            unions(&mut low[r1], |b| by_second[b][r1]);
            unions(&mut high[r1], |b| by_second[b + LOW_BITS as usize][r1]);
        }
        SplitTable { low, high }
    })
}

/// Composition `r1 ∘ r2` using the built-in table.
///
/// ```
/// use allen_metric::relation::IntervalRelation;
/// use allen_metric::composition::compose;
/// let m: IntervalRelation = "{m}".parse().unwrap();
/// assert_eq!(compose(m, m).to_string(), "{p}");
/// ```
#[inline]
pub fn compose(r1: IntervalRelation, r2: IntervalRelation) -> IntervalRelation {
    let t = split_table();
    let (a, b) = (r1.bits() as usize, r2.bits() as usize);
    IntervalRelation::from_bits_truncate(t.low[a][b & (LOW - 1)] | t.high[a][b >> LOW_BITS])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::derive_composition_table;
    use proptest::prelude::*;

    #[test]
    fn embedded_table_matches_oracle() {
        let derived = derive_composition_table();
        let embedded = CompositionTable::standard();
        for a in BasicRelation::ALL {
            for b in BasicRelation::ALL {
                assert_eq!(embedded.entry(a, b), derived.entry(a, b), "{a} ∘ {b}");
            }
        }
    }

    #[test]
    fn equals_is_identity() {
        let t = CompositionTable::standard();
        for b in BasicRelation::ALL {
            assert_eq!(t.entry(BasicRelation::Equals, b), b.into());
            assert_eq!(t.entry(b, BasicRelation::Equals), b.into());
        }
    }

    #[test]
    fn converse_reverses_composition() {
        let t = CompositionTable::standard();
        for a in BasicRelation::ALL {
            for b in BasicRelation::ALL {
                assert_eq!(t.entry(a, b).converse(), t.entry(b.converse(), a.converse()));
            }
        }
    }

    #[test]
    fn empty_and_full() {
        let full = IntervalRelation::FULL;
        assert_eq!(compose(IntervalRelation::EMPTY, full), IntervalRelation::EMPTY);
        assert_eq!(compose(full, full), full);
    }

    fn arb_relation() -> impl Strategy<Value = IntervalRelation> {
        (0u16..8192).prop_map(IntervalRelation::from_bits_truncate)
    }

    proptest! {
        #[test]
        fn fast_compose_matches_table(r1 in arb_relation(), r2 in arb_relation()) {
            prop_assert_eq!(compose(r1, r2), CompositionTable::standard().compose(r1, r2));
        }

        #[test]
        fn compose_converse(r1 in arb_relation(), r2 in arb_relation()) {
            prop_assert_eq!(compose(r1, r2).converse(), compose(r2.converse(), r1.converse()));
        }

        #[test]
        fn compose_is_monotone(r1 in arb_relation(), extra in arb_relation(), r2 in arb_relation()) {
            let wider = r1.union(extra);
            prop_assert!(compose(r1, r2).is_subset(compose(wider, r2)));
            prop_assert!(compose(r2, r1).is_subset(compose(r2, wider)));
        }
    }
}

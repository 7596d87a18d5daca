//! Sets of interval relations as 8192-bit bitsets.

use std::fmt;

use crate::relation::IntervalRelation;

const WORDS: usize = IntervalRelation::COUNT / 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RelationSet {
    words: Box<[u64; WORDS]>,
    len: usize,
}

impl Default for RelationSet {
    fn default() -> Self {
        Self::new()
    }
}

impl RelationSet {
    pub fn new() -> Self {
        RelationSet {
            words: Box::new([0; WORDS]),
            len: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, r: IntervalRelation) -> bool {
        let i = r.bits() as usize;
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    /// Returns `true` if `r` was not already present.
    pub fn insert(&mut self, r: IntervalRelation) -> bool {
        let i = r.bits() as usize;
        let mask = 1u64 << (i % 64);
        let word = &mut self.words[i / 64];
        if *word & mask != 0 {
            return false;
        }
        *word |= mask;
        self.len += 1;
        true
    }

    pub fn is_subset(&self, other: &RelationSet) -> bool {
        self.words.iter().zip(other.words.iter()).all(|(a, b)| a & !b == 0)
    }

    pub fn contains_all<'a>(&self, rs: impl IntoIterator<Item = &'a IntervalRelation>) -> bool {
        rs.into_iter().all(|&r| self.contains(r))
    }

    /// Members in increasing bit order.
    pub fn iter(&self) -> impl Iterator<Item = IntervalRelation> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &bits)| {
            let mut bits = bits;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(IntervalRelation::from_bits_truncate((w * 64 + b) as u16))
            })
        })
    }
}

impl FromIterator<IntervalRelation> for RelationSet {
    fn from_iter<I: IntoIterator<Item = IntervalRelation>>(iter: I) -> Self {
        let mut s = RelationSet::new();
        for r in iter {
            s.insert(r);
        }
        s
    }
}

impl Extend<IntervalRelation> for RelationSet {
    fn extend<I: IntoIterator<Item = IntervalRelation>>(&mut self, iter: I) {
        for r in iter {
            self.insert(r);
        }
    }
}

impl fmt::Debug for RelationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_and_iterate() {
        let mut s = RelationSet::new();
        assert!(s.insert(IntervalRelation::FULL));
        assert!(s.insert(IntervalRelation::EMPTY));
        assert!(!s.insert(IntervalRelation::FULL));
        assert_eq!(s.len(), 2);
        let members: Vec<_> = s.iter().collect();
        assert_eq!(members, vec![IntervalRelation::EMPTY, IntervalRelation::FULL]);
    }

    #[test]
    fn full_universe() {
        let s: RelationSet = IntervalRelation::all().collect();
        assert_eq!(s.len(), 8192);
        assert_eq!(s.iter().count(), 8192);
        let t: RelationSet = [IntervalRelation::FULL].into_iter().collect();
        assert!(t.is_subset(&s));
        assert!(!s.is_subset(&t));
    }
}

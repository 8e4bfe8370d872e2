use std::fmt;

/// Fixed-universe bitset over node indices `0..len`.
///
/// Used both for adoption vectors and for subsidy sets. Ordering is the
/// lexicographic order of the sorted member lists, so `Ord` can be used
/// directly for "lexicographically smallest set" tie-breaking.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct NodeSet {
    words: Vec<u64>,
    len: usize,
}

/// Binary adoption vector `x(t)`; bit `i` set means node `i` is Green.
pub type AdoptionState = NodeSet;

impl NodeSet {
    pub fn empty(len: usize) -> Self {
        NodeSet { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn full(len: usize) -> Self {
        let mut s = Self::empty(len);
        for i in 0..len {
            s.insert(i);
        }
        s
    }

    /// Panics if an index is out of range.
    pub fn from_indices<I: IntoIterator<Item = usize>>(len: usize, indices: I) -> Self {
        let mut s = Self::empty(len);
        for i in indices {
            s.insert(i);
        }
        s
    }

    /// Parses a `0`/`1` string, node 0 first.
    pub fn from_bitstring(bits: &str) -> Option<Self> {
        let mut s = Self::empty(bits.len());
        for (i, c) in bits.chars().enumerate() {
            match c {
                '1' => s.insert(i),
                '0' => {}
                _ => return None,
            }
        }
        Some(s)
    }

    /// Universe size.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.words[i / 64] & (1u64 << (i % 64)) != 0
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        assert!(i < self.len, "node {i} out of range for set over {} nodes", self.len);
        self.words[i / 64] |= 1u64 << (i % 64);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        if i < self.len {
            self.words[i / 64] &= !(1u64 << (i % 64));
        }
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn intersection_count(&self, other: &NodeSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn is_subset(&self, other: &NodeSet) -> bool {
        self.len == other.len && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn union_with(&mut self, other: &NodeSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn union(&self, other: &NodeSet) -> NodeSet {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    pub fn difference(&self, other: &NodeSet) -> NodeSet {
        let mut s = self.clone();
        for (a, b) in s.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
        s
    }

    pub fn complement(&self) -> NodeSet {
        NodeSet::full(self.len).difference(self)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut word = w;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let bit = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(wi * 64 + bit)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn to_bitstring(&self) -> String {
        (0..self.len).map(|i| if self.contains(i) { '1' } else { '0' }).collect()
    }
}

impl PartialOrd for NodeSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for NodeSet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.iter().cmp(other.iter())
    }
}

impl fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let members: Vec<String> = self.iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", members.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_membership_across_word_boundaries() {
        let mut s = NodeSet::empty(130);
        for i in [0, 63, 64, 129] {
            s.insert(i);
        }
        assert_eq!(s.count(), 4);
        assert_eq!(s.to_vec(), vec![0, 63, 64, 129]);
        s.remove(63);
        assert!(!s.contains(63));
        assert_eq!(s.complement().count(), 127);
    }

    #[test]
    fn lexicographic_order_of_sorted_members() {
        let a = NodeSet::from_indices(5, [0, 3]);
        let b = NodeSet::from_indices(5, [1, 2]);
        let c = NodeSet::from_indices(5, [0]);
        let empty = NodeSet::empty(5);
        assert!(a < b);
        assert!(c < a);
        assert!(empty < c);
    }

    #[test]
    fn bitstring_round_trip() {
        let s = NodeSet::from_bitstring("10110").unwrap();
        assert_eq!(s.to_vec(), vec![0, 2, 3]);
        assert_eq!(s.to_bitstring(), "10110");
        assert!(NodeSet::from_bitstring("10x").is_none());
    }

    #[test]
    fn subset_and_intersection_count() {
        let a = NodeSet::from_indices(8, [1, 2]);
        let b = NodeSet::from_indices(8, [1, 2, 5]);
        assert!(a.is_subset(&b));
        assert!(!b.is_subset(&a));
        assert_eq!(a.intersection_count(&b), 2);
    }
}

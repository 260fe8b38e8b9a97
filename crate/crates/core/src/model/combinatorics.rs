//! Binomial coefficients and colexicographic subset enumeration.
//!
//! Subsets of the cache index set are stored as bitmasks (`CacheSet`), with
//! bit `i` standing for cache `i` (displayed 1-based). For a fixed size, the
//! colexicographic order of subsets coincides with the numeric order of their
//! masks, which is what every enumeration in this crate relies on.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Largest number of caches a `CacheSet` can index.
pub const MAX_CACHES: usize = 32;

/// Exact binomial coefficient, `0` when `k > n` or `k < 0`.
pub fn binomial(n: i64, k: i64) -> u64 {
    if n < 0 || k < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k) as u64;
    let n = n as u64;
    let mut acc: u128 = 1;
    for i in 0..k {
        // exact at every step: acc * (n - i) is divisible by (i + 1)
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    u64::try_from(acc).expect("binomial coefficient overflows u64")
}

/// Convenience wrapper over [`binomial`] for unsigned arguments.
pub fn choose(n: usize, k: usize) -> u64 {
    binomial(n as i64, k as i64)
}

/// A subset of caches `{0, .., Λ-1}` stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct CacheSet(u32);

impl CacheSet {
    pub const EMPTY: CacheSet = CacheSet(0);

    pub fn from_mask(mask: u32) -> Self {
        CacheSet(mask)
    }

    pub fn singleton(cache: usize) -> Self {
        assert!(cache < MAX_CACHES, "cache index {cache} out of range");
        CacheSet(1 << cache)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        iter.into_iter()
            .fold(CacheSet::EMPTY, |acc, c| acc.with(c))
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, cache: usize) -> bool {
        cache < MAX_CACHES && self.0 & (1 << cache) != 0
    }

    #[must_use]
    pub fn with(self, cache: usize) -> Self {
        assert!(cache < MAX_CACHES, "cache index {cache} out of range");
        CacheSet(self.0 | (1 << cache))
    }

    #[must_use]
    pub fn without(self, cache: usize) -> Self {
        if cache >= MAX_CACHES {
            return self;
        }
        CacheSet(self.0 & !(1 << cache))
    }

    /// Whether every element is strictly greater than `bound`.
    pub fn all_above(self, bound: usize) -> bool {
        self.iter().all(|c| c > bound)
    }

    /// Ascending iterator over the member caches.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let low = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(low)
            }
        })
    }

    /// Relabels every member through `map` (old index -> new index).
    #[must_use]
    pub fn map(self, map: &[usize]) -> Self {
        CacheSet::from_indices(self.iter().map(|c| map[c]))
    }

    /// Rank of this set among all subsets of the same size in colex order.
    pub fn colex_rank(self) -> usize {
        self.iter()
            .enumerate()
            .map(|(i, c)| choose(c, i + 1) as usize)
            .sum()
    }

    /// Inverse of [`CacheSet::colex_rank`] for sets of the given size.
    pub fn colex_unrank(mut rank: usize, size: usize) -> Self {
        let mut mask = 0u32;
        for i in (1..=size).rev() {
            // largest c with C(c, i) <= rank
            let mut c = i - 1;
            while choose(c + 1, i) as usize <= rank {
                c += 1;
            }
            rank -= choose(c, i) as usize;
            mask |= 1 << c;
        }
        CacheSet(mask)
    }

    /// One-based member list, the form used on the wire.
    pub fn to_one_based(self) -> Vec<usize> {
        self.iter().map(|c| c + 1).collect()
    }
}

impl fmt::Debug for CacheSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, c) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", c + 1)?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for CacheSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Serialize for CacheSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_one_based().serialize(s)
    }
}

impl<'de> Deserialize<'de> for CacheSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let members = Vec::<usize>::deserialize(d)?;
        let mut set = CacheSet::EMPTY;
        for m in members {
            if m == 0 || m > MAX_CACHES {
                return Err(serde::de::Error::custom(format!(
                    "cache label {m} outside 1..={MAX_CACHES}"
                )));
            }
            set = set.with(m - 1);
        }
        Ok(set)
    }
}

/// All `size`-subsets of `{0, .., ground-1}` in colexicographic order.
pub fn enumerate_subsets(ground: usize, size: usize) -> Vec<CacheSet> {
    assert!(ground <= MAX_CACHES, "at most {MAX_CACHES} caches supported");
    if size > ground {
        return Vec::new();
    }
    if size == 0 {
        return vec![CacheSet::EMPTY];
    }
    let limit: u64 = 1u64 << ground;
    let mut out = Vec::with_capacity(choose(ground, size) as usize);
    let mut v: u64 = (1u64 << size) - 1;
    while v < limit {
        out.push(CacheSet(v as u32));
        // Gosper's hack: next integer with the same popcount
        let c = v & v.wrapping_neg();
        let r = v + c;
        v = (((r ^ v) >> 2) / c) | r;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_binomial(n: u64, k: u64) -> u64 {
        if k > n {
            return 0;
        }
        let mut row = vec![1u64];
        for _ in 0..n {
            let mut next = vec![1u64; row.len() + 1];
            for i in 1..row.len() {
                next[i] = row[i - 1] + row[i];
            }
            row = next;
        }
        row[k as usize]
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(0, 2), 0);
        assert_eq!(binomial(7, 0), 1);
        assert_eq!(binomial(0, 0), 1);
        assert_eq!(binomial(3, -1), 0);
        assert_eq!(binomial(-1, 0), 0);
    }

    #[test]
    fn binomial_matches_pascal_triangle() {
        for n in 0..30 {
            for k in 0..=31 {
                assert_eq!(binomial(n, k), naive_binomial(n as u64, k as u64), "C({n},{k})");
            }
        }
    }

    #[test]
    fn subsets_of_three_choose_two() {
        let sets: Vec<Vec<usize>> = enumerate_subsets(3, 2)
            .into_iter()
            .map(CacheSet::to_one_based)
            .collect();
        assert_eq!(sets, vec![vec![1, 2], vec![1, 3], vec![2, 3]]);
    }

    #[test]
    fn subset_counts_and_edges() {
        assert_eq!(enumerate_subsets(4, 3).len(), 4);
        assert_eq!(enumerate_subsets(2, 0), vec![CacheSet::EMPTY]);
        assert!(enumerate_subsets(2, 3).is_empty());
        assert_eq!(enumerate_subsets(0, 0), vec![CacheSet::EMPTY]);
        for ground in 0..=10 {
            for size in 0..=ground {
                let sets = enumerate_subsets(ground, size);
                assert_eq!(sets.len() as u64, choose(ground, size));
                assert!(sets.iter().all(|s| s.len() == size));
            }
        }
    }

    #[test]
    fn colex_rank_is_position_in_enumeration() {
        for ground in 0..=9 {
            for size in 0..=ground {
                for (pos, set) in enumerate_subsets(ground, size).into_iter().enumerate() {
                    assert_eq!(set.colex_rank(), pos);
                    assert_eq!(CacheSet::colex_unrank(pos, size), set);
                }
            }
        }
    }

    #[test]
    fn display_is_one_based() {
        let set = CacheSet::from_indices([1, 2]);
        assert_eq!(set.to_string(), "{2,3}");
        let json = serde_json::to_string(&set).unwrap();
        assert_eq!(json, "[2,3]");
        let back: CacheSet = serde_json::from_str(&json).unwrap();
        assert_eq!(back, set);
        assert!(serde_json::from_str::<CacheSet>("[0]").is_err());
    }
}

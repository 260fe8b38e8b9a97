//! SC prefetching: every file is cut into `C(Λ, t)` subfiles `X^n_T`, one per
//! `t`-subset `T` of caches, and cache `λ` stores every subfile with `λ ∈ T`.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::combinatorics::{choose, enumerate_subsets, CacheSet};
use super::config::SystemConfig;
use crate::error::{Error, Result};
use crate::packet::Packet;

/// Subfile `X^file_set`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubfileId {
    pub file: usize,
    pub set: CacheSet,
}

impl SubfileId {
    pub fn new(file: usize, set: CacheSet) -> Self {
        SubfileId { file, set }
    }
}

impl fmt::Display for SubfileId {
    /// `X^1_{2,3}`, or `X^1_2` for single-cache sets.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X^{}_", self.file + 1)?;
        if self.set.len() == 1 {
            write!(f, "{}", self.set.iter().next().unwrap() + 1)
        } else {
            write!(f, "{}", self.set)
        }
    }
}

impl fmt::Debug for SubfileId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Wire form: `{"file": 1-based, "subset": [1-based caches]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubfileWire {
    pub file: usize,
    pub subset: CacheSet,
}

impl From<SubfileId> for SubfileWire {
    fn from(id: SubfileId) -> Self {
        SubfileWire {
            file: id.file + 1,
            subset: id.set,
        }
    }
}

impl TryFrom<SubfileWire> for SubfileId {
    type Error = Error;

    fn try_from(w: SubfileWire) -> Result<Self> {
        let file = w
            .file
            .checked_sub(1)
            .ok_or_else(|| Error::field("file", "file labels start at 1"))?;
        Ok(SubfileId::new(file, w.subset))
    }
}

/// Bijection between subfiles and message indices
/// `n * C(Λ, t) + colex_rank(T)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MessageIndex {
    pub num_files: usize,
    pub num_caches: usize,
    pub t: usize,
    pub per_file: usize,
}

impl MessageIndex {
    pub fn new(num_files: usize, num_caches: usize, t: usize) -> Self {
        MessageIndex {
            num_files,
            num_caches,
            t,
            per_file: choose(num_caches, t) as usize,
        }
    }

    pub fn for_config(cfg: &SystemConfig) -> Result<Self> {
        Ok(Self::new(cfg.num_files(), cfg.num_caches(), cfg.require_t()?))
    }

    pub fn len(&self) -> usize {
        self.num_files * self.per_file
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, id: SubfileId) -> usize {
        debug_assert_eq!(id.set.len(), self.t);
        id.file * self.per_file + id.set.colex_rank()
    }

    pub fn subfile(&self, index: usize) -> SubfileId {
        SubfileId::new(
            index / self.per_file,
            CacheSet::colex_unrank(index % self.per_file, self.t),
        )
    }
}

/// Cache contents after SC prefetching, optionally with the actual bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placement {
    index: MessageIndex,
    caches: Vec<Vec<SubfileId>>,
    /// `payloads[file][colex rank]`.
    payloads: Option<Vec<Vec<Packet>>>,
}

/// Runs SC prefetching. With `payloads`, each file (of exactly `F` bits) is
/// sliced into `C(Λ, t)` contiguous equal parts in colex order of `T`.
pub fn sc_place(cfg: &SystemConfig, payloads: Option<&[Packet]>) -> Result<Placement> {
    let t = cfg.require_t()?;
    let index = MessageIndex::new(cfg.num_files(), cfg.num_caches(), t);
    let sets = enumerate_subsets(cfg.num_caches(), t);
    let caches = (0..cfg.num_caches())
        .map(|lambda| {
            (0..cfg.num_files())
                .flat_map(|n| {
                    sets.iter()
                        .filter(move |s| s.contains(lambda))
                        .map(move |&s| SubfileId::new(n, s))
                })
                .collect()
        })
        .collect();

    let payloads = match payloads {
        None => None,
        Some(files) => {
            if files.len() != cfg.num_files() {
                return Err(Error::field(
                    "payloads",
                    format!("{} files given, expected {}", files.len(), cfg.num_files()),
                ));
            }
            let part = cfg.file_size_bits() / index.per_file;
            let mut split = Vec::with_capacity(files.len());
            for (n, file) in files.iter().enumerate() {
                if file.len() != cfg.file_size_bits() {
                    return Err(Error::PacketLength {
                        index: n,
                        expected: cfg.file_size_bits(),
                        actual: file.len(),
                    });
                }
                split.push(file.chunks(part).map(|c| c.to_bitvec()).collect());
            }
            Some(split)
        }
    };

    Ok(Placement {
        index,
        caches,
        payloads,
    })
}

impl Placement {
    pub fn index(&self) -> MessageIndex {
        self.index
    }

    pub fn num_caches(&self) -> usize {
        self.caches.len()
    }

    /// Subfiles stored by `cache`, ordered by file then colex rank.
    pub fn cache(&self, cache: usize) -> &[SubfileId] {
        &self.caches[cache]
    }

    pub fn holds(&self, cache: usize, id: SubfileId) -> bool {
        id.set.contains(cache)
    }

    pub fn has_payloads(&self) -> bool {
        self.payloads.is_some()
    }

    pub fn payload(&self, id: SubfileId) -> Option<&Packet> {
        self.payloads
            .as_ref()
            .map(|p| &p[id.file][id.set.colex_rank()])
    }

    pub fn payload_by_index(&self, message: usize) -> Option<&Packet> {
        self.payload(self.index.subfile(message))
    }

    /// Concatenates the subfiles of `file` in id order.
    pub fn reassemble(&self, file: usize) -> Option<Packet> {
        let parts = &self.payloads.as_ref()?[file];
        let mut out = Packet::new();
        for p in parts {
            out.extend_from_bitslice(p);
        }
        Some(out)
    }

    /// Bits held by one cache.
    pub fn cache_bits(&self, cache: usize) -> usize {
        self.payloads
            .as_ref()
            .map(|p| {
                self.caches[cache]
                    .iter()
                    .map(|id| p[id.file][id.set.colex_rank()].len())
                    .sum()
            })
            .unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packet;
    use num_rational::Ratio;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn example1() -> SystemConfig {
        SystemConfig::new(8, 8, 4, Ratio::from_integer(4), 384).unwrap()
    }

    #[test]
    fn example1_cache_one_contents() {
        let placement = sc_place(&example1(), None).unwrap();
        let cache1 = placement.cache(0);
        assert_eq!(cache1.len(), 8 * 3);
        let first_file: Vec<String> = cache1
            .iter()
            .filter(|id| id.file == 0)
            .map(ToString::to_string)
            .collect();
        assert_eq!(first_file, vec!["X^1_{1,2}", "X^1_{1,3}", "X^1_{1,4}"]);
        assert!(cache1.iter().all(|id| id.set.contains(0)));
    }

    #[test]
    fn full_and_empty_memory() {
        let full = SystemConfig::new(3, 4, 4, Ratio::from_integer(3), 64).unwrap();
        let p = sc_place(&full, None).unwrap();
        for c in 0..4 {
            assert_eq!(p.cache(c).len(), 3);
        }
        let empty = SystemConfig::new(3, 4, 4, Ratio::from_integer(0), 64).unwrap();
        let p = sc_place(&empty, None).unwrap();
        assert_eq!(p.index().per_file, 1);
        for c in 0..4 {
            assert!(p.cache(c).is_empty());
        }
    }

    #[test]
    fn non_integral_t_is_rejected() {
        let cfg = SystemConfig::new(3, 3, 3, Ratio::new(1, 2), 64).unwrap();
        assert!(matches!(sc_place(&cfg, None), Err(Error::NonIntegralT { .. })));
    }

    #[test]
    fn wrong_payload_length_is_rejected() {
        let cfg = example1();
        let files = vec![packet::zeros(383); 8];
        assert!(matches!(
            sc_place(&cfg, Some(&files)),
            Err(Error::PacketLength { .. })
        ));
    }

    #[test]
    fn subfile_display() {
        let id = SubfileId::new(0, CacheSet::from_indices([1, 2]));
        assert_eq!(id.to_string(), "X^1_{2,3}");
        let id = SubfileId::new(3, CacheSet::singleton(0));
        assert_eq!(id.to_string(), "X^4_1");
    }

    proptest! {
        #[test]
        fn partition_memory_and_index_bijection(
            caches in 1usize..=6,
            t_frac in 0usize..=6,
            files in 1usize..=4,
            unit in 1usize..=3,
            seed in any::<u64>(),
        ) {
            let t = t_frac.min(caches);
            let cfg = SystemConfig::at_grid_point(files, caches, caches, t, unit * 8).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let data: Vec<Packet> = (0..files)
                .map(|_| packet::random(cfg.file_size_bits(), &mut rng))
                .collect();
            let p = sc_place(&cfg, Some(&data)).unwrap();
            let idx = p.index();

            // reassembly is bit-exact
            for (n, file) in data.iter().enumerate() {
                prop_assert_eq!(&p.reassemble(n).unwrap(), file);
            }
            // each cache holds γ N F bits
            let expected_bits = cfg.gamma() * Ratio::from_integer((files * cfg.file_size_bits()) as u64);
            let per_cache = if t == 0 { 0 } else { files * choose(caches - 1, t - 1) as usize };
            for c in 0..caches {
                prop_assert_eq!(Ratio::from_integer(p.cache_bits(c) as u64), expected_bits);
                prop_assert_eq!(p.cache(c).len(), per_cache);
            }
            // the covering t-sets across caches are exactly all t-subsets
            let mut covered: Vec<CacheSet> = (0..caches)
                .flat_map(|c| p.cache(c).iter().filter(|id| id.file == 0).map(|id| id.set))
                .collect();
            covered.sort();
            covered.dedup();
            if t > 0 {
                prop_assert_eq!(covered, enumerate_subsets(caches, t).into_iter().collect::<Vec<_>>());
            }
            // message index bijection
            for m in 0..idx.len() {
                prop_assert_eq!(idx.index(idx.subfile(m)), m);
            }
        }
    }
}

//! Exhaustive α and κ searches for small instances.
//!
//! Both searches run over the wanted messages only. An unwanted message can
//! never sit in a generalized independent set, and projecting a linear code
//! onto the wanted coordinates keeps every fitting valid without raising its
//! rank.

use super::instance::IcsiInstance;
use crate::gf2::{self, BitRow};
use crate::error::{Error, Result};

pub const DEFAULT_GI_LIMIT: usize = 22;
pub const DEFAULT_ALPHA_LIMIT: usize = 22;
pub const DEFAULT_KAPPA_LIMIT: usize = 14;

/// Receivers restricted to a candidate message list, as bitmasks over
/// candidate positions.
struct Reduced {
    /// `wants[c]`: minimal side-information masks of receivers wanting `c`.
    wants: Vec<Vec<u64>>,
}

impl Reduced {
    fn new(inst: &IcsiInstance, candidates: &[usize]) -> Self {
        let mut wants = vec![Vec::new(); candidates.len()];
        for r in &inst.receivers {
            let Ok(c) = candidates.binary_search(&r.wants) else {
                continue;
            };
            let mask = candidates
                .iter()
                .enumerate()
                .filter(|(_, &m)| r.knows(m))
                .fold(0u64, |acc, (i, _)| acc | 1 << i);
            wants[c].push(mask);
        }
        for masks in &mut wants {
            *masks = minimal_masks(masks);
        }
        Reduced { wants }
    }

    /// Some member of `s` is wanted by a receiver knowing nothing else in `s`.
    fn good(&self, s: u64) -> bool {
        let mut rest = s;
        while rest != 0 {
            let c = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if self.wants[c].iter().any(|&m| m & s == 0) {
                return true;
            }
        }
        false
    }

    /// Every subset of `h ∪ {x}` containing `x` is good.
    fn extends(&self, h: u64, x: usize) -> bool {
        let bit = 1u64 << x;
        let mut sub = h;
        loop {
            if !self.good(sub | bit) {
                return false;
            }
            if sub == 0 {
                return true;
            }
            sub = (sub - 1) & h;
        }
    }
}

fn minimal_masks(masks: &[u64]) -> Vec<u64> {
    let mut sorted = masks.to_vec();
    sorted.sort_unstable_by_key(|m| m.count_ones());
    sorted.dedup();
    let mut kept: Vec<u64> = Vec::new();
    for m in sorted {
        if !kept.iter().any(|&k| k & !m == 0) {
            kept.push(m);
        }
    }
    kept
}

fn check_limit(what: &'static str, size: usize, limit: usize) -> Result<()> {
    if size > limit.min(64) {
        Err(Error::OracleLimit { what, size, limit })
    } else {
        Ok(())
    }
}

/// Whether every non-empty `S ⊆ h` holds a message wanted by a receiver
/// whose side information misses the rest of `S`.
pub fn is_generalized_independent(inst: &IcsiInstance, h: &[usize], limit: usize) -> Result<bool> {
    let mut set = h.to_vec();
    set.sort_unstable();
    set.dedup();
    check_limit("generalized independence check", set.len(), limit)?;
    let red = Reduced::new(inst, &set);
    if red.wants.iter().any(Vec::is_empty) {
        return Ok(false);
    }
    let mut h_mask = 0u64;
    for x in 0..set.len() {
        if !red.extends(h_mask, x) {
            return Ok(false);
        }
        h_mask |= 1 << x;
    }
    Ok(true)
}

/// Generalized independence number by branch and bound, with a largest set
/// attaining it.
pub fn alpha_bruteforce(inst: &IcsiInstance, limit: usize) -> Result<(usize, Vec<usize>)> {
    let wanted = inst.wanted_messages();
    check_limit("alpha oracle", wanted.len(), limit)?;
    // ascending side-information degree: rarely-known messages first
    let degree = |m: usize| inst.receivers.iter().filter(|r| r.knows(m)).count();
    let mut order = wanted.clone();
    order.sort_by_key(|&m| (degree(m), m));
    let red = Reduced::new(inst, &wanted);
    let position: Vec<usize> = order.iter().map(|m| wanted.binary_search(m).unwrap()).collect();

    struct Search<'a> {
        red: &'a Reduced,
        best: u64,
        best_len: usize,
    }
    impl Search<'_> {
        fn go(&mut self, h: u64, len: usize, cands: &[usize]) {
            if len > self.best_len {
                self.best = h;
                self.best_len = len;
            }
            let viable: Vec<usize> = cands.iter().copied().filter(|&x| self.red.extends(h, x)).collect();
            for (i, &x) in viable.iter().enumerate() {
                if len + viable.len() - i <= self.best_len {
                    return;
                }
                self.go(h | 1 << x, len + 1, &viable[i + 1..]);
            }
        }
    }
    let mut s = Search {
        red: &red,
        best: 0,
        best_len: 0,
    };
    s.go(0, 0, &position);
    let witness = (0..wanted.len()).filter(|&i| s.best >> i & 1 == 1).map(|i| wanted[i]).collect();
    Ok((s.best_len, witness))
}

/// Minimum rank over GF(2) of a matrix with one fitting row per receiver,
/// i.e. the length of the shortest scalar linear index code. Seeded with α,
/// which no code can beat, so the search ends at the first code that long.
pub fn kappa_bruteforce(inst: &IcsiInstance, limit: usize) -> Result<usize> {
    check_limit("kappa oracle", inst.wanted_messages().len(), limit.min(KAPPA_HARD_CAP))?;
    let (alpha, _) = alpha_bruteforce(inst, limit)?;
    Ok(kappa_search(inst, limit, alpha, usize::MAX)?.value)
}

/// Outcome of [`kappa_search`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KappaResult {
    pub value: usize,
    /// A code of length `value` as rows over message indices, present when
    /// the search beat the supplied upper bound.
    pub code: Option<Vec<BitRow>>,
}

/// Hard cap on κ-search width: the search tabulates all `2^n` vectors.
const KAPPA_HARD_CAP: usize = 24;

/// [`kappa_bruteforce`] given a known lower bound (such as α) and the length
/// of a known linear code; the search stops as soon as it reaches `lower`.
///
/// Works on the dual: a code `C` serves receiver `r` iff no `y ∈ C⊥` has
/// `y_{f(r)} = 1` and vanishes on `X_r`, i.e. iff no vector of `C⊥` has a
/// support that is good in the independence sense. So κ is the number of
/// wanted messages minus the largest dimension of a subspace whose non-zero
/// vectors all have non-good supports.
pub fn kappa_search(inst: &IcsiInstance, limit: usize, lower: usize, upper: usize) -> Result<KappaResult> {
    let wanted = inst.wanted_messages();
    check_limit("kappa oracle", wanted.len(), limit.min(KAPPA_HARD_CAP))?;
    let n = wanted.len();
    let red = Reduced::new(inst, &wanted);
    let allowed: Vec<bool> = (0..1u64 << n).map(|y| y != 0 && !red.good(y)).collect();
    let free: Vec<u64> = (1..1u64 << n).filter(|&y| allowed[y as usize]).collect();

    struct Search {
        n: usize,
        best_dim: usize,
        target_dim: usize,
        basis: Vec<u64>,
        best_basis: Option<Vec<u64>>,
    }
    impl Search {
        /// `compat` lists, in ascending order, every vector `u` such that
        /// `u + x` is allowed for all `x` in the current span; any extension
        /// of the span lies in it. Bases are built greedily (each new vector
        /// is the smallest of its coset and exceeds the previous one), so
        /// every subspace is visited once.
        fn go(&mut self, span: &[u64], dim: usize, compat: &[u64], last: u64) {
            if dim > self.best_dim {
                self.best_dim = dim;
                self.best_basis = Some(self.basis.clone());
            }
            if self.best_dim >= self.target_dim {
                return;
            }
            let start = compat.partition_point(|&u| u <= last);
            let above = compat.len() - start;
            let mut reach = dim;
            while reach < self.n && (1usize << (reach + 1)) - (1 << dim) <= above {
                reach += 1;
            }
            if reach <= self.best_dim {
                return;
            }
            let mut member = vec![0u64; (1usize << self.n).div_ceil(64)];
            for &u in compat {
                member[(u >> 6) as usize] |= 1 << (u & 63);
            }
            let has = |m: &[u64], u: u64| m[(u >> 6) as usize] >> (u & 63) & 1 == 1;
            for &v in &compat[start..] {
                if span.iter().any(|&x| v ^ x < v) {
                    continue;
                }
                let next: Vec<u64> = compat
                    .iter()
                    .copied()
                    .filter(|&u| u != v && has(&member, u ^ v))
                    .collect();
                let mut grown = span.to_vec();
                grown.extend(span.iter().map(|&x| x ^ v));
                self.basis.push(v);
                self.go(&grown, dim + 1, &next, v);
                self.basis.pop();
                if self.best_dim >= self.target_dim {
                    return;
                }
            }
        }
    }
    let mut s = Search {
        n,
        best_dim: n - upper.min(n),
        target_dim: n - lower.min(n),
        basis: Vec::new(),
        best_basis: None,
    };
    s.go(&[0], 0, &free, 0);
    let code = s.best_basis.map(|dual| {
        null_space(&dual, n)
            .into_iter()
            .map(|c| {
                let mut row = gf2::zero_row(inst.num_messages());
                for (i, &m) in wanted.iter().enumerate() {
                    row.set(m, c >> i & 1 == 1);
                }
                row
            })
            .collect()
    });
    Ok(KappaResult {
        value: n - s.best_dim,
        code,
    })
}

/// Basis of `{c : c·r = 0 for every row r}` in `GF(2)^n`.
fn null_space(rows: &[u64], n: usize) -> Vec<u64> {
    let mut reduced: Vec<u64> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for &r in rows {
        let mut v = r;
        for (&p, &b) in pivots.iter().zip(&reduced) {
            if v >> p & 1 == 1 {
                v ^= b;
            }
        }
        if v == 0 {
            continue;
        }
        let p = v.trailing_zeros() as usize;
        for b in &mut reduced {
            if *b >> p & 1 == 1 {
                *b ^= v;
            }
        }
        reduced.push(v);
        pivots.push(p);
    }
    (0..n)
        .filter(|i| !pivots.contains(i))
        .map(|free| {
            let mut c = 1u64 << free;
            for (&p, &b) in pivots.iter().zip(&reduced) {
                if b >> free & 1 == 1 {
                    c |= 1 << p;
                }
            }
            c
        })
        .collect()
}

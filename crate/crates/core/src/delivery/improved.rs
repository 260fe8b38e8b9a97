use std::collections::BTreeMap;

use super::plan::{Eliminated, Scheme, Term, Transmission, TransmissionPlan};
use super::sc::round_transmissions;
use crate::error::Result;
use crate::model::{Association, CacheSet, DemandVector, SubfileId, SystemConfig};

/// Association after dropping users whose file is already requested by an
/// earlier user on the same cache.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Elimination {
    /// Surviving users per cache, caches sorted by survivor count (`U'`).
    pub groups: Vec<Vec<usize>>,
    /// `to_original[canonical cache] = original cache`.
    pub to_original: Vec<usize>,
    /// Every dropped user with the survivor it piggybacks on.
    pub eliminated: Vec<Eliminated>,
}

impl Elimination {
    /// `L'`.
    pub fn profile(&self) -> Vec<usize> {
        self.groups.iter().map(Vec::len).collect()
    }

    /// Surviving users in ascending id order.
    pub fn kept(&self) -> Vec<usize> {
        let mut kept: Vec<usize> = self.groups.iter().flatten().copied().collect();
        kept.sort_unstable();
        kept
    }

    /// Demands of the survivors, aligned with [`Elimination::kept`] (`d'`).
    pub fn reduced_demands(&self, d: &DemandVector) -> Vec<usize> {
        self.kept().into_iter().map(|u| d.file_of(u)).collect()
    }

    /// Rounds `R'_j` over the surviving users.
    pub fn rounds(&self) -> Vec<Vec<usize>> {
        let depth = self.groups.first().map_or(0, Vec::len);
        (0..depth)
            .map(|j| self.groups.iter().filter_map(|g| g.get(j).copied()).collect())
            .collect()
    }
}

/// Keeps the first user per distinct file on each cache, then re-sorts the
/// caches by survivor count (stable). User order within a cache is kept.
pub fn eliminate_redundant(assoc: &Association, d: &DemandVector) -> Elimination {
    let mut eliminated = Vec::new();
    let reduced: Vec<Vec<usize>> = assoc
        .groups()
        .iter()
        .map(|group| {
            let mut first_by_file: BTreeMap<usize, usize> = BTreeMap::new();
            let mut kept = Vec::new();
            for &u in group {
                match first_by_file.get(&d.file_of(u)) {
                    Some(&proxy) => eliminated.push(Eliminated { user: u, proxy }),
                    None => {
                        first_by_file.insert(d.file_of(u), u);
                        kept.push(u);
                    }
                }
            }
            kept
        })
        .collect();
    let mut order: Vec<usize> = (0..reduced.len()).collect();
    order.sort_by_key(|&c| std::cmp::Reverse(reduced[c].len()));
    eliminated.sort_by_key(|e| e.user);
    Elimination {
        groups: order.iter().map(|&c| reduced[c].clone()).collect(),
        to_original: order,
        eliminated,
    }
}

/// Leaders `P_j`: the lowest user id for each distinct file requested in the
/// round, returned in ascending id order.
pub fn select_leaders(round_users: &[usize], d: &DemandVector) -> Vec<usize> {
    let mut first: BTreeMap<usize, usize> = BTreeMap::new();
    for &u in round_users {
        first
            .entry(d.file_of(u))
            .and_modify(|v| *v = (*v).min(u))
            .or_insert(u);
    }
    let mut leaders: Vec<usize> = first.into_values().collect();
    leaders.sort_unstable();
    leaders
}

/// Improved delivery: eliminate redundant users, run `L'_1` rounds and send
/// the round-`j` XOR for `Q` only when some member of `E_Q` is a leader.
///
/// With `t = 0` each distinct requested file is sent once, whole.
pub fn improved_delivery(
    cfg: &SystemConfig,
    assoc: &Association,
    d: &DemandVector,
) -> Result<TransmissionPlan> {
    let t = cfg.require_t()?;
    assoc.check_against(cfg)?;
    d.check_against(cfg)?;

    if t == 0 {
        return Ok(unicast_distinct(cfg, assoc, d));
    }

    let elim = eliminate_redundant(assoc, d);
    let rounds = elim.rounds();
    let mut leaders = Vec::with_capacity(rounds.len());
    let mut transmissions = Vec::new();
    for (j, served) in rounds.iter().enumerate() {
        let round_leaders = select_leaders(served, d);
        let active: Vec<Option<usize>> = elim.groups.iter().map(|g| g.get(j).copied()).collect();
        let leader_caches = CacheSet::from_indices(
            active
                .iter()
                .enumerate()
                .filter(|(_, u)| u.is_some_and(|u| round_leaders.contains(&u)))
                .map(|(c, _)| c),
        );
        transmissions.extend(round_transmissions(
            j + 1,
            &active,
            d,
            t,
            &elim.to_original,
            |q| q.mask() & leader_caches.mask() != 0,
        ));
        leaders.push(round_leaders);
    }

    Ok(TransmissionPlan {
        scheme: Scheme::Improved,
        num_caches: cfg.num_caches(),
        t,
        transmissions,
        rounds,
        leaders,
        eliminated: elim.eliminated,
    })
}

fn unicast_distinct(cfg: &SystemConfig, assoc: &Association, d: &DemandVector) -> TransmissionPlan {
    let cache_of = assoc.cache_of_users();
    let mut first: BTreeMap<usize, usize> = BTreeMap::new();
    for u in 0..d.len() {
        first.entry(d.file_of(u)).or_insert(u);
    }
    let mut served: Vec<usize> = first.values().copied().collect();
    served.sort_unstable();
    let transmissions = served
        .iter()
        .map(|&u| Transmission {
            round: 1,
            cache_set: CacheSet::singleton(cache_of[u]),
            terms: vec![Term {
                user: u,
                subfile: SubfileId::new(d.file_of(u), CacheSet::EMPTY),
            }],
            payload: None,
        })
        .collect();
    let eliminated = (0..d.len())
        .filter(|u| !served.contains(u))
        .map(|u| Eliminated {
            user: u,
            proxy: first[&d.file_of(u)],
        })
        .collect();
    TransmissionPlan {
        scheme: Scheme::Improved,
        num_caches: cfg.num_caches(),
        t: 0,
        transmissions,
        rounds: vec![served.clone()],
        leaders: vec![served],
        eliminated,
    }
}

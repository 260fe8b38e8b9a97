use super::plan::{Scheme, Term, Transmission, TransmissionPlan};
use crate::error::Result;
use crate::model::{enumerate_subsets, Association, CacheSet, DemandVector, SubfileId, SystemConfig};

/// Users served per round: round `j` takes the `j`-th user of every cache
/// holding at least `j` users, in cache order.
pub fn sc_rounds(assoc: &Association) -> Vec<Vec<usize>> {
    let depth = assoc.groups().iter().map(Vec::len).max().unwrap_or(0);
    (0..depth)
        .map(|j| assoc.groups().iter().filter_map(|g| g.get(j).copied()).collect())
        .collect()
}

/// Builds one round's transmissions over canonical cache labels. `active[λ]`
/// is the round's user at cache `λ`; a `Q` is sent when `gate(Q)` holds and
/// at least one member is active.
pub(super) fn round_transmissions(
    round: usize,
    active: &[Option<usize>],
    d: &DemandVector,
    t: usize,
    to_original: &[usize],
    mut gate: impl FnMut(CacheSet) -> bool,
) -> Vec<Transmission> {
    let num_caches = active.len();
    enumerate_subsets(num_caches, t + 1)
        .into_iter()
        .filter(|&q| gate(q))
        .filter_map(|q| {
            let terms: Vec<Term> = q
                .iter()
                .filter_map(|lambda| {
                    active[lambda].map(|user| Term {
                        user,
                        subfile: SubfileId::new(d.file_of(user), q.without(lambda).map(to_original)),
                    })
                })
                .collect();
            (!terms.is_empty()).then(|| Transmission {
                round,
                cache_set: q.map(to_original),
                terms,
                payload: None,
            })
        })
        .collect()
}

/// SC delivery: `L_1` rounds, one XOR per `(t+1)`-set `Q` with a non-empty
/// receiving set `E_Q`. With `t = 0` every user gets its whole file unicast.
pub fn sc_delivery(cfg: &SystemConfig, assoc: &Association, d: &DemandVector) -> Result<TransmissionPlan> {
    let t = cfg.require_t()?;
    assoc.check_against(cfg)?;
    d.check_against(cfg)?;

    let canon = assoc.canonicalize();
    let groups = canon.association.groups();
    let rounds = sc_rounds(&canon.association);
    let mut transmissions = Vec::new();
    for j in 0..rounds.len() {
        let active: Vec<Option<usize>> = groups.iter().map(|g| g.get(j).copied()).collect();
        transmissions.extend(round_transmissions(j + 1, &active, d, t, &canon.to_original, |_| true));
    }
    Ok(TransmissionPlan {
        scheme: Scheme::ScWorst,
        num_caches: cfg.num_caches(),
        t,
        transmissions,
        rounds,
        leaders: Vec::new(),
        eliminated: Vec::new(),
    })
}

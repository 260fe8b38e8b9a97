use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::instance::build_icsi;
use super::oracle::{alpha_bruteforce, kappa_search, DEFAULT_ALPHA_LIMIT, DEFAULT_KAPPA_LIMIT};
use crate::delivery::{eliminate_redundant, improved_delivery, worst_case_count_for_profile, Scheme};
use crate::error::Result;
use crate::model::{
    enumerate_subsets, sc_place, Association, DemandVector, SubfileId, SubfileWire,
    SystemConfig,
};

/// The generalized independent set `B(d)`.
///
/// After eliminating repeated demands the caches are relabeled by survivor
/// count. File `i` is attached to the canonical cache `c(i)` of the
/// lowest-numbered survivor requesting it and contributes every `X^i_T` with
/// all members of `T` above `c(i)`. Sets are returned in the original cache
/// labels, ordered by file then colex rank.
pub fn construct_b(cfg: &SystemConfig, assoc: &Association, d: &DemandVector) -> Result<Vec<SubfileId>> {
    let t = cfg.require_t()?;
    assoc.check_against(cfg)?;
    d.check_against(cfg)?;
    let elim = eliminate_redundant(assoc, d);
    let mut anchor: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for (c, group) in elim.groups.iter().enumerate() {
        for &u in group {
            let entry = anchor.entry(d.file_of(u)).or_insert((u, c));
            if u < entry.0 {
                *entry = (u, c);
            }
        }
    }
    let sets = enumerate_subsets(cfg.num_caches(), t);
    let mut out = Vec::new();
    for (&file, &(_, c)) in &anchor {
        let mut ids: Vec<SubfileId> = sets
            .iter()
            .filter(|s| s.iter().all(|a| a > c))
            .map(|&s| SubfileId::new(file, s.map(&elim.to_original)))
            .collect();
        ids.sort_by_key(|id| id.set.colex_rank());
        out.extend(ids);
    }
    Ok(out)
}

/// `Σ_λ L'_λ·C(Λ−λ, t)` over the post-elimination profile.
pub fn profile_bound(cfg: &SystemConfig, assoc: &Association, d: &DemandVector) -> Result<u64> {
    let t = cfg.require_t()?;
    assoc.check_against(cfg)?;
    d.check_against(cfg)?;
    Ok(worst_case_count_for_profile(&eliminate_redundant(assoc, d).profile(), t))
}

/// Bounds on the delivery load of one demand.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsReport {
    pub alpha_lower: usize,
    pub alpha_witness: Vec<SubfileWire>,
    pub kappa_upper: usize,
    pub kappa_scheme: Scheme,
    /// `Σ L'_λ·C(Λ−λ,t)`; above `alpha_lower` when a file is requested from
    /// more than one cache.
    pub profile_bound: u64,
    pub messages: usize,
    pub receivers: usize,
    pub nominal_receivers: usize,
    pub bounds_meet: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_exact: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_exact: Option<usize>,
}

impl BoundsReport {
    /// `alpha_lower ≤ alpha_exact ≤ kappa_exact ≤ kappa_upper` over the
    /// fields present.
    pub fn sandwich_holds(&self) -> bool {
        let chain: Vec<usize> = [
            Some(self.alpha_lower),
            self.alpha_exact,
            self.kappa_exact,
            Some(self.kappa_upper),
        ]
        .into_iter()
        .flatten()
        .collect();
        chain.windows(2).all(|w| w[0] <= w[1])
    }
}

/// Which exhaustive searches [`bounds_report`] may run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleOptions {
    pub run: bool,
    pub alpha_limit: usize,
    pub kappa_limit: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            run: true,
            alpha_limit: DEFAULT_ALPHA_LIMIT,
            kappa_limit: DEFAULT_KAPPA_LIMIT,
        }
    }
}

impl OracleOptions {
    pub fn skip() -> Self {
        OracleOptions {
            run: false,
            ..Self::default()
        }
    }
}

/// `|B(d)|` against the improved plan length. When they coincide both
/// exact values follow; otherwise the oracles run if enabled, failing on
/// instances above their limits.
pub fn bounds_report(
    cfg: &SystemConfig,
    assoc: &Association,
    d: &DemandVector,
    oracles: OracleOptions,
) -> Result<BoundsReport> {
    let b = construct_b(cfg, assoc, d)?;
    let plan = improved_delivery(cfg, assoc, d)?;
    let placement = sc_place(cfg, None)?;
    let inst = build_icsi(cfg, &placement, assoc, d)?;
    let meet = b.len() == plan.len();
    let (alpha_exact, kappa_exact) = if meet {
        (Some(b.len()), Some(plan.len()))
    } else if oracles.run {
        let alpha = alpha_bruteforce(&inst, oracles.alpha_limit)?.0;
        let kappa = kappa_search(&inst, oracles.kappa_limit, alpha, plan.len())?.value;
        (Some(alpha), Some(kappa))
    } else {
        (None, None)
    };
    Ok(BoundsReport {
        alpha_lower: b.len(),
        alpha_witness: b.into_iter().map(SubfileWire::from).collect(),
        kappa_upper: plan.len(),
        kappa_scheme: plan.scheme,
        profile_bound: profile_bound(cfg, assoc, d)?,
        messages: inst.num_messages(),
        receivers: inst.receivers.len(),
        nominal_receivers: inst.nominal_receiver_count(),
        bounds_meet: meet,
        alpha_exact,
        kappa_exact,
    })
}

/// Message indices of a subfile list.
pub fn message_indices(cfg: &SystemConfig, ids: &[SubfileId]) -> Result<Vec<usize>> {
    let index = crate::model::MessageIndex::for_config(cfg)?;
    Ok(ids.iter().map(|&id| index.index(id)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::indexcoding::is_generalized_independent;
    use num_rational::Ratio;

    fn d1(files: &[usize], n: usize) -> DemandVector {
        DemandVector::new(files.iter().map(|f| f - 1).collect(), n).unwrap()
    }

    fn names(ids: &[SubfileId]) -> Vec<String> {
        ids.iter().map(ToString::to_string).collect()
    }

    fn example3() -> (SystemConfig, Association) {
        (
            SystemConfig::new(9, 9, 3, Ratio::from_integer(3), 192).unwrap(),
            Association::from_profile(&[3, 3, 3]),
        )
    }

    #[test]
    fn b_for_example1_worst_case() {
        let cfg = SystemConfig::new(8, 8, 4, Ratio::from_integer(4), 384).unwrap();
        let assoc = Association::from_profile(&[3, 2, 2, 1]);
        let b = construct_b(&cfg, &assoc, &DemandVector::distinct(8)).unwrap();
        assert_eq!(
            names(&b),
            vec![
                "X^1_{2,3}", "X^1_{2,4}", "X^1_{3,4}", "X^2_{2,3}", "X^2_{2,4}", "X^2_{3,4}",
                "X^3_{2,3}", "X^3_{2,4}", "X^3_{3,4}", "X^4_{3,4}", "X^5_{3,4}",
            ]
        );
        let place = sc_place(&cfg, None).unwrap();
        let inst = build_icsi(&cfg, &place, &assoc, &DemandVector::distinct(8)).unwrap();
        let h = message_indices(&cfg, &b).unwrap();
        assert!(is_generalized_independent(&inst, &h, 22).unwrap());
    }

    #[test]
    fn b_for_example3() {
        let (cfg, assoc) = example3();
        let b = construct_b(&cfg, &assoc, &d1(&[1, 2, 2, 3, 4, 4, 5, 6, 6], 9)).unwrap();
        assert_eq!(names(&b), vec!["X^1_2", "X^1_3", "X^2_2", "X^2_3", "X^3_3", "X^4_3"]);

        let d = d1(&[1, 2, 3, 4, 5, 1, 2, 3, 4], 9);
        let b = construct_b(&cfg, &assoc, &d).unwrap();
        assert_eq!(b.len(), 8);
        assert!(names(&b).contains(&"X^5_3".to_string()));
        assert_eq!(profile_bound(&cfg, &assoc, &d).unwrap(), 9);
    }

    #[test]
    fn b_uses_original_labels() {
        let cfg = SystemConfig::new(3, 3, 2, Ratio::new(3, 2), 64).unwrap();
        let assoc = Association::new(vec![vec![2], vec![0, 1]], 3).unwrap();
        let b = construct_b(&cfg, &assoc, &DemandVector::distinct(3)).unwrap();
        // users 1 and 2 sit on cache 2, which is canonical cache 1
        assert_eq!(names(&b), vec!["X^1_1", "X^2_1"]);
    }

    #[test]
    fn report_example1_meets_without_oracles() {
        let cfg = SystemConfig::new(8, 8, 4, Ratio::from_integer(4), 384).unwrap();
        let assoc = Association::from_profile(&[3, 2, 2, 1]);
        let r = bounds_report(&cfg, &assoc, &DemandVector::distinct(8), OracleOptions::default()).unwrap();
        assert_eq!((r.alpha_lower, r.kappa_upper), (11, 11));
        assert!(r.bounds_meet);
        assert_eq!((r.alpha_exact, r.kappa_exact), (Some(11), Some(11)));
        assert_eq!((r.messages, r.receivers, r.nominal_receivers), (48, 24, 48));
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<BoundsReport>(&json).unwrap(), r);
    }

    #[test]
    fn report_example3_second_demand_gap() {
        let (cfg, assoc) = example3();
        let d = d1(&[1, 2, 3, 4, 5, 1, 2, 3, 4], 9);
        let r = bounds_report(&cfg, &assoc, &d, OracleOptions::skip()).unwrap();
        assert_eq!((r.alpha_lower, r.kappa_upper), (8, 9));
        assert!(!r.bounds_meet);
        assert_eq!(r.alpha_exact, None);
        assert!(r.sandwich_holds());
    }

    #[test]
    fn report_tiny_system_runs_oracles() {
        let cfg = SystemConfig::new(2, 2, 2, Ratio::from_integer(1), 64).unwrap();
        let r = bounds_report(&cfg, &Association::from_profile(&[1, 1]), &DemandVector::distinct(2), OracleOptions::default())
            .unwrap();
        assert_eq!((r.alpha_exact, r.kappa_exact), (Some(1), Some(1)));
    }
}

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::improved::{eliminate_redundant, select_leaders};
use crate::error::Result;
use crate::model::{binomial, Association, DemandVector, SystemConfig};

/// Worst-case SC count `Σ_i L_i·C(Λ−i, t)` for a profile (sorted internally).
pub fn worst_case_count_for_profile(profile: &[usize], t: usize) -> u64 {
    let mut sorted = profile.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let caches = sorted.len() as i64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &l)| l as u64 * binomial(caches - 1 - i as i64, t as i64))
        .sum()
}

/// Worst-case SC transmission count for the configured `t`.
pub fn worst_case_count(cfg: &SystemConfig, assoc: &Association) -> Result<u64> {
    let t = cfg.require_t()?;
    assoc.check_against(cfg)?;
    Ok(worst_case_count_for_profile(&assoc.profile(), t))
}

/// One memory grid point of the worst-case rate curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatePoint {
    pub gamma: Ratio<u64>,
    pub t: usize,
    pub transmissions: u64,
    pub subfiles: u64,
}

impl RatePoint {
    pub fn rate(&self) -> Ratio<u64> {
        Ratio::new(self.transmissions, self.subfiles)
    }
}

/// Worst-case rate at `γ = t/Λ` for `t = 1..=Λ`. Only the association
/// profile of `cfg`/`assoc` matters; the configured memory is ignored.
pub fn worst_case_rate_points(cfg: &SystemConfig, assoc: &Association) -> Result<Vec<RatePoint>> {
    assoc.check_against(cfg)?;
    let caches = cfg.num_caches();
    let profile = assoc.profile();
    Ok((1..=caches)
        .map(|t| RatePoint {
            gamma: Ratio::new(t as u64, caches as u64),
            t,
            transmissions: worst_case_count_for_profile(&profile, t),
            subfiles: binomial(caches as i64, t as i64),
        })
        .collect())
}

/// Closed-form improved-scheme count evaluated term by term:
/// `Σ_j [C(Λ,t+1) − C(Λ−N_e(R'_j),t+1) − C(Λ−|R'_j|,t+1)]` over the
/// post-elimination rounds. Signed, since the subtracted terms can overlap.
pub fn predicted_count_thm3(cfg: &SystemConfig, assoc: &Association, d: &DemandVector) -> Result<i64> {
    let t = cfg.require_t()? as i64;
    assoc.check_against(cfg)?;
    d.check_against(cfg)?;
    let caches = cfg.num_caches() as i64;
    let elim = eliminate_redundant(assoc, d);
    Ok(elim
        .rounds()
        .iter()
        .map(|round| {
            let distinct = select_leaders(round, d).len() as i64;
            binomial(caches, t + 1) as i64
                - binomial(caches - distinct, t + 1) as i64
                - binomial(caches - round.len() as i64, t + 1) as i64
        })
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d1(files: &[usize], n: usize) -> DemandVector {
        DemandVector::new(files.iter().map(|f| f - 1).collect(), n).unwrap()
    }

    #[test]
    fn worst_case_examples() {
        assert_eq!(worst_case_count_for_profile(&[3, 2, 2, 1], 2), 11);
        assert_eq!(worst_case_count_for_profile(&[3, 2, 2, 1], 4), 0);
        assert_eq!(worst_case_count_for_profile(&[3, 3, 3], 1), 9);
        assert_eq!(worst_case_count_for_profile(&[1, 2, 2, 3], 2), 11);
        assert_eq!(worst_case_count_for_profile(&[1, 1], 1), 1);
        assert_eq!(worst_case_count_for_profile(&[1, 1, 1], 1), 3);
    }

    #[test]
    fn rate_points() {
        let cfg = SystemConfig::new(8, 8, 4, Ratio::from_integer(4), 384).unwrap();
        let pts = worst_case_rate_points(&cfg, &Association::from_profile(&[3, 2, 2, 1])).unwrap();
        assert_eq!(pts.len(), 4);
        assert_eq!(pts[1].gamma, Ratio::new(1, 2));
        assert_eq!(pts[1].rate(), Ratio::new(11, 6));
        assert_eq!(pts[3].rate(), Ratio::from_integer(0));

        let cfg = SystemConfig::new(9, 9, 3, Ratio::from_integer(3), 192).unwrap();
        let pts = worst_case_rate_points(&cfg, &Association::from_profile(&[3, 3, 3])).unwrap();
        assert_eq!(pts[0].rate(), Ratio::from_integer(3));
    }

    #[test]
    fn literal_count_values() {
        let ex3 = SystemConfig::new(9, 9, 3, Ratio::from_integer(3), 192).unwrap();
        let uniform = Association::from_profile(&[3, 3, 3]);
        let d = d1(&[1, 2, 2, 3, 4, 4, 5, 6, 6], 9);
        assert_eq!(predicted_count_thm3(&ex3, &uniform, &d).unwrap(), 6);

        let ex1 = SystemConfig::new(8, 8, 4, Ratio::from_integer(4), 384).unwrap();
        let profile = Association::from_profile(&[3, 2, 2, 1]);
        // round 3 has a single user, so both subtracted terms count Q ∌ λ1
        assert_eq!(predicted_count_thm3(&ex1, &profile, &DemandVector::distinct(8)).unwrap(), 10);
        let d = d1(&[1, 2, 3, 1, 1, 1, 1, 1], 8);
        assert_eq!(predicted_count_thm3(&ex1, &profile, &d).unwrap(), 7);
    }
}

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::delivery::{self, worst_case_count, Rate, Scheme};
use crate::error::{Error, Result};
use crate::model::{Association, DemandVector, SystemConfig};

pub const DEFAULT_SWEEP_LIMIT: u128 = 1_000_000;
/// Per-demand lengths are listed only for sweeps up to this size.
pub const MAX_LISTED_DEMANDS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum DemandSource {
    /// All `N^K` demand vectors, refused above `limit`.
    Exhaustive { limit: u128 },
    /// `count` uniform demand vectors.
    Sampled { count: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemandCount {
    /// 1-based files.
    pub demand: Vec<usize>,
    pub transmissions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub scheme: Scheme,
    pub source: DemandSource,
    pub demands: usize,
    pub min_transmissions: usize,
    pub max_transmissions: usize,
    pub mean_transmissions: f64,
    pub max_rate: Rate,
    pub mean_rate: f64,
    pub worst_case_count: u64,
    /// Transmission count → number of demands.
    pub histogram: BTreeMap<usize, usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_demand: Option<Vec<DemandCount>>,
}

fn all_demands(num_files: usize, num_users: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = (num_files as u128).pow(num_users as u32);
    (0..total).map(move |mut code| {
        let mut d = vec![0; num_users];
        for slot in d.iter_mut().rev() {
            *slot = (code % num_files as u128) as usize;
            code /= num_files as u128;
        }
        d
    })
}

/// Plan lengths of `scheme` over a set of demands.
pub fn demand_sweep(
    cfg: &SystemConfig,
    assoc: &Association,
    source: DemandSource,
    scheme: Scheme,
) -> Result<SweepReport> {
    let demands: Vec<Vec<usize>> = match source {
        DemandSource::Exhaustive { limit } => {
            let count = (cfg.num_files() as u128).checked_pow(cfg.num_users() as u32).unwrap_or(u128::MAX);
            if count > limit {
                return Err(Error::SweepLimit { count, limit });
            }
            all_demands(cfg.num_files(), cfg.num_users()).collect()
        }
        DemandSource::Sampled { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count)
                .map(|_| (0..cfg.num_users()).map(|_| rng.gen_range(0..cfg.num_files())).collect())
                .collect()
        }
    };
    if demands.is_empty() {
        return Err(Error::field("count", "a sweep needs at least one demand"));
    }
    let mut lengths = Vec::with_capacity(demands.len());
    for d in &demands {
        let dv = DemandVector::new(d.clone(), cfg.num_files())?;
        lengths.push(delivery::plan(scheme, cfg, assoc, &dv)?.len());
    }
    let subfiles = cfg.subfiles_per_file()?;
    let max = *lengths.iter().max().expect("non-empty");
    let total: usize = lengths.iter().sum();
    let mean = total as f64 / lengths.len() as f64;
    let mut histogram = BTreeMap::new();
    for &l in &lengths {
        *histogram.entry(l).or_insert(0) += 1;
    }
    let per_demand = (demands.len() <= MAX_LISTED_DEMANDS).then(|| {
        demands
            .iter()
            .zip(&lengths)
            .map(|(d, &l)| DemandCount {
                demand: d.iter().map(|f| f + 1).collect(),
                transmissions: l,
            })
            .collect()
    });
    Ok(SweepReport {
        scheme,
        source,
        demands: lengths.len(),
        min_transmissions: *lengths.iter().min().expect("non-empty"),
        max_transmissions: max,
        mean_transmissions: mean,
        max_rate: Rate::new(max, subfiles),
        mean_rate: mean / subfiles as f64,
        worst_case_count: worst_case_count(cfg, assoc)?,
        histogram,
        per_demand,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    #[test]
    fn tiny_exhaustive() {
        let cfg = SystemConfig::new(2, 2, 2, Ratio::from_integer(1), 64).unwrap();
        let assoc = Association::from_profile(&[1, 1]);
        let r = demand_sweep(&cfg, &assoc, DemandSource::Exhaustive { limit: 100 }, Scheme::ScWorst).unwrap();
        assert_eq!(r.demands, 4);
        assert_eq!(r.max_transmissions, 1);
        assert_eq!(r.per_demand.as_ref().unwrap()[0].demand, vec![1, 1]);
    }

    #[test]
    fn single_file_is_constant() {
        let cfg = SystemConfig::new(1, 4, 2, Ratio::new(1, 2), 64).unwrap();
        let assoc = Association::from_profile(&[2, 2]);
        let r = demand_sweep(&cfg, &assoc, DemandSource::Exhaustive { limit: 10 }, Scheme::Improved).unwrap();
        assert_eq!(r.demands, 1);
        let d = DemandVector::new(vec![0; 4], 1).unwrap();
        assert_eq!(r.max_transmissions, delivery::improved_delivery(&cfg, &assoc, &d).unwrap().len());
    }

    #[test]
    fn sampled_example1_mean_below_worst() {
        let cfg = SystemConfig::new(8, 8, 4, Ratio::from_integer(4), 384).unwrap();
        let assoc = Association::from_profile(&[3, 2, 2, 1]);
        let r = demand_sweep(&cfg, &assoc, DemandSource::Sampled { count: 1000, seed: 3 }, Scheme::Improved).unwrap();
        assert!(r.mean_rate <= 11.0 / 6.0);
        assert!(r.max_transmissions <= 11);
        assert!(r.per_demand.is_some());
    }

    #[test]
    fn limit_enforced() {
        let cfg = SystemConfig::new(8, 8, 4, Ratio::from_integer(4), 384).unwrap();
        let assoc = Association::from_profile(&[3, 2, 2, 1]);
        assert!(matches!(
            demand_sweep(&cfg, &assoc, DemandSource::Exhaustive { limit: 1000 }, Scheme::ScWorst),
            Err(Error::SweepLimit { count: 16_777_216, limit: 1000 })
        ));
    }
}

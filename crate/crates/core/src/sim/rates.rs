use std::fmt::Write as _;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::envelope::{convex_envelope, Envelope};
use crate::delivery::{improved_delivery, predicted_count_thm3, worst_case_rate_points, Scheme};
use crate::ecc::{length_lower_bound, lookup_code_length, shortened_hamming, repetition_length};
use crate::error::Result;
use crate::model::{binomial, Association, DemandVector, SystemConfig};

/// Coded length for `k` symbols at distance `d`: exact from the table, or
/// an interval between the lower bounds and a constructible code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodedLength {
    pub lower: usize,
    pub upper: usize,
}

impl CodedLength {
    pub fn for_symbols(k: usize, d: usize) -> Self {
        match lookup_code_length(k, d) {
            Ok(n) => CodedLength { lower: n, upper: n },
            Err(_) => {
                let upper = if d == 3 {
                    shortened_hamming(k).map_or(repetition_length(k, d), |c| c.n)
                } else {
                    repetition_length(k, d)
                };
                CodedLength {
                    lower: length_lower_bound(k, d),
                    upper,
                }
            }
        }
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }
}

/// Worst-case rate at one memory grid point, uncoded and with δ-error
/// correction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EccRatePoint {
    pub gamma: Ratio<u64>,
    pub t: usize,
    pub transmissions: u64,
    pub subfiles: u64,
    pub coded: CodedLength,
}

impl EccRatePoint {
    pub fn rate_uncoded(&self) -> Ratio<u64> {
        Ratio::new(self.transmissions, self.subfiles)
    }

    /// `(lower, upper)` coded rate.
    pub fn rate_coded(&self) -> (Ratio<u64>, Ratio<u64>) {
        (
            Ratio::new(self.coded.lower as u64, self.subfiles),
            Ratio::new(self.coded.upper as u64, self.subfiles),
        )
    }
}

/// `N_2[Σ L_i·C(Λ−i,t), 2δ+1] / C(Λ,t)` for `t = 1..=Λ`.
pub fn optimal_ecc_worst_rate(cfg: &SystemConfig, assoc: &Association, delta: usize) -> Result<Vec<EccRatePoint>> {
    Ok(worst_case_rate_points(cfg, assoc)?
        .into_iter()
        .map(|p| EccRatePoint {
            gamma: p.gamma,
            t: p.t,
            transmissions: p.transmissions,
            subfiles: p.subfiles,
            coded: CodedLength::for_symbols(p.transmissions as usize, 2 * delta + 1),
        })
        .collect())
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub gamma: Ratio<u64>,
    pub t: usize,
    pub scheme: Scheme,
    pub delta: usize,
    pub transmissions: u64,
    pub subfiles: u64,
    pub coded: CodedLength,
    /// Closed-form improved-scheme count, improved rows only.
    pub predicted: Option<i64>,
}

/// Rate rows per memory grid point plus the envelopes of each series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateTable {
    pub rows: Vec<RateRow>,
    pub envelopes: Vec<(Scheme, String, Envelope)>,
}

fn fraction(num: u64, den: u64) -> String {
    format!("{num}/{den}")
}

fn decimal(r: Ratio<u64>) -> String {
    let v = *r.numer() as f64 / *r.denom() as f64;
    let s = format!("{v:.6}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Worst-case rows for `t = 1..=Λ`; with a demand, also improved-scheme rows
/// with the plan length and the closed-form prediction.
pub fn rate_table(
    cfg: &SystemConfig,
    assoc: &Association,
    demand: Option<&DemandVector>,
    delta: usize,
) -> Result<RateTable> {
    let d_code = 2 * delta + 1;
    let mut rows: Vec<RateRow> = optimal_ecc_worst_rate(cfg, assoc, delta)?
        .into_iter()
        .map(|p| RateRow {
            gamma: p.gamma,
            t: p.t,
            scheme: Scheme::ScWorst,
            delta,
            transmissions: p.transmissions,
            subfiles: p.subfiles,
            coded: p.coded,
            predicted: None,
        })
        .collect();
    if let Some(d) = demand {
        let caches = cfg.num_caches();
        for t in 1..=caches {
            let point = SystemConfig::at_grid_point(cfg.num_files(), cfg.num_users(), caches, t, 1)?;
            let count = improved_delivery(&point, assoc, d)?.len() as u64;
            rows.push(RateRow {
                gamma: Ratio::new(t as u64, caches as u64),
                t,
                scheme: Scheme::Improved,
                delta,
                transmissions: count,
                subfiles: binomial(caches as i64, t as i64),
                coded: CodedLength::for_symbols(count as usize, d_code),
                predicted: Some(predicted_count_thm3(&point, assoc, d)?),
            });
        }
    }
    let mut envelopes = Vec::new();
    for scheme in [Scheme::ScWorst, Scheme::Improved] {
        let series: Vec<&RateRow> = rows.iter().filter(|r| r.scheme == scheme).collect();
        if series.is_empty() {
            continue;
        }
        let as_point = |r: &RateRow, n: u64| (*r.gamma.numer() as f64 / *r.gamma.denom() as f64, n as f64 / r.subfiles as f64);
        let uncoded: Vec<(f64, f64)> = series.iter().map(|r| as_point(r, r.transmissions)).collect();
        let coded: Vec<(f64, f64)> = series.iter().map(|r| as_point(r, r.coded.upper as u64)).collect();
        envelopes.push((scheme, "uncoded".into(), convex_envelope(&uncoded)?));
        envelopes.push((scheme, "coded".into(), convex_envelope(&coded)?));
    }
    Ok(RateTable { rows, envelopes })
}

impl RateTable {
    /// CSV: one row per grid point and scheme, then one commented block of
    /// envelope vertices per series. Coded rates from a table miss are the
    /// lower bound, with `rate_coded_upper` from a constructible code.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "gamma,rate_uncoded,rate_coded,scheme,delta,t,transmissions,coded_length,rate_coded_upper,predicted_transmissions\n",
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                decimal(r.gamma),
                fraction(r.transmissions, r.subfiles),
                fraction(r.coded.lower as u64, r.subfiles),
                r.scheme,
                r.delta,
                r.t,
                r.transmissions,
                if r.coded.is_exact() { r.coded.lower.to_string() } else { String::new() },
                fraction(r.coded.upper as u64, r.subfiles),
                r.predicted.map_or(String::new(), |p| p.to_string()),
            );
        }
        for (scheme, series, env) in &self.envelopes {
            let _ = writeln!(out, "# envelope {scheme} {series}");
            for (x, y) in &env.vertices {
                let _ = writeln!(out, "# {x:.6},{y:.6}");
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example1() -> (SystemConfig, Association) {
        (
            SystemConfig::new(8, 8, 4, Ratio::from_integer(4), 384).unwrap(),
            Association::from_profile(&[3, 2, 2, 1]),
        )
    }

    #[test]
    fn ecc_rates() {
        let (cfg, assoc) = example1();
        let pts = optimal_ecc_worst_rate(&cfg, &assoc, 1).unwrap();
        assert_eq!(pts[1].rate_coded(), (Ratio::new(15, 6), Ratio::new(15, 6)));
        assert_eq!(pts[1].rate_uncoded(), Ratio::new(11, 6));
        let plain = optimal_ecc_worst_rate(&cfg, &assoc, 0).unwrap();
        for (p, w) in plain.iter().zip(worst_case_rate_points(&cfg, &assoc).unwrap()) {
            assert_eq!(p.rate_coded().0, w.rate());
        }
        let cfg = SystemConfig::new(9, 9, 3, Ratio::from_integer(3), 192).unwrap();
        let pts = optimal_ecc_worst_rate(&cfg, &Association::from_profile(&[3, 3, 3]), 1).unwrap();
        assert_eq!(pts[0].rate_coded().0, Ratio::new(13, 3));
    }

    #[test]
    fn table_miss_gives_interval() {
        let c = CodedLength::for_symbols(15, 7);
        assert!(!c.is_exact());
        assert!(c.lower < c.upper);
        assert_eq!(c.upper, 105);
    }

    #[test]
    fn csv_rows_for_motivating_demand() {
        let (cfg, assoc) = example1();
        let d = DemandVector::new(vec![0, 1, 2, 0, 0, 0, 0, 0], 8).unwrap();
        let table = rate_table(&cfg, &assoc, Some(&d), 1).unwrap();
        let csv = table.to_csv();
        assert!(csv.starts_with("gamma,rate_uncoded,rate_coded,scheme,delta"));
        assert!(csv.contains("\n0.5,11/6,15/6,sc-worst,1,2,11,15,15/6,\n"));
        assert!(csv.contains("\n0.5,9/6,13/6,improved,1,2,9,13,13/6,7\n"));
        assert!(csv.contains("# envelope sc-worst uncoded"));
        let zero = rate_table(&cfg, &assoc, None, 0).unwrap();
        assert!(zero.rows.iter().all(|r| r.coded.lower as u64 == r.transmissions));
    }
}

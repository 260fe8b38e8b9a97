use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::delivery::{self, Rate, Scheme};
use crate::ecc::{build_code, concat_encode, patterns, syndrome_decode};
use crate::error::{Error, Result};
use crate::indexcoding::{bounds_report, build_icsi, receiver_decode, BoundsReport, OracleOptions};
use crate::model::{sc_place, Association, DemandVector, SystemConfig};
use crate::packet::{self, Packet};

/// Which corruption patterns a session exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum ErrorMode {
    /// Every set of 1..=δ packet positions.
    Exhaustive,
    /// `count` patterns, each of a uniformly drawn weight in 1..=δ.
    Random { count: usize },
}

/// Broadcast channel corrupting up to `delta` packets per delivery. Each
/// corrupted packet is XORed with a random non-zero mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelConfig {
    pub delta: usize,
    pub errors: ErrorMode,
}

impl ChannelConfig {
    pub fn exhaustive(delta: usize) -> Self {
        ChannelConfig {
            delta,
            errors: ErrorMode::Exhaustive,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeSummary {
    pub n: usize,
    pub k: usize,
    pub d: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserStatus {
    /// 1-based.
    pub user: usize,
    /// 1-based.
    pub file: usize,
    pub decoded: bool,
    pub failed_patterns: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternFailure {
    /// Corrupted packet positions, 1-based; empty for the clean run.
    pub positions: Vec<usize>,
    pub reason: String,
}

/// Outcome of one end-to-end session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionReport {
    pub scheme: Scheme,
    pub seed: u64,
    pub delta: usize,
    pub code_delta: usize,
    /// Uncoded transmission count `κ`.
    pub transmissions: usize,
    pub code: CodeSummary,
    pub coded_length: usize,
    pub subfiles_per_file: usize,
    pub rate_uncoded: Rate,
    pub rate: Rate,
    pub rate_value: f64,
    pub bounds: BoundsReport,
    pub baseline_ok: bool,
    /// Corruption patterns tested, not counting the clean baseline.
    pub patterns_tested: usize,
    pub patterns_failed: usize,
    pub users: Vec<UserStatus>,
    /// Up to [`MAX_LISTED_FAILURES`] failing patterns, in test order.
    pub failures: Vec<PatternFailure>,
    pub all_decoded: bool,
}

impl SessionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub const MAX_LISTED_FAILURES: usize = 20;

fn corruption_patterns(n: usize, channel: &ChannelConfig, rng: &mut ChaCha8Rng) -> Vec<u64> {
    if channel.delta == 0 || n == 0 {
        return Vec::new();
    }
    match channel.errors {
        ErrorMode::Exhaustive => (1..=channel.delta).flat_map(|w| patterns(n, w)).collect(),
        ErrorMode::Random { count } => (0..count)
            .map(|_| {
                let w = rng.gen_range(1..=channel.delta);
                rand::seq::index::sample(rng, n, w)
                    .into_iter()
                    .fold(0u64, |acc, j| acc | 1 << j)
            })
            .collect(),
    }
}

fn corrupt(packets: &mut [Packet], positions: u64, rng: &mut ChaCha8Rng) {
    for (j, p) in packets.iter_mut().enumerate() {
        if positions >> j & 1 == 1 {
            let len = p.len();
            let mut mask = packet::random(len, rng);
            if mask.not_any() {
                mask.set(rng.gen_range(0..len), true);
            }
            packet::xor_into(p, &mask);
        }
    }
}

/// [`run_session_with_code`] with the code sized for the channel's δ.
pub fn run_session(
    cfg: &SystemConfig,
    assoc: &Association,
    d: &DemandVector,
    scheme: Scheme,
    channel: ChannelConfig,
    seed: u64,
) -> Result<SessionReport> {
    run_session_with_code(cfg, assoc, d, scheme, channel, channel.delta, seed)
}

/// Places random files, plans, encodes with an `[n, κ, 2·code_delta+1]`
/// code, corrupts, corrects, index-decodes at every receiver and compares
/// every user's reassembled file with the original.
pub fn run_session_with_code(
    cfg: &SystemConfig,
    assoc: &Association,
    d: &DemandVector,
    scheme: Scheme,
    channel: ChannelConfig,
    code_delta: usize,
    seed: u64,
) -> Result<SessionReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let files: Vec<Packet> = (0..cfg.num_files())
        .map(|_| packet::random(cfg.file_size_bits(), &mut rng))
        .collect();
    let placement = sc_place(cfg, Some(&files))?;
    let plan = delivery::plan(scheme, cfg, assoc, d)?;
    let kappa = plan.len();
    let code = build_code(kappa, 2 * code_delta + 1)?;
    if channel.delta > code.n {
        return Err(Error::field(
            "delta",
            format!("δ = {} exceeds the coded length {}", channel.delta, code.n),
        ));
    }
    let symbols = plan.encode(&placement)?;
    let coded = concat_encode(&symbols, &code)?;
    let inst = build_icsi(cfg, &placement, assoc, d)?;
    let rows = plan.coding_rows(&inst.index);
    let cache_of = assoc.cache_of_users();
    let per_file = inst.index.per_file;

    let mut user_failures = vec![0usize; cfg.num_users()];
    let mut attempt = |received: &[Packet]| -> std::result::Result<(), String> {
        let recovered = syndrome_decode(received, &code).map_err(|e| e.to_string())?;
        let mut decoded: Vec<Vec<Option<Packet>>> = vec![vec![None; per_file]; cfg.num_users()];
        for (i, r) in inst.receivers.iter().enumerate() {
            if let Ok(p) = receiver_decode(&inst, &rows, &recovered, &placement, i) {
                decoded[r.user][inst.index.subfile(r.wants).set.colex_rank()] = Some(p);
            }
        }
        let mut failed = Vec::new();
        for user in 0..cfg.num_users() {
            let file = d.file_of(user);
            let mut rebuilt = Packet::new();
            let mut complete = true;
            for (rank, slot) in decoded[user].iter().enumerate() {
                let id = inst.index.subfile(file * per_file + rank);
                let part = if id.set.contains(cache_of[user]) {
                    placement.payload(id)
                } else {
                    slot.as_ref()
                };
                match part {
                    Some(p) => rebuilt.extend_from_bitslice(p),
                    None => complete = false,
                }
            }
            if !complete || rebuilt != files[file] {
                user_failures[user] += 1;
                failed.push(user + 1);
            }
        }
        if failed.is_empty() {
            Ok(())
        } else {
            Err(format!("users {failed:?} did not recover their files"))
        }
    };

    let mut failures = Vec::new();
    let baseline = attempt(&coded);
    let baseline_ok = baseline.is_ok();
    if let Err(reason) = baseline {
        failures.push(PatternFailure {
            positions: Vec::new(),
            reason,
        });
    }
    let tested = corruption_patterns(code.n, &channel, &mut rng);
    let mut patterns_failed = 0;
    for &positions in &tested {
        let mut rx = coded.clone();
        corrupt(&mut rx, positions, &mut rng);
        if let Err(reason) = attempt(&rx) {
            patterns_failed += 1;
            if failures.len() < MAX_LISTED_FAILURES {
                failures.push(PatternFailure {
                    positions: (0..code.n).filter(|j| positions >> j & 1 == 1).map(|j| j + 1).collect(),
                    reason,
                });
            }
        }
    }

    let users = (0..cfg.num_users())
        .map(|u| UserStatus {
            user: u + 1,
            file: d.file_of(u) + 1,
            decoded: user_failures[u] == 0,
            failed_patterns: user_failures[u],
        })
        .collect();
    let rate = Rate::new(code.n, per_file);
    Ok(SessionReport {
        scheme,
        seed,
        delta: channel.delta,
        code_delta,
        transmissions: kappa,
        code: CodeSummary {
            n: code.n,
            k: code.k,
            d: code.d,
        },
        coded_length: code.n,
        subfiles_per_file: per_file,
        rate_uncoded: Rate::new(kappa, per_file),
        rate,
        rate_value: rate.value(),
        bounds: bounds_report(cfg, assoc, d, OracleOptions::skip())?,
        baseline_ok,
        patterns_tested: tested.len(),
        patterns_failed,
        users,
        failures,
        all_decoded: baseline_ok && patterns_failed == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    fn example2() -> (SystemConfig, Association) {
        (
            SystemConfig::new(8, 8, 4, Ratio::from_integer(4), 384).unwrap(),
            Association::from_profile(&[3, 2, 2, 1]),
        )
    }

    #[test]
    fn example2_single_errors() {
        let (cfg, assoc) = example2();
        let r = run_session(&cfg, &assoc, &DemandVector::distinct(8), Scheme::ScWorst, ChannelConfig::exhaustive(1), 5)
            .unwrap();
        assert_eq!((r.transmissions, r.coded_length), (11, 15));
        assert_eq!(r.rate.to_string(), "15/6");
        assert_eq!(r.patterns_tested, 15);
        assert!(r.all_decoded, "{:?}", r.failures);
        assert!(r.users.iter().all(|u| u.decoded));
    }

    #[test]
    fn zero_delta_uses_identity() {
        let (cfg, assoc) = example2();
        let r = run_session(&cfg, &assoc, &DemandVector::distinct(8), Scheme::ScWorst, ChannelConfig::exhaustive(0), 1)
            .unwrap();
        assert_eq!(r.coded_length, r.transmissions);
        assert_eq!(r.patterns_tested, 0);
        assert!(r.all_decoded);
    }

    #[test]
    fn mismatched_code_fails_visibly() {
        let (cfg, assoc) = example2();
        let r = run_session_with_code(
            &cfg,
            &assoc,
            &DemandVector::distinct(8),
            Scheme::ScWorst,
            ChannelConfig::exhaustive(1),
            0,
            2,
        )
        .unwrap();
        assert!(r.baseline_ok);
        assert_eq!(r.patterns_failed, 11);
        assert!(!r.all_decoded);
        assert!(r.users.iter().any(|u| !u.decoded));
    }

    #[test]
    fn eliminated_users_recover_via_proxies() {
        let (cfg, assoc) = example2();
        let d = DemandVector::new(vec![0, 1, 2, 0, 0, 0, 0, 0], 8).unwrap();
        let r = run_session(&cfg, &assoc, &d, Scheme::Improved, ChannelConfig::exhaustive(1), 9).unwrap();
        assert_eq!(r.transmissions, 9);
        assert_eq!(r.coded_length, 13);
        assert!(r.all_decoded);
    }

    #[test]
    fn deterministic_given_seed() {
        let (cfg, assoc) = example2();
        let channel = ChannelConfig {
            delta: 1,
            errors: ErrorMode::Random { count: 5 },
        };
        let a = run_session(&cfg, &assoc, &DemandVector::distinct(8), Scheme::ScWorst, channel, 42).unwrap();
        let b = run_session(&cfg, &assoc, &DemandVector::distinct(8), Scheme::ScWorst, channel, 42).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn delta_above_length_is_rejected() {
        let cfg = SystemConfig::new(2, 2, 2, Ratio::from_integer(2), 64).unwrap();
        let assoc = Association::from_profile(&[1, 1]);
        let err = run_session(&cfg, &assoc, &DemandVector::distinct(2), Scheme::ScWorst, ChannelConfig::exhaustive(1), 0)
            .unwrap_err();
        assert!(matches!(err, Error::InvalidField { field: "delta", .. }));
    }
}

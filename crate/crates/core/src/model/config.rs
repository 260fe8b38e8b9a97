//! System parameters, user-to-cache association and demand vectors, plus the
//! JSON configuration object they are read from.
//!
//! Users, files and caches are 0-based inside the crate. Every external
//! format (JSON, CSV, log lines) uses 1-based labels.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::combinatorics::{choose, MAX_CACHES};
use crate::error::{Error, Result};

/// Global parameters of a shared-cache system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemConfig {
    num_files: usize,
    num_users: usize,
    num_caches: usize,
    cache_memory: Ratio<u64>,
    file_size_bits: usize,
}

impl SystemConfig {
    pub fn new(
        num_files: usize,
        num_users: usize,
        num_caches: usize,
        cache_memory: Ratio<u64>,
        file_size_bits: usize,
    ) -> Result<Self> {
        if num_files == 0 {
            return Err(Error::field("num_files", "must be positive"));
        }
        if num_users == 0 {
            return Err(Error::field("num_users", "must be positive"));
        }
        if num_caches == 0 {
            return Err(Error::field("num_caches", "must be positive"));
        }
        if num_caches > num_users {
            return Err(Error::field(
                "num_caches",
                format!("{num_caches} caches exceed {num_users} users"),
            ));
        }
        if num_caches > MAX_CACHES {
            return Err(Error::field(
                "num_caches",
                format!("at most {MAX_CACHES} caches are supported"),
            ));
        }
        if cache_memory > Ratio::from_integer(num_files as u64) {
            return Err(Error::field(
                "cache_memory",
                format!("M = {cache_memory} exceeds N = {num_files}"),
            ));
        }
        if file_size_bits == 0 {
            return Err(Error::field("file_size_bits", "must be positive"));
        }
        let cfg = SystemConfig {
            num_files,
            num_users,
            num_caches,
            cache_memory,
            file_size_bits,
        };
        if let Some(t) = cfg.t() {
            let parts = choose(num_caches, t) as usize;
            if !file_size_bits.is_multiple_of(parts) {
                return Err(Error::field(
                    "file_size_bits",
                    format!("F = {file_size_bits} is not divisible by C({num_caches},{t}) = {parts}"),
                ));
            }
        }
        Ok(cfg)
    }

    /// Config on the memory grid point `t`, with the smallest valid file size
    /// times `bits_per_subfile`.
    pub fn at_grid_point(
        num_files: usize,
        num_users: usize,
        num_caches: usize,
        t: usize,
        bits_per_subfile: usize,
    ) -> Result<Self> {
        if t > num_caches {
            return Err(Error::field("cache_memory", format!("t = {t} exceeds Λ = {num_caches}")));
        }
        let memory = Ratio::new((t * num_files) as u64, num_caches as u64);
        let parts = choose(num_caches, t) as usize;
        Self::new(num_files, num_users, num_caches, memory, parts * bits_per_subfile)
    }

    pub fn num_files(&self) -> usize {
        self.num_files
    }

    pub fn num_users(&self) -> usize {
        self.num_users
    }

    pub fn num_caches(&self) -> usize {
        self.num_caches
    }

    pub fn cache_memory(&self) -> Ratio<u64> {
        self.cache_memory
    }

    pub fn file_size_bits(&self) -> usize {
        self.file_size_bits
    }

    /// γ = M / N.
    pub fn gamma(&self) -> Ratio<u64> {
        self.cache_memory / Ratio::from_integer(self.num_files as u64)
    }

    /// Λγ as an exact rational.
    pub fn t_exact(&self) -> Ratio<u64> {
        self.gamma() * Ratio::from_integer(self.num_caches as u64)
    }

    /// Λγ when it is an integer.
    pub fn t(&self) -> Option<usize> {
        let t = self.t_exact();
        t.is_integer().then(|| t.to_integer() as usize)
    }

    /// Λγ, or an error when a scheme cannot run at this memory.
    pub fn require_t(&self) -> Result<usize> {
        self.t().ok_or(Error::NonIntegralT { t: self.t_exact() })
    }

    /// C(Λ, t), the number of subfiles per file.
    pub fn subfiles_per_file(&self) -> Result<usize> {
        Ok(choose(self.num_caches, self.require_t()?) as usize)
    }

    pub fn subfile_bits(&self) -> Result<usize> {
        Ok(self.file_size_bits / self.subfiles_per_file()?)
    }

    pub fn num_messages(&self) -> Result<usize> {
        Ok(self.num_files * self.subfiles_per_file()?)
    }
}

/// Partition of the users among the caches.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Association {
    groups: Vec<Vec<usize>>,
}

impl Association {
    /// Validates that `groups` (one ordered user list per cache) partitions
    /// `{0, .., num_users-1}`.
    pub fn new(groups: Vec<Vec<usize>>, num_users: usize) -> Result<Self> {
        let mut seen = vec![false; num_users];
        for group in &groups {
            for &u in group {
                if u >= num_users {
                    return Err(Error::field(
                        "association",
                        format!("user {} is outside 1..={num_users}", u + 1),
                    ));
                }
                if std::mem::replace(&mut seen[u], true) {
                    return Err(Error::field(
                        "association",
                        format!("user {} appears twice", u + 1),
                    ));
                }
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::field(
                "association",
                format!("user {} is not assigned to a cache", missing + 1),
            ));
        }
        Ok(Association { groups })
    }

    /// Consecutive users per cache: cache 0 gets the first `profile[0]` users
    /// and so on.
    pub fn from_profile(profile: &[usize]) -> Self {
        let mut next = 0;
        let groups = profile
            .iter()
            .map(|&len| {
                let g: Vec<usize> = (next..next + len).collect();
                next += len;
                g
            })
            .collect();
        Association { groups }
    }

    pub fn num_caches(&self) -> usize {
        self.groups.len()
    }

    pub fn num_users(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn group(&self, cache: usize) -> &[usize] {
        &self.groups[cache]
    }

    /// Association profile `L_λ = |U_λ|`.
    pub fn profile(&self) -> Vec<usize> {
        self.groups.iter().map(Vec::len).collect()
    }

    pub fn is_canonical(&self) -> bool {
        self.groups.windows(2).all(|w| w[0].len() >= w[1].len())
    }

    /// Cache each user is attached to, indexed by user.
    pub fn cache_of_users(&self) -> Vec<usize> {
        let mut out = vec![usize::MAX; self.num_users()];
        for (cache, group) in self.groups.iter().enumerate() {
            for &u in group {
                out[u] = cache;
            }
        }
        out
    }

    /// Sorts caches by occupancy, largest first (stable).
    pub fn canonicalize(&self) -> Relabeled {
        let mut order: Vec<usize> = (0..self.groups.len()).collect();
        order.sort_by_key(|&c| std::cmp::Reverse(self.groups[c].len()));
        let groups = order.iter().map(|&c| self.groups[c].clone()).collect();
        Relabeled {
            association: Association { groups },
            to_original: order,
        }
    }

    pub fn check_against(&self, cfg: &SystemConfig) -> Result<()> {
        if self.num_caches() != cfg.num_caches() {
            return Err(Error::field(
                "association",
                format!(
                    "{} groups given for {} caches",
                    self.num_caches(),
                    cfg.num_caches()
                ),
            ));
        }
        if self.num_users() != cfg.num_users() {
            return Err(Error::field(
                "association",
                format!("{} users assigned, expected {}", self.num_users(), cfg.num_users()),
            ));
        }
        Ok(())
    }
}

/// A canonical association together with the cache relabeling that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relabeled {
    pub association: Association,
    /// `to_original[canonical cache] = original cache`.
    pub to_original: Vec<usize>,
}

/// Requested file per user.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DemandVector(Vec<usize>);

impl DemandVector {
    pub fn new(demands: Vec<usize>, num_files: usize) -> Result<Self> {
        if let Some((user, &file)) = demands.iter().enumerate().find(|(_, &f)| f >= num_files) {
            return Err(Error::DemandOutOfRange {
                user: user + 1,
                file: file + 1,
                num_files,
            });
        }
        Ok(DemandVector(demands))
    }

    /// `d_u = u`, the all-distinct demand (requires `N >= K`).
    pub fn distinct(num_users: usize) -> Self {
        DemandVector((0..num_users).collect())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn file_of(&self, user: usize) -> usize {
        self.0[user]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `N_e(d)`, the number of distinct requested files.
    pub fn distinct_count(&self) -> usize {
        self.0.iter().collect::<BTreeSet<_>>().len()
    }

    pub fn check_against(&self, cfg: &SystemConfig) -> Result<()> {
        if self.0.len() != cfg.num_users() {
            return Err(Error::field(
                "demands",
                format!("{} demands given for {} users", self.0.len(), cfg.num_users()),
            ));
        }
        DemandVector::new(self.0.clone(), cfg.num_files()).map(|_| ())
    }
}

impl fmt::Display for DemandVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", d + 1)?;
        }
        write!(f, ")")
    }
}

/// Cache memory as written in a config: a JSON number or a `"p/q"` string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MemorySpec {
    Number(f64),
    Fraction(String),
}

impl MemorySpec {
    pub fn to_ratio(&self) -> Result<Ratio<u64>> {
        match self {
            MemorySpec::Number(x) => {
                if !x.is_finite() || *x < 0.0 {
                    return Err(Error::field("cache_memory", format!("{x} is not a valid memory size")));
                }
                if x.fract() == 0.0 {
                    return Ok(Ratio::from_integer(*x as u64));
                }
                // exact for dyadic and short decimal inputs
                for den in 1..=1_000_000u64 {
                    let num = x * den as f64;
                    if (num - num.round()).abs() < 1e-9 {
                        return Ok(Ratio::new(num.round() as u64, den));
                    }
                }
                Err(Error::field("cache_memory", format!("{x} has no short rational form; use \"p/q\"")))
            }
            MemorySpec::Fraction(s) => parse_fraction(s)
                .ok_or_else(|| Error::field("cache_memory", format!("cannot parse {s:?} as p/q"))),
        }
    }
}

fn parse_fraction(s: &str) -> Option<Ratio<u64>> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: u64 = p.trim().parse().ok()?;
            let q: u64 = q.trim().parse().ok()?;
            (q != 0).then(|| Ratio::new(p, q))
        }
        None => s.parse::<u64>().ok().map(Ratio::from_integer),
    }
}

impl From<Ratio<u64>> for MemorySpec {
    fn from(r: Ratio<u64>) -> Self {
        if r.is_integer() {
            MemorySpec::Number(r.to_integer() as f64)
        } else {
            MemorySpec::Fraction(format!("{}/{}", r.numer(), r.denom()))
        }
    }
}

/// The JSON config object. All labels are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub num_files: usize,
    pub num_users: usize,
    pub num_caches: usize,
    pub cache_memory: MemorySpec,
    /// Defaults to 64 bits per subfile.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file_size_bits: Option<usize>,
    pub association: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub demands: Option<Vec<usize>>,
}

/// Validated contents of a [`SystemSpec`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct System {
    pub config: SystemConfig,
    pub association: Association,
    pub demands: Option<DemandVector>,
}

impl System {
    pub fn demands(&self) -> Result<&DemandVector> {
        self.demands
            .as_ref()
            .ok_or_else(|| Error::field("demands", "required for this operation"))
    }
}

/// Bits per subfile when `file_size_bits` is omitted.
pub const DEFAULT_SUBFILE_BITS: usize = 64;

impl SystemSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::field("config", e.to_string()))
    }

    pub fn validate(&self) -> Result<System> {
        let memory = self.cache_memory.to_ratio()?;
        let file_size_bits = match self.file_size_bits {
            Some(f) => f,
            None => {
                if self.num_caches == 0 || self.num_files == 0 {
                    DEFAULT_SUBFILE_BITS
                } else {
                    let t = memory * Ratio::from_integer(self.num_caches as u64)
                        / Ratio::from_integer(self.num_files as u64);
                    if t.is_integer() && t.to_integer() as usize <= self.num_caches {
                        choose(self.num_caches, t.to_integer() as usize) as usize * DEFAULT_SUBFILE_BITS
                    } else {
                        DEFAULT_SUBFILE_BITS
                    }
                }
            }
        };
        let config = SystemConfig::new(
            self.num_files,
            self.num_users,
            self.num_caches,
            memory,
            file_size_bits,
        )?;
        let groups = self
            .association
            .iter()
            .map(|g| {
                g.iter()
                    .map(|&u| {
                        u.checked_sub(1)
                            .ok_or_else(|| Error::field("association", "user labels start at 1"))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let association = Association::new(groups, self.num_users)?;
        association.check_against(&config)?;
        let demands = match &self.demands {
            None => None,
            Some(d) => {
                let zero_based = d
                    .iter()
                    .map(|&f| f.checked_sub(1).ok_or_else(|| Error::field("demands", "file labels start at 1")))
                    .collect::<Result<Vec<_>>>()?;
                let dv = DemandVector::new(zero_based, self.num_files)?;
                dv.check_against(&config)?;
                Some(dv)
            }
        };
        Ok(System {
            config,
            association,
            demands,
        })
    }

    /// Builds the wire form of an already-validated system.
    pub fn from_system(system: &System) -> Self {
        let cfg = &system.config;
        SystemSpec {
            num_files: cfg.num_files(),
            num_users: cfg.num_users(),
            num_caches: cfg.num_caches(),
            cache_memory: cfg.cache_memory().into(),
            file_size_bits: Some(cfg.file_size_bits()),
            association: system
                .association
                .groups()
                .iter()
                .map(|g| g.iter().map(|u| u + 1).collect())
                .collect(),
            demands: system
                .demands
                .as_ref()
                .map(|d| d.as_slice().iter().map(|f| f + 1).collect()),
        }
    }
}

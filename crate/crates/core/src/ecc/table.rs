use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::error::{Error, Result};

const TABLE_CSV: &str = include_str!("../../assets/code_lengths.csv");

/// Embedded table of `N_2[k,d]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeLengthTable {
    pub version: u32,
    entries: BTreeMap<(usize, usize), usize>,
}

impl CodeLengthTable {
    pub fn parse(text: &str) -> Result<Self> {
        let mut version = 0;
        let mut entries = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if let Some(v) = line.strip_prefix("# table-version:") {
                version = v.trim().parse().map_err(|_| Error::field("table-version", v.trim().to_string()))?;
                continue;
            }
            if line.is_empty() || line.starts_with('#') || line == "k,d,n" {
                continue;
            }
            let nums: Vec<usize> = line
                .split(',')
                .map(|s| s.trim().parse())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::field("code table", format!("bad row {}: {line}", lineno + 1)))?;
            let [k, d, n] = nums[..] else {
                return Err(Error::field("code table", format!("bad row {}: {line}", lineno + 1)));
            };
            entries.insert((k, d), n);
        }
        Ok(CodeLengthTable { version, entries })
    }

    /// The table shipped with the crate.
    pub fn embedded() -> &'static CodeLengthTable {
        static TABLE: OnceLock<CodeLengthTable> = OnceLock::new();
        TABLE.get_or_init(|| CodeLengthTable::parse(TABLE_CSV).expect("embedded table parses"))
    }

    /// `N_2[k,d]`, or `None` on a miss. `d = 1` and `k ≤ 1` are exact.
    pub fn get(&self, k: usize, d: usize) -> Option<usize> {
        match (k, d) {
            (0, _) => Some(0),
            (_, 0 | 1) => Some(k),
            (1, _) => Some(d),
            _ => self.entries.get(&(k, d)).copied(),
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.entries.iter().map(|(&(k, d), &n)| (k, d, n))
    }
}

/// `N_2[k,d]` from the embedded table.
pub fn lookup_code_length(k: usize, d: usize) -> Result<usize> {
    CodeLengthTable::embedded().get(k, d).ok_or_else(|| Error::NoCode {
        k,
        d,
        hint: format!(
            " in the length table; repetition gives n = {} and the lower bound is {}",
            repetition_length(k, d),
            length_lower_bound(k, d)
        ),
    })
}

/// Griesmer bound `Σ_{i<k} ⌈d/2^i⌉`.
pub fn griesmer_bound(k: usize, d: usize) -> usize {
    (0..k).map(|i| d.div_ceil(1usize << i.min(63))).sum()
}

/// Smallest `n` with `2^(n−k) ≥ Σ_{w≤⌊(d−1)/2⌋} C(n,w)`.
pub fn sphere_packing_bound(k: usize, d: usize) -> usize {
    let radius = d.saturating_sub(1) / 2;
    let mut n = k;
    loop {
        let ball: u128 = (0..=radius.min(n)).map(|w| crate::model::binomial(n as i64, w as i64) as u128).sum();
        let redundancy = n - k;
        if redundancy >= 127 || (1u128 << redundancy) >= ball {
            return n;
        }
        n += 1;
    }
}

pub fn length_lower_bound(k: usize, d: usize) -> usize {
    if k == 0 {
        return 0;
    }
    griesmer_bound(k, d).max(sphere_packing_bound(k, d))
}

/// Length of the code repeating every symbol `d` times.
pub fn repetition_length(k: usize, d: usize) -> usize {
    k * d.max(1)
}

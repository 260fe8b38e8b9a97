use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::table::lookup_code_length;
use crate::error::{Error, Result};
use crate::packet::{self, Packet};

/// Codewords are packed into `u64` with position `j` at bit `j`.
pub const MAX_LENGTH: usize = 64;
/// Largest syndrome table built eagerly.
pub const MAX_TABLE_ENTRIES: usize = 1 << 20;
/// Largest length for which the minimum distance is checked exhaustively.
pub const DISTANCE_CHECK_LENGTH: usize = 20;

/// Systematic binary linear code `[n, k, d]` with `G = [I_k | P]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearCode {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    generator: Vec<u64>,
    parity_check: Vec<u64>,
    syndrome_table: HashMap<u64, u64>,
}

fn parity(x: u64) -> bool {
    x.count_ones() & 1 == 1
}

impl LinearCode {
    /// Builds the code from the parity part `P` (`k` rows of `n − k` bits).
    fn systematic(k: usize, redundancy: usize, d: usize, p_rows: &[u64]) -> Result<Self> {
        let n = k + redundancy;
        if n > MAX_LENGTH {
            return Err(Error::NoCode {
                k,
                d,
                hint: format!(": length {n} exceeds {MAX_LENGTH}"),
            });
        }
        let generator: Vec<u64> = (0..k).map(|i| 1 << i | p_rows[i] << k).collect();
        let parity_check: Vec<u64> = (0..redundancy)
            .map(|r| {
                let info = (0..k).filter(|&i| p_rows[i] >> r & 1 == 1).fold(0u64, |a, i| a | 1 << i);
                info | 1 << (k + r)
            })
            .collect();
        let mut code = LinearCode {
            n,
            k,
            d,
            generator,
            parity_check,
            syndrome_table: HashMap::new(),
        };
        code.syndrome_table = code.build_table()?;
        Ok(code)
    }

    fn build_table(&self) -> Result<HashMap<u64, u64>> {
        let radius = self.correctable();
        let size: u64 = (0..=radius).map(|w| crate::model::binomial(self.n as i64, w as i64)).sum();
        if size as usize > MAX_TABLE_ENTRIES {
            return Err(Error::NoCode {
                k: self.k,
                d: self.d,
                hint: format!(": syndrome table of {size} entries is too large"),
            });
        }
        let mut table = HashMap::with_capacity(size as usize);
        for w in 0..=radius {
            for e in patterns(self.n, w) {
                let s = self.syndrome(e);
                if table.insert(s, e).is_some() {
                    panic!("syndrome collision for weight {w} pattern in [{},{},{}]", self.n, self.k, self.d);
                }
            }
        }
        Ok(table)
    }

    /// Errors corrected per column: `⌊(d−1)/2⌋`.
    pub fn correctable(&self) -> usize {
        self.d.saturating_sub(1) / 2
    }

    pub fn generator_rows(&self) -> &[u64] {
        &self.generator
    }

    pub fn parity_check_rows(&self) -> &[u64] {
        &self.parity_check
    }

    pub fn syndrome_table_len(&self) -> usize {
        self.syndrome_table.len()
    }

    pub fn encode_word(&self, message: u64) -> u64 {
        (0..self.k)
            .filter(|&i| message >> i & 1 == 1)
            .fold(0, |acc, i| acc ^ self.generator[i])
    }

    pub fn syndrome(&self, word: u64) -> u64 {
        self.parity_check
            .iter()
            .enumerate()
            .fold(0, |acc, (r, &h)| acc | u64::from(parity(word & h)) << r)
    }

    /// Corrects `word` and returns its message bits.
    pub fn decode_word(&self, word: u64) -> Option<u64> {
        let e = self.syndrome_table.get(&self.syndrome(word))?;
        let mask = if self.k == 64 { u64::MAX } else { (1u64 << self.k) - 1 };
        Some((word ^ e) & mask)
    }

    /// `G·Hᵀ = 0`.
    pub fn is_orthogonal(&self) -> bool {
        self.generator.iter().all(|&g| self.syndrome(g) == 0)
    }

    pub fn rank(&self) -> usize {
        crate::gf2::rank_u64(&self.generator)
    }

    /// Minimum codeword weight over all `2^k − 1` non-zero messages.
    pub fn brute_force_distance(&self) -> Option<usize> {
        if self.k == 0 || self.n > DISTANCE_CHECK_LENGTH.max(self.k) || self.k > 24 {
            return None;
        }
        // Gray-code walk: each step adds one generator row
        let mut word = 0u64;
        let mut best = usize::MAX;
        for i in 1u64..1 << self.k {
            word ^= self.generator[i.trailing_zeros() as usize];
            best = best.min(word.count_ones() as usize);
        }
        Some(best)
    }

    pub fn to_wire(&self) -> CodeWire {
        CodeWire {
            n: self.n,
            k: self.k,
            d: self.d,
            generator: self.generator.iter().map(|&g| row_hex(g, self.n)).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_wire()).expect("code serializes")
    }
}

fn row_hex(row: u64, n: usize) -> String {
    let bits: Packet = (0..n).map(|j| row >> j & 1 == 1).collect();
    packet::to_hex(&bits)
}

/// Code serialization: `{n, k, d, generator: [hex rows]}`, row bits in
/// position order, most significant bit of each byte first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeWire {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub generator: Vec<String>,
}

impl CodeWire {
    pub fn into_code(self) -> Result<LinearCode> {
        let mut g = Vec::with_capacity(self.k);
        for (i, text) in self.generator.iter().enumerate() {
            let bits = packet::from_hex(text, self.n)
                .ok_or_else(|| Error::field("generator", format!("row {} is not {} hex bits", i + 1, self.n)))?;
            g.push(bits.iter_ones().fold(0u64, |a, j| a | 1 << j));
        }
        if g.len() != self.k || self.n < self.k {
            return Err(Error::field("generator", "row count must equal k ≤ n"));
        }
        let info_mask = if self.k == 64 { u64::MAX } else { (1u64 << self.k) - 1 };
        if g.iter().enumerate().any(|(i, &row)| row & info_mask != 1 << i) {
            return Err(Error::field("generator", "generator must be systematic [I | P]"));
        }
        let p: Vec<u64> = g.iter().map(|&row| row >> self.k).collect();
        LinearCode::systematic(self.k, self.n - self.k, self.d, &p)
    }
}

/// All `n`-bit words of weight `w`, ascending.
pub fn patterns(n: usize, w: usize) -> Vec<u64> {
    if w > n {
        return Vec::new();
    }
    if w == 0 {
        return vec![0];
    }
    let mut out = Vec::new();
    let mut x: u64 = if w == 64 { u64::MAX } else { (1 << w) - 1 };
    loop {
        out.push(x);
        // Gosper's hack
        let c = x & x.wrapping_neg();
        let r = x.wrapping_add(c);
        if r == 0 {
            break;
        }
        x = (((r ^ x) >> 2) / c) | r;
        if n < 64 && x >> n != 0 {
            break;
        }
    }
    out
}

/// `[k, k, 1]` identity code.
pub fn identity_code(k: usize) -> Result<LinearCode> {
    LinearCode::systematic(k, 0, 1, &vec![0; k])
}

/// `[d, 1, d]` repetition code.
pub fn repetition_code(d: usize) -> Result<LinearCode> {
    LinearCode::systematic(1, d - 1, d, &[(1u64 << (d - 1)) - 1])
}

/// Hamming code shortened to dimension `k`: the information columns of `H`
/// are the `k` smallest non-zero `r`-bit values of weight at least two.
pub fn shortened_hamming(k: usize) -> Result<LinearCode> {
    let mut r = 2;
    while (1usize << r) < k + r + 1 {
        r += 1;
    }
    let p: Vec<u64> = (1u64..).filter(|c| c.count_ones() >= 2).take(k).collect();
    LinearCode::systematic(k, r, 3, &p)
}

/// Code with dimension `k` and distance `d`: identity for `d = 1`,
/// repetition for `k = 1`, shortened Hamming for `d = 3`.
pub fn build_code(k: usize, d: usize) -> Result<LinearCode> {
    match (k, d) {
        (_, 0) => Err(Error::field("d", "distance must be positive")),
        (_, 1) | (0, _) => identity_code(k),
        (1, _) => repetition_code(d),
        (_, 3) => {
            let code = shortened_hamming(k)?;
            debug_assert_eq!(Some(code.n), lookup_code_length(k, 3).ok());
            Ok(code)
        }
        _ => Err(Error::NoCode {
            k,
            d,
            hint: format!(
                ": only d = 1, d = 3 and k = 1 are constructed; repetition of each symbol gives n = {}",
                k * d
            ),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quoted_codes() {
        let c = build_code(11, 3).unwrap();
        assert_eq!((c.n, c.k, c.d), (15, 11, 3));
        let c = build_code(6, 3).unwrap();
        assert_eq!((c.n, c.k, c.d), (10, 6, 3));
        let c = build_code(1, 3).unwrap();
        assert_eq!((c.n, c.k, c.d), (3, 1, 3));
        assert_eq!(c.generator_rows(), &[0b111]);
    }

    #[test]
    fn invariants_for_all_small_codes() {
        let mut codes = vec![];
        for k in 1..=20 {
            codes.push(build_code(k, 1).unwrap());
            codes.push(build_code(k, 3).unwrap());
        }
        for d in 1..=9 {
            codes.push(build_code(1, d).unwrap());
        }
        for c in &codes {
            assert!(c.is_orthogonal(), "[{},{},{}]", c.n, c.k, c.d);
            assert_eq!(c.rank(), c.k);
            if let Some(dist) = c.brute_force_distance() {
                assert_eq!(dist, c.d, "[{},{},{}]", c.n, c.k, c.d);
            }
            let expected: u64 = (0..=c.correctable()).map(|w| crate::model::binomial(c.n as i64, w as i64)).sum();
            assert_eq!(c.syndrome_table_len() as u64, expected);
        }
    }

    #[test]
    fn hamming_matches_table_lengths() {
        for k in 1..=20 {
            assert_eq!(build_code(k, 3).unwrap().n, lookup_code_length(k, 3).unwrap(), "k = {k}");
        }
    }

    #[test]
    fn single_errors_corrected_in_hamming_15() {
        let c = build_code(11, 3).unwrap();
        for m in [0u64, 1, 0x5a5, 0x7ff] {
            let w = c.encode_word(m);
            assert_eq!(c.decode_word(w), Some(m));
            for j in 0..15 {
                assert_eq!(c.decode_word(w ^ 1 << j), Some(m));
            }
        }
    }

    #[test]
    fn pattern_counts() {
        assert_eq!(patterns(5, 2).len(), 10);
        assert_eq!(patterns(40, 1).len(), 40);
        assert_eq!(patterns(3, 0), vec![0]);
        assert_eq!(patterns(3, 3), vec![7]);
        assert!(patterns(2, 3).is_empty());
    }

    #[test]
    fn unsupported_pairs() {
        assert!(matches!(build_code(4, 5), Err(Error::NoCode { k: 4, d: 5, .. })));
        assert!(build_code(3, 0).is_err());
    }

    #[test]
    fn json_round_trip() {
        let c = build_code(6, 3).unwrap();
        let json = c.to_json();
        let wire: CodeWire = serde_json::from_str(&json).unwrap();
        assert_eq!(wire.generator.len(), 6);
        assert_eq!(wire.into_code().unwrap(), c);
    }
}

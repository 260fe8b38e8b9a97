use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{self, BitRow};
use crate::model::{CacheSet, MessageIndex, Placement, SubfileId, SubfileWire};
use crate::packet::{self, Packet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    /// Round-based SC delivery, sized for distinct demands.
    #[serde(rename = "sc-worst")]
    ScWorst,
    /// Redundant-user elimination plus leader-gated rounds.
    #[serde(rename = "improved")]
    Improved,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::ScWorst => "sc-worst",
            Scheme::Improved => "improved",
        })
    }
}

/// A transmission count expressed in files: `packets / subfiles`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rate {
    pub packets: usize,
    pub subfiles: usize,
}

impl Rate {
    pub fn new(packets: usize, subfiles: usize) -> Self {
        Rate { packets, subfiles }
    }

    pub fn ratio(&self) -> Ratio<u64> {
        Ratio::new(self.packets as u64, self.subfiles as u64)
    }

    pub fn value(&self) -> f64 {
        self.packets as f64 / self.subfiles as f64
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.packets, self.subfiles)
    }
}

/// One XOR term: the subfile the `user` behind its serving cache wants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Term {
    pub user: usize,
    pub subfile: SubfileId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transmission {
    /// 1-based round.
    pub round: usize,
    /// The `(t+1)`-set `Q`.
    pub cache_set: CacheSet,
    pub terms: Vec<Term>,
    pub payload: Option<Packet>,
}

impl Transmission {
    /// Cache serving each term, i.e. `Q \ T`.
    pub fn serving_caches(&self) -> impl Iterator<Item = usize> + '_ {
        self.terms.iter().map(move |term| {
            let rest = CacheSet::from_mask(self.cache_set.mask() & !term.subfile.set.mask());
            rest.iter().next().expect("term set must be Q minus one cache")
        })
    }

    /// Every term's set is `Q` minus a distinct member of `Q`.
    pub fn is_well_formed(&self) -> bool {
        let mut served = CacheSet::EMPTY;
        for term in &self.terms {
            let set = term.subfile.set;
            if set.mask() & !self.cache_set.mask() != 0 || set.len() + 1 != self.cache_set.len() {
                return false;
            }
            let lambda = CacheSet::from_mask(self.cache_set.mask() & !set.mask());
            if served.mask() & lambda.mask() != 0 {
                return false;
            }
            served = CacheSet::from_mask(served.mask() | lambda.mask());
        }
        !self.terms.is_empty() && self.terms.len() <= self.cache_set.len()
    }
}

impl fmt::Display for Transmission {
    /// `T_{1,4,6} = X^1_{2,3} ⊕ X^4_{1,3} ⊕ X^6_{1,2}` with receiving users in
    /// the subscript.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let users: Vec<String> = self.terms.iter().map(|t| (t.user + 1).to_string()).collect();
        write!(f, "T_{{{}}} = ", users.join(","))?;
        for (i, term) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " ⊕ ")?;
            }
            write!(f, "{}", term.subfile)?;
        }
        Ok(())
    }
}

/// A user dropped before delivery because a user on the same cache already
/// requests the same file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Eliminated {
    pub user: usize,
    pub proxy: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransmissionPlan {
    pub scheme: Scheme,
    pub num_caches: usize,
    pub t: usize,
    pub transmissions: Vec<Transmission>,
    /// Users served in each round (`R_j` or `R'_j`), in cache order.
    pub rounds: Vec<Vec<usize>>,
    /// Leaders `P_j` per round; empty for the SC scheme.
    pub leaders: Vec<Vec<usize>>,
    pub eliminated: Vec<Eliminated>,
}

impl TransmissionPlan {
    pub fn len(&self) -> usize {
        self.transmissions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transmissions.is_empty()
    }

    pub fn subfiles_per_file(&self) -> usize {
        crate::model::choose(self.num_caches, self.t) as usize
    }

    /// Transmissions per file size; never the closed-form prediction.
    pub fn rate(&self) -> Rate {
        Rate::new(self.len(), self.subfiles_per_file())
    }

    /// Per-round transmission counts.
    pub fn round_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.rounds.len()];
        for tx in &self.transmissions {
            counts[tx.round - 1] += 1;
        }
        counts
    }

    /// The plan as GF(2) combination vectors over message indices.
    pub fn coding_rows(&self, index: &MessageIndex) -> Vec<BitRow> {
        self.transmissions
            .iter()
            .map(|tx| {
                let mut row = gf2::zero_row(index.len());
                for term in &tx.terms {
                    let m = index.index(term.subfile);
                    let current = row[m];
                    row.set(m, !current);
                }
                row
            })
            .collect()
    }

    /// Symbols sent for this plan under the given placement payloads.
    pub fn encode(&self, placement: &Placement) -> Result<Vec<Packet>> {
        self.transmissions
            .iter()
            .map(|tx| {
                let mut acc: Option<Packet> = None;
                for term in &tx.terms {
                    let p = placement
                        .payload(term.subfile)
                        .ok_or_else(|| Error::field("payloads", "placement carries no payloads"))?;
                    match acc.as_mut() {
                        None => acc = Some(p.clone()),
                        Some(a) => packet::xor_into(a, p),
                    }
                }
                Ok(acc.expect("transmissions are never empty"))
            })
            .collect()
    }

    /// Stores the encoded symbol in each transmission.
    pub fn attach_payloads(&mut self, placement: &Placement) -> Result<()> {
        let symbols = self.encode(placement)?;
        for (tx, p) in self.transmissions.iter_mut().zip(symbols) {
            tx.payload = Some(p);
        }
        Ok(())
    }

    /// Human-readable log, one line per transmission grouped by round.
    pub fn log_lines(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (j, users) in self.rounds.iter().enumerate() {
            let listed: Vec<String> = users.iter().map(|u| (u + 1).to_string()).collect();
            let mut header = format!("round {}: R_{} = {{{}}}", j + 1, j + 1, listed.join(","));
            if let Some(leaders) = self.leaders.get(j) {
                let l: Vec<String> = leaders.iter().map(|u| (u + 1).to_string()).collect();
                header.push_str(&format!(", P_{} = {{{}}}", j + 1, l.join(",")));
            }
            out.push(header);
            for tx in self.transmissions.iter().filter(|tx| tx.round == j + 1) {
                out.push(format!("  {tx}"));
            }
        }
        out
    }

    pub fn to_wire(&self) -> PlanWire {
        PlanWire {
            scheme: self.scheme,
            num_caches: self.num_caches,
            t: self.t,
            rate: self.rate(),
            rounds: self
                .rounds
                .iter()
                .map(|r| r.iter().map(|u| u + 1).collect())
                .collect(),
            leaders: self
                .leaders
                .iter()
                .map(|r| r.iter().map(|u| u + 1).collect())
                .collect(),
            eliminated: self
                .eliminated
                .iter()
                .map(|e| Eliminated {
                    user: e.user + 1,
                    proxy: e.proxy + 1,
                })
                .collect(),
            transmissions: self
                .transmissions
                .iter()
                .map(|tx| TransmissionWire {
                    round: tx.round,
                    q: tx.cache_set,
                    users: tx.terms.iter().map(|t| t.user + 1).collect(),
                    terms: tx.terms.iter().map(|t| t.subfile.into()).collect(),
                    payload_hex: tx.payload.as_ref().map(packet::to_hex),
                    payload_bits: tx.payload.as_ref().map(|p| p.len()),
                })
                .collect(),
        }
    }

    pub fn from_wire(wire: PlanWire) -> Result<Self> {
        let one_based = |v: Vec<usize>| -> Result<Vec<usize>> {
            v.into_iter()
                .map(|u| u.checked_sub(1).ok_or_else(|| Error::field("plan", "labels start at 1")))
                .collect()
        };
        let mut transmissions = Vec::with_capacity(wire.transmissions.len());
        for tx in wire.transmissions {
            if tx.users.len() != tx.terms.len() {
                return Err(Error::field("plan", "users and terms differ in length"));
            }
            let users = one_based(tx.users)?;
            let terms = users
                .into_iter()
                .zip(tx.terms)
                .map(|(user, w)| Ok(Term { user, subfile: SubfileId::try_from(w)? }))
                .collect::<Result<Vec<_>>>()?;
            let payload = match (tx.payload_hex, tx.payload_bits) {
                (Some(hex), Some(bits)) => Some(
                    packet::from_hex(&hex, bits)
                        .ok_or_else(|| Error::field("payload_hex", "malformed payload"))?,
                ),
                (None, None) => None,
                _ => return Err(Error::field("payload_bits", "must accompany payload_hex")),
            };
            transmissions.push(Transmission {
                round: tx.round,
                cache_set: tx.q,
                terms,
                payload,
            });
        }
        Ok(TransmissionPlan {
            scheme: wire.scheme,
            num_caches: wire.num_caches,
            t: wire.t,
            transmissions,
            rounds: wire.rounds.into_iter().map(one_based).collect::<Result<_>>()?,
            leaders: wire.leaders.into_iter().map(one_based).collect::<Result<_>>()?,
            eliminated: wire
                .eliminated
                .into_iter()
                .map(|e| {
                    Ok(Eliminated {
                        user: e.user.checked_sub(1).ok_or_else(|| Error::field("eliminated", "labels start at 1"))?,
                        proxy: e.proxy.checked_sub(1).ok_or_else(|| Error::field("eliminated", "labels start at 1"))?,
                    })
                })
                .collect::<Result<_>>()?,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_wire()).expect("plan serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let wire: PlanWire =
            serde_json::from_str(text).map_err(|e| Error::field("plan", e.to_string()))?;
        Self::from_wire(wire)
    }
}

/// JSON form of a transmission. Labels are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransmissionWire {
    pub round: usize,
    #[serde(rename = "Q")]
    pub q: CacheSet,
    pub terms: Vec<SubfileWire>,
    /// Receiving user behind each term.
    pub users: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payload_hex: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payload_bits: Option<usize>,
}

/// JSON form of a plan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanWire {
    pub scheme: Scheme,
    pub num_caches: usize,
    pub t: usize,
    pub rate: Rate,
    pub rounds: Vec<Vec<usize>>,
    pub leaders: Vec<Vec<usize>>,
    pub eliminated: Vec<Eliminated>,
    pub transmissions: Vec<TransmissionWire>,
}

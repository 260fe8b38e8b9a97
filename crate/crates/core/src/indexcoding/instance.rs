use crate::error::{Error, Result};
use crate::gf2::{self, BitRow, Echelon};
use crate::model::{
    choose, enumerate_subsets, Association, DemandVector, MessageIndex, Placement, SubfileId,
    SystemConfig,
};
use crate::packet::{self, Packet};

/// One index-coding receiver: user `user` wanting a single missing subfile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Receiver {
    pub user: usize,
    pub wants: usize,
    /// Side information as a 0/1 row over message indices.
    pub has: BitRow,
}

impl Receiver {
    pub fn knows(&self, message: usize) -> bool {
        self.has[message]
    }
}

/// Index coding instance of one delivery phase. Messages are all subfiles;
/// each user with `k` missing demanded subfiles is split into `k` receivers.
#[derive(Debug, Clone)]
pub struct IcsiInstance {
    pub index: MessageIndex,
    pub receivers: Vec<Receiver>,
    pub num_users: usize,
}

impl IcsiInstance {
    pub fn num_messages(&self) -> usize {
        self.index.len()
    }

    /// `K·C(Λ,t)`: receivers counted before dropping cached demands.
    pub fn nominal_receiver_count(&self) -> usize {
        self.num_users * self.index.per_file
    }

    pub fn subfile(&self, receiver: usize) -> SubfileId {
        self.index.subfile(self.receivers[receiver].wants)
    }

    /// Distinct wanted messages in ascending order.
    pub fn wanted_messages(&self) -> Vec<usize> {
        let mut w: Vec<usize> = self.receivers.iter().map(|r| r.wants).collect();
        w.sort_unstable();
        w.dedup();
        w
    }
}

/// Builds the instance for a placement and demand. Receivers are ordered by
/// user, then by colex rank of the missing subfile.
pub fn build_icsi(
    cfg: &SystemConfig,
    placement: &Placement,
    assoc: &Association,
    d: &DemandVector,
) -> Result<IcsiInstance> {
    let t = cfg.require_t()?;
    assoc.check_against(cfg)?;
    d.check_against(cfg)?;
    let index = placement.index();
    let cache_of = assoc.cache_of_users();
    let side: Vec<BitRow> = (0..cfg.num_caches())
        .map(|lambda| {
            let mut row = gf2::zero_row(index.len());
            for &id in placement.cache(lambda) {
                row.set(index.index(id), true);
            }
            row
        })
        .collect();
    let sets = enumerate_subsets(cfg.num_caches(), t);
    let mut receivers = Vec::with_capacity(cfg.num_users() * choose(cfg.num_caches() - 1, t) as usize);
    for (user, &lambda) in cache_of.iter().enumerate() {
        for &set in sets.iter().filter(|s| !s.contains(lambda)) {
            receivers.push(Receiver {
                user,
                wants: index.index(SubfileId::new(d.file_of(user), set)),
                has: side[lambda].clone(),
            });
        }
    }
    Ok(IcsiInstance {
        index,
        receivers,
        num_users: cfg.num_users(),
    })
}

fn undecodable(inst: &IcsiInstance, receiver: usize) -> Error {
    let r = &inst.receivers[receiver];
    Error::Undecodable {
        receiver,
        user: r.user + 1,
        message: r.wants,
        subfile: inst.subfile(receiver).to_string(),
    }
}

/// Rows with the receiver's side-information columns cleared, in echelon
/// form, and the tag of rows combining to its wanted unit vector.
fn solve_for(inst: &IcsiInstance, rows: &[BitRow], receiver: usize) -> Option<BitRow> {
    let r = &inst.receivers[receiver];
    let mut e = Echelon::new(rows.len());
    for (k, row) in rows.iter().enumerate() {
        let mut reduced = row.clone();
        reduced &= !r.has.clone();
        e.insert(k, reduced);
    }
    e.solve(&gf2::unit_row(inst.num_messages(), r.wants))
}

/// Whether `receiver` can recover its message from the coded rows.
pub fn is_decodable(inst: &IcsiInstance, rows: &[BitRow], receiver: usize) -> bool {
    solve_for(inst, rows, receiver).is_some()
}

/// Decodes `receiver`'s message from the received symbols (one per row),
/// cancelling side information with the values held in `placement`.
pub fn receiver_decode(
    inst: &IcsiInstance,
    rows: &[BitRow],
    symbols: &[Packet],
    placement: &Placement,
    receiver: usize,
) -> Result<Packet> {
    if symbols.len() != rows.len() {
        return Err(Error::PacketCount {
            expected: rows.len(),
            actual: symbols.len(),
        });
    }
    let tag = solve_for(inst, rows, receiver).ok_or_else(|| undecodable(inst, receiver))?;
    let side = &inst.receivers[receiver].has;
    let mut out: Option<Packet> = None;
    for k in tag.iter_ones() {
        let mut value = symbols[k].clone();
        for m in rows[k].iter_ones().filter(|&m| side[m]) {
            let p = placement
                .payload_by_index(m)
                .ok_or_else(|| Error::field("payloads", "placement carries no payloads"))?;
            if p.len() != value.len() {
                return Err(Error::PacketLength {
                    index: k,
                    expected: p.len(),
                    actual: value.len(),
                });
            }
            packet::xor_into(&mut value, p);
        }
        match out.as_mut() {
            None => out = Some(value),
            Some(acc) => {
                if acc.len() != value.len() {
                    return Err(Error::PacketLength {
                        index: k,
                        expected: acc.len(),
                        actual: value.len(),
                    });
                }
                packet::xor_into(acc, &value)
            }
        }
    }
    Ok(out.expect("a unit vector needs at least one row"))
}

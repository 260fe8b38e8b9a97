//! Bit payloads carried by subfiles and transmissions.

use bitvec::prelude::*;
use rand::RngCore;

/// A payload of arbitrary bit length, most significant bit first.
pub type Packet = BitVec<u8, Msb0>;

pub fn zeros(len: usize) -> Packet {
    bitvec![u8, Msb0; 0; len]
}

pub fn random(len: usize, rng: &mut impl RngCore) -> Packet {
    let mut bytes = vec![0u8; len.div_ceil(8)];
    rng.fill_bytes(&mut bytes);
    let mut p = Packet::from_vec(bytes);
    p.truncate(len);
    p
}

/// `acc ^= other`; lengths must agree.
pub fn xor_into(acc: &mut Packet, other: &Packet) {
    assert_eq!(acc.len(), other.len(), "xor of packets with different lengths");
    *acc ^= other.as_bitslice();
}

/// Lower-case hex of the packet bytes (trailing pad bits are zero).
pub fn to_hex(p: &Packet) -> String {
    let mut copy = p.clone();
    copy.set_uninitialized(false);
    hex::encode(copy.as_raw_slice())
}

pub fn from_hex(text: &str, len: usize) -> Option<Packet> {
    let bytes = hex::decode(text).ok()?;
    if bytes.len() != len.div_ceil(8) {
        return None;
    }
    let mut p = Packet::from_vec(bytes);
    p.truncate(len);
    Some(p)
}

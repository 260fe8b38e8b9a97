use super::code::LinearCode;
use crate::error::{Error, Result};
use crate::packet::{self, Packet};

fn common_length(packets: &[Packet]) -> Result<usize> {
    let len = packets.first().map_or(0, |p| p.len());
    match packets.iter().position(|p| p.len() != len) {
        Some(index) => Err(Error::PacketLength {
            index,
            expected: len,
            actual: packets[index].len(),
        }),
        None => Ok(len),
    }
}

/// Encodes `k` equal-length packets column by column: output bit `b` of
/// packet `j` is bit `j` of the codeword for the `b`-th bits of the inputs.
pub fn concat_encode(symbols: &[Packet], code: &LinearCode) -> Result<Vec<Packet>> {
    if symbols.len() != code.k {
        return Err(Error::PacketCount {
            expected: code.k,
            actual: symbols.len(),
        });
    }
    let len = common_length(symbols)?;
    let g = code.generator_rows();
    Ok((0..code.n)
        .map(|j| {
            let mut out = packet::zeros(len);
            for (i, sym) in symbols.iter().enumerate() {
                if g[i] >> j & 1 == 1 {
                    packet::xor_into(&mut out, sym);
                }
            }
            out
        })
        .collect())
}

/// Corrects every bit column of `received` through the syndrome table and
/// returns the `k` systematic packets.
pub fn syndrome_decode(received: &[Packet], code: &LinearCode) -> Result<Vec<Packet>> {
    if received.len() != code.n {
        return Err(Error::PacketCount {
            expected: code.n,
            actual: received.len(),
        });
    }
    let len = common_length(received)?;
    let mut out: Vec<Packet> = received[..code.k].to_vec();
    for b in 0..len {
        let word = received
            .iter()
            .enumerate()
            .fold(0u64, |acc, (j, p)| acc | u64::from(p[b]) << j);
        let message = code.decode_word(word).ok_or(Error::Uncorrectable {
            column: b,
            syndrome: code.syndrome(word),
        })?;
        for (i, p) in out.iter_mut().enumerate() {
            p.set(b, message >> i & 1 == 1);
        }
    }
    Ok(out)
}

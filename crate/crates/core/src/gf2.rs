//! Dense GF(2) vectors and incremental Gaussian elimination.

use bitvec::prelude::*;

/// A GF(2) row vector of fixed length.
pub type BitRow = BitVec<usize, Lsb0>;

pub fn zero_row(len: usize) -> BitRow {
    bitvec![usize, Lsb0; 0; len]
}

pub fn unit_row(len: usize, at: usize) -> BitRow {
    let mut r = zero_row(len);
    r.set(at, true);
    r
}

/// Echelon basis built one vector at a time. Each stored vector carries a
/// tag recording which inserted vectors it is the sum of.
#[derive(Debug, Clone)]
pub struct Echelon {
    rows: Vec<(usize, BitRow, BitRow)>,
    tag_len: usize,
}

impl Echelon {
    /// `tag_len` is the number of vectors that will be inserted.
    pub fn new(tag_len: usize) -> Self {
        Echelon {
            rows: Vec::new(),
            tag_len,
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Inserts vector number `id`. Returns false if it was dependent.
    pub fn insert(&mut self, id: usize, mut v: BitRow) -> bool {
        let mut tag = zero_row(self.tag_len);
        tag.set(id, true);
        for (pivot, row, row_tag) in &self.rows {
            if v[*pivot] {
                v ^= row.as_bitslice();
                tag ^= row_tag.as_bitslice();
            }
        }
        match v.first_one() {
            Some(pivot) => {
                self.rows.push((pivot, v, tag));
                true
            }
            None => false,
        }
    }

    /// Expresses `target` in the span; returns the tag of inserted vectors
    /// summing to it, or `None` when it is outside the span.
    pub fn solve(&self, target: &BitRow) -> Option<BitRow> {
        let mut v = target.clone();
        let mut tag = zero_row(self.tag_len);
        for (pivot, row, row_tag) in &self.rows {
            if v[*pivot] {
                v ^= row.as_bitslice();
                tag ^= row_tag.as_bitslice();
            }
        }
        v.not_any().then_some(tag)
    }
}

/// Rank of a set of rows.
pub fn rank(rows: &[BitRow]) -> usize {
    let mut e = Echelon::new(rows.len());
    for (i, r) in rows.iter().enumerate() {
        e.insert(i, r.clone());
    }
    e.rank()
}

/// Rank of rows packed into `u64` masks.
pub fn rank_u64(rows: &[u64]) -> usize {
    let mut basis: Vec<u64> = Vec::new();
    for &r in rows {
        let mut v = r;
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(bits: &[u8]) -> BitRow {
        bits.iter().map(|&b| b == 1).collect()
    }

    #[test]
    fn solve_finds_combination() {
        let rows = [row(&[1, 1, 0, 0]), row(&[0, 1, 1, 0]), row(&[0, 0, 1, 1])];
        let mut e = Echelon::new(rows.len());
        for (i, r) in rows.iter().enumerate() {
            assert!(e.insert(i, r.clone()));
        }
        let tag = e.solve(&row(&[1, 0, 0, 1])).unwrap();
        assert_eq!(tag, row(&[1, 1, 1]));
        assert!(e.solve(&row(&[1, 0, 0, 0])).is_none());
    }

    #[test]
    fn dependent_rows_do_not_raise_rank() {
        let rows = vec![row(&[1, 0, 1]), row(&[0, 1, 1]), row(&[1, 1, 0])];
        assert_eq!(rank(&rows), 2);
        assert_eq!(rank_u64(&[0b101, 0b011, 0b110]), 2);
        assert_eq!(rank_u64(&[0b1, 0b10, 0b100, 0]), 3);
    }
}

use num_integer::Integer;

use crate::num::Z;

/// Packed vector over GF(2).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_parity(entries: &[Z]) -> Self {
        let mut v = BitVec::zeros(entries.len());
        for (i, e) in entries.iter().enumerate() {
            if e.is_odd() {
                v.set(i);
            }
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn and(&self, other: &BitVec) -> BitVec {
        BitVec {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    pub fn is_subset_of(&self, other: &BitVec) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| self.get(i))
    }

    /// Same bits, storage grown to hold `len` positions.
    pub fn resized(&self, len: usize) -> BitVec {
        let mut words = self.words.clone();
        words.resize(len.div_ceil(64), 0);
        BitVec { len, words }
    }

    pub fn lowest_set(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
    }
}

/// Rank of a set of vectors over GF(2).
pub fn rank(mut vs: Vec<BitVec>) -> usize {
    let mut pivots: Vec<(usize, BitVec)> = Vec::new();
    for v in vs.iter_mut() {
        for (p, b) in &pivots {
            if v.get(*p) {
                v.xor_assign(b);
            }
        }
        if let Some(p) = v.lowest_set() {
            // keep pivots reduced against the new one so later lookups stay valid
            for (_, b) in pivots.iter_mut() {
                if b.get(p) {
                    b.xor_assign(v);
                }
            }
            pivots.push((p, v.clone()));
        }
    }
    pivots.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::int;

    #[test]
    fn rank_small() {
        let a = BitVec::from_parity(&[int(1), int(1), int(0)]);
        let b = BitVec::from_parity(&[int(0), int(1), int(1)]);
        let c = BitVec::from_parity(&[int(1), int(0), int(1)]);
        assert_eq!(rank(vec![a.clone(), b.clone()]), 2);
        assert_eq!(rank(vec![a, b, c]), 2);
    }

    #[test]
    fn wide_vectors() {
        let mut a = BitVec::zeros(200);
        a.set(150);
        let mut b = BitVec::zeros(200);
        b.set(150);
        b.set(3);
        assert_eq!(rank(vec![a.clone(), b.clone(), a.clone()]), 2);
        assert_eq!(b.weight(), 2);
        a.xor_assign(&b);
        assert!(a.get(3) && !a.get(150));
    }
}

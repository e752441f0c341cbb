use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{ensure_len, Error, Result};
use crate::gf2::PositionSet;

const WORD: usize = 64;

/// Element of GF(2)^len, packed most-significant-bit first.
///
/// Position 0 lives in the top bit of word 0, so the derived ordering on
/// equal-length vectors is lexicographic in position order. Unused low bits
/// of the last word are always zero.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            words: vec![0; len.div_ceil(WORD)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self::zeros(len);
        for i in 0..len {
            v.set(i, true);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// Unit vector with a single one at `pos`.
    pub fn unit(len: usize, pos: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(pos, true);
        v
    }

    /// Big-endian decoding: position 0 is the most significant bit of `value`.
    pub fn from_index(len: usize, value: usize) -> Self {
        assert!(len <= usize::BITS as usize, "index form limited to machine width");
        let mut v = Self::zeros(len);
        for i in 0..len {
            v.set(i, (value >> (len - 1 - i)) & 1 == 1);
        }
        v
    }

    /// Inverse of [`BitVec::from_index`].
    pub fn to_index(&self) -> usize {
        assert!(self.len <= usize::BITS as usize, "index form limited to machine width");
        if self.len == 0 {
            return 0;
        }
        (self.words[0] >> (WORD - self.len)) as usize
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut v = Self::zeros(len);
        for w in v.words.iter_mut() {
            *w = rng.random();
        }
        v.clear_tail();
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / WORD] >> (WORD - 1 - i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (WORD - 1 - i % WORD);
        if bit {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        let b = self.get(i);
        self.set(i, !b);
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Indices holding a one.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len).filter(|&i| self.get(i)).collect()
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Componentwise exclusive-or.
    pub fn xor(&self, other: &BitVec) -> Result<BitVec> {
        ensure_len("xor", self.len, other.len)?;
        let mut out = self.clone();
        out.xor_assign_unchecked(other);
        Ok(out)
    }

    pub(crate) fn xor_assign_unchecked(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// GF(2) inner product: parity of the componentwise AND.
    pub fn dot(&self, other: &BitVec) -> Result<bool> {
        ensure_len("dot", self.len, other.len)?;
        Ok(self.dot_unchecked(other))
    }

    pub(crate) fn dot_unchecked(&self, other: &BitVec) -> bool {
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones & 1 == 1
    }

    pub fn hamming_distance(&self, other: &BitVec) -> Result<usize> {
        ensure_len("hamming_distance", self.len, other.len)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum())
    }

    /// The substring `self[E]`, in increasing position order.
    pub fn restrict(&self, positions: &PositionSet) -> Result<BitVec> {
        ensure_len("restrict", self.len, positions.universe())?;
        Ok(BitVec::from_bools(
            &positions.iter().map(|i| self.get(i)).collect::<Vec<_>>(),
        ))
    }

    /// Concatenation `self || other`.
    pub fn concat(&self, other: &BitVec) -> BitVec {
        let bits: Vec<bool> = self.iter().chain(other.iter()).collect();
        BitVec::from_bools(&bits)
    }

    /// Splits into `[0, at)` and `[at, len)`.
    pub fn split_at(&self, at: usize) -> (BitVec, BitVec) {
        let bits: Vec<bool> = self.iter().collect();
        (BitVec::from_bools(&bits[..at]), BitVec::from_bools(&bits[at..]))
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= !0u64 << (WORD - rem);
            }
        }
    }
}

/// Parity check over raw big-endian indices; used by the dense density code.
#[inline]
pub fn index_dot(a: usize, b: usize) -> bool {
    (a & b).count_ones() & 1 == 1
}

/// Hamming distance restricted to `E`: `#{i in E | a_i != b_i}`.
pub fn hamming_distance_on(e: &PositionSet, a: &BitVec, b: &BitVec) -> Result<usize> {
    ensure_len("hamming_distance_on", a.len(), b.len())?;
    ensure_len("hamming_distance_on universe", a.len(), e.universe())?;
    Ok(e.iter().filter(|&i| a.get(i) != b.get(i)).count())
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({self})")
    }
}

impl FromStr for BitVec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::domain(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BitVec::from_bools(&bits))
    }
}

impl Serialize for BitVec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitVec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

//! Packed binary vectors of power-of-two length.
//!
//! A [`BitWord`] holds codewords, error vectors, message vectors, matrix
//! rows, and redundancy-relation masks. Bit `i` of the vector lives in word
//! `i / 64` at offset `i % 64`, and every bit past the logical length is
//! kept at zero so that word-level operations never need edge handling.
//!
//! The decoder's hot loop is [`BitWord::parity_under_mask`]: one AND pass
//! over the words followed by a single popcount decides a redundancy
//! relation, which is what makes the bit-packed representation worthwhile.

use std::fmt;
use std::io::{Read, Write};

use rand::RngCore;

use crate::fileio;
use crate::{Error, Result};

/// A fixed-length packed bit vector. Immutable by convention once built:
/// operations either return a new word or are used during construction.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitWord {
    len: usize,
    words: Vec<u64>,
}

impl BitWord {
    /// An all-zero word. `len` must be a positive power of two.
    pub fn zeros(len: usize) -> Result<Self> {
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::InvalidLength(len));
        }
        Ok(Self {
            len,
            words: vec![0; len.div_ceil(64)],
        })
    }

    /// An all-one word of the given length.
    pub fn ones(len: usize) -> Result<Self> {
        let mut w = Self::zeros(len)?;
        for word in &mut w.words {
            *word = !0;
        }
        w.mask_tail();
        Ok(w)
    }

    /// A word with exactly the given positions set.
    pub fn from_positions(len: usize, positions: &[usize]) -> Result<Self> {
        let mut w = Self::zeros(len)?;
        for &p in positions {
            if p >= len {
                return Err(Error::LengthMismatch {
                    expected: len,
                    actual: p + 1,
                });
            }
            w.set(p, true);
        }
        Ok(w)
    }

    /// A uniformly random word.
    pub fn random<R: RngCore + ?Sized>(len: usize, rng: &mut R) -> Result<Self> {
        let mut w = Self::zeros(len)?;
        for word in &mut w.words {
            *word = rng.next_u64();
        }
        w.mask_tail();
        Ok(w)
    }

    /// Reinterprets packed bytes as a word of `8 * bytes.len()` bits.
    /// Bit `i` is bit `i % 8` of byte `i / 8`.
    pub fn from_raw_bytes(bytes: &[u8]) -> Result<Self> {
        let len = bytes.len() * 8;
        let mut w = Self::zeros(len)?;
        for (i, &b) in bytes.iter().enumerate() {
            w.words[i / 8] |= u64::from(b) << (8 * (i % 8));
        }
        Ok(w)
    }

    /// The packed little-endian bytes of the word, `len/8` of them.
    /// Only available for byte-aligned lengths, which all code lengths are.
    pub fn to_raw_bytes(&self) -> Vec<u8> {
        let nbytes = self.len.div_ceil(8);
        let mut out = Vec::with_capacity(nbytes);
        for i in 0..nbytes {
            out.push((self.words[i / 8] >> (8 * (i % 8))) as u8);
        }
        out
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, position: usize) -> bool {
        assert!(position < self.len, "bit position out of range");
        (self.words[position / 64] >> (position % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, position: usize, value: bool) {
        assert!(position < self.len, "bit position out of range");
        let mask = 1u64 << (position % 64);
        if value {
            self.words[position / 64] |= mask;
        } else {
            self.words[position / 64] &= !mask;
        }
    }

    /// Componentwise sum mod 2.
    pub fn xor(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.xor_assign(other)?;
        Ok(out)
    }

    pub fn xor_assign(&mut self, other: &Self) -> Result<()> {
        self.check_len(other)?;
        self.xor_assign_unchecked(other);
        Ok(())
    }

    pub fn or_assign(&mut self, other: &Self) -> Result<()> {
        self.check_len(other)?;
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
        Ok(())
    }

    /// Componentwise product: positions set in both words.
    pub fn and(&self, other: &Self) -> Result<Self> {
        self.check_len(other)?;
        let mut out = self.clone();
        for (a, b) in out.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
        Ok(out)
    }

    /// Number of positions set in both words.
    pub fn and_popcount(&self, other: &Self) -> Result<usize> {
        self.check_len(other)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum())
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Parity of the overlap with `mask`: `and_popcount(self, mask) mod 2`.
    /// This is the value of the redundancy relation `mask` on the word.
    pub fn parity_under_mask(&self, mask: &Self) -> Result<bool> {
        self.check_len(mask)?;
        Ok(self.parity_under_mask_unchecked(mask))
    }

    /// Lowest position that is not set, if any.
    pub fn first_unset(&self) -> Option<usize> {
        for (i, &w) in self.words.iter().enumerate() {
            if w != !0 {
                let p = i * 64 + (!w).trailing_zeros() as usize;
                if p < self.len {
                    return Some(p);
                }
                return None;
            }
        }
        None
    }

    /// Iterator over the set positions in increasing order.
    pub fn iter_ones(&self) -> Ones<'_> {
        Ones {
            words: &self.words,
            word_idx: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    /// Positions of the set bits, in increasing order.
    pub fn to_positions(&self) -> Vec<usize> {
        self.iter_ones().collect()
    }

    /// Serializes as an 8-byte little-endian bit length followed by the
    /// packed bytes, bit `i` in byte `i/8` at offset `i%8`.
    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        fileio::write_u64(w, self.len as u64)?;
        w.write_all(&self.to_raw_bytes())?;
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self> {
        let len = fileio::read_u64(r)? as usize;
        if len == 0 || !len.is_power_of_two() || len > MAX_SERIALIZED_BITS {
            return Err(Error::CorruptFile(format!(
                "implausible bit-vector length {len}"
            )));
        }
        let mut bytes = vec![0u8; len.div_ceil(8)];
        fileio::read_exact(r, &mut bytes)?;
        let w = Self::from_raw_bytes(&bytes)?;
        debug_assert_eq!(w.len, len);
        Ok(w)
    }

    #[inline]
    pub(crate) fn xor_assign_unchecked(&mut self, other: &Self) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Parity of `popcount(self & mask)` in one pass: per-word ANDs are
    /// XOR-folded (which preserves the popcount parity) so only a single
    /// popcount runs at the end.
    #[inline]
    pub(crate) fn parity_under_mask_unchecked(&self, mask: &Self) -> bool {
        debug_assert_eq!(self.len, mask.len);
        let folded = self
            .words
            .iter()
            .zip(&mask.words)
            .fold(0u64, |acc, (a, b)| acc ^ (a & b));
        folded.count_ones() & 1 == 1
    }

    fn check_len(&self, other: &Self) -> Result<()> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                expected: self.len,
                actual: other.len,
            });
        }
        Ok(())
    }

    fn mask_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

/// Guard against allocating absurd buffers when parsing corrupt files.
const MAX_SERIALIZED_BITS: usize = 1 << 31;

pub struct Ones<'a> {
    words: &'a [u64],
    word_idx: usize,
    current: u64,
}

impl Iterator for Ones<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        while self.current == 0 {
            self.word_idx += 1;
            if self.word_idx >= self.words.len() {
                return None;
            }
            self.current = self.words[self.word_idx];
        }
        let bit = self.current.trailing_zeros() as usize;
        self.current &= self.current - 1;
        Some(self.word_idx * 64 + bit)
    }
}

impl fmt::Debug for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len <= 64 {
            write!(f, "BitWord(len={}, ones={:?})", self.len, self.to_positions())
        } else {
            write!(f, "BitWord(len={}, weight={})", self.len, self.weight())
        }
    }
}

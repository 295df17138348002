//! Shared fixtures and independent oracles for the integration suites.
//!
//! Everything here deliberately avoids the library's own expansion and
//! decoding paths: the nearest-codeword search enumerates messages, the
//! coset oracle works from integer bit arithmetic, and the monomial row
//! builder evaluates products position by position.

#![allow(dead_code)]

use hlcrypt::bits::BitWord;
use hlcrypt::hlcode::{ComplementFreeSet, GeneratorMatrix};
use hlcrypt::relations::RelationDictionary;
use hlcrypt::rowmap::IndexTuple;

pub fn tuple(indices: &[u8]) -> IndexTuple {
    IndexTuple::new(indices.to_vec()).unwrap()
}

/// The worked 16-bit example: complement-free set ((1,4), (1,3), (1,2)).
pub fn golden_yset() -> ComplementFreeSet {
    ComplementFreeSet::from_tuples(
        4,
        vec![tuple(&[1, 4]), tuple(&[1, 3]), tuple(&[1, 2])],
    )
    .unwrap()
}

pub fn golden_code() -> (GeneratorMatrix, RelationDictionary) {
    let yset = golden_yset();
    let generator = GeneratorMatrix::partial(4)
        .unwrap()
        .into_complete(yset.clone())
        .unwrap();
    let mut cache = hlcrypt::relations::MaskCache::new();
    let relations =
        hlcrypt::relations::redundancy_relations_set(4, Some(&yset), &mut cache, 1, 7).unwrap();
    (generator, relations)
}

/// Message `value` as a k-bit word, bit `i` of the integer at position `i`.
pub fn message_from_u32(value: u32, k: usize) -> BitWord {
    let mut w = BitWord::zeros(k).unwrap();
    for bit in 0..k.min(32) {
        if (value >> bit) & 1 == 1 {
            w.set(bit, true);
        }
    }
    w
}

/// Brute-force nearest-codeword search over every message. Returns the
/// unique closest (codeword, message) or `None` on a distance tie.
pub fn nearest_codeword(
    word: &BitWord,
    generator: &GeneratorMatrix,
) -> Option<(BitWord, BitWord)> {
    let k = generator.params().k();
    assert!(k <= 20, "oracle only enumerates small codes");
    let mut best: Option<(usize, BitWord, BitWord)> = None;
    let mut tie = false;
    for value in 0u32..(1u32 << k) {
        let message = message_from_u32(value, k);
        let codeword = generator.encode(&message).unwrap();
        let distance = codeword.xor(word).unwrap().weight();
        match &best {
            Some((d, _, _)) if distance > *d => {}
            Some((d, _, _)) if distance == *d => tie = true,
            _ => {
                best = Some((distance, codeword, message));
                tie = false;
            }
        }
    }
    let (_, codeword, message) = best.unwrap();
    if tie {
        None
    } else {
        Some((codeword, message))
    }
}

/// Closed-form coset oracle: the mask of `(tuple, start)` contains exactly
/// the positions agreeing with `start` outside the tuple's bits.
pub fn coset_mask_oracle(t: &IndexTuple, start: usize, n: usize) -> Vec<usize> {
    let flip_bits: usize = t
        .indices()
        .iter()
        .fold(0, |acc, &j| acc | 1usize << (j - 1));
    (0..n)
        .filter(|p| p & !flip_bits == start & !flip_bits)
        .collect()
}

/// Independent monomial row constructor: bit `p` of the row for `t` is the
/// product of the selected binary digits of `p`.
pub fn monomial_row(t: &IndexTuple, n: usize) -> BitWord {
    let mut row = BitWord::zeros(n).unwrap();
    for p in 0..n {
        if t.indices().iter().all(|&j| (p >> (j - 1)) & 1 == 1) {
            row.set(p, true);
        }
    }
    row
}

//! Redundancy relations: the parity checks the majority decoder votes on.
//!
//! For a coefficient row with tuple `e`, each relation is the set of
//! positions reached from a start position by flipping every subset of the
//! bits `e` names. Those sets are cosets, so the relations of one
//! coefficient partition all `n` positions into `2^{m-u}` masks of weight
//! `2^u`, where `u` is the tuple degree. On an error-free codeword every
//! relation of row `j` sums to the coefficient `a_j`; an error of weight
//! `t` can disturb at most `t` of them, which is what makes the majority
//! vote work.
//!
//! Masks are built by the recursive expansion
//! `mask(e, i) = mask(e', i) | mask(e', flip(i, last(e)))` with `e'` the
//! tuple minus its last index. A [`MaskCache`] memoizes every intermediate
//! result; prefixes are shared heavily across rows, and the fixed rows are
//! computed once per parameter and persisted (see the `precompute` CLI
//! command).

use std::collections::{BTreeMap, HashMap};
use std::io::{BufReader, Read, Write};
use std::path::Path;

use crate::bits::BitWord;
use crate::fileio;
use crate::hlcode::ComplementFreeSet;
use crate::rowmap::{self, IndexTuple};
use crate::{Error, Result};

pub(crate) const RELATIONS_MAGIC: [u8; 4] = *b"HLR1";

/// Memoized intermediate masks, keyed by `(tuple, start position)`.
///
/// Purely a construction-time accelerator: a warm cache never changes a
/// result, only how fast it arrives. Dropped once the relations are built.
#[derive(Default)]
pub struct MaskCache {
    entries: HashMap<(IndexTuple, u32), BitWord>,
}

impl MaskCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn get(&self, tuple: &IndexTuple, position: usize) -> Option<&BitWord> {
        self.entries.get(&(tuple.clone(), position as u32))
    }

    fn insert(&mut self, tuple: &IndexTuple, position: usize, mask: BitWord) {
        self.entries.insert((tuple.clone(), position as u32), mask);
    }
}

/// Mask of the positions `{flip(start, s) : s subset of tuple}`, i.e. one
/// redundancy relation of the coefficient whose row carries `tuple`.
///
/// The empty tuple yields the empty mask. Intermediate results are read
/// from and written into the cache at every recursion level.
pub fn relation_mask(
    tuple: &IndexTuple,
    start: usize,
    n: usize,
    cache: &mut MaskCache,
) -> Result<BitWord> {
    if start >= n {
        return Err(Error::InvalidArgument("start position out of range"));
    }
    if tuple.is_empty() {
        return BitWord::zeros(n);
    }
    let max = tuple.max_index() as usize;
    if max > 63 || 1usize << (max - 1) >= n {
        return Err(Error::InvalidArgument("tuple index exceeds the word size"));
    }
    relation_mask_inner(tuple, start, n, cache)
}

fn relation_mask_inner(
    tuple: &IndexTuple,
    start: usize,
    n: usize,
    cache: &mut MaskCache,
) -> Result<BitWord> {
    if let Some(hit) = cache.get(tuple, start) {
        return Ok(hit.clone());
    }
    if tuple.degree() == 1 {
        let partner = rowmap::change_bit(start, tuple.indices()[0] as usize)?;
        return BitWord::from_positions(n, &[start, partner]);
    }
    let parent = tuple.parent();
    let last = *tuple.indices().last().expect("degree >= 2") as usize;
    let flipped = rowmap::change_bit(start, last)?;

    let first_half = relation_mask_inner(&parent, start, n, cache)?;
    cache.insert(&parent, start, first_half.clone());
    let second_half = relation_mask_inner(&parent, flipped, n, cache)?;
    cache.insert(&parent, flipped, second_half.clone());

    let mut mask = first_half;
    mask.or_assign(&second_half)?;
    cache.insert(tuple, start, mask.clone());
    Ok(mask)
}

/// All redundancy relations of one coefficient row, in discovery order:
/// ascending by each mask's lowest position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationSet {
    coeff_row: usize,
    tuple: IndexTuple,
    masks: Vec<BitWord>,
}

impl RelationSet {
    #[inline]
    pub fn coeff_row(&self) -> usize {
        self.coeff_row
    }

    #[inline]
    pub fn tuple(&self) -> &IndexTuple {
        &self.tuple
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.tuple.degree()
    }

    #[inline]
    pub fn masks(&self) -> &[BitWord] {
        &self.masks
    }
}

/// Computes the full relation set of row `row`: repeatedly expand from the
/// lowest position no relation has covered yet, until the masks partition
/// `{0..n-1}`.
pub fn redundancy_relations(
    row: usize,
    m: u32,
    yset: Option<&ComplementFreeSet>,
    cache: &mut MaskCache,
) -> Result<RelationSet> {
    let n = 1usize << m;
    let tuple = rowmap::row_to_comb(row, m, yset)?;
    let mut covered = BitWord::zeros(n)?;
    let mut masks = Vec::with_capacity(n >> tuple.degree());
    while let Some(start) = covered.first_unset() {
        let mask = relation_mask(&tuple, start, n, cache)?;
        debug_assert_eq!(covered.and_popcount(&mask).unwrap(), 0);
        covered.or_assign(&mask)?;
        masks.push(mask);
    }
    Ok(RelationSet {
        coeff_row: row,
        tuple,
        masks,
    })
}

/// Relation sets for a contiguous row range, grouped by coefficient
/// degree. Within a degree the sets stay in ascending row order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationDictionary {
    m: u32,
    by_degree: BTreeMap<usize, Vec<RelationSet>>,
}

impl RelationDictionary {
    pub fn new(m: u32) -> Self {
        Self {
            m,
            by_degree: BTreeMap::new(),
        }
    }

    #[inline]
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn insert(&mut self, set: RelationSet) {
        self.by_degree.entry(set.degree()).or_default().push(set);
    }

    pub fn get(&self, degree: usize) -> Option<&[RelationSet]> {
        self.by_degree.get(&degree).map(Vec::as_slice)
    }

    /// Degrees present, highest first: the order the decoder walks them.
    pub fn degrees_descending(&self) -> impl Iterator<Item = usize> + '_ {
        self.by_degree.keys().rev().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &RelationSet> {
        self.by_degree.values().flatten()
    }

    pub fn total_rows(&self) -> usize {
        self.by_degree.values().map(Vec::len).sum()
    }

    /// True when every coefficient row `1..k-1` is covered exactly once.
    pub fn covers_all_rows(&self, k: usize) -> bool {
        if self.total_rows() != k - 1 {
            return false;
        }
        let mut seen = vec![false; k];
        for set in self.iter() {
            if set.coeff_row == 0 || set.coeff_row >= k || seen[set.coeff_row] {
                return false;
            }
            seen[set.coeff_row] = true;
        }
        true
    }

    /// Merges two dictionaries over disjoint row ranges (the persisted
    /// fixed block plus the per-key random block).
    pub fn merge(mut self, other: RelationDictionary) -> Result<Self> {
        if self.m != other.m {
            return Err(Error::DimensionMismatch(
                "relation dictionaries for different parameters",
            ));
        }
        for (degree, mut sets) in other.by_degree {
            let slot = self.by_degree.entry(degree).or_default();
            slot.append(&mut sets);
            slot.sort_by_key(|s| s.coeff_row);
            if slot.windows(2).any(|w| w[0].coeff_row == w[1].coeff_row) {
                return Err(Error::DimensionMismatch(
                    "relation dictionaries overlap on a coefficient row",
                ));
            }
        }
        Ok(self)
    }

    /// Persists the dictionary. Only rows of the fixed block can be
    /// written: the file stores no tuples, and only fixed-block tuples can
    /// be reconstructed from the row index alone.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut rows: Vec<&RelationSet> = self.iter().collect();
        rows.sort_by_key(|s| s.coeff_row);
        if rows.is_empty() {
            return Err(Error::InvalidArgument("empty relation dictionary"));
        }
        let start = rows[0].coeff_row;
        let end = rows[rows.len() - 1].coeff_row;
        if end - start + 1 != rows.len() {
            return Err(Error::InvalidArgument(
                "relation dictionary rows are not contiguous",
            ));
        }
        if end >= rowmap::fixed_row_count(self.m) {
            return Err(Error::InvalidArgument(
                "only fixed-block relations can be persisted",
            ));
        }
        fileio::write_atomic(path, |w| {
            w.write_all(&RELATIONS_MAGIC)?;
            fileio::write_u32(w, self.m)?;
            fileio::write_u32(w, start as u32)?;
            fileio::write_u32(w, end as u32)?;
            for set in rows {
                fileio::write_u32(w, set.coeff_row as u32)?;
                w.write_all(&[set.degree() as u8])?;
                fileio::write_u32(w, set.masks.len() as u32)?;
                for mask in &set.masks {
                    mask.write_to(w)?;
                }
            }
            Ok(())
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut r = BufReader::new(std::fs::File::open(path)?);
        Self::read_from(&mut r)
    }

    pub(crate) fn read_from(r: &mut impl Read) -> Result<Self> {
        fileio::expect_magic(r, RELATIONS_MAGIC)?;
        let m = fileio::read_u32(r)?;
        if !(4..=40).contains(&m) {
            return Err(Error::CorruptFile(format!("bad code parameter m = {m}")));
        }
        let n = 1usize << m;
        let start = fileio::read_u32(r)? as usize;
        let end = fileio::read_u32(r)? as usize;
        if start == 0 || start > end || end >= rowmap::fixed_row_count(m) {
            return Err(Error::CorruptFile(format!(
                "bad relation row range {start}..={end}"
            )));
        }
        let mut dict = Self::new(m);
        for expected_row in start..=end {
            let row = fileio::read_u32(r)? as usize;
            if row != expected_row {
                return Err(Error::CorruptFile(format!(
                    "relation rows out of order: expected {expected_row}, found {row}"
                )));
            }
            let mut degree = [0u8; 1];
            fileio::read_exact(r, &mut degree)?;
            let degree = degree[0] as usize;
            if degree == 0 || degree > m as usize {
                return Err(Error::CorruptFile(format!("bad degree {degree}")));
            }
            let count = fileio::read_u32(r)? as usize;
            if count != n >> degree {
                return Err(Error::CorruptFile(format!(
                    "row {row}: {count} masks, expected {}",
                    n >> degree
                )));
            }
            let mut masks = Vec::with_capacity(count);
            for _ in 0..count {
                let mask = BitWord::read_from(r)?;
                if mask.len() != n {
                    return Err(Error::CorruptFile("mask length does not match n".into()));
                }
                masks.push(mask);
            }
            let tuple = rowmap::row_to_comb(row, m, None)
                .map_err(|_| Error::CorruptFile(format!("row {row} has no fixed tuple")))?;
            if tuple.degree() != degree {
                return Err(Error::CorruptFile(format!(
                    "row {row}: stored degree {degree} does not match the row layout"
                )));
            }
            dict.insert(RelationSet {
                coeff_row: row,
                tuple,
                masks,
            });
        }
        Ok(dict)
    }
}

/// Computes relation sets for rows `j_start..=j_end` and groups them by
/// degree. The fixed block (`1..fixed_rows`) is parameter-only and is what
/// `precompute` persists; the random block is computed during key
/// generation from the freshly drawn complement-free set.
pub fn redundancy_relations_set(
    m: u32,
    yset: Option<&ComplementFreeSet>,
    cache: &mut MaskCache,
    j_start: usize,
    j_end: usize,
) -> Result<RelationDictionary> {
    let k = 1usize << (m - 1);
    if j_start == 0 || j_start > j_end || j_end >= k {
        return Err(Error::InvalidRowRange {
            start: j_start,
            end: j_end,
            k,
        });
    }
    let mut dict = RelationDictionary::new(m);
    for row in j_start..=j_end {
        dict.insert(redundancy_relations(row, m, yset, cache)?);
    }
    Ok(dict)
}

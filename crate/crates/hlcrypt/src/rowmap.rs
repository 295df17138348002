//! Bookkeeping between generator-matrix rows and index tuples.
//!
//! Row 0 of an HL generator matrix is the all-ones vector. Row `r` for
//! `1 <= r <= m` is the basis vector whose bit at position `p` is bit
//! `r - 1` of `p`. Every later row is a product of basis vectors, and this
//! module maps a row number to the tuple of basis indices it multiplies:
//! first all tuples of degree `2..m/2` in lexicographic order, then (for
//! the final, randomized block) the tuples of the complement-free set in
//! insertion order.
//!
//! [`change_bit`] and [`change_bits`] flip selected bits of a position
//! index; they are the geometric core of the redundancy relations, which
//! pair every codeword position with its bit-flipped partners.

use crate::hlcode::ComplementFreeSet;
use crate::{Error, Result};

/// A strictly increasing tuple of basis indices, each at least 1.
///
/// The tuple for a generator row has degree `1..=m/2`; free-standing tuples
/// (as consumed by [`change_bits`] or mask expansion) may go up to degree
/// `m`, and the empty tuple acts as the identity.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexTuple {
    indices: Vec<u8>,
}

impl IndexTuple {
    pub fn new(indices: Vec<u8>) -> Result<Self> {
        let increasing = indices.windows(2).all(|w| w[0] < w[1]);
        if !increasing || indices.first().is_some_and(|&i| i == 0) {
            return Err(Error::MalformedTuple);
        }
        Ok(Self { indices })
    }

    pub fn empty() -> Self {
        Self { indices: Vec::new() }
    }

    pub fn single(index: u8) -> Result<Self> {
        Self::new(vec![index])
    }

    #[inline]
    pub fn indices(&self) -> &[u8] {
        &self.indices
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.indices.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Largest index in the tuple, 0 when empty.
    pub fn max_index(&self) -> u8 {
        self.indices.last().copied().unwrap_or(0)
    }

    /// The tuple without its last index.
    pub(crate) fn parent(&self) -> Self {
        Self {
            indices: self.indices[..self.indices.len() - 1].to_vec(),
        }
    }

    /// The complementary tuple within `{1..m}`.
    pub fn complement(&self, m: u32) -> Result<Self> {
        if self.max_index() as u32 > m {
            return Err(Error::MalformedTuple);
        }
        let indices = (1..=m as u8)
            .filter(|i| !self.indices.contains(i))
            .collect();
        Ok(Self { indices })
    }
}

impl std::fmt::Debug for IndexTuple {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, idx) in self.indices.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{idx}")?;
        }
        write!(f, ")")
    }
}

/// How a generator row comes about.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowSource {
    /// Row 0, the all-ones vector.
    Constant,
    /// Rows `1..=m`, a single basis vector.
    Single,
    /// The fixed block of lexicographically ordered products.
    Combination,
    /// The randomized block drawn from the complement-free set.
    YSet,
}

/// A row number together with its tuple and provenance.
#[derive(Clone, Debug)]
pub struct RowMeta {
    pub row: usize,
    pub tuple: Option<IndexTuple>,
    pub source: RowSource,
}

/// Describes row `row` of the generator matrix for parameter `m`.
pub fn row_meta(row: usize, m: u32, yset: Option<&ComplementFreeSet>) -> Result<RowMeta> {
    if row == 0 {
        return Ok(RowMeta {
            row,
            tuple: None,
            source: RowSource::Constant,
        });
    }
    let source = if row <= m as usize {
        RowSource::Single
    } else if row < fixed_row_count(m) {
        RowSource::Combination
    } else {
        RowSource::YSet
    };
    Ok(RowMeta {
        row,
        tuple: Some(row_to_comb(row, m, yset)?),
        source,
    })
}

/// Binomial coefficient as a `u64`. Saturates nowhere in the supported
/// parameter range (`n <= 63`).
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Number of fixed (non-random) generator rows: the constant row, the `m`
/// basis rows, and every product of degree `< m/2`.
pub fn fixed_row_count(m: u32) -> usize {
    (0..m as u64 / 2).map(|j| binomial(m as u64, j)).sum::<u64>() as usize
}

/// Flips bit `index - 1` of the position `i`: returns `i + 2^{index-1}`
/// when that bit is clear and `i - 2^{index-1}` when it is set.
#[inline]
pub fn change_bit(i: usize, index: usize) -> Result<usize> {
    if index == 0 || index > 63 {
        return Err(Error::BitIndexOutOfRange(index));
    }
    Ok(i ^ (1usize << (index - 1)))
}

/// Flips all bits named by the tuple at once; the empty tuple is a no-op.
pub fn change_bits(i: usize, tuple: &IndexTuple) -> Result<usize> {
    let mut out = i;
    for &index in tuple.indices() {
        out = change_bit(out, index as usize)?;
    }
    Ok(out)
}

/// Locates row `row` within the degree blocks of the generator matrix:
/// returns `(offset, level)` where the row's tuple is the `offset`-th
/// (0-based) tuple of degree `level + 1` in its block.
pub fn row_to_comb_index(row: usize, m: u32) -> Result<(usize, usize)> {
    let k = 1usize << (m - 1);
    if row == 0 {
        return Err(Error::ConstantRow);
    }
    if row >= k {
        return Err(Error::RowOutOfRange { row, k });
    }
    let mut sum: u64 = 0;
    let mut prev: u64 = 0;
    let mut level: i64 = -1;
    while row as u64 >= sum {
        prev = sum;
        level += 1;
        sum += binomial(m as u64, level as u64);
    }
    Ok((row - prev as usize, (level - 1) as usize))
}

/// The `index`-th (0-based) strictly increasing `degree`-tuple over
/// `{1..m}` in lexicographic order.
pub fn combination_at(m: u32, degree: usize, index: usize) -> Result<IndexTuple> {
    let total = binomial(m as u64, degree as u64) as usize;
    if index >= total {
        return Err(Error::CombinationOutOfRange {
            index,
            count: total,
        });
    }
    let mut remaining = index as u64;
    let mut out = Vec::with_capacity(degree);
    let mut candidate = 1u32;
    for pos in 0..degree {
        let slots_left = (degree - pos - 1) as u64;
        loop {
            // Tuples continuing with `candidate` here: choose the rest from
            // the indices above it.
            let count = binomial((m - candidate) as u64, slots_left);
            if remaining < count {
                break;
            }
            remaining -= count;
            candidate += 1;
        }
        out.push(candidate as u8);
        candidate += 1;
    }
    IndexTuple::new(out)
}

/// The tuple of basis indices multiplied together in row `row`.
///
/// Rows `1..=m` map to the single index `(row)`; rows of the fixed block
/// map to lexicographically ordered combinations; rows of the final block
/// map into the complement-free set in insertion order, which must then be
/// supplied.
pub fn row_to_comb(
    row: usize,
    m: u32,
    yset: Option<&ComplementFreeSet>,
) -> Result<IndexTuple> {
    let k = 1usize << (m - 1);
    if row == 0 {
        return Err(Error::ConstantRow);
    }
    if row >= k {
        return Err(Error::RowOutOfRange { row, k });
    }
    if row <= m as usize {
        return IndexTuple::single(row as u8);
    }
    let (offset, level) = row_to_comb_index(row, m)?;
    if row < fixed_row_count(m) {
        combination_at(m, level + 1, offset)
    } else {
        let yset = yset.ok_or(Error::MissingComplementFreeSet { row })?;
        yset.get(offset)
            .cloned()
            .ok_or(Error::CombinationOutOfRange {
                index: offset,
                count: yset.len(),
            })
    }
}

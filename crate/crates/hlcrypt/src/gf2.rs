//! Dense GF(2) matrices and position permutations.
//!
//! Rows are [`BitWord`]s, so elimination steps are word-wide XORs. This
//! backs the key-generation side of the cryptosystem: the random
//! invertible scrambler, its inverse, the `S * G` product, and the column
//! permutation of the public matrix.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::bits::BitWord;
use crate::{Error, Result};

/// A dense matrix over GF(2). Row lengths are power-of-two like every
/// `BitWord`; all matrices in this crate are `k x k` or `k x n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: Vec<BitWord>,
    cols: usize,
}

impl Matrix {
    pub fn from_rows(rows: Vec<BitWord>) -> Result<Self> {
        let cols = rows
            .first()
            .map(BitWord::len)
            .ok_or(Error::DimensionMismatch("matrix needs at least one row"))?;
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows"));
        }
        Ok(Self { rows, cols })
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Result<Self> {
        let rows = (0..nrows)
            .map(|_| BitWord::zeros(ncols))
            .collect::<Result<_>>()?;
        Ok(Self { rows, cols: ncols })
    }

    pub fn identity(size: usize) -> Result<Self> {
        let mut out = Self::zeros(size, size)?;
        for i in 0..size {
            out.rows[i].set(i, true);
        }
        Ok(out)
    }

    /// A uniformly random square matrix.
    pub fn random_square<R: Rng + ?Sized>(size: usize, rng: &mut R) -> Result<Self> {
        let rows = (0..size)
            .map(|_| BitWord::random(size, rng))
            .collect::<Result<_>>()?;
        Ok(Self { rows, cols: size })
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn rows(&self) -> &[BitWord] {
        &self.rows
    }

    #[inline]
    pub fn row(&self, i: usize) -> &BitWord {
        &self.rows[i]
    }

    pub fn is_square(&self) -> bool {
        self.rows.len() == self.cols
    }

    /// `self * other`: each output row is the XOR of the `other` rows
    /// selected by the bits of the corresponding `self` row.
    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        let product = self.mul_rows(&other.rows)?;
        Ok(Matrix {
            rows: product,
            cols: other.cols,
        })
    }

    /// Multiplies against a bare row slice, e.g. generator-matrix rows.
    pub fn mul_rows(&self, rhs: &[BitWord]) -> Result<Vec<BitWord>> {
        if self.cols != rhs.len() {
            return Err(Error::DimensionMismatch(
                "inner dimensions do not agree",
            ));
        }
        let out_cols = rhs
            .first()
            .map(BitWord::len)
            .ok_or(Error::DimensionMismatch("empty right-hand side"))?;
        let mut out = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            let mut acc = BitWord::zeros(out_cols)?;
            for j in row.iter_ones() {
                acc.xor_assign_unchecked(&rhs[j]);
            }
            out.push(acc);
        }
        Ok(out)
    }

    /// Row-vector times matrix: XOR of the rows the vector's bits select.
    pub fn vec_mul(&self, vector: &BitWord) -> Result<BitWord> {
        if vector.len() != self.rows.len() {
            return Err(Error::LengthMismatch {
                expected: self.rows.len(),
                actual: vector.len(),
            });
        }
        let mut acc = BitWord::zeros(self.cols)?;
        for j in vector.iter_ones() {
            acc.xor_assign_unchecked(&self.rows[j]);
        }
        Ok(acc)
    }

    /// Rank via forward elimination on a scratch copy.
    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(pivot) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(rank, pivot);
            let pivot_row = rows[rank].clone();
            for row in rows.iter_mut().skip(rank + 1) {
                if row.get(col) {
                    row.xor_assign_unchecked(&pivot_row);
                }
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rank
    }

    /// Gauss-Jordan inverse of a square matrix; `None` when singular.
    pub fn inverse(&self) -> Option<Matrix> {
        assert!(self.is_square(), "inverse of a non-square matrix");
        let size = self.cols;
        let mut left = self.rows.clone();
        let mut right = Matrix::identity(size).ok()?.rows;
        for col in 0..size {
            let pivot = (col..size).find(|&r| left[r].get(col))?;
            left.swap(col, pivot);
            right.swap(col, pivot);
            let pivot_left = left[col].clone();
            let pivot_right = right[col].clone();
            for r in 0..size {
                if r != col && left[r].get(col) {
                    left[r].xor_assign_unchecked(&pivot_left);
                    right[r].xor_assign_unchecked(&pivot_right);
                }
            }
        }
        Some(Matrix {
            rows: right,
            cols: size,
        })
    }

    /// Applies a position permutation to every row.
    pub fn permute_columns(&self, perm: &Permutation) -> Result<Matrix> {
        let rows = self
            .rows
            .iter()
            .map(|r| perm.apply(r))
            .collect::<Result<_>>()?;
        Ok(Matrix {
            rows,
            cols: self.cols,
        })
    }
}

/// A permutation of `{0..n-1}` holding both directions, applied to the
/// positions of a [`BitWord`]. Weight is preserved by construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    forward: Vec<u32>,
    inverse: Vec<u32>,
}

impl Permutation {
    /// A uniformly random permutation (unbiased shuffle).
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut forward: Vec<u32> = (0..len as u32).collect();
        forward.shuffle(rng);
        Self::from_forward_unchecked(forward)
    }

    pub fn from_forward(forward: Vec<u32>) -> Result<Self> {
        Self::validate(&forward)?;
        Ok(Self::from_forward_unchecked(forward))
    }

    pub fn from_inverse(inverse: Vec<u32>) -> Result<Self> {
        Self::validate(&inverse)?;
        let p = Self::from_forward_unchecked(inverse);
        Ok(Self {
            forward: p.inverse,
            inverse: p.forward,
        })
    }

    fn from_forward_unchecked(forward: Vec<u32>) -> Self {
        let mut inverse = vec![0u32; forward.len()];
        for (src, &dst) in forward.iter().enumerate() {
            inverse[dst as usize] = src as u32;
        }
        Self { forward, inverse }
    }

    fn validate(mapping: &[u32]) -> Result<()> {
        let mut seen = vec![false; mapping.len()];
        for &v in mapping {
            if v as usize >= mapping.len() || seen[v as usize] {
                return Err(Error::InvalidArgument("mapping is not a permutation"));
            }
            seen[v as usize] = true;
        }
        Ok(())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.forward.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn forward(&self) -> &[u32] {
        &self.forward
    }

    pub fn inverse(&self) -> &[u32] {
        &self.inverse
    }

    /// Moves the bit at position `i` to position `forward[i]`.
    pub fn apply(&self, word: &BitWord) -> Result<BitWord> {
        self.apply_mapping(word, &self.forward)
    }

    /// Undoes [`Permutation::apply`].
    pub fn apply_inverse(&self, word: &BitWord) -> Result<BitWord> {
        self.apply_mapping(word, &self.inverse)
    }

    fn apply_mapping(&self, word: &BitWord, mapping: &[u32]) -> Result<BitWord> {
        if word.len() != mapping.len() {
            return Err(Error::LengthMismatch {
                expected: mapping.len(),
                actual: word.len(),
            });
        }
        let mut out = BitWord::zeros(word.len())?;
        for p in word.iter_ones() {
            out.set(mapping[p] as usize, true);
        }
        Ok(out)
    }
}

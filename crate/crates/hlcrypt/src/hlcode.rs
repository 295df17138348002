//! HL-code construction: parameters, complement-free sets, and generator
//! matrices.
//!
//! For even `m >= 4` the code has length `n = 2^m`, dimension
//! `k = 2^{m-1}`, and minimum distance `d = 2^{m/2}`. The generator matrix
//! is the all-ones row, the `m` counting rows, all products of fewer than
//! `m/2` counting rows, and finally one product for each tuple of a
//! maximal complement-free set: half of the degree-`m/2` products, chosen
//! so that no product and its complementary product are both present.

use std::collections::HashSet;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::bits::BitWord;
use crate::fileio;
use crate::rowmap::{self, IndexTuple};
use crate::{Error, Result};

pub(crate) const MATRIX_MAGIC: [u8; 4] = *b"HLG1";
pub(crate) const YSET_MAGIC: [u8; 4] = *b"HLY1";

/// Derived parameters of an HL-code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CodeParams {
    m: u32,
    n: usize,
    k: usize,
    d: usize,
    t: usize,
}

impl CodeParams {
    pub fn new(m: u32) -> Result<Self> {
        if m < 4 || !m.is_multiple_of(2) || m > 40 {
            return Err(Error::InvalidCodeParameter(m));
        }
        let d = 1usize << (m / 2);
        Ok(Self {
            m,
            n: 1usize << m,
            k: 1usize << (m - 1),
            d,
            t: (d - 1) / 2,
        })
    }

    #[inline]
    pub fn m(&self) -> u32 {
        self.m
    }

    /// Code length `2^m`.
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Code dimension `2^{m-1}`.
    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    /// Minimum distance `2^{m/2}`.
    #[inline]
    pub fn d(&self) -> usize {
        self.d
    }

    /// Error capacity `(d - 1) / 2`; encryption adds exactly this many
    /// errors.
    #[inline]
    pub fn t(&self) -> usize {
        self.t
    }

    /// Rows shared by every generator matrix of this parameter.
    #[inline]
    pub fn fixed_rows(&self) -> usize {
        rowmap::fixed_row_count(self.m)
    }

    /// Size of a maximal complement-free set: half the degree-`m/2` tuples.
    #[inline]
    pub fn yset_size(&self) -> usize {
        rowmap::binomial(self.m as u64, self.m as u64 / 2) as usize / 2
    }
}

/// An ordered, maximal complement-free set of degree-`m/2` tuples.
///
/// Order matters: row `fixed_rows() + j` of the generator matrix uses the
/// `j`-th element inserted, so the set behaves like a FIFO list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplementFreeSet {
    m: u32,
    elements: Vec<IndexTuple>,
}

impl ComplementFreeSet {
    /// Draws a maximal complement-free set using the supplied randomness.
    ///
    /// All degree-`m/2` tuples are listed in lexicographic order; the
    /// second half of that list is the reversed complement of the first,
    /// so walking the pairs in a shuffled order and picking one side of
    /// each pair by a fair coin yields a uniform-ish maximal set.
    pub fn random<R: Rng + ?Sized>(m: u32, rng: &mut R) -> Result<Self> {
        let params = CodeParams::new(m)?;
        let degree = m as usize / 2;
        let total = rowmap::binomial(m as u64, degree as u64) as usize;
        let half = total / 2;
        let all: Vec<IndexTuple> = (0..total)
            .map(|i| rowmap::combination_at(m, degree, i))
            .collect::<Result<_>>()?;
        let first = &all[..half];
        let second_reversed: Vec<&IndexTuple> = all[half..].iter().rev().collect();
        debug_assert!(first
            .iter()
            .zip(&second_reversed)
            .all(|(a, b)| &&a.complement(m).unwrap() == b));

        let mut order: Vec<usize> = (0..half).collect();
        order.shuffle(rng);
        let mut elements = Vec::with_capacity(half);
        for &j in &order {
            if rng.random::<bool>() {
                elements.push(second_reversed[j].clone());
            } else {
                elements.push(first[j].clone());
            }
        }
        debug_assert_eq!(elements.len(), params.yset_size());
        Ok(Self { m, elements })
    }

    /// Builds a set from explicit tuples, validating maximality and
    /// complement-freeness.
    pub fn from_tuples(m: u32, elements: Vec<IndexTuple>) -> Result<Self> {
        let params = CodeParams::new(m)?;
        if elements.len() != params.yset_size() {
            return Err(Error::InvalidComplementFreeSet(
                "wrong number of tuples for a maximal set",
            ));
        }
        let degree = m as usize / 2;
        let mut seen: HashSet<u32> = HashSet::with_capacity(elements.len());
        for e in &elements {
            if e.degree() != degree || e.max_index() as u32 > m {
                return Err(Error::InvalidComplementFreeSet(
                    "tuple degree or index out of range",
                ));
            }
            let mask: u32 = e.indices().iter().fold(0, |acc, &i| acc | 1 << (i - 1));
            let complement = !mask & ((1 << m) - 1);
            if seen.contains(&complement) {
                return Err(Error::InvalidComplementFreeSet(
                    "set contains a tuple and its complement",
                ));
            }
            if !seen.insert(mask) {
                return Err(Error::InvalidComplementFreeSet("duplicate tuple"));
            }
        }
        Ok(Self { m, elements })
    }

    #[inline]
    pub fn m(&self) -> u32 {
        self.m
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// The `index`-th element in insertion order.
    pub fn get(&self, index: usize) -> Option<&IndexTuple> {
        self.elements.get(index)
    }

    pub fn iter(&self) -> impl Iterator<Item = &IndexTuple> {
        self.elements.iter()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fileio::write_atomic(path, |w| {
            w.write_all(&YSET_MAGIC)?;
            fileio::write_u32(w, self.m)?;
            self.write_body(w)
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut r = BufReader::new(std::fs::File::open(path)?);
        fileio::expect_magic(&mut r, YSET_MAGIC)?;
        let m = fileio::read_u32(&mut r)?;
        Self::read_body(&mut r, m)
    }

    /// The payload shared between the standalone file and the private-key
    /// embedding: tuple count, then each tuple as degree byte plus 1-based
    /// index bytes.
    pub(crate) fn write_body(&self, w: &mut impl Write) -> Result<()> {
        fileio::write_u32(w, self.elements.len() as u32)?;
        for e in &self.elements {
            w.write_all(&[e.degree() as u8])?;
            w.write_all(e.indices())?;
        }
        Ok(())
    }

    pub(crate) fn read_body(r: &mut impl Read, m: u32) -> Result<Self> {
        let count = fileio::read_u32(r)? as usize;
        if count > 1 << 24 {
            return Err(Error::CorruptFile(format!("implausible tuple count {count}")));
        }
        let mut elements = Vec::with_capacity(count);
        for _ in 0..count {
            let mut degree = [0u8; 1];
            fileio::read_exact(r, &mut degree)?;
            let mut indices = vec![0u8; degree[0] as usize];
            fileio::read_exact(r, &mut indices)?;
            elements.push(IndexTuple::new(indices).map_err(|_| {
                Error::CorruptFile("malformed tuple in complement-free set".into())
            })?);
        }
        Self::from_tuples(m, elements)
    }
}

/// Builds the counting row pattern: bit `p` of the result is bit `i` of
/// `p`, i.e. blocks of `2^i` zeros alternating with `2^i` ones.
///
/// `2^{i+1}` must divide `n`. `v_vector(i - 1, n)` is basis row `i` of the
/// generator matrix.
pub fn v_vector(i: u32, n: usize) -> Result<BitWord> {
    let mut out = BitWord::zeros(n)?;
    if n >> (i + 1) << (i + 1) != n || n >> (i + 1) == 0 {
        return Err(Error::InvalidArgument(
            "v_vector requires 2^(i+1) to divide n",
        ));
    }
    for p in 0..n {
        if (p >> i) & 1 == 1 {
            out.set(p, true);
        }
    }
    Ok(out)
}

/// Generator matrix of an HL-code; either the fixed partial block or a
/// completed matrix including the randomized rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorMatrix {
    params: CodeParams,
    rows: Vec<BitWord>,
    yset: Option<ComplementFreeSet>,
    complete: bool,
}

impl GeneratorMatrix {
    /// Builds the fixed rows every generator matrix of this parameter
    /// shares: the all-ones row, the counting rows, and all products of
    /// degree `2..m/2`.
    pub fn partial(m: u32) -> Result<Self> {
        let params = CodeParams::new(m)?;
        let n = params.n();
        let mut rows = Vec::with_capacity(params.fixed_rows());
        rows.push(BitWord::ones(n)?);
        for i in 0..m {
            rows.push(v_vector(i, n)?);
        }
        for degree in 2..m as usize / 2 {
            let total = rowmap::binomial(m as u64, degree as u64) as usize;
            for index in 0..total {
                let tuple = rowmap::combination_at(m, degree, index)?;
                let product = row_product(&rows[1..=m as usize], &tuple)?;
                rows.push(product);
            }
        }
        debug_assert_eq!(rows.len(), params.fixed_rows());
        Ok(Self {
            params,
            rows,
            yset: None,
            complete: false,
        })
    }

    /// Completes a partial matrix by appending one product row per tuple
    /// of the complement-free set, in insertion order.
    pub fn into_complete(mut self, yset: ComplementFreeSet) -> Result<Self> {
        if self.complete {
            return Err(Error::DimensionMismatch("matrix is already complete"));
        }
        if yset.m() != self.params.m() {
            return Err(Error::DimensionMismatch(
                "complement-free set parameter does not match the matrix",
            ));
        }
        if self.rows.len() != self.params.fixed_rows() {
            return Err(Error::DimensionMismatch(
                "partial matrix has an unexpected row count",
            ));
        }
        let m = self.params.m() as usize;
        for tuple in yset.iter() {
            let row = row_product(&self.rows[1..=m], tuple)?;
            self.rows.push(row);
        }
        debug_assert_eq!(self.rows.len(), self.params.k());
        self.yset = Some(yset);
        self.complete = true;
        Ok(self)
    }

    /// Reassembles a complete matrix from its rows, e.g. when loading a
    /// private key with an embedded copy.
    pub(crate) fn from_parts(
        params: CodeParams,
        rows: Vec<BitWord>,
        yset: Option<ComplementFreeSet>,
    ) -> Result<Self> {
        let complete = rows.len() == params.k();
        if !complete && rows.len() != params.fixed_rows() {
            return Err(Error::DimensionMismatch(
                "row count matches neither a partial nor a complete matrix",
            ));
        }
        if rows.iter().any(|r| r.len() != params.n()) {
            return Err(Error::DimensionMismatch("row length does not match n"));
        }
        Ok(Self {
            params,
            rows,
            yset,
            complete,
        })
    }

    #[inline]
    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    #[inline]
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    #[inline]
    pub fn rows(&self) -> &[BitWord] {
        &self.rows
    }

    #[inline]
    pub fn row(&self, index: usize) -> &BitWord {
        &self.rows[index]
    }

    pub fn yset(&self) -> Option<&ComplementFreeSet> {
        self.yset.as_ref()
    }

    /// Encodes a `k`-bit message: the XOR of the rows its set bits select.
    pub fn encode(&self, message: &BitWord) -> Result<BitWord> {
        if !self.complete {
            return Err(Error::IncompleteMatrix);
        }
        if message.len() != self.params.k() {
            return Err(Error::LengthMismatch {
                expected: self.params.k(),
                actual: message.len(),
            });
        }
        let mut out = BitWord::zeros(self.params.n())?;
        for row in message.iter_ones() {
            out.xor_assign_unchecked(&self.rows[row]);
        }
        Ok(out)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fileio::write_atomic(path, |w| {
            w.write_all(&MATRIX_MAGIC)?;
            fileio::write_u32(w, self.params.m())?;
            fileio::write_u32(w, self.rows.len() as u32)?;
            for row in &self.rows {
                row.write_to(w)?;
            }
            Ok(())
        })
    }

    /// Loads a partial or complete matrix; completeness is decided by the
    /// stored row count. A complete matrix loaded this way carries no
    /// complement-free set.
    pub fn load(path: &Path) -> Result<Self> {
        let mut r = BufReader::new(std::fs::File::open(path)?);
        fileio::expect_magic(&mut r, MATRIX_MAGIC)?;
        let m = fileio::read_u32(&mut r)?;
        let params = CodeParams::new(m)
            .map_err(|_| Error::CorruptFile(format!("bad code parameter m = {m}")))?;
        let count = fileio::read_u32(&mut r)? as usize;
        if count != params.fixed_rows() && count != params.k() {
            return Err(Error::CorruptFile(format!(
                "row count {count} matches neither the partial nor the complete matrix"
            )));
        }
        let mut rows = Vec::with_capacity(count);
        for _ in 0..count {
            let row = BitWord::read_from(&mut r)?;
            if row.len() != params.n() {
                return Err(Error::CorruptFile("row length does not match n".into()));
            }
            rows.push(row);
        }
        Self::from_parts(params, rows, None)
    }
}

/// Componentwise product of the basis rows the tuple names. `basis` holds
/// rows `v_1..=v_m` (index 0 is `v_1`).
fn row_product(basis: &[BitWord], tuple: &IndexTuple) -> Result<BitWord> {
    let mut indices = tuple.indices().iter();
    let first = indices
        .next()
        .ok_or(Error::InvalidArgument("empty tuple has no product row"))?;
    let mut out = basis[*first as usize - 1].clone();
    for &i in indices {
        out = out.and(&basis[i as usize - 1])?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn params_table() {
        let p = CodeParams::new(10).unwrap();
        assert_eq!((p.n(), p.k(), p.d(), p.t()), (1024, 512, 32, 15));
        let p = CodeParams::new(12).unwrap();
        assert_eq!((p.n(), p.k(), p.d(), p.t()), (4096, 2048, 64, 31));
        assert!(CodeParams::new(3).is_err());
        assert!(CodeParams::new(5).is_err());
        assert!(CodeParams::new(2).is_err());
    }

    #[test]
    fn v_vector_examples() {
        let v1 = v_vector(0, 8).unwrap();
        assert_eq!(v1.to_positions(), vec![1, 3, 5, 7]);
        let vm = v_vector(3, 16).unwrap();
        assert_eq!(vm.to_positions(), (8..16).collect::<Vec<_>>());
        assert!(v_vector(4, 16).is_err());
    }

    #[test]
    fn v_vector_bits_count_in_binary() {
        for m in [4u32, 6, 8] {
            let n = 1usize << m;
            for i in 0..m {
                let v = v_vector(i, n).unwrap();
                for p in 0..n {
                    assert_eq!(v.get(p), (p >> i) & 1 == 1);
                }
            }
        }
    }

    #[test]
    fn yset_m4_halves_complement_each_other() {
        // Lexicographic degree-2 tuples over {1..4} split as
        // A = (1,2),(1,3),(1,4) and reversed B = (3,4),(2,4),(2,3).
        let all: Vec<IndexTuple> = (0..6)
            .map(|i| rowmap::combination_at(4, 2, i).unwrap())
            .collect();
        let first = &all[..3];
        let second_rev: Vec<&IndexTuple> = all[3..].iter().rev().collect();
        for (a, b) in first.iter().zip(second_rev) {
            assert_eq!(&a.complement(4).unwrap(), b);
        }
    }

    #[test]
    fn random_yset_is_complement_free_and_maximal() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for m in [4u32, 6, 8, 10, 12] {
            let y = ComplementFreeSet::random(m, &mut rng).unwrap();
            assert_eq!(y.len(), CodeParams::new(m).unwrap().yset_size());
            // from_tuples re-validates complement-freeness.
            ComplementFreeSet::from_tuples(m, y.iter().cloned().collect()).unwrap();
        }
    }

    #[test]
    fn from_tuples_rejects_complement_pairs() {
        let t = |v: &[u8]| IndexTuple::new(v.to_vec()).unwrap();
        let bad = ComplementFreeSet::from_tuples(
            4,
            vec![t(&[1, 2]), t(&[3, 4]), t(&[1, 3])],
        );
        assert!(bad.is_err());
        let wrong_size = ComplementFreeSet::from_tuples(4, vec![t(&[1, 2])]);
        assert!(wrong_size.is_err());
    }

    #[test]
    fn partial_matrix_row_counts() {
        assert_eq!(GeneratorMatrix::partial(4).unwrap().rows().len(), 5);
        assert_eq!(GeneratorMatrix::partial(6).unwrap().rows().len(), 22);
        let g = GeneratorMatrix::partial(4).unwrap();
        assert_eq!(g.row(0).weight(), 16);
        assert!(!g.is_complete());
    }

    fn golden_yset() -> ComplementFreeSet {
        let t = |v: &[u8]| IndexTuple::new(v.to_vec()).unwrap();
        ComplementFreeSet::from_tuples(4, vec![t(&[1, 4]), t(&[1, 3]), t(&[1, 2])]).unwrap()
    }

    #[test]
    fn golden_m4_matrix() {
        let g = GeneratorMatrix::partial(4)
            .unwrap()
            .into_complete(golden_yset())
            .unwrap();
        let expected: [&[usize]; 8] = [
            &[0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15],
            &[1, 3, 5, 7, 9, 11, 13, 15],
            &[2, 3, 6, 7, 10, 11, 14, 15],
            &[4, 5, 6, 7, 12, 13, 14, 15],
            &[8, 9, 10, 11, 12, 13, 14, 15],
            &[9, 11, 13, 15],
            &[5, 7, 13, 15],
            &[3, 7, 11, 15],
        ];
        assert!(g.is_complete());
        for (i, positions) in expected.iter().enumerate() {
            assert_eq!(
                g.row(i).to_positions(),
                positions.to_vec(),
                "row {i} differs"
            );
        }
    }

    #[test]
    fn encode_examples() {
        let g = GeneratorMatrix::partial(4)
            .unwrap()
            .into_complete(golden_yset())
            .unwrap();
        let zero = BitWord::zeros(8).unwrap();
        assert!(g.encode(&zero).unwrap().is_zero());
        let e0 = BitWord::from_positions(8, &[0]).unwrap();
        assert_eq!(g.encode(&e0).unwrap(), BitWord::ones(16).unwrap());
        // a_0 = a_1 = 1 alternates 1,0,1,0,...
        let a = BitWord::from_positions(8, &[0, 1]).unwrap();
        assert_eq!(
            g.encode(&a).unwrap().to_positions(),
            vec![0, 2, 4, 6, 8, 10, 12, 14]
        );
        assert!(g.encode(&BitWord::zeros(16).unwrap()).is_err());
        assert!(GeneratorMatrix::partial(4)
            .unwrap()
            .encode(&zero)
            .is_err());
    }

    #[test]
    fn structural_row_identity() {
        // Bit p of any product row is the product of the binary digits of
        // p the tuple selects; checked directly against integer bit tests.
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        for m in [4u32, 6, 8] {
            let yset = ComplementFreeSet::random(m, &mut rng).unwrap();
            let g = GeneratorMatrix::partial(m)
                .unwrap()
                .into_complete(yset.clone())
                .unwrap();
            let n = g.params().n();
            for row in 1..g.params().k() {
                let tuple = rowmap::row_to_comb(row, m, Some(&yset)).unwrap();
                for p in 0..n {
                    let expected = tuple
                        .indices()
                        .iter()
                        .all(|&j| (p >> (j - 1)) & 1 == 1);
                    assert_eq!(g.row(row).get(p), expected, "m={m} row={row} p={p}");
                }
            }
        }
    }

    #[test]
    fn y_rows_have_weight_n_over_d() {
        let mut rng = ChaCha20Rng::seed_from_u64(17);
        for m in [4u32, 6, 8, 10] {
            let params = CodeParams::new(m).unwrap();
            let yset = ComplementFreeSet::random(m, &mut rng).unwrap();
            let g = GeneratorMatrix::partial(m)
                .unwrap()
                .into_complete(yset)
                .unwrap();
            for row in params.fixed_rows()..params.k() {
                assert_eq!(g.row(row).weight(), params.n() >> (m / 2));
            }
        }
    }

    #[test]
    fn matrix_and_yset_files_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let yset = golden_yset();
        let ypath = dir.path().join("golden.hly");
        yset.save(&ypath).unwrap();
        assert_eq!(ComplementFreeSet::load(&ypath).unwrap(), yset);

        let partial = GeneratorMatrix::partial(6).unwrap();
        let gpath = dir.path().join("partial.hlg");
        partial.save(&gpath).unwrap();
        let loaded = GeneratorMatrix::load(&gpath).unwrap();
        assert_eq!(loaded, partial);

        // Loading with the wrong magic fails cleanly.
        assert!(matches!(
            ComplementFreeSet::load(&gpath),
            Err(Error::BadMagic { .. })
        ));
    }
}

//! The McEliece-type cryptosystem over HL-codes.
//!
//! Key generation draws a random complement-free set (the secret part of
//! the code), completes the generator matrix `G`, computes the remaining
//! redundancy relations, and hides `G` behind a random invertible
//! scrambler `S` and a random column permutation `p`: the public matrix is
//! `G' = p(S * G)`. Encryption adds exactly `t` random errors to
//! `msg * G'`; decryption un-permutes, majority-decodes to recover
//! `msg * S`, and multiplies by `S^{-1}`.
//!
//! The expensive, parameter-only artifacts (partial generator matrix and
//! fixed-block relations) are computed once per `m`, see [`Precomputed`];
//! each key generation only adds the per-key random block.

use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use rand::Rng;
use sha2::{Digest, Sha256};

use crate::bits::BitWord;
use crate::decoder;
use crate::fileio;
use crate::gf2::{Matrix, Permutation};
use crate::hlcode::{CodeParams, ComplementFreeSet, GeneratorMatrix};
use crate::relations::{redundancy_relations_set, MaskCache, RelationDictionary};
use crate::{Error, Result};

pub(crate) const PRIVATE_MAGIC: [u8; 4] = *b"HLK1";
pub(crate) const PUBLIC_MAGIC: [u8; 4] = *b"HLP1";
pub(crate) const CIPHERTEXT_MAGIC: [u8; 4] = *b"HLC1";

/// The parameter-only artifacts every keypair of one `m` shares: the fixed
/// generator rows and their redundancy relations.
#[derive(Clone, Debug)]
pub struct Precomputed {
    params: CodeParams,
    partial: GeneratorMatrix,
    fixed_relations: RelationDictionary,
}

impl Precomputed {
    /// Computes both artifacts from scratch. Deterministic; no randomness
    /// is involved until key generation.
    pub fn generate(m: u32) -> Result<Self> {
        let params = CodeParams::new(m)?;
        let partial = GeneratorMatrix::partial(m)?;
        let mut cache = MaskCache::new();
        let fixed_relations =
            redundancy_relations_set(m, None, &mut cache, 1, params.fixed_rows() - 1)?;
        Ok(Self {
            params,
            partial,
            fixed_relations,
        })
    }

    pub fn partial_path(dir: &Path, m: u32) -> PathBuf {
        dir.join(format!("partial-m{m}.hlg"))
    }

    pub fn relations_path(dir: &Path, m: u32) -> PathBuf {
        dir.join(format!("relations-m{m}.hlr"))
    }

    /// Writes both artifacts under `dir`. Byte-identical across runs.
    pub fn save(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let m = self.params.m();
        let partial_path = Self::partial_path(dir, m);
        let relations_path = Self::relations_path(dir, m);
        self.partial.save(&partial_path)?;
        self.fixed_relations.save(&relations_path)?;
        Ok((partial_path, relations_path))
    }

    /// Loads both artifacts, reporting missing files as a
    /// [`Error::MissingPrecompute`] that names the command to run.
    pub fn load(dir: &Path, m: u32) -> Result<Self> {
        let params = CodeParams::new(m)?;
        let partial_path = Self::partial_path(dir, m);
        let relations_path = Self::relations_path(dir, m);
        if !partial_path.exists() || !relations_path.exists() {
            return Err(Error::MissingPrecompute {
                m,
                dir: dir.to_path_buf(),
            });
        }
        let partial = GeneratorMatrix::load(&partial_path)?;
        if partial.params().m() != m || partial.is_complete() {
            return Err(Error::CorruptFile(
                "partial matrix file does not match the requested parameter".into(),
            ));
        }
        let fixed_relations = RelationDictionary::load(&relations_path)?;
        if fixed_relations.m() != m
            || fixed_relations.total_rows() != params.fixed_rows() - 1
        {
            return Err(Error::CorruptFile(
                "relations file does not cover the fixed rows".into(),
            ));
        }
        Ok(Self {
            params,
            partial,
            fixed_relations,
        })
    }

    #[inline]
    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    #[inline]
    pub fn partial(&self) -> &GeneratorMatrix {
        &self.partial
    }

    #[inline]
    pub fn fixed_relations(&self) -> &RelationDictionary {
        &self.fixed_relations
    }
}

/// Private half: unscrambler, un-permutation, the secret code, and its
/// relation dictionary.
#[derive(Clone, Debug)]
pub struct PrivateKey {
    params: CodeParams,
    s_inv: Matrix,
    perm: Permutation,
    generator: GeneratorMatrix,
    relations: RelationDictionary,
}

/// Public half: the scrambled, permuted generator matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublicKey {
    params: CodeParams,
    g_prime: Matrix,
}

/// An encrypted word of length `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ciphertext {
    pub word: BitWord,
}

/// Samples a uniformly random invertible matrix by rejection, returning it
/// with its verified inverse. Invertibility over GF(2) has probability
/// about 0.29, so a handful of attempts suffice.
pub fn random_invertible_matrix<R: Rng + ?Sized>(
    size: usize,
    rng: &mut R,
) -> Result<(Matrix, Matrix)> {
    if size == 0 {
        return Err(Error::InvalidArgument("matrix size must be positive"));
    }
    loop {
        let candidate = Matrix::random_square(size, rng)?;
        if let Some(inverse) = candidate.inverse() {
            debug_assert_eq!(
                candidate.mul(&inverse).unwrap(),
                Matrix::identity(size).unwrap()
            );
            return Ok((candidate, inverse));
        }
    }
}

/// A uniformly random word of exactly the given weight: error positions
/// drawn without replacement.
pub fn random_error_word<R: Rng + ?Sized>(
    len: usize,
    weight: usize,
    rng: &mut R,
) -> Result<BitWord> {
    if weight > len {
        return Err(Error::InvalidArgument("error weight exceeds the length"));
    }
    let positions: Vec<usize> = rand::seq::index::sample(rng, len, weight).into_vec();
    BitWord::from_positions(len, &positions)
}

/// Generates a keypair from the shared artifacts and a randomness source.
/// A seeded generator makes the whole keypair reproducible.
pub fn keygen<R: Rng + ?Sized>(
    pre: &Precomputed,
    rng: &mut R,
) -> Result<(PrivateKey, PublicKey)> {
    let params = *pre.params();
    let m = params.m();

    let yset = ComplementFreeSet::random(m, rng)?;
    let generator = pre.partial().clone().into_complete(yset.clone())?;

    let mut cache = MaskCache::new();
    let random_block = redundancy_relations_set(
        m,
        Some(&yset),
        &mut cache,
        params.fixed_rows(),
        params.k() - 1,
    )?;
    let relations = pre.fixed_relations().clone().merge(random_block)?;

    let (s, s_inv) = random_invertible_matrix(params.k(), rng)?;
    let perm = Permutation::random(params.n(), rng);

    let scrambled = s.mul_rows(generator.rows())?;
    let public_rows = scrambled
        .iter()
        .map(|row| perm.apply(row))
        .collect::<Result<Vec<_>>>()?;

    Ok((
        PrivateKey {
            params,
            s_inv,
            perm,
            generator,
            relations,
        },
        PublicKey {
            params,
            g_prime: Matrix::from_rows(public_rows)?,
        },
    ))
}

/// Convenience for tests and the `selftest` command: computes the shared
/// artifacts in memory and generates one keypair.
pub fn keygen_fresh<R: Rng + ?Sized>(m: u32, rng: &mut R) -> Result<(PrivateKey, PublicKey)> {
    let pre = Precomputed::generate(m)?;
    keygen(&pre, rng)
}

/// Encrypts a `k`-bit message: `msg * G'` plus a random error of weight
/// exactly `t`.
pub fn encrypt<R: Rng + ?Sized>(
    public: &PublicKey,
    message: &BitWord,
    rng: &mut R,
) -> Result<Ciphertext> {
    if message.len() != public.params.k() {
        return Err(Error::LengthMismatch {
            expected: public.params.k(),
            actual: message.len(),
        });
    }
    let mut word = public.g_prime.vec_mul(message)?;
    let error = random_error_word(public.params.n(), public.params.t(), rng)?;
    word.xor_assign(&error)?;
    Ok(Ciphertext { word })
}

/// Decrypts a ciphertext: un-permute, decode, unscramble. A decoding
/// failure surfaces as the decoder's typed error and produces no output.
pub fn decrypt(private: &PrivateKey, ciphertext: &Ciphertext) -> Result<BitWord> {
    if ciphertext.word.len() != private.params.n() {
        return Err(Error::LengthMismatch {
            expected: private.params.n(),
            actual: ciphertext.word.len(),
        });
    }
    let unpermuted = private.perm.apply_inverse(&ciphertext.word)?;
    let outcome = decoder::decode(&unpermuted, &private.generator, &private.relations)?;
    private.s_inv.vec_mul(&outcome.message)
}

impl PrivateKey {
    #[inline]
    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    #[inline]
    pub fn generator(&self) -> &GeneratorMatrix {
        &self.generator
    }

    #[inline]
    pub fn relations(&self) -> &RelationDictionary {
        &self.relations
    }

    #[inline]
    pub fn permutation(&self) -> &Permutation {
        &self.perm
    }

    #[inline]
    pub fn s_inv(&self) -> &Matrix {
        &self.s_inv
    }

    /// Serializes the key: parameter, unscrambler, inverse permutation,
    /// complement-free set, an embedded copy of `G` for fast loading, and
    /// a SHA-256 over everything before it. Relations are never written;
    /// they are re-derived on load.
    pub fn save(&self, path: &Path) -> Result<()> {
        let bytes = self.to_bytes()?;
        fileio::write_atomic(path, |w| {
            w.write_all(&bytes)?;
            Ok(())
        })
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        buf.extend_from_slice(&PRIVATE_MAGIC);
        fileio::write_u32(&mut buf, self.params.m())?;
        for row in self.s_inv.rows() {
            row.write_to(&mut buf)?;
        }
        for &v in self.perm.inverse() {
            fileio::write_u32(&mut buf, v)?;
        }
        let yset = self
            .generator
            .yset()
            .ok_or(Error::InvalidArgument("private key lost its random block"))?;
        yset.write_body(&mut buf)?;
        // Embedded generator copy: optional in the format, always written
        // here. Loading without it rebuilds G from the set above.
        buf.push(1);
        for row in self.generator.rows() {
            row.write_to(&mut buf)?;
        }
        let digest = Sha256::digest(&buf);
        buf.extend_from_slice(&digest);
        Ok(buf)
    }

    /// Loads a key, recomputing the fixed artifacts in memory. Prefer
    /// [`PrivateKey::load_with`] when a precompute directory is at hand.
    pub fn load(path: &Path) -> Result<Self> {
        Self::load_impl(path, None)
    }

    /// Loads a key against existing shared artifacts, skipping their
    /// recomputation.
    pub fn load_with(path: &Path, pre: &Precomputed) -> Result<Self> {
        Self::load_impl(path, Some(pre))
    }

    fn load_impl(path: &Path, pre: Option<&Precomputed>) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        if bytes.len() < 36 {
            return Err(Error::CorruptFile("file too short".into()));
        }
        let (body, stored_digest) = bytes.split_at(bytes.len() - 32);
        let digest = Sha256::digest(body);
        if digest.as_slice() != stored_digest {
            // Distinguish "wrong kind of file" from silent corruption.
            let mut r = &bytes[..];
            fileio::expect_magic(&mut r, PRIVATE_MAGIC)?;
            return Err(Error::HashMismatch);
        }

        let mut r = body;
        fileio::expect_magic(&mut r, PRIVATE_MAGIC)?;
        let m = fileio::read_u32(&mut r)?;
        let params = CodeParams::new(m)
            .map_err(|_| Error::CorruptFile(format!("bad code parameter m = {m}")))?;
        if let Some(pre) = pre {
            if pre.params().m() != m {
                return Err(Error::DimensionMismatch(
                    "precomputed artifacts are for a different parameter",
                ));
            }
        }

        let mut s_rows = Vec::with_capacity(params.k());
        for _ in 0..params.k() {
            let row = BitWord::read_from(&mut r)?;
            if row.len() != params.k() {
                return Err(Error::CorruptFile("unscrambler row length".into()));
            }
            s_rows.push(row);
        }
        let s_inv = Matrix::from_rows(s_rows)?;

        let mut inverse = Vec::with_capacity(params.n());
        for _ in 0..params.n() {
            inverse.push(fileio::read_u32(&mut r)?);
        }
        let perm = Permutation::from_inverse(inverse)
            .map_err(|_| Error::CorruptFile("stored mapping is not a permutation".into()))?;

        let yset = ComplementFreeSet::read_body(&mut r, m)?;

        let mut flag = [0u8; 1];
        fileio::read_exact(&mut r, &mut flag)?;
        if flag[0] > 1 {
            return Err(Error::CorruptFile("bad embedded-matrix flag".into()));
        }
        let generator = if flag[0] == 1 {
            let mut rows = Vec::with_capacity(params.k());
            for _ in 0..params.k() {
                let row = BitWord::read_from(&mut r)?;
                rows.push(row);
            }
            GeneratorMatrix::from_parts(params, rows, Some(yset.clone()))?
        } else {
            let partial = match pre {
                Some(pre) => pre.partial().clone(),
                None => GeneratorMatrix::partial(m)?,
            };
            partial.into_complete(yset.clone())?
        };
        if !r.is_empty() {
            return Err(Error::CorruptFile("trailing bytes".into()));
        }

        let fixed = match pre {
            Some(pre) => pre.fixed_relations().clone(),
            None => {
                let mut cache = MaskCache::new();
                redundancy_relations_set(m, None, &mut cache, 1, params.fixed_rows() - 1)?
            }
        };
        let mut cache = MaskCache::new();
        let random_block = redundancy_relations_set(
            m,
            Some(&yset),
            &mut cache,
            params.fixed_rows(),
            params.k() - 1,
        )?;
        let relations = fixed.merge(random_block)?;

        Ok(Self {
            params,
            s_inv,
            perm,
            generator,
            relations,
        })
    }
}

impl PublicKey {
    #[inline]
    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    #[inline]
    pub fn matrix(&self) -> &Matrix {
        &self.g_prime
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fileio::write_atomic(path, |w| {
            w.write_all(&PUBLIC_MAGIC)?;
            fileio::write_u32(w, self.params.m())?;
            for row in self.g_prime.rows() {
                row.write_to(w)?;
            }
            Ok(())
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut r = BufReader::new(std::fs::File::open(path)?);
        fileio::expect_magic(&mut r, PUBLIC_MAGIC)?;
        let m = fileio::read_u32(&mut r)?;
        let params = CodeParams::new(m)
            .map_err(|_| Error::CorruptFile(format!("bad code parameter m = {m}")))?;
        let mut rows = Vec::with_capacity(params.k());
        for _ in 0..params.k() {
            let row = BitWord::read_from(&mut r)?;
            if row.len() != params.n() {
                return Err(Error::CorruptFile("public row length".into()));
            }
            rows.push(row);
        }
        Ok(Self {
            params,
            g_prime: Matrix::from_rows(rows)?,
        })
    }
}

impl Ciphertext {
    pub fn save(&self, path: &Path) -> Result<()> {
        fileio::write_atomic(path, |w| {
            w.write_all(&CIPHERTEXT_MAGIC)?;
            let m = self.word.len().trailing_zeros();
            fileio::write_u32(w, m)?;
            self.word.write_to(w)?;
            Ok(())
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut r = BufReader::new(std::fs::File::open(path)?);
        fileio::expect_magic(&mut r, CIPHERTEXT_MAGIC)?;
        let m = fileio::read_u32(&mut r)?;
        let params = CodeParams::new(m)
            .map_err(|_| Error::CorruptFile(format!("bad code parameter m = {m}")))?;
        let word = BitWord::read_from(&mut r)?;
        if word.len() != params.n() {
            return Err(Error::CorruptFile(
                "ciphertext length does not match its parameter".into(),
            ));
        }
        Ok(Self { word })
    }
}

//! Python bindings: key generation, encryption, decryption, and direct
//! access to the code's encoder/decoder.
//!
//! Messages, codewords, and ciphertexts cross the boundary as `bytes`
//! with the library's packing (bit `i` lives in byte `i/8` at offset
//! `i%8`). Every operation that consumes randomness accepts an optional
//! integer seed for reproducibility; without one, OS randomness is used.
//!
//!     import hlcrypt_py
//!     sk, pk = hlcrypt_py.keygen(6, seed=7)
//!     ct = pk.encrypt(b"\xde\xad\xbe\xef")
//!     assert sk.decrypt(ct) == b"\xde\xad\xbe\xef"

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyBytes;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use hlcrypt::bits::BitWord;
use hlcrypt::dhh;
use hlcrypt::hlcode::{ComplementFreeSet, GeneratorMatrix};
use hlcrypt::relations::{redundancy_relations_set, MaskCache, RelationDictionary};

fn to_py_err(e: hlcrypt::Error) -> PyErr {
    match e {
        hlcrypt::Error::Io(_) => PyIOError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn make_rng(seed: Option<u64>) -> ChaCha20Rng {
    match seed {
        Some(seed) => ChaCha20Rng::seed_from_u64(seed),
        None => {
            let mut seed_bytes = [0u8; 32];
            rand::rng().fill_bytes(&mut seed_bytes);
            ChaCha20Rng::from_seed(seed_bytes)
        }
    }
}

fn word_from_bytes(bytes: &[u8], expected_bits: usize, what: &str) -> PyResult<BitWord> {
    if bytes.len() * 8 != expected_bits {
        return Err(PyValueError::new_err(format!(
            "{what} must be exactly {} bytes, got {}",
            expected_bits / 8,
            bytes.len()
        )));
    }
    BitWord::from_raw_bytes(bytes).map_err(to_py_err)
}

/// Private key half: decrypts ciphertexts produced by its public twin.
#[pyclass(name = "PrivateKey", module = "hlcrypt_py")]
struct PyPrivateKey {
    inner: dhh::PrivateKey,
}

/// Public key half: encrypts fixed-length messages.
#[pyclass(name = "PublicKey", module = "hlcrypt_py")]
struct PyPublicKey {
    inner: dhh::PublicKey,
}

#[pymethods]
impl PyPrivateKey {
    /// Decrypt a ciphertext (raw n/8 bytes) back to the k/8 message bytes.
    fn decrypt<'py>(&self, py: Python<'py>, ciphertext: &[u8]) -> PyResult<Bound<'py, PyBytes>> {
        let word = word_from_bytes(ciphertext, self.inner.params().n(), "ciphertext")?;
        let message = dhh::decrypt(&self.inner, &dhh::Ciphertext { word }).map_err(to_py_err)?;
        Ok(PyBytes::new(py, &message.to_raw_bytes()))
    }

    /// Write the key file (magic HLK1).
    fn save(&self, path: &str) -> PyResult<()> {
        self.inner.save(path.as_ref()).map_err(to_py_err)
    }

    /// Load a key file, rebuilding the decoding tables in memory.
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(Self {
            inner: dhh::PrivateKey::load(path.as_ref()).map_err(to_py_err)?,
        })
    }

    #[getter]
    fn m(&self) -> u32 {
        self.inner.params().m()
    }

    #[getter]
    fn message_bytes(&self) -> usize {
        self.inner.params().k() / 8
    }

    fn __repr__(&self) -> String {
        let p = self.inner.params();
        format!("PrivateKey(m={}, n={}, k={})", p.m(), p.n(), p.k())
    }
}

#[pymethods]
impl PyPublicKey {
    /// Encrypt k/8 message bytes; returns the raw n/8 ciphertext bytes.
    #[pyo3(signature = (message, seed=None))]
    fn encrypt<'py>(
        &self,
        py: Python<'py>,
        message: &[u8],
        seed: Option<u64>,
    ) -> PyResult<Bound<'py, PyBytes>> {
        let word = word_from_bytes(message, self.inner.params().k(), "message")?;
        let mut rng = make_rng(seed);
        let ciphertext = dhh::encrypt(&self.inner, &word, &mut rng).map_err(to_py_err)?;
        Ok(PyBytes::new(py, &ciphertext.word.to_raw_bytes()))
    }

    /// Write the key file (magic HLP1).
    fn save(&self, path: &str) -> PyResult<()> {
        self.inner.save(path.as_ref()).map_err(to_py_err)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(Self {
            inner: dhh::PublicKey::load(path.as_ref()).map_err(to_py_err)?,
        })
    }

    #[getter]
    fn m(&self) -> u32 {
        self.inner.params().m()
    }

    #[getter]
    fn message_bytes(&self) -> usize {
        self.inner.params().k() / 8
    }

    #[getter]
    fn ciphertext_bytes(&self) -> usize {
        self.inner.params().n() / 8
    }

    /// Number of errors added during encryption.
    #[getter]
    fn error_weight(&self) -> usize {
        self.inner.params().t()
    }

    fn __repr__(&self) -> String {
        let p = self.inner.params();
        format!("PublicKey(m={}, n={}, k={})", p.m(), p.n(), p.k())
    }
}

/// A bare code instance: encoder plus majority-logic decoder, without the
/// cryptosystem wrapping. Useful for experimenting with error patterns.
#[pyclass(name = "HlCode", module = "hlcrypt_py")]
struct PyHlCode {
    generator: GeneratorMatrix,
    relations: RelationDictionary,
}

#[pymethods]
impl PyHlCode {
    /// Build a code of parameter `m` with a randomly drawn (seedable)
    /// complement-free set.
    #[new]
    #[pyo3(signature = (m, seed=None))]
    fn new(m: u32, seed: Option<u64>) -> PyResult<Self> {
        let mut rng = make_rng(seed);
        let yset = ComplementFreeSet::random(m, &mut rng).map_err(to_py_err)?;
        let generator = GeneratorMatrix::partial(m)
            .map_err(to_py_err)?
            .into_complete(yset.clone())
            .map_err(to_py_err)?;
        let k = generator.params().k();
        let mut cache = MaskCache::new();
        let relations =
            redundancy_relations_set(m, Some(&yset), &mut cache, 1, k - 1).map_err(to_py_err)?;
        Ok(Self {
            generator,
            relations,
        })
    }

    /// Encode k/8 message bytes into the n/8 codeword bytes.
    fn encode<'py>(&self, py: Python<'py>, message: &[u8]) -> PyResult<Bound<'py, PyBytes>> {
        let word = word_from_bytes(message, self.generator.params().k(), "message")?;
        let codeword = self.generator.encode(&word).map_err(to_py_err)?;
        Ok(PyBytes::new(py, &codeword.to_raw_bytes()))
    }

    /// Decode a noisy word; returns `(message_bytes, error_positions)`.
    fn decode<'py>(
        &self,
        py: Python<'py>,
        word: &[u8],
    ) -> PyResult<(Bound<'py, PyBytes>, Vec<usize>)> {
        let word = word_from_bytes(word, self.generator.params().n(), "word")?;
        let outcome =
            hlcrypt::decode(&word, &self.generator, &self.relations).map_err(to_py_err)?;
        Ok((
            PyBytes::new(py, &outcome.message.to_raw_bytes()),
            outcome.error.to_positions(),
        ))
    }

    #[getter]
    fn m(&self) -> u32 {
        self.generator.params().m()
    }

    #[getter]
    fn n(&self) -> usize {
        self.generator.params().n()
    }

    #[getter]
    fn k(&self) -> usize {
        self.generator.params().k()
    }

    /// Guaranteed error-correction capacity.
    #[getter]
    fn t(&self) -> usize {
        self.generator.params().t()
    }

    fn __repr__(&self) -> String {
        let p = self.generator.params();
        format!("HlCode(m={}, n={}, k={}, d={}, t={})", p.m(), p.n(), p.k(), p.d(), p.t())
    }
}

/// Generate a keypair. A seed makes the pair reproducible.
#[pyfunction]
#[pyo3(signature = (m, seed=None))]
fn keygen(m: u32, seed: Option<u64>) -> PyResult<(PyPrivateKey, PyPublicKey)> {
    let mut rng = make_rng(seed);
    let (sk, pk) = dhh::keygen_fresh(m, &mut rng).map_err(to_py_err)?;
    Ok((PyPrivateKey { inner: sk }, PyPublicKey { inner: pk }))
}

#[pymodule]
fn hlcrypt_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyPrivateKey>()?;
    m.add_class::<PyPublicKey>()?;
    m.add_class::<PyHlCode>()?;
    m.add_function(wrap_pyfunction!(keygen, m)?)?;
    Ok(())
}

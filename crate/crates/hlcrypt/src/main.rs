//! Command-line surface: precomputation, key lifecycle, file
//! encryption/decryption, self-tests, and the timing harness.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use hlcrypt::bench;
use hlcrypt::bits::BitWord;
use hlcrypt::dhh::{self, Ciphertext, Precomputed, PrivateKey, PublicKey};
use hlcrypt::hlcode::{CodeParams, ComplementFreeSet, GeneratorMatrix};
use hlcrypt::relations::{redundancy_relations_set, MaskCache};
use hlcrypt::rowmap::IndexTuple;
use hlcrypt::Error;

#[derive(Parser)]
#[command(
    name = "hlcrypt",
    about = "HL-code majority-logic decoding and a McEliece-type cryptosystem",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the shared per-parameter artifacts and store them on disk.
    Precompute {
        /// Code parameter; must be even and at least 4.
        #[arg(long)]
        m: u32,
        /// Output directory for the partial matrix and fixed relations.
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a keypair from precomputed artifacts.
    Keygen {
        #[arg(long)]
        m: u32,
        /// Seed for reproducible keys; omitted means OS randomness.
        #[arg(long)]
        seed: Option<u64>,
        /// Where to write the private key.
        #[arg(long = "priv")]
        priv_path: PathBuf,
        /// Where to write the public key.
        #[arg(long = "pub")]
        pub_path: PathBuf,
        /// Directory holding the precomputed artifacts.
        #[arg(long, default_value = "hlcrypt-data")]
        data: PathBuf,
    },
    /// Encrypt a raw k/8-byte message file.
    Encrypt {
        #[arg(long = "pub")]
        pub_path: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out")]
        output: PathBuf,
        /// Seed for a reproducible error vector; omitted means OS randomness.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Decrypt a ciphertext file back to the raw message bytes.
    Decrypt {
        #[arg(long = "priv")]
        priv_path: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out")]
        output: PathBuf,
        /// Optional directory with precomputed artifacts to speed loading.
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Time keygen/encrypt/decrypt and write per-trial CSV records.
    Bench {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        trials: u32,
        /// CSV output path (columns: operation,m,trial,wall_seconds).
        #[arg(long)]
        csv: PathBuf,
        /// Directory for precomputed artifacts; created on demand.
        #[arg(long, default_value = "hlcrypt-data")]
        data: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run built-in correctness checks.
    Selftest {
        /// Parameter for the randomized roundtrip phase.
        #[arg(long, default_value_t = 6)]
        m: u32,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
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

fn check_m(m: u32) -> hlcrypt::Result<()> {
    CodeParams::new(m).map(|_| ())
}

fn run(command: Command) -> hlcrypt::Result<()> {
    match command {
        Command::Precompute { m, out } => cmd_precompute(m, &out),
        Command::Keygen {
            m,
            seed,
            priv_path,
            pub_path,
            data,
        } => cmd_keygen(m, seed, &priv_path, &pub_path, &data),
        Command::Encrypt {
            pub_path,
            input,
            output,
            seed,
        } => cmd_encrypt(&pub_path, &input, &output, seed),
        Command::Decrypt {
            priv_path,
            input,
            output,
            data,
        } => cmd_decrypt(&priv_path, &input, &output, data.as_deref()),
        Command::Bench {
            m,
            trials,
            csv,
            data,
            seed,
        } => cmd_bench(m, trials, &csv, &data, seed),
        Command::Selftest { m } => cmd_selftest(m),
    }
}

fn cmd_precompute(m: u32, out: &Path) -> hlcrypt::Result<()> {
    check_m(m)?;
    let pre = Precomputed::generate(m)?;
    let (partial_path, relations_path) = pre.save(out)?;
    println!("wrote {}", partial_path.display());
    println!("wrote {}", relations_path.display());
    Ok(())
}

fn cmd_keygen(
    m: u32,
    seed: Option<u64>,
    priv_path: &Path,
    pub_path: &Path,
    data: &Path,
) -> hlcrypt::Result<()> {
    check_m(m)?;
    let pre = Precomputed::load(data, m)?;
    let mut rng = make_rng(seed);
    let (sk, pk) = dhh::keygen(&pre, &mut rng)?;
    sk.save(priv_path)?;
    pk.save(pub_path)?;
    println!("wrote private key {}", priv_path.display());
    println!("wrote public key  {}", pub_path.display());
    Ok(())
}

fn cmd_encrypt(
    pub_path: &Path,
    input: &Path,
    output: &Path,
    seed: Option<u64>,
) -> hlcrypt::Result<()> {
    let pk = PublicKey::load(pub_path)?;
    let k = pk.params().k();
    let bytes = std::fs::read(input)?;
    if bytes.len() * 8 != k {
        return Err(Error::LengthMismatch {
            expected: k / 8,
            actual: bytes.len(),
        });
    }
    let message = BitWord::from_raw_bytes(&bytes)?;
    let mut rng = make_rng(seed);
    let ciphertext = dhh::encrypt(&pk, &message, &mut rng)?;
    ciphertext.save(output)?;
    println!("wrote ciphertext {}", output.display());
    Ok(())
}

fn cmd_decrypt(
    priv_path: &Path,
    input: &Path,
    output: &Path,
    data: Option<&Path>,
) -> hlcrypt::Result<()> {
    let ciphertext = Ciphertext::load(input)?;
    let m = ciphertext.word.len().trailing_zeros();
    let sk = match data {
        Some(dir) => match Precomputed::load(dir, m) {
            Ok(pre) => PrivateKey::load_with(priv_path, &pre)?,
            Err(Error::MissingPrecompute { .. }) => PrivateKey::load(priv_path)?,
            Err(e) => return Err(e),
        },
        None => PrivateKey::load(priv_path)?,
    };
    let message = dhh::decrypt(&sk, &ciphertext)?;
    let bytes = message.to_raw_bytes();
    hlcrypt_write_file(output, &bytes)?;
    println!("wrote message {}", output.display());
    Ok(())
}

fn hlcrypt_write_file(path: &Path, bytes: &[u8]) -> hlcrypt::Result<()> {
    // Atomic like every other artifact: no partial plaintext on failure.
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let tmp = match dir {
        Some(dir) => tempfile::NamedTempFile::new_in(dir)?,
        None => tempfile::NamedTempFile::new_in(".")?,
    };
    std::fs::write(tmp.path(), bytes)?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn cmd_bench(
    m: u32,
    trials: u32,
    csv: &Path,
    data: &Path,
    seed: Option<u64>,
) -> hlcrypt::Result<()> {
    check_m(m)?;
    if trials == 0 {
        return Err(Error::InvalidArgument("trial count must be positive"));
    }
    // Make sure the on-disk artifacts exist; building them is setup, not a
    // timed operation.
    if Precomputed::load(data, m).is_err() {
        eprintln!("precomputing artifacts for m = {m} (one-time setup)");
        Precomputed::generate(m)?.save(data)?;
    }

    let mut rng = make_rng(seed);
    let (mut records, sk, pk) = bench::time_keygen_from_dir(data, m, trials, &mut rng)?;
    records.extend(bench::time_roundtrips(&sk, &pk, trials, &mut rng)?);
    bench::write_csv(&records, csv)?;
    println!("wrote {} records to {}", records.len(), csv.display());

    for s in bench::summarize(&records) {
        println!(
            "{:<8} m={} trials={} mean={:.6}s median={:.6}s",
            s.operation.name(),
            s.m,
            s.trials,
            s.mean_seconds,
            s.median_seconds
        );
    }
    Ok(())
}

fn cmd_selftest(m: u32) -> hlcrypt::Result<()> {
    check_m(m)?;
    let mut failures = 0;
    let mut check = |name: &str, ok: bool| {
        println!("{} {name}", if ok { "ok  " } else { "FAIL" });
        if !ok {
            failures += 1;
        }
    };

    // Golden relation sets over the worked 16-bit example.
    let tuple = |v: &[u8]| IndexTuple::new(v.to_vec()).unwrap();
    let yset = ComplementFreeSet::from_tuples(
        4,
        vec![tuple(&[1, 4]), tuple(&[1, 3]), tuple(&[1, 2])],
    )?;
    let mut cache = MaskCache::new();
    let dict = redundancy_relations_set(4, Some(&yset), &mut cache, 1, 7)?;
    let expected_a5: Vec<Vec<usize>> = vec![
        vec![0, 1, 8, 9],
        vec![2, 3, 10, 11],
        vec![4, 5, 12, 13],
        vec![6, 7, 14, 15],
    ];
    let a5 = &dict.get(2).unwrap()[0];
    check(
        "golden relation sets (m=4)",
        a5.coeff_row() == 5
            && a5.masks().iter().map(|m| m.to_positions()).collect::<Vec<_>>() == expected_a5,
    );

    // Golden generator matrix.
    let g = GeneratorMatrix::partial(4)?.into_complete(yset)?;
    let golden_rows: [&[usize]; 8] = [
        &[0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15],
        &[1, 3, 5, 7, 9, 11, 13, 15],
        &[2, 3, 6, 7, 10, 11, 14, 15],
        &[4, 5, 6, 7, 12, 13, 14, 15],
        &[8, 9, 10, 11, 12, 13, 14, 15],
        &[9, 11, 13, 15],
        &[5, 7, 13, 15],
        &[3, 7, 11, 15],
    ];
    check(
        "golden generator matrix (m=4)",
        (0..8).all(|i| g.row(i).to_positions() == golden_rows[i]),
    );

    // Exhaustive single-error decoding over the small code.
    let mut exhaustive_ok = true;
    'outer: for msg_value in 0u32..256 {
        let mut message = BitWord::zeros(8)?;
        for bit in 0..8 {
            message.set(bit, (msg_value >> bit) & 1 == 1);
        }
        let codeword = g.encode(&message)?;
        for err in 0..=16usize {
            let noisy = if err == 0 {
                codeword.clone()
            } else {
                let e = BitWord::from_positions(16, &[err - 1])?;
                codeword.xor(&e)?
            };
            match hlcrypt::decode(&noisy, &g, &dict) {
                Ok(out) if out.message == message && out.codeword == codeword => {}
                _ => {
                    exhaustive_ok = false;
                    break 'outer;
                }
            }
        }
    }
    check("exhaustive weight-<=1 decoding (m=4)", exhaustive_ok);

    // Randomized keypair roundtrips at the requested parameter.
    let mut rng = make_rng(None);
    let pre = Precomputed::generate(m)?;
    let (sk, pk) = dhh::keygen(&pre, &mut rng)?;
    let mut roundtrips_ok = true;
    for _ in 0..32 {
        let message = BitWord::random(pre.params().k(), &mut rng)?;
        let ciphertext = dhh::encrypt(&pk, &message, &mut rng)?;
        if dhh::decrypt(&sk, &ciphertext)? != message {
            roundtrips_ok = false;
            break;
        }
    }
    check(&format!("32 encrypt/decrypt roundtrips (m={m})"), roundtrips_ok);

    if failures > 0 {
        return Err(Error::InvalidArgument("selftest failed"));
    }
    println!("all checks passed");
    Ok(())
}

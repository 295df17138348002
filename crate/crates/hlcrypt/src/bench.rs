//! Wall-clock benchmark harness behind the CLI `bench` command.
//!
//! Records one row per (operation, trial) and reports mean and median per
//! operation. Key-generation trials load the precomputed artifacts from
//! disk each time, since that read is part of the operation; encryption
//! and decryption trials run against one in-memory keypair, a fresh random
//! message each, and verify the roundtrip so a silently broken decode
//! cannot produce a timing.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rand::Rng;

use crate::bits::BitWord;
use crate::dhh::{self, Precomputed, PrivateKey, PublicKey};
use crate::fileio;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Operation {
    Keygen,
    Encrypt,
    Decrypt,
}

impl Operation {
    pub const ALL: [Operation; 3] = [Operation::Keygen, Operation::Encrypt, Operation::Decrypt];

    pub fn name(self) -> &'static str {
        match self {
            Operation::Keygen => "keygen",
            Operation::Encrypt => "encrypt",
            Operation::Decrypt => "decrypt",
        }
    }
}

/// One timed trial.
#[derive(Clone, Debug)]
pub struct BenchRecord {
    pub operation: Operation,
    pub m: u32,
    pub trial: u32,
    pub wall_seconds: f64,
}

/// Mean/median summary of one operation's trials.
#[derive(Clone, Debug)]
pub struct BenchSummary {
    pub operation: Operation,
    pub m: u32,
    pub trials: usize,
    pub mean_seconds: f64,
    pub median_seconds: f64,
}

/// Times `trials` key generations, each loading the artifacts from `dir`,
/// and returns the records plus the last keypair for the roundtrip phase.
pub fn time_keygen_from_dir<R: Rng + ?Sized>(
    dir: &Path,
    m: u32,
    trials: u32,
    rng: &mut R,
) -> Result<(Vec<BenchRecord>, PrivateKey, PublicKey)> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trial count must be positive"));
    }
    let mut records = Vec::with_capacity(trials as usize);
    let mut keypair = None;
    for trial in 0..trials {
        let start = Instant::now();
        let pre = Precomputed::load(dir, m)?;
        let pair = dhh::keygen(&pre, rng)?;
        records.push(BenchRecord {
            operation: Operation::Keygen,
            m,
            trial,
            wall_seconds: start.elapsed().as_secs_f64(),
        });
        keypair = Some(pair);
    }
    let (sk, pk) = keypair.expect("at least one trial ran");
    Ok((records, sk, pk))
}

/// Times `trials` keypair generations against in-memory artifacts.
pub fn time_keygen_in_memory<R: Rng + ?Sized>(
    pre: &Precomputed,
    trials: u32,
    rng: &mut R,
) -> Result<(Vec<BenchRecord>, PrivateKey, PublicKey)> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trial count must be positive"));
    }
    let m = pre.params().m();
    let mut records = Vec::with_capacity(trials as usize);
    let mut keypair = None;
    for trial in 0..trials {
        let start = Instant::now();
        let pair = dhh::keygen(pre, rng)?;
        records.push(BenchRecord {
            operation: Operation::Keygen,
            m,
            trial,
            wall_seconds: start.elapsed().as_secs_f64(),
        });
        keypair = Some(pair);
    }
    let (sk, pk) = keypair.expect("at least one trial ran");
    Ok((records, sk, pk))
}

/// Times `trials` encrypt/decrypt pairs on fresh random messages,
/// verifying each roundtrip.
pub fn time_roundtrips<R: Rng + ?Sized>(
    private: &PrivateKey,
    public: &PublicKey,
    trials: u32,
    rng: &mut R,
) -> Result<Vec<BenchRecord>> {
    let m = public.params().m();
    let k = public.params().k();
    let mut records = Vec::with_capacity(2 * trials as usize);
    for trial in 0..trials {
        let message = BitWord::random(k, rng)?;

        let start = Instant::now();
        let ciphertext = dhh::encrypt(public, &message, rng)?;
        records.push(BenchRecord {
            operation: Operation::Encrypt,
            m,
            trial,
            wall_seconds: start.elapsed().as_secs_f64(),
        });

        let start = Instant::now();
        let recovered = dhh::decrypt(private, &ciphertext)?;
        records.push(BenchRecord {
            operation: Operation::Decrypt,
            m,
            trial,
            wall_seconds: start.elapsed().as_secs_f64(),
        });

        if recovered != message {
            return Err(Error::InvalidArgument(
                "benchmark roundtrip failed to recover the message",
            ));
        }
    }
    Ok(records)
}

/// Per-operation mean and median, in the fixed keygen/encrypt/decrypt
/// order.
pub fn summarize(records: &[BenchRecord]) -> Vec<BenchSummary> {
    let mut out = Vec::new();
    for op in Operation::ALL {
        let mut times: Vec<f64> = records
            .iter()
            .filter(|r| r.operation == op)
            .map(|r| r.wall_seconds)
            .collect();
        if times.is_empty() {
            continue;
        }
        times.sort_by(|a, b| a.total_cmp(b));
        let mean = times.iter().sum::<f64>() / times.len() as f64;
        let median = if times.len() % 2 == 1 {
            times[times.len() / 2]
        } else {
            (times[times.len() / 2 - 1] + times[times.len() / 2]) / 2.0
        };
        out.push(BenchSummary {
            operation: op,
            m: records[0].m,
            trials: times.len(),
            mean_seconds: mean,
            median_seconds: median,
        });
    }
    out
}

/// Writes the records as CSV with the columns
/// `operation,m,trial,wall_seconds`.
pub fn write_csv(records: &[BenchRecord], path: &Path) -> Result<()> {
    fileio::write_atomic(path, |w| {
        writeln!(w, "operation,m,trial,wall_seconds")?;
        for r in records {
            writeln!(
                w,
                "{},{},{},{:.9}",
                r.operation.name(),
                r.m,
                r.trial,
                r.wall_seconds
            )?;
        }
        Ok(())
    })
}

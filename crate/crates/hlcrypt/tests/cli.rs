//! End-to-end runs of the `hlcrypt` binary: precompute, key lifecycle,
//! file encryption, error paths, bench CSV shape, and the selftest.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn hlcrypt() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hlcrypt"))
}

fn run_ok(args: &[&str], cwd: &Path) -> Output {
    let out = hlcrypt().args(args).current_dir(cwd).output().unwrap();
    assert!(
        out.status.success(),
        "command {:?} failed:\nstdout: {}\nstderr: {}",
        args,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn run_err(args: &[&str], cwd: &Path) -> Output {
    let out = hlcrypt().args(args).current_dir(cwd).output().unwrap();
    assert!(
        !out.status.success(),
        "command {:?} unexpectedly succeeded",
        args
    );
    out
}

struct Workspace {
    _dir: tempfile::TempDir,
    root: PathBuf,
}

impl Workspace {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path().to_path_buf();
        Self { _dir: dir, root }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    fn path_str(&self, name: &str) -> String {
        self.path(name).to_string_lossy().into_owned()
    }
}

#[test]
fn full_lifecycle_m6() {
    let ws = Workspace::new();
    let data = ws.path_str("data");

    run_ok(&["precompute", "--m", "6", "--out", &data], &ws.root);
    assert!(ws.path("data/partial-m6.hlg").exists());
    assert!(ws.path("data/relations-m6.hlr").exists());

    run_ok(
        &[
            "keygen", "--m", "6", "--seed", "99", "--priv", "key.hlk", "--pub", "key.hlp",
            "--data", &data,
        ],
        &ws.root,
    );

    // k = 32 bits -> 4 message bytes.
    std::fs::write(ws.path("msg.bin"), [0xde, 0xad, 0xbe, 0xef]).unwrap();
    run_ok(
        &[
            "encrypt", "--pub", "key.hlp", "--in", "msg.bin", "--out", "msg.ct", "--seed", "7",
        ],
        &ws.root,
    );
    run_ok(
        &[
            "decrypt", "--priv", "key.hlk", "--in", "msg.ct", "--out", "msg.out", "--data",
            &data,
        ],
        &ws.root,
    );
    assert_eq!(
        std::fs::read(ws.path("msg.out")).unwrap(),
        vec![0xde, 0xad, 0xbe, 0xef]
    );

    // Decrypt also works without the data directory (self-contained key).
    run_ok(
        &["decrypt", "--priv", "key.hlk", "--in", "msg.ct", "--out", "msg2.out"],
        &ws.root,
    );
    assert_eq!(
        std::fs::read(ws.path("msg2.out")).unwrap(),
        vec![0xde, 0xad, 0xbe, 0xef]
    );
}

#[test]
fn full_lifecycle_m10() {
    let ws = Workspace::new();
    let data = ws.path_str("data");
    run_ok(&["precompute", "--m", "10", "--out", &data], &ws.root);
    run_ok(
        &[
            "keygen", "--m", "10", "--seed", "1", "--priv", "k.hlk", "--pub", "k.hlp",
            "--data", &data,
        ],
        &ws.root,
    );
    // Public key: magic + m, then 512 rows of 8-byte length + 128 bytes.
    let pub_size = std::fs::metadata(ws.path("k.hlp")).unwrap().len();
    assert_eq!(pub_size, 8 + 512 * (8 + 1024 / 8));

    let message: Vec<u8> = (0..64).map(|i| (i * 37 + 11) as u8).collect();
    std::fs::write(ws.path("msg.bin"), &message).unwrap();
    run_ok(
        &["encrypt", "--pub", "k.hlp", "--in", "msg.bin", "--out", "msg.ct"],
        &ws.root,
    );
    run_ok(
        &[
            "decrypt", "--priv", "k.hlk", "--in", "msg.ct", "--out", "msg.out", "--data",
            &data,
        ],
        &ws.root,
    );
    assert_eq!(std::fs::read(ws.path("msg.out")).unwrap(), message);
}

#[test]
fn seeded_keygen_is_reproducible() {
    let ws = Workspace::new();
    let data = ws.path_str("data");
    run_ok(&["precompute", "--m", "4", "--out", &data], &ws.root);
    for name in ["a", "b"] {
        run_ok(
            &[
                "keygen", "--m", "4", "--seed", "1234",
                "--priv", &format!("{name}.hlk"), "--pub", &format!("{name}.hlp"),
                "--data", &data,
            ],
            &ws.root,
        );
    }
    assert_eq!(
        std::fs::read(ws.path("a.hlk")).unwrap(),
        std::fs::read(ws.path("b.hlk")).unwrap()
    );
    assert_eq!(
        std::fs::read(ws.path("a.hlp")).unwrap(),
        std::fs::read(ws.path("b.hlp")).unwrap()
    );
}

#[test]
fn keygen_without_precompute_names_the_fix() {
    let ws = Workspace::new();
    let out = run_err(
        &[
            "keygen", "--m", "6", "--priv", "k.hlk", "--pub", "k.hlp", "--data", "nowhere",
        ],
        &ws.root,
    );
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("precompute"), "stderr: {stderr}");
    assert!(!ws.path("k.hlk").exists(), "no partial key output");
}

#[test]
fn odd_parameter_is_a_usage_error() {
    let ws = Workspace::new();
    let out = run_err(&["precompute", "--m", "3", "--out", "x"], &ws.root);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("even"), "stderr: {stderr}");
}

#[test]
fn wrong_message_length_is_rejected() {
    let ws = Workspace::new();
    let data = ws.path_str("data");
    run_ok(&["precompute", "--m", "4", "--out", &data], &ws.root);
    run_ok(
        &[
            "keygen", "--m", "4", "--seed", "5", "--priv", "k.hlk", "--pub", "k.hlp",
            "--data", &data,
        ],
        &ws.root,
    );
    std::fs::write(ws.path("short.bin"), [1, 2, 3]).unwrap();
    run_err(
        &["encrypt", "--pub", "k.hlp", "--in", "short.bin", "--out", "x.ct"],
        &ws.root,
    );
    assert!(!ws.path("x.ct").exists());
}

#[test]
fn corrupt_and_mismatched_files_fail_cleanly() {
    let ws = Workspace::new();
    let data = ws.path_str("data");
    run_ok(&["precompute", "--m", "4", "--out", &data], &ws.root);
    run_ok(
        &[
            "keygen", "--m", "4", "--seed", "5", "--priv", "k.hlk", "--pub", "k.hlp",
            "--data", &data,
        ],
        &ws.root,
    );
    std::fs::write(ws.path("msg.bin"), [0xa5]).unwrap();
    run_ok(
        &["encrypt", "--pub", "k.hlp", "--in", "msg.bin", "--out", "msg.ct"],
        &ws.root,
    );

    // Truncated ciphertext.
    let ct = std::fs::read(ws.path("msg.ct")).unwrap();
    std::fs::write(ws.path("trunc.ct"), &ct[..ct.len() / 2]).unwrap();
    let out = run_err(
        &["decrypt", "--priv", "k.hlk", "--in", "trunc.ct", "--out", "bad.out"],
        &ws.root,
    );
    assert!(!ws.path("bad.out").exists());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("corrupt") || stderr.contains("end of file"), "stderr: {stderr}");

    // Decrypting with the public key: magic mismatch.
    let out = run_err(
        &["decrypt", "--priv", "k.hlp", "--in", "msg.ct", "--out", "bad.out"],
        &ws.root,
    );
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("magic"), "stderr: {stderr}");
}

#[test]
fn bench_writes_the_expected_csv() {
    let ws = Workspace::new();
    let data = ws.path_str("data");
    run_ok(
        &[
            "bench", "--m", "4", "--trials", "2", "--csv", "bench.csv", "--data", &data,
            "--seed", "11",
        ],
        &ws.root,
    );
    let text = std::fs::read_to_string(ws.path("bench.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "operation,m,trial,wall_seconds");
    assert_eq!(lines.len(), 1 + 3 * 2, "header plus 3 * trials rows");
    for line in &lines[1..] {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 4);
        assert!(["keygen", "encrypt", "decrypt"].contains(&fields[0]));
        assert_eq!(fields[1], "4");
        assert!(fields[3].parse::<f64>().unwrap() > 0.0);
    }
}

#[test]
fn selftest_passes() {
    let ws = Workspace::new();
    let out = run_ok(&["selftest", "--m", "4"], &ws.root);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("all checks passed"), "stdout: {stdout}");
    assert!(!stdout.contains("FAIL"));
}

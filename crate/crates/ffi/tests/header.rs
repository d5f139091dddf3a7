//! The generated header compiles as C and C++, and a C program links against the static library.

use std::path::{Path, PathBuf};
use std::process::Command;

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn header_dir() -> PathBuf {
    crate_dir().join("include")
}

/// `target/<profile>`, the parent of the `deps` directory holding this test binary.
fn profile_dir() -> PathBuf {
    let exe = std::env::current_exe().expect("test executable path");
    exe.parent().and_then(Path::parent).expect("profile directory").to_path_buf()
}

#[test]
fn header_declares_the_api() {
    let text = std::fs::read_to_string(header_dir().join("periodicgp.h")).expect("generated header");
    for symbol in [
        "PGP_STATUS_OK = 0",
        "PGP_STATUS_ALIASING = 3",
        "typedef struct PgpCoefficients PgpCoefficients;",
        "typedef struct PgpPath PgpPath;",
        "pgp_coefficients_new(",
        "pgp_covariogram_to_coefficients(",
        "pgp_sample_path(",
        "pgp_fit_mle(",
        "pgp_predict_regularity(",
        "pgp_last_error_message(void)",
    ] {
        assert!(text.contains(symbol), "header lacks `{symbol}`");
    }
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let src = crate_dir().join("tests").join("c").join("smoke.c");
    for (compiler, extra) in [("cc", vec!["-std=c99"]), ("c++", vec!["-x", "c++", "-std=c++11"])] {
        let status = Command::new(compiler)
            .args(&extra)
            .args(["-Wall", "-Werror", "-fsyntax-only", "-I"])
            .arg(header_dir())
            .arg(&src)
            .status()
            .unwrap_or_else(|e| panic!("failed to run {compiler}: {e}"));
        assert!(status.success(), "{compiler} rejected the header");
    }
}

#[test]
fn c_program_links_and_runs() {
    let lib = profile_dir().join("libperiodicgp_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let out_dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let exe = out_dir.join("periodicgp_smoke");
    let status = Command::new("cc")
        .args(["-std=c99", "-O1", "-I"])
        .arg(header_dir())
        .arg(crate_dir().join("tests").join("c").join("smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("run cc");
    assert!(status.success(), "linking the C smoke test failed");
    let run = Command::new(&exe).output().expect("run C smoke test");
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(stdout.starts_with("p_hat="), "{stdout}");
}

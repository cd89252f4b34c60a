//! Recorded invocations. Each case directory holds `args` (one argument per
//! line), the expected `exit` code and the expected `stdout`. Run with
//! `BLESS=1` to rewrite `stdout` files; exit codes are never rewritten.

use std::fs;
use std::path::{Path, PathBuf};

fn cases() -> Vec<PathBuf> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let mut dirs: Vec<PathBuf> = fs::read_dir(&root)
        .expect("golden directory")
        .map(|e| e.expect("entry").path())
        .filter(|p| p.is_dir())
        .collect();
    dirs.sort();
    dirs
}

fn invoke(dir: &Path) -> (i32, Vec<u8>, Vec<u8>) {
    let args = fs::read_to_string(dir.join("args")).expect("args file");
    let argv = std::iter::once("bimean").chain(args.lines());
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = bimean_cli::run(argv, &mut out, &mut err);
    (code, out, err)
}

#[test]
fn golden_corpus() {
    let bless = std::env::var_os("BLESS").is_some();
    let dirs = cases();
    assert!(dirs.len() >= 12, "corpus has only {} cases", dirs.len());
    let mut mismatches = Vec::new();
    for dir in &dirs {
        let name = dir.file_name().unwrap().to_string_lossy().into_owned();
        let expected_code: i32 = fs::read_to_string(dir.join("exit")).expect("exit file").trim().parse().expect("exit code");
        let (code, out, err) = invoke(dir);
        if code != expected_code {
            mismatches.push(format!("{name}: exit {code}, expected {expected_code}; stderr: {}", String::from_utf8_lossy(&err)));
        }
        if code != 0 && err.is_empty() {
            mismatches.push(format!("{name}: nonzero exit without a diagnostic"));
        }
        let stdout_path = dir.join("stdout");
        if bless {
            fs::write(&stdout_path, &out).expect("write stdout");
        } else {
            let expected = fs::read(&stdout_path).unwrap_or_default();
            if expected != out {
                mismatches.push(format!(
                    "{name}: stdout differs\n--- expected\n{}\n--- actual\n{}",
                    String::from_utf8_lossy(&expected),
                    String::from_utf8_lossy(&out)
                ));
            }
        }
    }
    assert!(mismatches.is_empty(), "{}", mismatches.join("\n"));
}

#[test]
fn output_is_deterministic() {
    for dir in cases() {
        let (c1, o1, _) = invoke(&dir);
        let (c2, o2, _) = invoke(&dir);
        assert_eq!((c1, o1), (c2, o2), "{}", dir.display());
    }
}

//! Golden reports for the bundled scenarios. Set `LW6_UPDATE_GOLDEN=1` to
//! rewrite the stored files.

use std::path::{Path, PathBuf};
use std::process::Command;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn scenarios() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(root().join("scenarios"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    v.sort();
    v
}

fn task_of(path: &Path) -> String {
    let stem = path.file_stem().unwrap().to_str().unwrap();
    stem.split('_').next().unwrap().to_string()
}

fn run(path: &Path, format: &str) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_lw6"))
        .arg(task_of(path))
        .arg("--config")
        .arg(path)
        .args(["--format", format])
        .output()
        .unwrap();
    (out.status.code().unwrap(), out.stdout)
}

#[test]
fn scenarios_are_deterministic_and_match_golden() {
    let update = std::env::var_os("LW6_UPDATE_GOLDEN").is_some();
    let scenarios = scenarios();
    assert!(scenarios.len() >= 5);
    for path in &scenarios {
        for (format, ext) in [("csv", "csv"), ("structured", "json")] {
            let (code, first) = run(path, format);
            let (code2, second) = run(path, format);
            let name = path.file_stem().unwrap().to_str().unwrap();
            assert_eq!(code, 0, "{name} exit code");
            assert_eq!(code2, 0);
            assert!(first == second, "{name}: {format} report differs between runs");
            let golden = root().join("tests/golden").join(format!("{name}.{ext}"));
            if update {
                std::fs::write(&golden, &first).unwrap();
            } else {
                let stored = std::fs::read(&golden).unwrap_or_else(|e| panic!("{}: {e}", golden.display()));
                assert!(stored == first, "{name}: {format} report differs from {}", golden.display());
            }
        }
    }
}

#[test]
fn human_report_is_deterministic() {
    let path = root().join("scenarios/verify_hyperbolic.toml");
    let (code, a) = run(&path, "human");
    let (_, b) = run(&path, "human");
    assert_eq!(code, 0);
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.contains("summary:"));
    assert!(!text.contains("[timings]"));
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn dpx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dpx")).args(args).output().expect("spawn dpx")
}

fn stdout(o: &Output) -> Vec<String> {
    String::from_utf8_lossy(&o.stdout).lines().map(str::to_string).collect()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dpx-bin-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn machines() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/machines")
}

#[test]
fn extract_left_injection() {
    let dir = scratch("extract");
    let file = dir.join("or.njp");
    std::fs::write(&file, "(orI0 \"p => p | q\" (ax \"p => p\"))\n").unwrap();
    let o = dpx(&["extract", "--method", "bm", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let lines = stdout(&o);
    assert_eq!(lines[0], "0");
    let cert = PathBuf::from(&lines[1]);
    assert!(cert.exists());
    let o = dpx(&["extract", "--method", "slash", "--out", dir.join("s.cert").to_str().unwrap(), file.to_str().unwrap()]);
    assert_eq!(stdout(&o)[0], "0");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn check_rejects_non_atomic_bottom_axiom() {
    let dir = scratch("check");
    let file = dir.join("bad.njp");
    std::fs::write(&file, "(orI0 \"_|_ => (p & q) | r\" (ax \"_|_ => p & q\"))\n").unwrap();
    let o = dpx(&["check", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("root.0"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn tm_decide_from_file() {
    let m1 = machines().join("m1.tm");
    let o = dpx(&["tm", "decide", "--machine", m1.to_str().unwrap(), "--input", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o)[0], "accept");
    let o = dpx(&["tm", "decide", "--machine", "parity", "--input", "110"]);
    assert_eq!(stdout(&o)[0], "reject");
}

#[test]
fn oracle_exit_codes() {
    assert_eq!(dpx(&["oracle", "p => ~~p"]).status.code(), Some(0));
    assert_eq!(dpx(&["oracle", "~~p => p"]).status.code(), Some(1));
    assert_eq!(dpx(&["oracle", "p => ("]).status.code(), Some(2));
    assert_eq!(dpx(&["--oracle-cap", "1", "oracle", "p & q => q & p"]).status.code(), Some(2));
    assert_eq!(dpx(&["bogus"]).status.code(), Some(1));
}

#[test]
fn normalize_fuel_exhaustion() {
    let dir = scratch("fuel");
    let file = dir.join("detour.njp");
    std::fs::write(&file, "(andE0 \"p, q => p\" (andI \"p, q => p & q\" (ax \"p, q => p\") (ax \"p, q => q\")))\n").unwrap();
    let o = dpx(&["normalize", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o)[0], "; steps 1");
    let o = dpx(&["--fuel", "0", "normalize", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn corpus_run_is_reproducible() {
    let a = dpx(&["--seed", "3", "corpus", "run", "--count", "5"]);
    let b = dpx(&["--seed", "3", "corpus", "run", "--count", "5"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).last().unwrap(), "entries 17 failures 0");
}

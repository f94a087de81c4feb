use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../proofs/invertibility.catt")
}

fn icatt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_icatt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("icatt-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn corpus_is_accepted() {
    let o = icatt(&["check", corpus_path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.lines().count() >= 25);
    assert!(out.lines().all(|l| l.ends_with("accepted")), "{out}");
}

#[test]
fn fullness_violation_names_the_variable() {
    let p = scratch(
        "notfull.catt",
        "coh bad (x : *) (y : *) (f : x -> y) (z : *) (g : y -> z) : f -> f\n",
    );
    let o = icatt(&["check", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("rejected"), "{out}");
    assert!(out.contains("type not full"), "{out}");
    assert!(
        out.contains("variable z") || out.contains("variable g"),
        "{out}"
    );
}

#[test]
fn neutral_count() {
    let o = icatt(&["--neutral-count", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "12");
}

#[test]
fn second_truncation() {
    let o = icatt(&["--equiv-trunc", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o).trim(),
        "(x : *) (y : *) (u : x -> y) (v : y -> x) (w : y -> x) (u_v : comp v u -> id y) \
         (v_v : id y -> comp v u) (w_v : id y -> comp v u) (u_w : comp u w -> id x) \
         (v_w : id x -> comp u w) (w_w : id x -> comp u w)"
    );
}

#[test]
fn gamma_check_passes() {
    let o = icatt(&["--check-gamma", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn output_is_deterministic() {
    let path = corpus_path();
    let args = [
        "check",
        "--dump-nf",
        "lri",
        "--jobs",
        "2",
        path.to_str().unwrap(),
        path.to_str().unwrap(),
    ];
    let first = icatt(&args);
    for _ in 0..3 {
        assert_eq!(icatt(&args).stdout, first.stdout);
    }
}

#[test]
fn dump_nf_prints_catt_normal_form() {
    let o = icatt(&["check", "--dump-nf", "lri", corpus_path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let dumped: Vec<&str> = out.lines().filter(|l| !l.ends_with("accepted")).collect();
    assert!(!dumped.is_empty(), "{out}");
}

#[test]
fn missing_file_is_an_io_error() {
    let o = icatt(&["check", "/nonexistent/file.catt"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn nothing_to_do() {
    let o = icatt(&[]);
    assert_eq!(o.status.code(), Some(2));
}

use std::io::Write;
use std::process::{Command, Output, Stdio};

use freeknot::{ChordDiagram, NormalForm, Word};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freeknot")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let o = run(args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn invariant_text() {
    let o = run(&["invariant", "--m", "1", "--gauss", "1 2 1 3 2 3"]);
    let s = stdout(&o);
    assert!(s.contains("word: D0 F D0 D0 F D0"), "{s}");
    assert!(s.contains(r#"normal form: {"m":1,"x":[0],"eps":0}"#), "{s}");

    let s = stdout(&run(&["invariant", "--m", "2", "--gauss", "1 2 1 3 2 4 3 4"]));
    assert!(s.contains("word: D0 P1 D0 P1 P1 D0 P1 D0"), "{s}");
    assert!(s.contains(r#"{"m":2,"x":[0,0],"eps":0}"#), "{s}");

    let s = stdout(&run(&["invariant", "--gauss", ""]));
    assert!(s.contains(r#"{"m":1,"x":[0],"eps":0}"#), "{s}");
}

#[test]
fn invariant_json_reparses() {
    let v = json(&["invariant", "--m", "1", "--m", "3", "--gauss", "1 2 1 3 4 2 5 3 5 4", "--json"]);
    let d: ChordDiagram = serde_json::from_value(v["diagram"].clone()).unwrap();
    assert_eq!(d.serialize(), v["gauss"]);
    let inv = v["invariants"].as_array().unwrap();
    assert_eq!(inv.len(), 2);
    for depth in inv {
        let w: Word = serde_json::from_value(depth["word"].clone()).unwrap();
        let nf: NormalForm = serde_json::from_value(depth["normal_form"].clone()).unwrap();
        assert_eq!(freeknot::evaluate(&w), nf);
        assert_eq!(serde_json::to_value(&nf).unwrap(), depth["normal_form"]);
    }
    assert_eq!(inv[0]["normal_form"]["x"][0], 8);
}

#[test]
fn gauss_from_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_freeknot"))
        .args(["invariant"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"a b a c b c\n").unwrap();
    let o = child.wait_with_output().unwrap();
    assert!(stdout(&o).contains("D0 F D0 D0 F D0"));
}

#[test]
fn errors_exit_nonzero() {
    let o = run(&["invariant", "--gauss", "1 2 1"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("occurs 1 times"));
    assert_eq!(run(&["invariant", "--m", "0", "--gauss", "1 1"]).status.code(), Some(3));
}

#[test]
fn compare_exit_codes() {
    assert_eq!(run(&["compare", "--gauss", "1 2 1 3 2 3", "--gauss", "1 2 1 3 2 3"]).status.code(), Some(0));
    assert_eq!(run(&["compare", "--gauss", "1 2 1 2", "--gauss", ""]).status.code(), Some(0));
    let witness = "1 2 1 3 4 2 5 3 5 4";
    let o = run(&["compare", "--gauss", witness, "--gauss", "", "--mode", "free"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("CertifiedDistinct"));
    // a rotation of the witness has a different long invariant but the same class
    let rotated = "1 2 3 4 1 4 2 5 3 5";
    let rot: ChordDiagram = witness.parse::<ChordDiagram>().unwrap().rotate(3);
    assert_eq!(rot.serialize(), rotated);
    assert_eq!(run(&["compare", "--gauss", witness, "--gauss", rotated, "--mode", "free"]).status.code(), Some(0));
}

#[test]
fn compare_needs_two_codes() {
    let o = run(&["compare", "--gauss", "1 1", "--gauss", "1 1", "--mode", "free"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(run(&["compare", "--gauss", "1 1"]).status.code(), Some(3));
}

#[test]
fn reduce_path() {
    let s = stdout(&run(&["reduce", "--gauss", "1 2 3 1 2 3"]));
    assert!(s.starts_with("ReducedToEmpty"), "{s}");
    let v = json(&["reduce", "--gauss", "1 2 3 1 2 3", "--json"]);
    assert_eq!(v["outcome"], "ReducedToEmpty");
    let path: Vec<freeknot::Move> = serde_json::from_value(v["path"].clone()).unwrap();
    let start: ChordDiagram = "1 2 3 1 2 3".parse().unwrap();
    assert!(freeknot::explore::replay(&start, &path).unwrap().is_empty());
}

#[test]
fn search_small() {
    let s = stdout(&run(&["search", "--max-chords", "2", "--m", "1"]));
    assert!(s.contains("0 witnesses"), "{s}");
}

#[test]
fn scramble_is_reproducible() {
    let args = ["scramble", "--gauss", "1 2 1 3 2 3", "--moves", "40", "--seed", "9", "--json"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    let start: ChordDiagram = serde_json::from_value(v["start"].clone()).unwrap();
    let path: Vec<freeknot::Move> = serde_json::from_value(v["path"].clone()).unwrap();
    let result: ChordDiagram = serde_json::from_value(v["result"].clone()).unwrap();
    assert_eq!(freeknot::explore::replay(&start, &path).unwrap(), result);
}

#[test]
fn selfcheck_passes() {
    let o = run(&["selfcheck", "--m", "1", "--m", "2", "--samples", "200", "--trials", "500"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("relations OK; invariance trials 500/500 OK"), "{}", stdout(&o));
}

#[test]
fn moves_list() {
    let s = stdout(&run(&["moves", "--gauss", "1 2 3 1 2 3", "--list", "--max-chords", "3"]));
    let moves: Vec<freeknot::Move> = s.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(moves.iter().filter(|m| matches!(m, freeknot::Move::R3 { .. })).count(), 1);
}

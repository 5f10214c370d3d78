use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lowrank(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lowrank"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) {
    fs::write(dir.join(name), text).unwrap();
}

const RANK1: &str = "field p=13 k=1\ntensor dims=2x2\n1 2\n2 4\n";
const ZERO: &str = "field p=13 k=1\ntensor dims=2x2\n0 0\n0 0\n";
const IDENTITY: &str = "field p=13 k=1\ntensor dims=3x3\n1 0 0\n0 1 0\n0 0 1\n";

#[test]
fn pit_reports_zero_and_witness() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "z.txt", ZERO);
    write(dir.path(), "t.txt", RANK1);
    let o = lowrank(dir.path(), &["pit", "--input", "z.txt", "--family", "D", "--r", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "ZERO");
    let o = lowrank(dir.path(), &["pit", "--input", "t.txt", "--family", "B", "--r", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("NONZERO witness="));
    let par = lowrank(dir.path(), &["pit", "--input", "t.txt", "--family", "B", "--r", "1", "--parallel"]);
    assert_eq!(stdout(&par), stdout(&o));
}

#[test]
fn gen_hit_writes_the_family() {
    let dir = tempfile::tempdir().unwrap();
    let o = lowrank(
        dir.path(),
        &["gen-hit", "--p", "13", "--k", "1", "--family", "Dprime", "--dims", "3x3", "--r", "2", "--output", "h.txt"],
    );
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("h.txt")).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("meta ")).count(), (3 + 3 - 2) * 2);
    // deterministic output
    lowrank(
        dir.path(),
        &["gen-hit", "--p", "13", "--k", "1", "--family", "Dprime", "--dims", "3x3", "--r", "2", "--output", "h2.txt"],
    );
    assert_eq!(text, fs::read_to_string(dir.path().join("h2.txt")).unwrap());
    let o = lowrank(
        dir.path(),
        &["gen-hit", "--p", "2", "--k", "1", "--family", "B", "--dims", "2x2", "--r", "1", "--sim-ext", "2", "--output", "s.txt"],
    );
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("s.txt")).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("meta ")).count(), 6);
}

#[test]
fn measure_then_recover_is_lossless() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "t.txt", RANK1);
    for family in ["Dprime", "Bprime"] {
        let o = lowrank(dir.path(), &["measure", "--input", "t.txt", "--family", family, "--r", "1", "--output", "s.txt"]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let o = lowrank(dir.path(), &["recover", "--input", "s.txt", "--output", "back.txt"]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(fs::read(dir.path().join("back.txt")).unwrap(), RANK1.as_bytes());
    }
}

#[test]
fn broken_rank_promise_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "id.txt", IDENTITY);
    lowrank(dir.path(), &["measure", "--input", "id.txt", "--r", "1", "--output", "s.txt"]);
    let o = lowrank(dir.path(), &["recover", "--input", "s.txt", "--output", "x.txt"]);
    assert_eq!(o.status.code(), Some(3));
    write(dir.path(), "w.txt", "field p=13 k=1\ntensor dims=4x4\n1 0 3 1\n0 1 5 0\n2 0 1 1\n1 7 0 2\n");
    let o = lowrank(dir.path(), &["decode", "--p", "13", "--dims", "4x4", "--r", "1", "--input", "w.txt", "--output", "o.txt"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn encode_decode_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let code = ["--p", "13", "--dims", "5x5", "--r", "1"];
    let mut args = vec!["encode"];
    args.extend(code);
    args.extend(["--seed", "9", "--output", "cw.txt"]);
    assert_eq!(lowrank(dir.path(), &args).status.code(), Some(0));
    let cw = fs::read_to_string(dir.path().join("cw.txt")).unwrap();
    // add a rank-one error: row 2 gets +1 at columns 0 and 3, row 4 gets +2 there
    let mut rows: Vec<Vec<u64>> =
        cw.lines().skip(2).map(|l| l.split_whitespace().map(|x| x.parse().unwrap()).collect()).collect();
    for (i, c) in [(2, 1), (4, 2)] {
        for j in [0, 3] {
            rows[i][j] = (rows[i][j] + c) % 13;
        }
    }
    let noisy: String = cw.lines().take(2).map(|l| format!("{l}\n")).collect::<String>()
        + &rows
            .iter()
            .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ") + "\n")
            .collect::<String>();
    write(dir.path(), "noisy.txt", &noisy);
    let mut args = vec!["decode"];
    args.extend(code);
    args.extend(["--input", "noisy.txt", "--output", "dec.txt", "--error-output", "err.txt"]);
    let o = lowrank(dir.path(), &args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read_to_string(dir.path().join("dec.txt")).unwrap(), cw);
    let err = fs::read_to_string(dir.path().join("err.txt")).unwrap();
    assert!(err.contains("\n0 0 0 0 0\n0 0 0 0 0\n1 0 0 1 0\n"));
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(lowrank(dir.path(), &["frobnicate"]).status.code(), Some(2));
    assert_eq!(lowrank(dir.path(), &["pit", "--input", "missing.txt", "--family", "B", "--r", "1"]).status.code(), Some(2));
    write(dir.path(), "bad.txt", "field p=13 k=1\ntensor dims=2x2\n1 2\n");
    let o = lowrank(dir.path(), &["pit", "--input", "bad.txt", "--family", "B", "--r", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));
}

#[test]
fn selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = lowrank(dir.path(), &["selftest", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.lines().count() >= 5);
    assert!(out.lines().all(|l| l.starts_with("PASS ")));
}

#[test]
fn bench_prints_a_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = lowrank(dir.path(), &["bench", "--sizes", "8,16", "--trials", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut lines = out.lines();
    let header: Vec<&str> = lines.next().unwrap().split_whitespace().collect();
    assert_eq!(header, ["n", "m", "r", "measure_ms", "recover_ms"]);
    assert_eq!(lines.count(), 2);
}

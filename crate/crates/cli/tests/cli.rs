use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_approxlab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("approxlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn lemma1_preset_passes() {
    let o = run(&["preset", "run", "lemma1-n2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("result=PASS\n"));
}

#[test]
fn unknown_preset_exits_2() {
    let o = run(&["preset", "run", "unknown"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown preset"));
}

#[test]
fn preset_reruns_are_identical() {
    let a = run(&["preset", "run", "fusion-loop-and2", "--seed", "7"]);
    let b = run(&["--threads", "1", "preset", "run", "fusion-loop-and2", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn machine_output_is_trailer_only() {
    let o = run(&["--machine", "preset", "run", "depth-fusion-and2"]);
    let s = stdout(&o);
    assert!(s.lines().all(|l| l.contains('=')), "{s}");
    assert!(s.contains("computes_f=true"));
}

#[test]
fn bad_truth_table_exits_2() {
    let o = run(&["rho", "--f", "2:xz", "--model", "gen:rs:2:1:1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn tiny_budget_exits_3() {
    let o = run(&["--budget", "10", "circuits", "enum", "--n", "3", "--size", "4"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn rho_certificate_round_trips_through_verify() {
    let cert = scratch("xor.cert");
    let o = run(&["rho", "--f", "2:6", "--model", "gen:rs:2:1:3", "--cert-out", cert.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v = run(&["verify-cert", "--f", "2:6", "--model", "gen:rs:2:1:3", "--cert", cert.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(0));
    assert!(stdout(&v).contains("verified=true"));
    // the same certificate does not cover AND2
    let w = run(&["verify-cert", "--f", "2:8", "--model", "gen:rs:2:1:3", "--cert", cert.to_str().unwrap()]);
    assert_eq!(w.status.code(), Some(1));
}

#[test]
fn fusion_files_chain() {
    let pairs = scratch("and.pairs");
    let circ = scratch("and.circ");
    let o = run(&["fusion", "cover", "--f", "tt 2 8", "--out", pairs.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    for z in 0..4 {
        let c = run(&["fusion", "closure", "--pairs", pairs.to_str().unwrap(), "--z", &z.to_string()]);
        assert_eq!(c.status.code(), Some(0));
    }
    let e = run(&["fusion", "extract", "--pairs", pairs.to_str().unwrap(), "--out", circ.to_str().unwrap()]);
    assert_eq!(e.status.code(), Some(0));
    let l = run(&["localize", "--model", "gen:rs:2:1:2", "--circuit", circ.to_str().unwrap()]);
    assert_eq!(l.status.code(), Some(0), "{}", stdout(&l));
}

#[test]
fn generated_model_validates_from_file() {
    let path = scratch("rs.model");
    let o = run(&["model", "gen", "--spec", "gen:rs:2:1:4", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = run(&["model", "validate", "--model", path.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(0), "{}", stdout(&v));
    let r = run(&["rho", "--f", "2:6", "--model", path.to_str().unwrap()]);
    let g = run(&["rho", "--f", "2:6", "--model", "gen:rs:2:1:4"]);
    let tail = |o: &Output| stdout(o).lines().filter(|l| l.starts_with("rho=")).map(String::from).collect::<Vec<_>>();
    assert_eq!(tail(&r), tail(&g));
}

#[test]
fn barrier_verbs() {
    let o = run(&["barrier", "verify-lemma", "--f", "2:6", "--model", "gen:rs:2:1:1"]);
    assert_eq!(o.status.code(), Some(0));
    let c = run(&["barrier", "cover", "--f", "2:6", "--model", "gen:rs:2:1:1", "--depth", "1"]);
    assert_eq!(c.status.code(), Some(0), "{}", stdout(&c));
    let oracle_circuit = scratch("oracle.circ");
    std::fs::write(&oracle_circuit, "g0 = INPUT 1\ng1 = INPUT 2\ng2 = ORACLE[tt 2 6](g0, g1)\nOUTPUT g2\n").unwrap();
    let l = run(&["localize", "--model", "gen:rs:2:1:1", "--circuit", oracle_circuit.to_str().unwrap(), "--mode", "depth"]);
    assert_eq!(l.status.code(), Some(0), "{}", stdout(&l));
}

#[test]
fn dangling_gate_reports_position() {
    let p = scratch("bad.circ");
    std::fs::write(&p, "g0 = INPUT 1\ng1 = AND(g0, g5)\nOUTPUT g1\n").unwrap();
    let o = run(&["localize", "--model", "gen:rs:2:1:1", "--circuit", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2") && err.contains("g5"), "{err}");
}

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_jacobi-pe"));
    c.env_remove("JACOBI_PE_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(o.stdout.split(|&b| b == b'\n').next().unwrap()).unwrap()
}

fn stderr_json(o: &Output) -> Value {
    let text = String::from_utf8_lossy(&o.stderr);
    serde_json::from_str(text.lines().last().unwrap()).unwrap()
}

fn out(dir: &Path, sub: &str) -> String {
    dir.join(sub).display().to_string()
}

const SIGNED: &str = "U=[-1,1];V=[0];W=[2]";

#[test]
fn regions_partition() {
    let t = tempfile::tempdir().unwrap();
    let o = run(&["regions", "--triple", SIGNED, "--window", "-3.2,3.2,-3.2,3.2", "--res", "641", "--out", &out(t.path(), "r")]);
    assert_eq!(code(&o), 0);
    let counts = &stdout_json(&o)["counts"];
    assert_eq!(counts["em1"], 0);
    assert!(counts["e1"].as_u64().unwrap() > 0);
    let csv = fs::read_to_string(t.path().join("r/regions.csv")).unwrap();
    assert!(csv.starts_with("x,y,label\n-3.2,-3.2,E0\n"));
    assert_eq!(csv.lines().count(), 641 * 641 + 1);
    let ppm = fs::read(t.path().join("r/regions.ppm")).unwrap();
    assert!(ppm.starts_with(b"P6\n641 641\n255\n"));
}

#[test]
fn zero_triple_is_e0_except_origin() {
    let t = tempfile::tempdir().unwrap();
    let o = run(&["regions", "--triple", "U=[0];V=[0];W=[0]", "--window", "-1,1,-1,1", "--res", "5", "--out", &out(t.path(), "z")]);
    let c = &stdout_json(&o)["counts"];
    assert_eq!(c["e0"], 24);
    assert_eq!(c["on_boundary"], 1);
}

#[test]
fn exact_bidiagonal_masks() {
    let t = tempfile::tempdir().unwrap();
    let o = run(&[
        "regions", "--triple", "U=[0];V=[0];W=[1]", "--window", "-1.5,1.5,-1.5,1.5", "--res", "31", "--exact-bidiagonal",
        "--out", &out(t.path(), "b"),
    ]);
    assert_eq!(code(&o), 0);
    for f in ["sigma.csv", "sigma.pbm", "sigma_plus.csv", "sigma_plus.pbm"] {
        assert!(t.path().join("b").join(f).exists(), "{f}");
    }
    let plus = fs::read_to_string(t.path().join("b/sigma_plus.csv")).unwrap();
    for line in plus.lines().skip(1) {
        let (x, y) = line.split_once(',').unwrap();
        let (x, y): (f64, f64) = (x.parse().unwrap(), y.parse().unwrap());
        assert!(x.hypot(y) <= 1.0);
    }
}

#[test]
fn exit_codes_and_json_errors() {
    let t = tempfile::tempdir().unwrap();
    let o = run(&["regions", "--triple", "U=[0];V=[0]", "--out", &out(t.path(), "x")]);
    assert_eq!(code(&o), 2);
    assert_eq!(stderr_json(&o)["code"], 2);
    let o = run(&["regions", "--triple", SIGNED, "--window", "0,0,0,1", "--out", &out(t.path(), "x")]);
    assert_eq!(code(&o), 3);
    assert_eq!(stderr_json(&o)["error"], "invalid_grid");
    let o = run(&["regions", "--triple", SIGNED, "--res", "1", "--out", &out(t.path(), "x")]);
    assert_eq!(code(&o), 3);
    let o = run(&["pseudospec", "--triple", SIGNED, "--sizes", "5..x", "--out", &out(t.path(), "x")]);
    assert_eq!(code(&o), 2);
    let o = run(&["profile", "--triple", SIGNED, "--norm", "3", "--out", &out(t.path(), "x")]);
    assert_eq!(code(&o), 2);
    let o = run(&["nonsense"]);
    assert_eq!(code(&o), 2);
    assert_eq!(stderr_json(&o)["error"], "parse");
}

fn job(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn fsm_jobs() {
    let t = tempfile::tempdir().unwrap();
    let toe = job(
        t.path(),
        "toe.json",
        r#"{"triple": "U=[0];V=[2];W=[1]", "side": "semi", "rhs": {"support": [[1, 1, 0]]}, "cutoffs": {"kind": "full", "count": 12}}"#,
    );
    let o = run(&["fsm", "--job", &toe, "--out", &out(t.path(), "a")]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["converged"], true);
    let sol = fs::read_to_string(t.path().join("a/solution.csv")).unwrap();
    assert!(sol.starts_with("j,re,im\n1,0.5,0\n2,0,0\n"));
    let prof = fs::read_to_string(t.path().join("a/profile.csv")).unwrap();
    assert!(prof.starts_with("n,value,certified_lower,iterations\n1,"));

    let k1 = job(
        t.path(),
        "k1.json",
        r#"{"triple": "U=[0.2];V=[0];W=[1]", "seed": 4, "side": "bi", "rhs": {"support": [[0, 1, 0]]},
            "cutoffs": {"kind": "linear", "step": 20, "count": 8}}"#,
    );
    let o = run(&["fsm", "--job", &k1, "--out", &out(t.path(), "b")]);
    assert_eq!(code(&o), 4);
    let err = stderr_json(&o);
    assert!(err["message"].as_str().unwrap().contains("kappa=+1"));
    assert!(t.path().join("b/manifest.json").exists());
    let o = run(&["fsm", "--job", &k1, "--shift", "auto", "--out", &out(t.path(), "c")]);
    assert_eq!(code(&o), 0);
    let s = stdout_json(&o);
    assert_eq!(s["converged"], true);
    assert_eq!(s["shift"], 1);

    let bad = job(t.path(), "bad.json", r#"{"triple": "U=[0];V=[2];W=[1]", "side": "sideways"}"#);
    assert_eq!(code(&run(&["fsm", "--job", &bad, "--out", &out(t.path(), "d")])), 2);
}

#[test]
fn check_examples() {
    let t = tempfile::tempdir().unwrap();
    let o = run(&["check", "--triple", "U=[1];V=[4];W=[0,2]", "--sizes", "16..64", "--out", &out(t.path(), "a")]);
    assert_eq!(code(&o), 0);
    let s = stdout_json(&o);
    assert_eq!(s["pass"], true);
    assert!(s["max_inv_norm"].as_f64().unwrap() < 1.0);
    let o = run(&["check", "--triple", "U=[1];V=[3];W=[1]", "--sizes", "16..64", "--out", &out(t.path(), "b")]);
    assert_eq!(code(&o), 0);
    let o = run(&["check", "--triple", SIGNED, "--lambda", "1.4142135623730951", "--out", &out(t.path(), "c")]);
    assert_eq!(code(&o), 5);
    let w = &stderr_json(&o)["detail"]["witness"];
    assert!(w["sigma_min"].as_f64().unwrap() < 1e-12);
    let report: Value = serde_json::from_str(&fs::read_to_string(t.path().join("c/check.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], false);
}

#[test]
fn pseudospec_outputs_and_replay() {
    let t = tempfile::tempdir().unwrap();
    let args = [
        "pseudospec", "--triple", "U=[1];V=[0];W=[0,2]", "--seed", "9", "--window", "-3.6,3.6,-1.6,1.6", "--res", "37,17",
        "--sizes", "20..80", "--eps", "0.1,0.5",
    ];
    let a = out(t.path(), "a");
    let mut full: Vec<&str> = args.to_vec();
    full.extend(["--out", &a, "--threads", "1"]);
    assert_eq!(code(&run(&full)), 0);
    let field = fs::read_to_string(t.path().join("a/field_n80.csv")).unwrap();
    assert!(field.starts_with("x,y,value,lower_bound,infinite\n"));
    assert_eq!(field.lines().count(), 37 * 17 + 1);
    assert!(fs::read(t.path().join("a/eps0.5_n40.pbm")).unwrap().starts_with(b"P4\n37 17\n"));
    assert!(fs::read(t.path().join("a/field_n20.pgm")).unwrap().starts_with(b"P5\n37 17\n255\n"));

    // a different thread count gives identical bytes
    let b = out(t.path(), "b");
    let mut again: Vec<&str> = args.to_vec();
    again.extend(["--out", &b]);
    assert_eq!(code(&bin().args(&again).env("JACOBI_PE_THREADS", "3").output().unwrap()), 0);
    let ma: Value = serde_json::from_str(&fs::read_to_string(t.path().join("a/manifest.json")).unwrap()).unwrap();
    let mb: Value = serde_json::from_str(&fs::read_to_string(t.path().join("b/manifest.json")).unwrap()).unwrap();
    assert_eq!(ma["outputs"], mb["outputs"]);
    assert_eq!(ma["argv"], mb["argv"]);

    let o = run(&["replay", &format!("{a}/manifest.json"), "--out", &out(t.path(), "c")]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    // tampering with a recorded hash is detected
    let mut m = ma.clone();
    m["outputs"]["field_n20.csv"] = Value::from("00");
    fs::write(t.path().join("tampered.json"), m.to_string()).unwrap();
    let o = run(&["replay", &out(t.path(), "tampered.json"), "--out", &out(t.path(), "d")]);
    assert_eq!(code(&o), 1);
    assert_eq!(stderr_json(&o)["error"], "replay_mismatch");
}

#[test]
fn diagonal_triple_gives_disks() {
    let t = tempfile::tempdir().unwrap();
    let o = run(&[
        "pseudospec", "--triple", "U=[0];V=[1];W=[0]", "--window", "0,2,-1,1", "--res", "21", "--sizes", "3,9",
        "--eps", "0.5", "--norm", "inf", "--format", "csv", "--out", &out(t.path(), "a"),
    ]);
    assert_eq!(code(&o), 0);
    let small = fs::read_to_string(t.path().join("a/eps0.5_n3.csv")).unwrap();
    let big = fs::read_to_string(t.path().join("a/eps0.5_n9.csv")).unwrap();
    assert_eq!(small, big);
    for line in small.lines().skip(1) {
        let (x, y) = line.split_once(',').unwrap();
        let (x, y): (f64, f64) = (x.parse().unwrap(), y.parse().unwrap());
        assert!((x - 1.0).hypot(y) < 0.5);
    }
    assert!(!t.path().join("a/field_n3.pgm").exists());
}

#[test]
fn profile_of_index_one_triple_grows() {
    let t = tempfile::tempdir().unwrap();
    let o = run(&["profile", "--triple", "U=[0.2];V=[0];W=[1]", "--sizes", "10..80", "--out", &out(t.path(), "p")]);
    assert_eq!(code(&o), 0);
    let v: Vec<f64> = stdout_json(&o)["values"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!(v.windows(2).all(|w| w[1] > 10.0 * w[0]));
}

use std::path::Path;

use sospencil::cli::run;
use sospencil::poly::Poly;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn sospencil(args: &[&str]) -> Run {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("sospencil").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Run { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

fn verify(path: &Path) -> Run {
    sospencil(&["verify", path.to_str().unwrap()])
}

const MOTZKIN: &str = "z1^4*z2^2 + z1^2*z2^4 - 3*z1^2*z2^2 + 1";

#[test]
fn polarize_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.json");
    let r = sospencil(&["polarize", "-q", "z1+z2", "-p", "z1*z2", "--out", path.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("\"kind\": \"polarization\""));
    assert_eq!(verify(&path).code, 0);
}

#[test]
fn tampered_artifact_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.json");
    assert_eq!(sospencil(&["polarize", "-q", "z1+z2", "-p", "z1*z2", "--out", path.to_str().unwrap()]).code, 0);
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    v["p"] = serde_json::Value::String("z1*z2 + 1".into());
    std::fs::write(&path, v.to_string()).unwrap();
    let r = verify(&path);
    assert_ne!(r.code, 0);
}

#[test]
fn wronskian_prints_square() {
    let r = sospencil(&["wronskian", "-q", "z1+z2", "-p", "z1*z2", "-j", "1"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout.trim(), "z2^2");
}

#[test]
fn motzkin_is_not_certified() {
    let r = sospencil(&["sos", "-f", MOTZKIN]);
    assert!(r.code == 2 || r.code == 3, "exit {}", r.code);
    assert!(r.stdout.contains("infeasible-evidence") || r.stdout.contains("inconclusive"));
}

#[test]
fn sos_certificate_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    let s = Poly::parse("z1^2 + z2^2").unwrap();
    let f = (&(&s * &s) * &Poly::parse(MOTZKIN).unwrap()).to_string();
    let r = sospencil(&["sos", "-f", &f, "--out", path.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert_eq!(verify(&path).code, 0);
}

#[test]
fn pipeline_certificates_verify() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.json");
    let r = sospencil(&["sos", "-q", "z1+z2", "-p", "z1*z2", "--out", path.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert!(r.stderr.contains("seed: 0 (default)"));
    assert_eq!(verify(&path).code, 0);
}

#[test]
fn resolvent_forms_verify() {
    let dir = tempfile::tempdir().unwrap();
    for (n, extra) in [vec![], vec!["--psd"], vec!["--psd", "-s", "z1^2+1"]].into_iter().enumerate() {
        let (q, p) = if n == 2 { ("z1", "-1") } else { ("z1+z2", "z1*z2") };
        let path = dir.path().join(format!("r{n}.json"));
        let mut args = vec!["resolvent", "-q", q, "-p", p, "--seed", "3", "--out", path.to_str().unwrap()];
        args.extend(extra);
        let r = sospencil(&args);
        assert_eq!(r.code, 0, "{:?}: {}", args, r.stderr);
        assert!(!r.stderr.contains("seed: 0"));
        assert_eq!(verify(&path).code, 0, "{args:?}");
    }
}

#[test]
fn ambiguity_basis_and_lift() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.json");
    let r = sospencil(&["ambiguity-basis", "--n0", "2", "--nk", "2,2", "--json", "--out", path.to_str().unwrap()]);
    assert_eq!(r.code, 0);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["elements"].as_array().unwrap().len(), 6);
    assert_eq!(verify(&path).code, 0);

    // Triple on (z1², z1, 1) avoids z2 and lifts.
    let mut s = vec![vec!["0"; 6]; 6];
    let idx = |m: &str| ["1", "z1", "z2", "z1^2", "z1*z2", "z2^2"].iter().position(|x| *x == m).unwrap();
    let (a, b, c) = (idx("z1^2"), idx("z1"), idx("1"));
    s[a][c] = "-1";
    s[c][a] = "-1";
    s[b][b] = "2";
    let sd = serde_json::to_string(&s).unwrap();
    let lift = dir.path().join("l.json");
    let r = sospencil(&["lift", "--n0", "2", "--nk", "2,2", "--sd", &sd, "--out", lift.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(verify(&lift).code, 0);
}

#[test]
fn unliftable_element_is_negative() {
    // Ψ = (1, z, z², z³), triple on (z², z, 1).
    let sd = r#"[["0","0","-1","0"],["0","2","0","0"],["-1","0","0","0"],["0","0","0","0"]]"#;
    let r = sospencil(&["lift", "--n0", "3", "--nk", "3", "--sd", sd]);
    assert_eq!(r.code, 2, "{}", r.stderr);
}

#[test]
fn psd_repair_catalog() {
    let dir = tempfile::tempdir().unwrap();
    for (n, (q, p)) in [("1", "z1"), ("z1", "-1"), ("z1+z2", "z1*z2")].into_iter().enumerate() {
        let path = dir.path().join(format!("p{n}.json"));
        let r = sospencil(&["psd-repair", "-q", q, "-p", p, "--out", path.to_str().unwrap()]);
        assert_eq!(r.code, 0, "{q} {p}: {}", r.stderr);
        assert_eq!(verify(&path).code, 0);
    }
}

#[test]
fn nevanlinna_gate() {
    assert_eq!(sospencil(&["nevanlinna-check", "-q", "1", "-p", "-z1"]).code, 2);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("n.json");
    let r = sospencil(&["nevanlinna-check", "-q", "z1+z2", "-p", "z1*z2", "--out", path.to_str().unwrap()]);
    assert_eq!(r.code, 0);
    assert_eq!(verify(&path).code, 0);
}

#[test]
fn artin_strip_motzkin() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    let r = sospencil(&[
        "artin-strip",
        "-f",
        MOTZKIN,
        "--factor",
        "z1",
        "--factor",
        "z1^2+z2^2",
        "--halfplane-zero",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("z1^2 + z2^2"));
    assert_eq!(verify(&path).code, 0);
}

#[test]
fn input_errors_exit_one() {
    assert_eq!(sospencil(&["wronskian", "-q", "z0", "-p", "z1", "-j", "1"]).code, 1);
    assert_eq!(sospencil(&["wronskian", "-q", "z1 +", "-p", "z1", "-j", "1"]).code, 1);
    assert_eq!(sospencil(&["verify", "/nonexistent/artifact.json"]).code, 1);
    assert_eq!(sospencil(&["frobnicate"]).code, 1);
}

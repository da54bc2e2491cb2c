use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use serde_json::Value;

const HOPF_POS: &str = "t1 h2+ / t2 h1+";
const HOPF_NEG: &str = "t1 h2- / t2 h1-";
const HOPF_REBASED: &str = "t1 h2+ / h1+ t2";
const BORROMEAN: &str = "s2^-1 s1 s2^-1 s1 s2^-1 s1";
// Sorted diagrams whose longitude systems are related by a dozen word moves.
const CERT_A: &str = "t1 h2+ h3- h4- / t2 t5 / t3 t4 h1+ h5+";
const CERT_B: &str = "t1 h2+ h3+ h4+ h5- h6- h7- h8- / t4 t9 t10 h9+ / t2 t3 t5 t6 t7 t8 t11 t12 t13 t14 h1+ h11+ h12+ h10+ h13- h14-";

fn run_with(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_weldkit"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn run(args: &[&str]) -> Output {
    run_with(args, "")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli").join(name);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn parse_reports_envelope() {
    let o = run(&["parse", HOPF_POS]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["schema"], "weldkit-report/1");
    assert_eq!(v["command"], "parse");
    assert_eq!(v["tool"]["name"], "weldkit");
    assert_eq!(v["result"]["gauss_code"], HOPF_POS);
    assert_eq!(v["result"]["sorted"], true);
}

#[test]
fn parse_errors_exit_2() {
    for bad in ["t1 h3+", "t1 h2+ / t2", "x1", "t1 h1"] {
        let o = run(&["parse", bad]);
        assert_eq!(code(&o), 2, "{bad:?}");
        assert!(!o.stderr.is_empty());
    }
    assert_eq!(code(&run(&["compare", HOPF_POS])), 2);
    assert_eq!(code(&run(&["compare", HOPF_POS, HOPF_NEG, "--max-states", "0"])), 2);
    assert_eq!(code(&run(&["milnor", HOPF_POS, "--max-length", "3"])), 2);
}

#[test]
fn compare_exit_codes_follow_verdicts() {
    let o = run(&["compare", HOPF_POS, HOPF_NEG]);
    assert_eq!(code(&o), 10);
    let w = &json(&o)["result"]["verdict"]["witness"];
    assert_eq!(w["left"]["mubar"], 1);
    assert_eq!(w["right"]["mubar"], -1);

    let o = run(&["compare", HOPF_POS, HOPF_REBASED]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["result"]["verdict"]["verdict"], "equivalent");

    // Blind to the triple invariant, the search cannot close the gap.
    let o = run(&["compare", "--strands", "3", BORROMEAN, "", "--max-length", "2", "--max-states", "100"]);
    assert_eq!(code(&o), 20);
    assert_eq!(json(&o)["result"]["verdict"]["verdict"], "unknown");
}

#[test]
fn stdin_inputs() {
    let o = run_with(&["parse", "-"], &format!("{HOPF_POS}\n"));
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["input"]["source"], "stdin");

    let o = run_with(&["compare", "-", "-"], &format!("{HOPF_POS}\n{HOPF_NEG}\n"));
    assert_eq!(code(&o), 10);

    let o = run_with(&["braid", "--strands", "3"], BORROMEAN);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["result"]["components"], 3);
}

#[test]
fn file_inputs() {
    let dir = scratch("files");
    let path = dir.join("hopf.txt");
    std::fs::write(&path, HOPF_POS).unwrap();
    let arg = format!("@{}", path.display());
    let o = run(&["milnor", &arg]);
    assert_eq!(code(&o), 0);
    let entries = json(&o)["result"]["table"]["entries"].as_array().unwrap().clone();
    assert_eq!(entries.len(), 2);
}

#[test]
fn certify_round_trip() {
    let dir = scratch("certify");
    let (a, b) = (CERT_A, CERT_B);
    let o = run(&["certify", a, b]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let steps = json(&o)["result"]["verdict"]["certificate"]["steps"].as_array().unwrap().len();
    assert!(steps > 2, "{steps}");
    let report = dir.join("report.json");
    std::fs::write(&report, &o.stdout).unwrap();
    let o = run(&["certify", a, b, "--check", report.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["result"]["valid"], true);
    // The same certificate does not relate other diagrams.
    assert_eq!(code(&run(&["certify", a, CERT_A, "--check", report.to_str().unwrap()])), 1);

    // A bare certificate works too; an empty one must not.
    let bare = dir.join("bare.json");
    std::fs::write(&bare, r#"{"steps": []}"#).unwrap();
    let o = run(&["certify", HOPF_POS, HOPF_NEG, "--check", bare.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["result"]["valid"], false);

    let junk = dir.join("junk.json");
    std::fs::write(&junk, r#"{"steps": [{"kind": "Coset", "component": 9}]}"#).unwrap();
    assert_eq!(code(&run(&["certify", HOPF_POS, HOPF_POS, "--check", junk.to_str().unwrap()])), 1);
}

#[test]
fn reports_are_deterministic() {
    let cases: [&[&str]; 4] = [
        &["milnor", "--strands", "3", BORROMEAN],
        &["certify", CERT_A, CERT_B],
        &["sort", "t1 h1+ t2 h3- / h2+ t3", "--trace"],
        &["fuzz", "--seed", "7", "--count", "8"],
    ];
    for args in cases {
        let one = run(&[&["--threads", "1"], args].concat());
        let two = run(&[&["--threads", "2"], args].concat());
        let again = run(&[&["--threads", "2"], args].concat());
        assert_eq!(code(&one), 0, "{args:?}");
        assert_eq!(one.stdout, two.stdout, "{args:?}");
        assert_eq!(two.stdout, again.stdout, "{args:?}");
    }
}

#[test]
fn demos() {
    assert_eq!(code(&run(&["demo", "hopf"])), 0);
    assert_eq!(code(&run(&["demo", "borromean"])), 0);
    let hughes = run(&["demo", "hughes"]);
    assert_eq!(code(&hughes), 78);
    assert!(String::from_utf8_lossy(&hughes.stderr).contains("--allow-unverified"));
    assert_eq!(code(&run(&["demo", "hughes", "--allow-unverified"])), 0);
}

#[test]
fn text_format() {
    let o = run(&["--format", "text", "compare", HOPF_POS, HOPF_NEG]);
    assert_eq!(code(&o), 10);
    let s = String::from_utf8(o.stdout).unwrap();
    assert!(s.starts_with("distinct"), "{s}");
}

#[test]
fn reports_match_schema() {
    let have_validator = Command::new("python3")
        .args(["-c", "import jsonschema, referencing"])
        .status()
        .map(|s| s.success())
        .unwrap_or(false);
    if !have_validator {
        eprintln!("skipping schema validation: python3 with jsonschema and referencing not found");
        return;
    }
    let dir = scratch("schema");
    let cert = dir.join("cert.json");
    let runs: Vec<(&str, Vec<&str>)> = vec![
        ("parse", vec!["parse", HOPF_POS]),
        ("sort", vec!["sort", "t1 h1+ t2 h3- / h2+ t3", "--trace"]),
        ("peripheral", vec!["peripheral", HOPF_REBASED]),
        ("milnor", vec!["milnor", "--strands", "3", BORROMEAN]),
        ("distinct", vec!["compare", HOPF_POS, HOPF_NEG]),
        ("equivalent", vec!["compare", HOPF_POS, HOPF_REBASED]),
        ("unknown", vec!["compare", "--strands", "3", BORROMEAN, "", "--max-length", "2", "--max-states", "50"]),
        ("certify", vec!["certify", CERT_A, CERT_B]),
        ("braid", vec!["braid", "--strands", "3", BORROMEAN]),
        ("demo-hopf", vec!["demo", "hopf"]),
        ("demo-borromean", vec!["demo", "borromean"]),
        ("demo-hughes", vec!["demo", "hughes", "--allow-unverified"]),
        ("fuzz", vec!["fuzz", "--seed", "1", "--count", "4"]),
    ];
    let mut paths = Vec::new();
    for (name, args) in &runs {
        let o = run(args);
        assert!([0, 10, 20].contains(&code(&o)), "{name}: {}", String::from_utf8_lossy(&o.stderr));
        let p = dir.join(format!("{name}.json"));
        std::fs::write(&p, &o.stdout).unwrap();
        if *name == "certify" {
            std::fs::write(&cert, &o.stdout).unwrap();
        }
        paths.push(p);
    }
    let o = run(&["certify", CERT_A, CERT_B, "--check", cert.to_str().unwrap()]);
    let p = dir.join("certify-check.json");
    std::fs::write(&p, &o.stdout).unwrap();
    paths.push(p);

    let script = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../python/validate_reports.py");
    let out = Command::new("python3").arg(script).args(&paths).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
}

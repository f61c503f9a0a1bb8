//! Byte-stable CLI outputs. `UPDATE_GOLDEN=1 cargo test -p zpreal-cli --test golden`
//! rewrites the expected files.

use std::path::{Path, PathBuf};
use std::process::Command;

use zpreal_cli::instance::{InstanceFile, Metadata};
use zpreal_core::model::ZeroPoleData;
use zpreal_core::{Complex, ComplexMatrix};

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn updating() -> bool {
    std::env::var_os("UPDATE_GOLDEN").is_some()
}

fn check_golden(name: &str, actual: &str) {
    let path = golden_dir().join(name);
    if updating() {
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "output differs from {}", path.display());
}

struct Run {
    stdout: String,
    stderr: String,
    code: i32,
}

fn zpreal(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_zpreal")).args(args).output().unwrap();
    Run {
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
        code: out.status.code().unwrap(),
    }
}

fn fixture(name: &str) -> String {
    golden_dir().join(name).to_str().unwrap().to_string()
}

fn c(re: f64) -> Complex {
    Complex::new(re, 0.0)
}

fn d1() -> ZeroPoleData {
    let m = |v: f64| ComplexMatrix::from_real_rows(&[&[v]]);
    ZeroPoleData::new(vec![c(0.0)], vec![c(1.0)], m(1.0), m(-1.0), m(1.0), m(1.0)).unwrap()
}

fn d2() -> ZeroPoleData {
    ZeroPoleData::from_scalar(&[c(0.5), c(2.0)], &[c(0.3), c(3.0)]).unwrap()
}

#[test]
fn fixtures_match_library_instances() {
    for (name, d) in [("d1.json", d1()), ("d2.json", d2())] {
        check_golden(name, &InstanceFile::from_data(&d, Metadata::default()).to_json());
        let back = InstanceFile::read(&golden_dir().join(name)).unwrap().to_data().unwrap();
        assert_eq!(back, d);
    }
}

fn generate_case(k: &str, n: &str, seed: &str, stem: &str) {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let args = |p: &Path| {
        vec![
            "generate".to_string(),
            "--k".into(),
            k.into(),
            "--n".into(),
            n.into(),
            "--seed".into(),
            seed.into(),
            "--out".into(),
            p.to_str().unwrap().into(),
        ]
    };
    let run = |p: &Path| {
        let v = args(p);
        zpreal(&v.iter().map(String::as_str).collect::<Vec<_>>())
    };
    let r1 = run(&a);
    let r2 = run(&b);
    assert_eq!(r1.code, 0, "{}", r1.stderr);
    let fa = std::fs::read_to_string(&a).unwrap();
    assert_eq!(fa, std::fs::read_to_string(&b).unwrap());
    assert_eq!(r1.stdout, r2.stdout);
    check_golden(&format!("{stem}.json"), &fa);
    check_golden(&format!("{stem}.generate.txt"), &r1.stdout);

    let v = zpreal(&["verify", a.to_str().unwrap()]);
    assert_eq!(v.code, 0, "{}", v.stdout);
    check_golden(&format!("{stem}.verify.txt"), &v.stdout);
}

#[test]
fn generate_small() {
    generate_case("1", "1", "7", "gen_k1_n1_s7");
}

#[test]
fn generate_larger() {
    generate_case("3", "6", "2024", "gen_k3_n6_s2024");
}

#[test]
fn generate_rejects_empty_state() {
    let r = zpreal(&[
        "generate",
        "--k",
        "1",
        "--n",
        "0",
        "--seed",
        "1",
        "--out",
        "unused.json",
    ]);
    assert_eq!(r.code, 2);
}

#[test]
fn verify_reference_instances() {
    for stem in ["d1", "d2"] {
        let r = zpreal(&["verify", &fixture(&format!("{stem}.json"))]);
        assert_eq!(r.code, 0, "{}", r.stdout);
        check_golden(&format!("{stem}.verify.txt"), &r.stdout);
    }
}

#[test]
fn verify_names_broken_relation() {
    let dir = tempfile::tempdir().unwrap();
    // Column scalings of F_N keep relation (d); one entry of a k=3 instance does not.
    let mut file = InstanceFile::read(&golden_dir().join("gen_k3_n6_s2024.json")).unwrap();
    file.f_n[1][2][0] += 0.25;
    let path = dir.path().join("bad.json");
    file.write(&path).unwrap();
    let r = zpreal(&["verify", path.to_str().unwrap()]);
    assert_eq!(r.code, 6);
    let failed = r.stdout.lines().last().unwrap();
    assert!(failed.starts_with("  failed: "), "{}", r.stdout);
    assert!(failed.contains("realization/coupling_d"), "{failed}");
}

#[test]
fn verify_report_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let r = zpreal(&[
        "verify",
        &fixture("d1.json"),
        "--report-out",
        out.to_str().unwrap(),
        "--timing",
    ]);
    assert_eq!(r.code, 0);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["passed"], true);
    assert!(v["timing_ms"].as_f64().unwrap() >= 0.0);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["tol"].is_number()));
    assert!(!r.stdout.contains("timing"));
}

#[test]
fn eval_outputs() {
    let d1 = fixture("d1.json");
    let r = zpreal(&["eval", &d1, "R", "2", "0"]);
    assert_eq!((r.stdout.as_str(), r.code), ("0.5 + 0i\n", 0));

    let d2 = fixture("d2.json");
    let mut all = String::new();
    for (which, pts) in [
        ("R", vec!["1", "1"]),
        ("Rinv", vec!["-1", "0.5"]),
        ("jointR", vec!["1", "1", "-1", "0.5"]),
        ("jointL", vec!["1", "1", "-1", "0.5"]),
        ("hybridR", vec!["1", "1", "-1", "0.5"]),
        ("hybridL", vec!["1", "1", "-1", "0.5"]),
    ] {
        let mut args = vec!["eval", d2.as_str(), which];
        args.extend(pts.iter().copied());
        let r = zpreal(&args);
        assert_eq!(r.code, 0, "{}", r.stderr);
        all.push_str(&format!("{which} {}\n{}", pts.join(" "), r.stdout));
    }
    check_golden("d2.eval.txt", &all);

    let same = zpreal(&[
        "eval",
        &fixture("gen_k3_n6_s2024.json"),
        "jointR",
        "0.1",
        "3",
        "0.1",
        "3",
    ]);
    assert_eq!(
        same.stdout,
        "1 + 0i, 0 + 0i, 0 + 0i\n0 + 0i, 1 + 0i, 0 + 0i\n0 + 0i, 0 + 0i, 1 + 0i\n"
    );
}

#[test]
fn eval_errors() {
    let d1 = fixture("d1.json");
    let hit = zpreal(&["eval", &d1, "R", "0", "0"]);
    assert_eq!(hit.code, 4);
    assert!(hit.stderr.contains("singular point 0+0i"), "{}", hit.stderr);
    assert_eq!(zpreal(&["eval", &d1, "jointR", "2", "0"]).code, 2);
    assert_eq!(zpreal(&["eval", &d1, "Q", "2", "0"]).code, 2);
}

#[test]
fn factorize_d2() {
    let dir = tempfile::tempdir().unwrap();
    let plus = dir.path().join("plus.json");
    let minus = dir.path().join("minus.json");
    let r = zpreal(&[
        "factorize",
        &fixture("d2.json"),
        "--out-plus",
        plus.to_str().unwrap(),
        "--out-minus",
        minus.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
    check_golden("d2.factorize.txt", &r.stdout);
    for (p, name) in [(&plus, "d2.plus.json"), (&minus, "d2.minus.json")] {
        check_golden(name, &std::fs::read_to_string(p).unwrap());
        let v = zpreal(&["verify", p.to_str().unwrap()]);
        assert_eq!(v.code, 0, "{}", v.stdout);
    }
    // Closed forms (z-0.3)/(z-0.5) and (z-3)/(z-2) at z = 1+i.
    let z = Complex::new(1.0, 1.0);
    for (p, f) in [(&plus, (z - 0.3) / (z - 0.5)), (&minus, (z - 3.0) / (z - 2.0))] {
        let d = InstanceFile::read(p).unwrap().to_data().unwrap();
        let b = zpreal_core::realization::build_bundle(&d, Default::default()).unwrap();
        assert!((b.eval_r(z).unwrap()[(0, 0)] - f).norm() <= 1e-9);
    }
}

#[test]
fn factorize_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = |n: &str| dir.path().join(n).to_str().unwrap().to_string();
    let (p, m) = (out("p.json"), out("m.json"));
    let d2 = fixture("d2.json");
    let run = |extra: &[&str]| {
        let mut args = vec![
            "factorize",
            d2.as_str(),
            "--out-plus",
            p.as_str(),
            "--out-minus",
            m.as_str(),
        ];
        args.extend_from_slice(extra);
        zpreal(&args)
    };
    // One pole and no zero inside radius 0.4.
    assert_eq!(run(&["--radius", "0.4"]).code, 7);
    // Pole 0.5 on the circle.
    assert_eq!(run(&["--radius", "0.5"]).code, 4);
    assert_eq!(run(&["--radius", "-1"]).code, 4);
    // Everything outside: identity plus factor.
    let r = run(&["--center-re", "-10", "--radius", "1"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert_eq!(InstanceFile::read(Path::new(&p)).unwrap().n, 0);
}

#[test]
fn cauchy_outputs() {
    let mut all = String::new();
    for (op, poles, zeros) in [
        ("invert", "0", "1"),
        ("matrix", "0,1", "2,3"),
        ("invert", "0,1", "2,3"),
        ("detsq", "0,1", "2,3"),
        ("matrix", "1+1i,-0.5i", "2,-1-1i"),
    ] {
        let r = zpreal(&["cauchy", op, "--poles", poles, "--zeros", zeros]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        all.push_str(&format!("{op} {poles} / {zeros}\n{}", r.stdout));
    }
    check_golden("cauchy.txt", &all);
    assert_eq!(
        zpreal(&["cauchy", "invert", "--poles", "0", "--zeros", "1"]).stdout,
        "1 + 0i\n"
    );
    assert_eq!(
        zpreal(&["cauchy", "matrix", "--poles", "0,1", "--zeros", "1,3"]).code,
        4
    );
    assert_eq!(
        zpreal(&["cauchy", "matrix", "--poles", "0,x", "--zeros", "1,3"]).code,
        2
    );
}

#[test]
fn parse_and_usage_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"format_version\": 1,\n  \"k\": 1,\n  \"n\": [\n}").unwrap();
    let r = zpreal(&["verify", bad.to_str().unwrap()]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("line"), "{}", r.stderr);

    let unknown = dir.path().join("unknown.json");
    std::fs::write(
        &unknown,
        std::fs::read_to_string(fixture("d1.json"))
            .unwrap()
            .replace("G_N", "G_Q"),
    )
    .unwrap();
    let r = zpreal(&["verify", unknown.to_str().unwrap()]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("G_Q"));

    let shape = dir.path().join("shape.json");
    std::fs::write(
        &shape,
        std::fs::read_to_string(fixture("d1.json"))
            .unwrap()
            .replace("\"k\": 1", "\"k\": 2"),
    )
    .unwrap();
    assert_eq!(zpreal(&["verify", shape.to_str().unwrap()]).code, 4);

    assert_eq!(zpreal(&[]).code, 2);
    assert_eq!(zpreal(&["frobnicate"]).code, 2);
    assert_eq!(zpreal(&["verify"]).code, 2);
}

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(stem: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("../../fixtures/{stem}.json"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fregean"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn analyze_json(stem: &str) -> Value {
    let o = run(&["analyze", fixture(stem).to_str().unwrap(), "--json"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    serde_json::from_str(&stdout(&o)).unwrap()
}

#[test]
fn analyze_hilb3() {
    let v = analyze_json("hilb3");
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["lattice"]["con"], 4);
    assert_eq!(v["lattice"]["cm"], 2);
    assert_eq!(v["classification"]["strongly_fregean"], "verified");
    assert_eq!(v["representation"]["h_size"], 4);
    assert_eq!(v["representation"]["counts"]["surjective"], false);
}

#[test]
fn analyze_triv1() {
    let v = analyze_json("triv1");
    assert_eq!(v["lattice"]["length"], 0);
    assert_eq!(v["representation"]["s_family"], serde_json::json!([[]]));
    assert_eq!(v["representation"]["h_family"], serde_json::json!([[]]));
    assert_eq!(v["pip_classes"], serde_json::json!([]));
}

#[test]
fn analyze_z4() {
    let v = analyze_json("z4");
    assert_eq!(v["classification"]["strongly_fregean"], "refuted");
    assert_eq!(v["classification"]["sc1"], false);
}

#[test]
fn analyze_is_byte_stable() {
    let path = fixture("bg4");
    let a = run(&["analyze", path.to_str().unwrap()]);
    let b = run(&["analyze", path.to_str().unwrap()]);
    assert_eq!(a.stdout, b.stdout);
    let t = run(&["analyze", path.to_str().unwrap(), "--text"]);
    assert!(stdout(&t).contains("strongly Fregean: Verified"));
}

#[test]
fn timings_are_opt_in() {
    let path = fixture("lat2");
    assert!(!stdout(&run(&["analyze", path.to_str().unwrap()])).contains("timings"));
    assert!(stdout(&run(&["analyze", path.to_str().unwrap(), "--timings"])).contains("timings"));
}

fn verify(stem: &str) -> (Option<i32>, Value) {
    let o = run(&["verify", fixture(stem).to_str().unwrap(), "--json"]);
    (o.status.code(), serde_json::from_str(&stdout(&o)).unwrap())
}

fn statuses(v: &Value) -> Vec<(String, String)> {
    v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| {
            (
                c["name"].as_str().unwrap().to_string(),
                c["status"].as_str().unwrap().to_string(),
            )
        })
        .collect()
}

#[test]
fn verify_bg4_all_pass() {
    let (code, v) = verify("bg4");
    assert_eq!(code, Some(0));
    let s = statuses(&v);
    assert!(
        s.iter()
            .all(|(_, st)| st == "pass" || st == "not-applicable"),
        "{s:?}"
    );
    for name in [
        "centralizer-condition",
        "classes-form-boolean-groups",
        "chain-length-equals-sum-of-dimensions",
        "congruences-correspond-to-subgroup-upsets",
        "principal-term-transports-to-equivalence-bijectively",
    ] {
        assert!(
            s.contains(&(name.to_string(), "pass".to_string())),
            "{name}"
        );
    }
}

#[test]
fn verify_hilb3_accepts_non_surjectivity() {
    let (code, v) = verify("hilb3");
    assert_eq!(code, Some(0));
    let s = statuses(&v);
    assert!(s.contains(&(
        "element-map-image-versus-hereditary-sets".into(),
        "pass".into()
    )));
    assert!(s.contains(&(
        "principal-term-transports-to-equivalence-bijectively".into(),
        "not-applicable".into()
    )));
}

#[test]
fn verify_z4_lattice_checks_only() {
    let (code, v) = verify("z4");
    assert_eq!(code, Some(0));
    let s = statuses(&v);
    for name in [
        "principal-congruence-is-least",
        "lattice-closed-under-meet-and-join",
        "meet-irreducible-has-unique-cover",
        "congruence-is-meet-of-meet-irreducibles-above",
    ] {
        assert!(
            s.contains(&(name.to_string(), "pass".to_string())),
            "{name}"
        );
    }
    for name in [
        "centralizer-condition",
        "classes-form-boolean-groups",
        "monolith-has-two-element-class-of-one",
    ] {
        assert!(
            s.contains(&(name.to_string(), "not-applicable".to_string())),
            "{name}"
        );
    }
}

#[test]
fn strict_mode_reports_capped_checks() {
    let path = fixture("bg8");
    let p = path.to_str().unwrap();
    assert_eq!(
        run(&["verify", p, "--cap-free", "10"]).status.code(),
        Some(0)
    );
    assert_eq!(
        run(&["verify", p, "--cap-free", "10", "--strict"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        run(&["analyze", p, "--cap-free", "10", "--strict"])
            .status
            .code(),
        Some(3)
    );
}

fn dot_counts(stem: &str, what: &str) -> (usize, usize, String) {
    let o = run(&[
        "export-dot",
        fixture(stem).to_str().unwrap(),
        "--what",
        what,
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let nodes = text
        .lines()
        .filter(|l| l.trim_start().starts_with('"') && !l.contains("->"))
        .count();
    let edges = text.lines().filter(|l| l.contains("->")).count();
    (nodes, edges, text)
}

#[test]
fn export_dot_shapes() {
    assert_eq!(dot_counts("hilb3", "con").0, 4);
    assert_eq!(dot_counts("hilb3", "con").1, 4);
    let (n, e, _) = dot_counts("triv1", "con");
    assert_eq!((n, e), (1, 0));
    let (n, e, text) = dot_counts("bg4", "cm");
    assert_eq!((n, e), (3, 0));
    let colors: std::collections::BTreeSet<&str> = text
        .lines()
        .filter_map(|l| l.split("fillcolor=").nth(1))
        .collect();
    assert_eq!(colors.len(), 1);
    assert!(text.contains("rankdir=BT"));
}

#[test]
fn census_size_one() {
    let o = run(&["census", "--size", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<Value> = stdout(&o)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["size"], 1);
    assert_eq!(lines[0]["strongly_fregean"], "verified");
    assert_eq!(lines[1]["summary"]["algebras"], 1);
}

#[test]
fn census_size_two_is_deterministic_and_seeded() {
    let a = run(&["census", "--size", "2", "--seed-fixtures"]);
    let b = run(&["census", "--size", "2", "--seed-fixtures"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let lines: Vec<Value> = stdout(&a)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines[0]["source"], "fixture-triv1");
    let records = &lines[..lines.len() - 1];
    assert_eq!(records.len(), 6 + 17);
    for (i, r) in records.iter().enumerate() {
        assert_eq!(r["seq"], i);
        if r["size"] == 2 && r["orderable"] == true {
            assert_eq!(r["dimension"]["equal"], true, "{r}");
        }
    }
}

#[test]
fn census_out_file() {
    let dir = std::env::temp_dir().join(format!("fregean-census-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("c.ndjson");
    let o = run(&[
        "census",
        "--size",
        "2",
        "--out",
        out.to_str().unwrap(),
        "--text",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("17 algebras"));
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 17);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn input_errors_exit_2() {
    assert_eq!(run(&["census", "--size", "4"]).status.code(), Some(2));
    assert_eq!(
        run(&["census", "--size", "2", "--signature", "x"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["analyze", "/nonexistent/algebra.json"]).status.code(),
        Some(2)
    );
    let dir = std::env::temp_dir().join(format!("fregean-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(
        &bad,
        r#"{"size": 2, "one": 0, "operations": [{"name": "*", "arity": 2, "table": [0, 1]}]}"#,
    )
    .unwrap();
    for cmd in ["analyze", "verify", "export-dot"] {
        let o = run(&[cmd, bad.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{cmd}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("shape"));
    }
    std::fs::remove_dir_all(dir).unwrap();
}

use std::path::PathBuf;

use fregean_core::{fixtures, parse_algebra_json, AlgebraError};

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

#[test]
fn shipped_files_match_builtin_fixtures() {
    for (stem, alg) in fixtures::all() {
        let path = fixture_dir().join(format!("{stem}.json"));
        let text =
            std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let parsed = parse_algebra_json(&text).unwrap();
        assert_eq!(parsed.to_raw(), alg.to_raw(), "{stem}");
    }
}

#[test]
fn every_shipped_file_is_a_fixture() {
    let mut stems: Vec<String> = std::fs::read_dir(fixture_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .map(|p| p.file_stem().unwrap().to_string_lossy().into_owned())
        .collect();
    stems.sort();
    let mut known: Vec<String> = fixtures::all()
        .into_iter()
        .map(|(s, _)| s.to_string())
        .collect();
    known.sort();
    assert_eq!(stems, known);
}

#[test]
fn json_round_trip() {
    for (_, alg) in fixtures::all() {
        assert_eq!(
            parse_algebra_json(&alg.to_json()).unwrap().to_raw(),
            alg.to_raw()
        );
    }
}

#[test]
fn malformed_inputs_are_rejected_with_codes() {
    let cases = [
        (
            r#"{"size": 2, "one": 0, "operations": [{"name": "*", "arity": 2, "table": [0, 1, 1]}]}"#,
            "shape",
        ),
        (
            r#"{"size": 2, "one": 0, "operations": [{"name": "*", "arity": 2, "table": [0, 1, 1, 2]}]}"#,
            "range",
        ),
        (r#"{"size": 2, "operations": []}"#, "no-unit"),
        (r#"{"size": 2, "one": 5, "operations": []}"#, "no-unit"),
        (
            r#"{"size": 2, "one": 0, "operations": [{"name": "*", "arity": 1, "table": [0, 1]}, {"name": "*", "arity": 1, "table": [1, 0]}]}"#,
            "duplicate-op",
        ),
        ("not json", "parse"),
    ];
    for (text, code) in cases {
        let err: AlgebraError = parse_algebra_json(text).unwrap_err();
        assert_eq!(err.code(), code, "{text}");
    }
}

#[test]
fn nullary_one_is_accepted() {
    let text = r#"{"name": "pointed", "size": 2, "operations": [{"name": "1", "arity": 0, "table": [1]}, {"name": "f", "arity": 1, "table": [1, 0]}]}"#;
    assert_eq!(parse_algebra_json(text).unwrap().one(), 1);
}

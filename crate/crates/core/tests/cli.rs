use std::process::Command;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_finslerkit")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn json(text: &str) -> serde_json::Value {
    serde_json::from_str(text).unwrap()
}

#[test]
fn radial_field_is_homothetic() {
    let (code, out, _) = run(&["classify", "--finsler", "builtin:euclidean", "--dim", "2", "--field", "builtin:radial", "--seed", "7"]);
    assert_eq!(code, 0);
    let r = json(&out);
    assert_eq!(r["report_version"], 1);
    assert_eq!(r["verdicts"]["homothetic"], "holds");
    assert!((r["factor_estimates"]["homothety_constant"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert_eq!(r["config"]["plan"]["seed"], 7);
}

#[test]
fn translation_is_killing_for_a_randers_expression() {
    let (code, out, _) = run(&[
        "classify",
        "--finsler",
        "expr:sqrt(y1^2+y2^2)+0.3*y1",
        "--dim",
        "2",
        "--field",
        "builtin:translation?v=1,0",
    ]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["verdicts"]["killing"], "holds");
}

#[test]
fn quadratic_field_is_projective_not_affine() {
    let (code, out, _) = run(&["classify", "--finsler", "builtin:euclidean", "--dim", "2", "--field", "expr:[x1^2, x1*x2]"]);
    assert_eq!(code, 0);
    let r = json(&out);
    assert_eq!(r["verdicts"]["projective"], "holds");
    assert_eq!(r["verdicts"]["affine"], "fails");
}

#[test]
fn failing_verdicts_still_exit_zero_and_tables_render() {
    let (code, out, _) = run(&[
        "classify", "--finsler", "builtin:polar", "--field", "expr:[x1, 0]", "--format", "table", "--base-points", "4",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("killing             fails"));
    assert!(out.contains("conformal_sasaki"));
}

#[test]
fn report_written_to_file() {
    let path = std::env::temp_dir().join(format!("finslerkit-cli-{}.json", std::process::id()));
    let p = path.to_str().unwrap();
    let (code, out, _) = run(&[
        "classify", "--finsler", "builtin:quartic", "--field", "builtin:translation", "--out", p, "--box", "0:1", "--tol", "1e-8",
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let r = json(&std::fs::read_to_string(&path).unwrap());
    std::fs::remove_file(&path).unwrap();
    assert_eq!(r["config"]["plan"]["x_box"], serde_json::json!([[0.0, 1.0], [0.0, 1.0]]));
    assert_eq!(r["config"]["tolerances"]["rel_tol"], 1e-8);
}

#[test]
fn identities_pass_on_euclidean() {
    let (code, out, _) = run(&["identities", "--finsler", "builtin:euclidean", "--dim", "2"]);
    assert_eq!(code, 0);
    let r = json(&out);
    assert_eq!(r["all_passed"], true);
    for c in r["checks"].as_array().unwrap() {
        assert!(c["max_residual"].as_f64().unwrap() < 1e-9, "{}", c["name"]);
    }
}

#[test]
fn spray_at_a_point() {
    let (code, out, _) = run(&["spray", "--finsler", "builtin:polar", "--at", "2,0;1,1"]);
    assert_eq!(code, 0);
    let r = json(&out);
    assert!((r["spray"][0].as_f64().unwrap() + 1.0).abs() < 1e-12);
    assert!((r["spray"][1].as_f64().unwrap() - 0.5).abs() < 1e-12);
    let (code, out, _) = run(&["spray", "--finsler", "builtin:euclidean", "--at", "0.3,-2;1,4"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["spray"], serde_json::json!([0.0, 0.0]));
}

#[test]
fn exit_codes() {
    let (code, _, err) = run(&["classify", "--finsler", "builtin:nope", "--field", "builtin:radial"]);
    assert_eq!(code, 2);
    assert!(err.contains("unknown model"));
    assert_eq!(run(&["classify", "--finsler", "expr:y1^", "--field", "builtin:radial"]).0, 2);
    assert_eq!(run(&["classify", "--finsler", "builtin:euclidean"]).0, 2);
    assert_eq!(run(&["spray", "--finsler", "builtin:polar", "--at", "0,0;1,1"]).0, 3);
    assert_eq!(run(&["spray", "--finsler", "builtin:euclidean", "--at", "0,0;0,0"]).0, 3);
    let (code, _, err) = run(&["classify", "--finsler", "expr:sqrt(y1^2)", "--field", "builtin:radial"]);
    assert_eq!(code, 4);
    assert!(err.contains("exhausted"));
}

use std::f64::consts::PI;
use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn grushin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grushin"))
        .args(args)
        .env_remove("GRUSHIN_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = grushin(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn isoprofile_tables() {
    let out = grushin(&["isoprofile", "--alpha", "0", "--samples", "3", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,phi");
    let rows: Vec<(f64, f64)> = lines[1..]
        .iter()
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect();
    let expected = [(0.0, 1.0), (0.5, 0.8660254), (1.0, 0.0)];
    for (r, e) in rows.iter().zip(expected) {
        assert!(close(r.0, e.0, 1e-12) && close(r.1, e.1, 1e-7), "{r:?}");
    }
    let v = json(&["isoprofile", "--alpha", "1", "--samples", "11"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 11);
    assert!(close(num(&rows[0]["phi"]), PI / 4.0, 1e-12));
    assert_eq!((num(&rows[10]["x"]), num(&rows[10]["phi"])), (1.0, 0.0));
}

#[test]
fn bubbles() {
    let v = json(&["bubble", "--orientation", "vertical", "--alpha", "1", "--volume", "1"]);
    assert!(close(num(&v["descriptor"]["k"]), -1.5027259, 1e-7));
    assert!(close(num(&v["descriptor"]["perimeter"]), 4.5082, 1e-4));
    assert!(close(num(&v["angles"]["transformed"]), PI / 6.0, 1e-12));
    let h = json(&["bubble", "--orientation", "horizontal", "--alpha", "1", "--volume", "1"]);
    assert!(close(num(&h["descriptor"]["h"]), 1.3103707, 1e-7));
    assert!(close(num(&h["descriptor"]["perimeter"]), 3.9311121, 1e-7));
    let v0 = json(&["bubble", "--orientation", "vertical", "--alpha", "0"]);
    let h0 = json(&["bubble", "--orientation", "y", "--alpha", "0"]);
    assert!(close(num(&v0["descriptor"]["perimeter"]), num(&h0["descriptor"]["perimeter"]), 1e-8));
}

#[test]
fn bubble_sweep_and_csv() {
    let v = json(&["bubble", "--alpha", "1", "--sweep", "1,8", "--samples", "5"]);
    let items = v.as_array().unwrap();
    assert_eq!(items.len(), 2);
    let ratio = num(&items[1]["descriptor"]["perimeter"]) / num(&items[0]["descriptor"]["perimeter"]);
    assert!(close(ratio, 4.0, 1e-9));
    let out = grushin(&["bubble", "--alpha", "1", "--samples", "5", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("volume,x,f\n"));
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn comparison() {
    let c = json(&["compare", "--alpha", "1", "--volume", "1"]);
    assert_eq!(c["winner"], "horizontal");
    assert!(close(num(&c["ratio"]), 1.1468, 1e-4));
    let c8 = json(&["compare", "--alpha", "1", "--volume", "8"]);
    assert!(close(num(&c8["ratio"]), num(&c["ratio"]), 1e-12));
    let out = grushin(&["compare", "--alpha", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("UnsupportedAlpha"));
    let forced = json(&["compare", "--alpha", "0", "--force"]);
    assert!(close(num(&forced["ratio"]), 1.0, 1e-10));
}

#[test]
fn solver_reports() {
    let r = json(&["solve", "--orientation", "vertical", "--alpha", "1", "--volume", "1", "--grid", "400"]);
    assert_eq!(r["converged"], true);
    assert!(close(num(&r["perimeter"]), 4.508177666976278, 0.005 * 4.508177666976278));
    let coarse = json(&["solve", "--alpha", "1", "--grid", "16"]);
    assert_eq!(coarse["converged"], true);
    assert!(num(&coarse["relative_gap"]) > num(&r["relative_gap"]));
    let tiny = json(&["solve", "--alpha", "1", "--volume", "1e-12"]);
    let predicted = num(&r["perimeter"]) * 1e-8;
    assert!(close(num(&tiny["perimeter"]), predicted, 1e-6 * predicted));
    let out = grushin(&["solve", "--grid", "4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn rearrangement_files() {
    let dir = tempfile::tempdir().unwrap();
    let two = dir.path().join("two.json");
    fs::write(
        &two,
        r#"{"slabs":[{"y_lo":0,"y_hi":1,"intervals":[
            {"u_lo":0,"u_hi":0,"v_lo":1,"v_hi":1},{"u_lo":2,"u_hi":2,"v_lo":3,"v_hi":3}]}]}"#,
    )
    .unwrap();
    let r = json(&["rearrange", "--input", two.to_str().unwrap()]);
    assert_eq!(num(&r["report"]["original_perimeter"]), 12.0);
    assert_eq!(num(&r["report"]["rearranged_perimeter"]), 8.0);
    assert_eq!(r["rearranged"]["slabs"][0]["intervals"][0]["v_lo"], "2");

    let convex = dir.path().join("convex.json");
    let body = r#"{"slabs":[{"y_lo":"0","y_hi":"1/2","intervals":[{"u_lo":"1/3","u_hi":"1/2","v_lo":"2","v_hi":"7/4"}]}]}"#;
    fs::write(&convex, body).unwrap();
    let r = json(&["rearrange", "--input", convex.to_str().unwrap()]);
    assert_eq!(num(&r["report"]["gap"]["lhs"]), 0.0);
    let expected: Value = serde_json::from_str(body).unwrap();
    assert_eq!(r["rearranged"], expected);

    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\n  \"slabs\": [\n    {\"y_lo\": }\n").unwrap();
    let out = grushin(&["rearrange", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");

    let nested = dir.path().join("nested.json");
    fs::write(
        &nested,
        r#"{"slabs":[{"y_lo":0,"y_hi":1,"intervals":[{"u_lo":0,"u_hi":0,"v_lo":1,"v_hi":1}]},
                     {"y_lo":1,"y_hi":2,"intervals":[{"u_lo":3,"u_hi":3,"v_lo":4,"v_hi":4}]}]}"#,
    )
    .unwrap();
    let out = grushin(&["rearrange", "--input", nested.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Schwarz"));

    let out = grushin(&["rearrange", "--input", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn outputs_are_deterministic_and_written_to_files() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["bubble", "--orientation", "horizontal", "--alpha", "0.5", "--samples", "7"];
    let a = grushin(&args).stdout;
    let b = grushin(&args).stdout;
    assert_eq!(a, b);
    let path = dir.path().join("out.json");
    let mut with_file = args.to_vec();
    with_file.extend(["--output", path.to_str().unwrap()]);
    assert!(grushin(&with_file).status.success());
    assert_eq!(fs::read(&path).unwrap(), a);

    let out = Command::new(env!("CARGO_BIN_EXE_grushin"))
        .args(["isoprofile", "--samples", "4", "--output", "table.json"])
        .env("GRUSHIN_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("table.json").exists());

    let out = grushin(&["isoprofile", "--output", dir.path().join("no/such/dir/x.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn invalid_arguments() {
    assert_eq!(grushin(&["isoprofile", "--alpha", "-1"]).status.code(), Some(2));
    assert_eq!(grushin(&["isoprofile", "--samples", "1"]).status.code(), Some(2));
    assert_eq!(grushin(&["bubble", "--volume", "0"]).status.code(), Some(2));
    assert_eq!(grushin(&["bubble", "--orientation", "diagonal"]).status.code(), Some(2));
    assert_eq!(grushin(&["frobnicate"]).status.code(), Some(2));
}

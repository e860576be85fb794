use serde_json::Value;
use std::process::{Command, Output};

fn tenttile(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tenttile")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn list_has_eleven_rows() {
    let out = tenttile(&["list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 11);
    assert!(rows[0].contains("t^3 - 5t^2 + 4t - 1"));
    let zero = rows.iter().find(|r| r.trim_start().starts_with("0 ")).unwrap();
    assert!(zero.contains("No tent-tile"));

    let v = json(&tenttile(&["list", "--format", "json"]));
    assert_eq!(v["schema"], 1);
    assert_eq!(v["records"].as_array().unwrap().len(), 11);
}

#[test]
fn dimension_of_alpha_3() {
    let out = tenttile(&["dimension", "3"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    assert!((v["box_dimension"].as_f64().unwrap() - 1.02952).abs() < 1e-4);
    let poly: Vec<&str> = v["mu_sr_poly"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    assert_eq!(poly, ["-1", "0", "-2", "0", "0", "0", "0", "1"]);
}

#[test]
fn tiling_with_reflection() {
    let out = tenttile(&["tiling", "-1", "--resolution", "128"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["pass"], true);
    assert_eq!(v["status"], "tiles-with-reflection");
    assert_eq!(v["center"], "a");
    assert_eq!(v["histogram"]["modal"], 1);
}

#[test]
fn failing_tiling_exits_one() {
    let out = tenttile(&["tiling", "-1", "--resolution", "128", "--tol", "1e-6"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["pass"], false);
    assert!(v["histogram"]["boundary_fraction"].as_f64().unwrap() > 1e-6);
}

#[test]
fn renders_write_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();

    assert!(tenttile(&["render", "-2", "--out", d]).status.success());
    let svg = std::fs::read_to_string(dir.path().join("tent_-2.svg")).unwrap();
    assert_eq!(svg.matches("<line").count(), 1);
    assert!(svg.contains("[-1.6180"));

    assert!(tenttile(&["render", "1", "--resolution", "64", "--out", d]).status.success());
    let pgm = std::fs::read(dir.path().join("tent_1.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n"));

    assert!(tenttile(&["render", "4", "--resolution", "16", "--out", d]).status.success());
    let vox = std::fs::read_to_string(dir.path().join("tent_4.vox")).unwrap();
    assert!(vox.starts_with("voxels 16 "));
    assert!(vox.lines().count() > 1);

    let args = ["render", "3", "--what", "rauzy", "--format", "csv", "--depth", "8", "--out", d];
    assert!(tenttile(&args).status.success());
    let csv = std::fs::read_to_string(dir.path().join("rauzy_3.csv")).unwrap();
    let letters: std::collections::BTreeSet<&str> = csv.lines().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(letters.len(), 6);
}

#[test]
fn boundary_exports() {
    let v = json(&tenttile(&["boundary", "1"]));
    assert_eq!(v["vertices"].as_array().unwrap().len(), 15);
    assert!((v["mu"].as_f64().unwrap() - 1.3625985777).abs() < 1e-9);

    let out = tenttile(&["boundary", "1", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 15);

    assert_eq!(tenttile(&["boundary", "5", "--variant", "lat"]).status.code(), Some(1));
}

#[test]
fn correspondence_passes() {
    let out = tenttile(&["correspond", "5", "--resolution", "100"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["family"], "theta_5");
    assert_eq!(v["distances"].as_array().unwrap().len(), 10);
}

#[test]
fn info_carries_the_substitution() {
    let v = json(&tenttile(&["info", "-3"]));
    assert_eq!(v["family"], "theta'_3");
    assert_eq!(v["dim"], 2);
    assert_eq!(v["tiling"]["status"], "tiles-with-reflection");
    let v = json(&tenttile(&["info", "0"]));
    assert_eq!(v["has_tent_tile"], false);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(tenttile(&["dimension", "7"]).status.code(), Some(2));
    assert_eq!(tenttile(&["dimension", "0"]).status.code(), Some(2));
    assert_eq!(tenttile(&["tiling", "5"]).status.code(), Some(2));
    assert_eq!(tenttile(&["render", "1", "--format", "png"]).status.code(), Some(2));
    assert_eq!(tenttile(&["tiling", "1", "--window-scale", "-1"]).status.code(), Some(2));
    assert_eq!(tenttile(&["list", "--format", "svg"]).status.code(), Some(2));
    assert_eq!(tenttile(&["bogus"]).status.code(), Some(2));
}

#[test]
fn verify_subset_is_deterministic() {
    let args = ["verify-all", "--only", "dimensions,identities,edge-rule"];
    let a = tenttile(&args);
    let b = tenttile(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["pass"], true);
    let groups = v["groups"].as_array().unwrap();
    assert_eq!(groups.len(), 3);
    assert_eq!(groups[0]["passed"], 8);
}

#[test]
fn verify_reports_failures() {
    let out = tenttile(&["verify-all", "--only", "polynomials"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    let items = v["groups"][0]["items"].as_array().unwrap();
    let failed: Vec<&str> = items
        .iter()
        .filter(|i| i["status"] == "fail")
        .map(|i| i["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["alpha_5"]);
}

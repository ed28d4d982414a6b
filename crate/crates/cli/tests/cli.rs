use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn map(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/surfaces").join(format!("{name}.map"))
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("{e}: {}", self.stdout))
    }
}

fn fronts(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_fronts")).args(args).output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn a4_example_and_its_gauss_map() {
    let r = fronts(&["classify", path(&map("a4")), "--point", "u=0,v=0,w=0", "--dual"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let j = r.json();
    assert_eq!(j["result"]["label"], "A4-inflection");
    assert_eq!(j["result"]["dual_label"], "A3-Morin");
    assert_eq!(j["result"]["pairing"]["consistent"], true);
    assert_eq!(j["settings"]["order"], 6);
    assert_eq!(j["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn regular_and_nondiagnosable_points() {
    let r = fronts(&["classify", path(&map("paraboloid")), "--point", "u=0.3,v=-0.2"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json()["result"]["label"], "regular");
    let r = fronts(&["classify", path(&map("monkey_saddle")), "--point", "u=0,v=0"]);
    assert_eq!(r.code, 2);
    assert_eq!(r.json()["result"]["label"], "degenerate-nondiagnosable");
    assert!(r.stderr.contains("nondiagnosable"));
}

#[test]
fn dual_command_pairs_fronts_and_curves() {
    let r = fronts(&["dual", path(&map("bent_swallowtail")), "--point", "0,0"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let j = r.json();
    assert_eq!(j["result"]["theorem"], "APrime");
    assert_eq!(j["result"]["label"], "A3-singularity");
    assert_eq!(j["result"]["dual_label"], "A3-inflection");
    let r = fronts(&["dual", path(&map("cubic_chart")), "--point", "s=0"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json()["result"]["dual_label"], "A2-singularity");
    // the flat swallowtail has a Gauss map with one-dimensional image
    let r = fronts(&["dual", path(&map("swallowtail")), "--point", "0,0"]);
    assert_eq!(r.code, 3);
    assert_eq!(r.json()["result"]["error"]["code"], "hypothesis");
}

#[test]
fn torus_census() {
    let r = fronts(&["euler", path(&map("torus")), "--grid", "256"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let j = r.json();
    assert_eq!(j["result"]["residual"], 0);
    assert_eq!(j["result"]["chi_m_minus"], 0);
    assert_eq!(j["result"]["godrons"].as_array().unwrap().len(), 0);
}

#[test]
fn bumpy_torus_census() {
    let r = fronts(&["euler", path(&map("bumpy_torus")), "--grid", "256"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let j = r.json();
    let n = j["result"]["godrons"].as_array().unwrap().len();
    assert!(n > 0 && n % 2 == 0);
    assert_eq!(j["result"]["residual"], 0);
    assert_eq!(j["result"]["total_even"], true);
}

#[test]
fn engineered_a4_point_exits_with_violation() {
    let r = fronts(&["euler", path(&map("a4_torus")), "--grid", "128"]);
    assert_eq!(r.code, 3);
    let j = r.json();
    assert!(j["result"]["residual"].is_null());
    let v = j["result"]["violations"].as_array().unwrap();
    assert!(v.iter().any(|v| f(&v["point"][0]).abs() < 1e-6 && f(&v["point"][1]).abs() < 1e-6));
    assert!(r.stderr.lines().any(|l| l.starts_with("violation at (0.")));
}

#[test]
fn cycloid_cusp() {
    let r = fronts(&["cusp", path(&map("cycloid")), "--point", "t=0"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let c = &r.json()["result"]["cusp"];
    assert!((f(&c["mu"]) + 1.0).abs() < 1e-8);
    assert!((f(&c["radius"]) - 1.0).abs() < 1e-8);
    assert_eq!(c["sign"], "negative");
}

#[test]
fn circle_with_regular_flag() {
    let r = fronts(&["cusp", path(&map("circle")), "--point", "t=0.3", "--regular"]);
    assert_eq!(r.code, 0);
    let o = &r.json()["result"]["osculating"];
    assert!((f(&o["theta"]) - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
    assert!((f(&o["a"]) - 2.0).abs() < 1e-10);
    // without the flag a regular point is not a cusp
    assert_eq!(fronts(&["cusp", path(&map("circle")), "--point", "t=0.3"]).code, 2);
}

#[test]
fn degenerate_cusp_exits_2() {
    let r = fronts(&["cusp", path(&map("degenerate_cusp")), "--point", "t=0"]);
    assert_eq!(r.code, 2);
    let j = r.json();
    assert_eq!(j["result"]["status"], "not-a-cusp");
    assert!(j["result"]["message"].as_str().unwrap().contains("degenerate cusp"));
    // --regular does not help at a singular point
    assert_eq!(fronts(&["cusp", path(&map("degenerate_cusp")), "--point", "t=0", "--regular"]).code, 2);
}

#[test]
fn input_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.map");
    std::fs::write(&bad, "name: bad\nkind: affine\nvars: u v\ncomponent: u\ncomponent: v\ncomponent: u*(v\n").unwrap();
    let r = fronts(&["classify", path(&bad), "--point", "0,0"]);
    assert_eq!(r.code, 1);
    let msg = r.json()["result"]["error"]["message"].as_str().unwrap().to_string();
    assert!(msg.contains("offset"), "{msg}");

    let r = fronts(&["classify", path(&dir.path().join("missing.map")), "--point", "0"]);
    assert_eq!((r.code, r.json()["result"]["error"]["code"].as_str().unwrap()), (1, "io"));

    let r = fronts(&["classify", path(&map("parabolic_graph")), "--point", "u=3,v=0"]);
    assert_eq!((r.code, r.json()["result"]["error"]["code"].as_str().unwrap()), (1, "domain"));

    let r = fronts(&["classify", path(&map("paraboloid")), "--point", "u=0"]);
    assert_eq!(r.code, 1);
    assert_eq!(fronts(&["classify", path(&map("paraboloid"))]).code, 1);
    assert_eq!(fronts(&["frobnicate"]).code, 1);
    assert_eq!(fronts(&["classify", path(&map("a4")), "--point", "0,0,0", "--order", "40"]).code, 1);
}

#[test]
fn trace_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let r = fronts(&["trace", path(&map("parabolic_graph")), "--grid", "64", "--out", path(dir.path())]);
    assert_eq!(r.code, 0);
    let csv = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert!(csv.starts_with("curve,index,u,v,value\n"));
    let svg = std::fs::read_to_string(dir.path().join("trace.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(std::fs::read_to_string(dir.path().join("trace.json")).unwrap(), r.stdout);
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let m = map("bumpy_torus");
    let ra = fronts(&["euler", path(&m), "--grid", "64", "--out", path(a.path()), "--threads", "1"]);
    let rb = fronts(&["euler", path(&m), "--grid", "64", "--out", path(b.path()), "--threads", "4"]);
    assert_eq!(ra.code, rb.code);
    for file in ["euler.json", "euler.csv", "euler.svg"] {
        let x = std::fs::read(a.path().join(file)).unwrap();
        let y = std::fs::read(b.path().join(file)).unwrap();
        assert!(x == y, "{file} differs");
    }
    let c = fronts(&["cusp", path(&map("cycloid")), "--point", "t=0", "--out", path(a.path())]);
    let d = fronts(&["cusp", path(&map("cycloid")), "--point", "t=0", "--out", path(b.path())]);
    assert_eq!(c.stdout, d.stdout);
    assert_eq!(
        std::fs::read(a.path().join("cusp.svg")).unwrap(),
        std::fs::read(b.path().join("cusp.svg")).unwrap()
    );
}

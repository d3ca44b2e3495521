use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(name)
}

fn prepot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prepot"))
        .args(args)
        .output()
        .expect("spawn prepot")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Cell {
    masked: bool,
    e: [f64; 3],
    b: [f64; 3],
}

fn read_grid(csv_text: &[u8]) -> Vec<Cell> {
    let mut rdr = csv::Reader::from_reader(csv_text);
    let headers = rdr.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let (m, e1, b1) = (col("masked"), col("e1"), col("b1"));
    rdr.records()
        .map(|r| {
            let r = r.unwrap();
            let masked = &r[m] == "1";
            let f = |i: usize| {
                if masked {
                    f64::NAN
                } else {
                    r[i].parse::<f64>().unwrap()
                }
            };
            Cell {
                masked,
                e: [f(e1), f(e1 + 1), f(e1 + 2)],
                b: [f(b1), f(b1 + 1), f(b1 + 2)],
            }
        })
        .collect()
}

fn norm(v: [f64; 3]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[test]
fn rest_grid_is_electric_with_masked_axis() {
    let out = prepot(&["field-grid", "--scenario", s(&scenario("rest_charge.json"))]);
    assert_eq!(out.status.code(), Some(0));
    let cells = read_grid(&out.stdout);
    assert_eq!(cells.len(), 11 * 11 * 11);
    assert!(cells.iter().any(|c| c.masked));
    let live: Vec<_> = cells.iter().filter(|c| !c.masked).collect();
    let emax = live.iter().map(|c| norm(c.e)).fold(0.0, f64::max);
    let bmax = live.iter().map(|c| norm(c.b)).fold(0.0, f64::max);
    assert!(emax > 0.0 && bmax < 1e-8 * emax, "emax {emax} bmax {bmax}");
}

#[test]
fn uniform_grid_has_b_equal_v_cross_e() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.csv");
    let out = prepot(&[
        "field-grid",
        "--scenario",
        s(&scenario("uniform_motion.json")),
        "--out",
        s(&path),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let cells = read_grid(&std::fs::read(&path).unwrap());
    let v = 0.5;
    let mut checked = 0;
    for c in cells.iter().filter(|c| !c.masked) {
        let vxe = [0.0, -v * c.e[2], v * c.e[1]];
        let diff = [c.b[0] - vxe[0], c.b[1] - vxe[1], c.b[2] - vxe[2]];
        assert!(norm(diff) <= 1e-4 * norm(c.e), "B {:?} vxE {:?}", c.b, vxe);
        checked += 1;
    }
    assert!(checked > 50);
}

#[test]
fn json_lines_output_has_one_object_per_cell() {
    let out = prepot(&[
        "field-grid",
        "--scenario",
        s(&scenario("uniform_motion.json")),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<serde_json::Value> = text
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(rows.len(), 100);
    assert!(rows.iter().all(|r| r["schema_version"] == 1));
}

#[test]
fn empty_grid_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"version": 1, "charges": [{"q": 1.0, "line": {"kind": "rest", "position": [0,0,0]}}],
            "grid": {"time": 0.0, "origin": [0,0,0], "axes": []}}"#,
    )
    .unwrap();
    let out = prepot(&["field-grid", "--scenario", s(&path)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));
}

#[test]
fn missing_scenario_file_is_a_config_error() {
    let out = prepot(&["field-grid", "--scenario", "/nonexistent/scenario.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn loop_phase_table_reports_windings() {
    let out = prepot(&["loop-phase", "--scenario", s(&scenario("rest_charge.json"))]);
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(&out.stdout[..]);
    let rows: Vec<_> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| &r[2] == "OK"));
}

#[test]
fn loop_through_axis_exits_three() {
    let out = prepot(&[
        "loop-phase",
        "--scenario",
        s(&scenario("axis_crossing.json")),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().nth(1).unwrap().contains(",OK,"));
    assert!(text.lines().nth(2).unwrap().contains(",ERROR,"));
}

#[test]
fn empty_loop_list_gives_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("noloops.json");
    std::fs::write(
        &path,
        r#"{"version": 1, "charges": [{"q": 1.0, "line": {"kind": "rest", "position": [0,0,0]}}], "loops": []}"#,
    )
    .unwrap();
    let out = prepot(&["loop-phase", "--scenario", s(&path)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 1);
}

#[test]
fn unknown_check_exits_two() {
    let out = prepot(&["verify", "no-such-check"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_single_family_writes_json_report() {
    let out = prepot(&[
        "verify",
        "zeta-invariance",
        "--format",
        "json",
        "--seed",
        "7",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["seed"], 7);
    assert_eq!(report["checks"].as_array().unwrap().len(), 1);
}

#[test]
fn verify_all_reports_the_known_failures() {
    let out = prepot(&["verify"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stderr);
    assert!(text.contains("matrix-relations"));
    assert!(text.contains("vacuum-maxwell"));
}

#[test]
fn relations_dump_lists_matrices() {
    let out = prepot(&["relations-dump", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v.is_object());
    let csv_out = prepot(&["relations-dump"]);
    assert_eq!(csv_out.status.code(), Some(0));
    assert!(csv_out.stdout.len() > 100);
}

use std::path::PathBuf;
use std::process::{Command, Output};

use bootperc::{FortCertificate, RootedTree};
use serde_json::Value;

fn bootperc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bootperc")).args(args).output().expect("binary runs")
}

fn json_ok(args: &[&str]) -> Value {
    let out = bootperc(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn json_err(args: &[&str], code: i32) -> Value {
    let out = bootperc(args);
    assert_eq!(out.status.code(), Some(code), "{args:?}");
    assert!(out.stdout.is_empty());
    serde_json::from_slice(&out.stderr).expect("stderr is a JSON record")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("bootperc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

const SMALL_TREE: &str = "# root, three children, two grandchildren each\n-1\n0\n0\n0\n1\n1\n2\n2\n3\n3\n";

#[test]
fn critical_value_and_provenance() {
    let v = json_ok(&["critical", "--d", "3", "--k", "3"]);
    assert_eq!(v["p_crit"].to_string(), "0.666666666667");
    assert_eq!(v["provenance"]["tool"], "bootperc");
    assert_eq!(v["provenance"]["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["provenance"]["params"]["critical"]["d"], 3);
    let v = json_ok(&["critical", "--d", "3", "--k", "2"]);
    assert!((v["p_crit"].as_f64().unwrap() - 1.0 / 9.0).abs() < 1e-11);
}

#[test]
fn gw_critical_example() {
    let v = json_ok(&["gw-critical", "--dist", "2:0.5,4:0.5", "--k", "2"]);
    assert!((v["p_crit"].as_f64().unwrap() - 0.10504).abs() < 1e-4);
    assert!((v["argmax"].as_f64().unwrap() - (4.0 + 7f64.sqrt()) / 9.0).abs() < 1e-6);
}

#[test]
fn prune_report_revalidates() {
    let path = scratch("small.tree");
    std::fs::write(&path, SMALL_TREE).unwrap();
    let v = json_ok(&["prune", "--tree", path.to_str().unwrap(), "--beta", "3", "--k", "1"]);
    assert!(v["lhs"].as_f64().unwrap() <= v["rhs"].as_f64().unwrap());
    let t = RootedTree::parse_parent_list(SMALL_TREE).unwrap();
    let cert: FortCertificate = serde_json::from_value(v["fort"].clone()).unwrap();
    assert!(cert.verify(t.graph()));
    let v = json_ok(&["prune", "--tree", path.to_str().unwrap(), "--beta", "1.5,2", "--k", "2"]);
    assert_eq!(v["rounds"].as_array().unwrap().len(), 2);
}

#[test]
fn fort_certificate_round_trip() {
    let cert_path = scratch("fort.json");
    let base = ["forts", "--family", "subdivided", "--d", "3", "--depth", "3"];
    let v = json_ok(&[&base[..], &["--mode", "min", "--k", "1", "--max-size", "5", "--interior"]].concat());
    assert_eq!(v["found"], true);
    assert_eq!(v["certificate"]["size"], 4);
    std::fs::write(&cert_path, v["certificate"].to_string()).unwrap();
    let check = json_ok(&[&base[..], &["--mode", "verify", "--certificate", cert_path.to_str().unwrap()]].concat());
    assert_eq!(check["valid"], true);
    let red = json_ok(&[&base[..], &["--mode", "red", "--k", "2"]].concat());
    assert_eq!(red["root_red"], true);
}

#[test]
fn sweep_csv_is_reproducible() {
    let line = "sweep --family regular --d 3 --depth 6 --k 2 --p-grid 0.2,0.5,0.9 --trials 300 --seed 11 --format csv";
    let args: Vec<&str> = line.split_whitespace().collect();
    let a = bootperc(&args);
    let b = bootperc(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# "));
    assert_eq!(lines[1], "p,estimate,std_err,trials,d,k,depth,seed");
    assert_eq!(lines.len(), 5);
    assert!(lines[4].starts_with("0.9,"));
}

#[test]
fn extinction_sweep_matches_recursion() {
    let line = "sweep --mode extinction --d 3 --depth 10 --k 2 --p-grid 0.2 --trials 20000 --seed 3";
    let v = json_ok(&line.split_whitespace().collect::<Vec<_>>());
    let row = &v["rows"][0];
    assert_eq!(row["depth"], 10);
    let exact = bootperc::analytic::iterate_b(3, 2, 0.2, 10).unwrap();
    let est = row["estimate"].as_f64().unwrap();
    assert!((est - exact).abs() <= 4.0 * row["std_err"].as_f64().unwrap().max(1e-3));
}

#[test]
fn depth_check_adds_deeper_rows() {
    let line = "sweep --family regular --d 2 --depth 4 --k 2 --p-grid 0.3,0.6 --trials 100 --seed 1 --depth-check";
    let v = json_ok(&line.split_whitespace().collect::<Vec<_>>());
    let depths: Vec<u64> = v["rows"].as_array().unwrap().iter().map(|r| r["depth"].as_u64().unwrap()).collect();
    assert_eq!(depths, vec![4, 4, 8, 8]);
}

#[test]
fn output_flag_writes_file() {
    let path = scratch("bound.json");
    let out = bootperc(&["bound", "anchored", "--d", "4", "--k", "2", "--h", "2", "--output", path.to_str().unwrap()]);
    assert!(out.status.success() && out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["c"], 0.5);
    assert_eq!(v["K"], 0.25);
}

#[test]
fn branching_bracket() {
    let v = json_ok(&["branching", "--family", "regular", "--d", "3", "--depths", "6", "--lo", "1.5", "--hi", "5"]);
    assert!(v["lower"].as_f64().unwrap() <= 3.0 && 3.0 <= v["upper"].as_f64().unwrap());
}

#[test]
fn simulate_is_seeded() {
    let args = ["simulate", "--family", "grid", "--n", "9", "--k", "2", "--p", "0.2", "--seed", "4"];
    let a = json_ok(&args);
    let b = json_ok(&args);
    assert_eq!(a, b);
    assert_eq!(a["provenance"]["seed"], 4);
    assert!(bootperc::SiteConfig::from_hex(a["final_config"].as_str().unwrap()).is_ok());
}

#[test]
fn errors_are_machine_readable() {
    let e = json_err(&["bound", "anchored", "--d", "4", "--k", "1", "--h", "2"], 1);
    assert_eq!(e["error"]["kind"], "anchored_inapplicable");
    assert_eq!(e["provenance"]["command"], "bound");
    let e = json_err(&["critical", "--d", "3"], 2);
    assert_eq!(e["error"]["kind"], "usage");
    let e = json_err(&["critical", "--d", "3", "--k", "3", "--format", "csv"], 2);
    assert_eq!(e["error"]["kind"], "usage");
    let e = json_err(&["gw-critical", "--dist", "1:0.5,3:0.5", "--k", "2"], 1);
    assert_eq!(e["error"]["kind"], "degenerate_offspring");
    let e = json_err(&["gw-critical", "--dist", "2:0.5,4:0.4", "--k", "2"], 1);
    assert_eq!(e["error"]["kind"], "invalid_parameter");
    // random commands refuse to run without an explicit seed
    let e = json_err(&["simulate", "--family", "grid", "--n", "5", "--k", "2", "--p", "0.3"], 2);
    assert_eq!(e["error"]["kind"], "usage");
}

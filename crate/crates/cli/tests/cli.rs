use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use spinglass_topology::disorder::BondConfig;
use spinglass_topology::{CellComplex, Lattice};

fn sgtopo(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sgtopo"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write_bond_file(dir: &Path, name: &str, cx: &CellComplex, bonds: &BondConfig) {
    let mut v = serde_json::to_value(bonds).unwrap();
    v["lattice"] = serde_json::to_value(cx.lattice()).unwrap();
    std::fs::write(dir.join(name), serde_json::to_string(&v).unwrap()).unwrap();
}

#[test]
fn gen_counts_bonds_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = sgtopo(dir.path(), &["gen", "--lattice", "8x8", "--x", "0.5", "--seed", "1"]);
    let b = sgtopo(dir.path(), &["gen", "--lattice", "8x8", "--x", "0.5", "--seed", "1"]);
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["n_bonds"], 144);
    assert_eq!(v["manifest"]["seed"], 1);
    let c = sgtopo(dir.path(), &["gen", "--lattice", "8x8", "--x", "0.5", "--seed", "2"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn all_positive_file_has_no_frustration() {
    let dir = tempfile::tempdir().unwrap();
    let out = sgtopo(dir.path(), &["gen", "--lattice", "4x4x2", "--x", "1", "--out", "plus.json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&sgtopo(dir.path(), &["analyze", "--input", "plus.json"]));
    assert_eq!(v["negative_bonds"], 0);
    assert_eq!(v["frustrated"], 0);
}

#[test]
fn analyze_unit_cube_construction() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&sgtopo(dir.path(), &["analyze", "--instance", "bminus-1x1x1"]));
    assert_eq!(v["frustrated"], 6);
    assert_eq!(v["pairs"], 3);
    assert_eq!(v["unpaired"], 0);
}

#[test]
fn frustrated_fraction_near_one_half() {
    let dir = tempfile::tempdir().unwrap();
    sgtopo(dir.path(), &["gen", "--lattice", "16x16", "--x", "0.5", "--seed", "5", "-o", "r.json"]);
    let v = json(&sgtopo(dir.path(), &["analyze", "--input", "r.json"]));
    let f = v["frustrated_fraction"].as_f64().unwrap();
    let s = v["frustrated_fraction_stderr"].as_f64().unwrap();
    assert!((f - 0.5).abs() <= 4.0 * s, "{f}");
}

#[test]
fn ground_state_degeneracies() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&sgtopo(dir.path(), &["gs", "--instance", "ferromagnet-3x3"]));
    assert_eq!(v["degeneracy"], 2);
    assert_eq!(v["interface_passed"], true);

    let cx = CellComplex::new(Lattice::free(&[1, 1]).unwrap());
    write_bond_file(dir.path(), "square.json", &cx, &BondConfig::from_negative_bonds(&cx, [0]));
    let v = json(&sgtopo(dir.path(), &["gs", "--input", "square.json"]));
    assert_eq!(v["degeneracy"], 8);
    assert_eq!(v["energy"], -2);
    assert_eq!(v["canonical_states"].as_array().unwrap().len(), 4);
    assert!(v["manifest"]["input_sha256"].as_str().unwrap().len() == 64);

    let out = sgtopo(dir.path(), &["gs", "--instance", "pair-network-2d"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_reports() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&sgtopo(dir.path(), &["verify", "--instance", "ferromagnet-torus-3x3"]));
    assert_eq!(v["passed"], true);
    let r = &v["results"][0];
    assert_eq!(r["h1_nplus"], 2);
    let linking = r["report"]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"].as_str().unwrap().starts_with("linking/"))
        .unwrap();
    assert_eq!(linking["dims"]["no spanning surface"], 2);

    // no frustrated plaquettes: every sequence is trivially exact
    let v = json(&sgtopo(dir.path(), &["verify", "--instance", "ferromagnet-3x3"]));
    assert_eq!(v["passed"], true);

    let out = sgtopo(dir.path(), &["--csv", "verify"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# manifest: "));
    assert!(text.lines().nth(1).unwrap().starts_with("instance,lattice,passed"));
}

#[test]
fn percolate_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = sgtopo(
        dir.path(),
        &["--csv", "percolate", "--strip", "3", "--x", "0.5", "--trials", "100000"],
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let headers = rdr.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let row = rdr.records().next().unwrap().unwrap();
    let est: f64 = row[col("estimate")].parse().unwrap();
    let se: f64 = row[col("stderr")].parse().unwrap();
    assert!((est - 0.125).abs() <= 4.0 * se);
    assert_eq!(row[col("exact")].parse::<f64>().unwrap(), 0.125);

    let out = sgtopo(
        dir.path(),
        &["--csv", "percolate", "--strip", "4", "--x", "0.3:1.0:0.35", "--trials", "500"],
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    for row in rdr.records() {
        let row = row.unwrap();
        let x: f64 = row[col("x")].parse().unwrap();
        let bound: f64 = row[col("bound")].parse().unwrap();
        assert!((bound - (2.0 * x * (1.0 - x)).powi(4)).abs() < 1e-12);
        if x == 1.0 {
            assert_eq!(row[col("estimate")].parse::<f64>().unwrap(), 1.0);
        }
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(sgtopo(dir.path(), &["gen", "--lattice", "3x3", "--x", "1.5"]).status.code(), Some(2));
    assert_eq!(sgtopo(dir.path(), &["analyze", "--input", "missing.json"]).status.code(), Some(2));
    assert_eq!(sgtopo(dir.path(), &["bogus"]).status.code(), Some(2));
    std::fs::write(dir.path().join("bad.json"), "{\"lattice\": 3}").unwrap();
    assert_eq!(sgtopo(dir.path(), &["analyze", "--input", "bad.json"]).status.code(), Some(2));
    assert_eq!(sgtopo(dir.path(), &["--help"]).status.code(), Some(0));
}

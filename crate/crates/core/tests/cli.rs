use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trotterr")).args(args).output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn analyze_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let f = fixture("h2_sto6g_local.fcidump");
    let status = run(&["analyze", "--fcidump", f.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(status.status.success());
    assert!(status.stdout.is_empty());
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!((r["ratio"].as_f64().unwrap() - 0.2063).abs() < 5e-4);
    assert_eq!(r["basis_kind"], "local");
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["ansatz"].as_array().unwrap().len(), 2);
    assert_eq!(r["ansatz"][1]["label"], "CISD");
    assert_eq!(r["fixture_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn analyze_is_byte_identical_across_runs_and_threads() {
    let f = fixture("h4_chain_sto6g_natural.fcidump");
    let a = run(&["analyze", "--fcidump", f.to_str().unwrap(), "--threads", "1"]);
    let b = run(&["analyze", "--fcidump", f.to_str().unwrap(), "--threads", "4"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn metadata_flags_override() {
    let f = fixture("h2_sto6g_canonical.fcidump");
    let r = json(&run(&[
        "analyze", "--fcidump", f.to_str().unwrap(), "--label", "dihydrogen", "--basis-kind", "natural", "--z-max", "2",
        "--ordering", "lexicographic", "--ci-levels", "0",
    ]));
    assert_eq!(r["molecule"], "dihydrogen");
    assert_eq!(r["basis_kind"], "natural");
    assert_eq!(r["z_max"], 2);
    assert_eq!(r["ordering"], "lexicographic");
}

#[test]
fn exit_codes() {
    let missing = run(&["analyze", "--fcidump", "/definitely/not/here.fcidump"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("/definitely/not/here.fcidump"));

    let f = fixture("h2_sto6g_local.fcidump");
    let f = f.to_str().unwrap();
    assert_eq!(run(&["analyze", "--fcidump", f, "--ordering", "random"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "--fcidump", f, "--dt", "-1"]).status.code(), Some(5));
    assert_eq!(run(&["analyze", "--fcidump", f, "--ci-levels", "3"]).status.code(), Some(5));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.fcidump");
    std::fs::write(&bad, " &FCI NORB=2,NELEC=2 &END\n 1.0 1 x 1 1\n").unwrap();
    let out = run(&["spectrum", "--fcidump", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("fcidump"));
}

#[test]
fn spectrum_csv() {
    let f = fixture("heh_plus_sto6g_canonical.fcidump");
    for space in ["--sector", "--full-fock"] {
        let out = run(&["spectrum", "--fcidump", f.to_str().unwrap(), space]);
        assert!(out.status.success());
        let text = String::from_utf8(out.stdout).unwrap();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with('#'));
        let values: Vec<f64> = lines.map(|l| l.parse().unwrap()).collect();
        assert_eq!(values.len(), if space == "--sector" { 6 } else { 16 });
        assert!(values.windows(2).all(|w| w[0] <= w[1]));
        assert!(values.iter().sum::<f64>().abs() < 1e-10);
    }
}

#[test]
fn haar_is_reproducible_and_unbiased() {
    let f = fixture("h2_sto6g_natural.fcidump");
    let args = ["haar", "--fcidump", f.to_str().unwrap(), "--samples", "20000", "--seed", "42"];
    let a = run(&args);
    assert_eq!(a.stdout, run(&args).stdout);
    let r = json(&a);
    assert_eq!(r["seeds"][0], 42);
    assert_eq!(r["haar"]["mean_consistent"], true);
    let other = json(&run(&["haar", "--fcidump", f.to_str().unwrap(), "--samples", "20000", "--seed", "43"]));
    assert_ne!(r["haar"]["moments"], other["haar"]["moments"]);
}

#[test]
fn marginals_csv_is_symmetric() {
    let f = fixture("h2_sto6g_local.fcidump");
    let out = run(&["marginals", "--fcidump", f.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<f64>> =
        text.lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 4);
    for (i, row) in rows.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            assert_eq!(*x, rows[j][i]);
        }
    }
}

#[test]
fn fit_command() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("pts.csv");
    std::fs::write(&csv, "z,norm\n1,3\n2,12\n3,27\n4,48\n").unwrap();
    let r = json(&run(&["fit", "--csv", csv.to_str().unwrap()]));
    assert!((r["exponent"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert!((r["prefactor"].as_f64().unwrap() - 3.0).abs() < 1e-12);
    std::fs::write(&csv, "1,3\n2,-1\n3,27\n").unwrap();
    assert_eq!(run(&["fit", "--csv", csv.to_str().unwrap()]).status.code(), Some(5));
}

#[test]
fn prep_cost_command() {
    let f = fixture("lih_sto6g_canonical.fcidump");
    let formula = json(&run(&["prep-cost", "--fcidump", f.to_str().unwrap(), "--delta", "0.01", "--formula"]));
    assert_eq!(formula["support_dimension"], 201);
    assert_eq!(formula["qubit_count"], 16);
    assert_eq!(formula["padded_register"], false);
    let counted = json(&run(&["prep-cost", "--fcidump", f.to_str().unwrap(), "--delta", "0.01"]));
    assert!(counted["support_dimension"].as_u64().unwrap() <= 201);
    assert_eq!(counted["support_source"], "amplitudes");
}

use std::fs;
use std::process::{Command, Output};

fn compass(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_compass"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn output_is_identical_across_thread_counts() {
    let args = [
        "wigner", "--alpha", "1.5,0.3", "--l", "0,3", "--grid", "-3:3:41",
    ];
    let one = compass(&[&["--threads", "1"][..], &args].concat());
    let four = compass(&[&["--threads", "4"][..], &args].concat());
    assert!(
        one.status.success(),
        "{}",
        String::from_utf8_lossy(&one.stderr)
    );
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn null_state_is_a_flagged_row() {
    let o = compass(&["stats", "--alpha", "0", "--l", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[1].ends_with(",null_state"), "{}", rows[1]);
}

#[test]
fn metadata_is_embedded() {
    let o = compass(&["pnd", "--alpha", "2", "--nmax", "10", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["metadata"]["tool"], "compass");
    assert!(v["metadata"]["wigner_prefactor"]
        .as_str()
        .unwrap()
        .starts_with("6.366"));
    assert_eq!(v["rows"].as_array().unwrap().len(), 11);
}

#[test]
fn verify_exit_codes() {
    let ok = compass(&["verify", "--sets", "3"]);
    assert!(ok.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&ok)).unwrap();
    assert_eq!(report["pass"], true);

    let starved = compass(&[
        "verify",
        "--sets",
        "2",
        "--cutoff",
        "12",
        "--min-amplitude",
        "3",
    ]);
    assert_eq!(starved.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_str(&stdout(&starved)).unwrap();
    assert_eq!(report["truncation_flags"].as_array().unwrap().len(), 2);
}

#[test]
fn spec_files_and_binary_fields() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("tiles.csv");
    let spec = dir.path().join("sweep.toml");
    fs::write(
        &spec,
        format!(
            "quantity = \"tiles\"\noutput = {:?}\nalpha = {{ values = [3.0, 4.0] }}\n[state.canonical]\nl = [0, 1]\n",
            out.to_str().unwrap()
        ),
    )
    .unwrap();
    assert!(compass(&["--spec", spec.to_str().unwrap()])
        .status
        .success());
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 5);

    let bin = dir.path().join("w.bin");
    let o = compass(&[
        "wigner",
        "--alpha",
        "1",
        "--grid",
        "-2:2:11",
        "--format",
        "bin",
        "--out",
        bin.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let header = fs::read(dir.path().join("w.bin.json")).unwrap();
    let data = fs::read(&bin).unwrap();
    let (field, head) = compass_core::ScalarField::read_binary(&header, &data).unwrap();
    assert_eq!(field.values().len(), 121);
    assert_eq!(head.labels[2], "W");
}

#[test]
fn bad_input_is_rejected() {
    let o = compass(&["stats", "--alpha", "2:1:3"]);
    assert_eq!(o.status.code(), Some(2));
    let o = compass(&["stats", "--alpha", "1", "--l", "7"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn paper_figure_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = compass(&[
        "--paper-figure",
        "11",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(dir.path().join("fig11_negativity_vs_l.csv")).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 9);
}

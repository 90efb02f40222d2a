use std::process::{Command, Output};

use serde_json::Value;

fn zxpart(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zxpart"))
        .args(args)
        .env_remove("ZXPART_COST_MODEL")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}); stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn validate(v: &Value) {
    let schema: Value =
        serde_json::from_str(include_str!("../schemas/report.schema.json")).expect("schema parses");
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(v).map(|e| format!("{e} at {}", e.instance_path())).collect();
    assert!(errors.is_empty(), "{errors:#?}");
}

fn amplitude(v: &Value) -> (f64, f64) {
    let a = v["amplitude"].as_array().expect("amplitude present");
    (a[0].as_f64().unwrap(), a[1].as_f64().unwrap())
}

fn without_wall_clock(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("wallSeconds");
    v
}

#[test]
fn identity_circuit_has_unit_amplitude() {
    let dir = std::env::temp_dir().join(format!("zxpart-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("identity.qc");
    std::fs::write(&path, "").unwrap();
    let out = zxpart(&["simulate", "--circuit", path.to_str().unwrap(), "--in", "0", "--out", "0"]);
    assert!(out.status.success());
    let v = json(&out);
    validate(&v);
    let (re, im) = amplitude(&v);
    assert!((re - 1.0).abs() < 1e-12 && im.abs() < 1e-12);
}

#[test]
fn three_methods_agree_on_random_circuit() {
    let mut amps = Vec::new();
    for m in ["direct", "naive", "smart"] {
        let out = zxpart(&[
            "simulate", "--random", "4,20,inf,7", "--in", "0000", "--out", "0000", "--method", m, "--force-partition",
        ]);
        assert!(out.status.success(), "{m}: {}", String::from_utf8_lossy(&out.stderr));
        let v = json(&out);
        validate(&v);
        amps.push(amplitude(&v));
    }
    for a in &amps[1..] {
        assert!((a.0 - amps[0].0).abs() < 1e-6 && (a.1 - amps[0].1).abs() < 1e-6, "{amps:?}");
    }
}

#[test]
fn plan_only_on_compound_circuit_partitions() {
    let out = zxpart(&["simulate", "--compound", "4,5,80,4,1,3", "--plan-only"]);
    assert!(out.status.success());
    let v = json(&out);
    validate(&v);
    assert!(v["amplitude"].is_null());
    let plan = &v["plan"];
    assert!(plan["k"].as_u64().unwrap() >= 2, "{plan}");
    assert!(plan["sPrecomp"].as_f64().unwrap() > 0.0);
    assert!(plan["sCrossref"].as_f64().unwrap() > 0.0);

    let via_plan = zxpart(&["plan", "--compound", "4,5,80,4,1,3"]);
    assert_eq!(without_wall_clock(json(&via_plan)), without_wall_clock(v));
}

#[test]
fn output_is_deterministic_apart_from_wall_clock() {
    let args = ["simulate", "--random", "6,60,1,3", "--in", "010011", "--out", "000000", "--sequential"];
    let a = json(&zxpart(&args));
    let b = json(&zxpart(&args));
    assert_eq!(without_wall_clock(a), without_wall_clock(b));

    let sweep = [
        "sweep-sigma", "--qubits", "8", "--depth", "60", "--sigmas", "0,inf", "--samples", "3", "--estimate-only",
    ];
    let a = zxpart(&sweep);
    assert!(a.status.success());
    assert_eq!(a.stdout, zxpart(&sweep).stdout);
}

#[test]
fn parallel_and_sequential_agree() {
    let base = ["simulate", "--random", "6,60,2,11", "--in", "000000", "--out", "000000"];
    let par = json(&zxpart(&base));
    let mut args = base.to_vec();
    args.push("--sequential");
    let seq = json(&zxpart(&args));
    assert_eq!(without_wall_clock(par), without_wall_clock(seq));
}

#[test]
fn parse_errors_exit_with_two() {
    for args in [
        &["simulate", "--random", "4,20"][..],
        &["simulate", "--random", "4,20,inf,7", "--in", "01x1"],
        &["simulate", "--random", "4,20,inf,7", "--in", "01"],
        &["simulate", "--random", "4,20,inf,7", "--method", "fastest"],
        &["simulate", "--circuit", "/nonexistent/zxpart.qc"],
        &["simulate", "--random", "4,20,inf,7", "--alpha", "-1"],
        &["sweep-heatmap", "--qubits", "5..2", "--depths", "10"],
        &["simulate", "--bogus"],
    ] {
        let out = zxpart(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn resource_cap_exits_with_three_and_prints_plan() {
    let out = zxpart(&["simulate", "--random", "30,1000,inf,1", "--method", "direct"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    validate(&v);
    assert!(v["amplitude"].is_null());
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds cap"));
}

#[test]
fn heatmap_csv_has_fixed_header_and_one_row_per_method() {
    let out = zxpart(&[
        "sweep-heatmap", "--qubits", "2", "--depths", "4", "--samples", "2", "--seed", "5",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("qubits,depth,sigma,method,mean_log2_seconds,std_log2_seconds,samples,real_runs")
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    let methods: Vec<&str> = rows.iter().map(|r| r[3]).collect();
    assert_eq!(methods, ["direct", "naive", "smart"]);
    // Small enough that every sample is actually run.
    assert!(rows.iter().all(|r| r[7] == "2"));
}

#[test]
fn generate_round_trips_through_simulate() {
    let out = zxpart(&["generate", "--random", "3,15,inf,9"]);
    assert!(out.status.success());
    let dir = std::env::temp_dir().join(format!("zxpart-gen-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("c.qc");
    std::fs::write(&path, &out.stdout).unwrap();
    let from_file = json(&zxpart(&["simulate", "--circuit", path.to_str().unwrap(), "--in", "000", "--out", "101"]));
    let direct = json(&zxpart(&["simulate", "--random", "3,15,inf,9", "--in", "000", "--out", "101"]));
    let (a, b) = (amplitude(&from_file), amplitude(&direct));
    assert!((a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12);
}

use std::path::PathBuf;
use std::process::{Command, Output};

fn gse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gse")).args(args).env_remove("GSE_OUT_DIR").output().unwrap()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gse-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn encode_lists_interior_loop() {
    let out = gse(&["encode", "--rows", "4", "--cols", "4", "--topology", "planar"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    let loops: Vec<&str> = v["loops"].as_array().unwrap().iter().map(|l| l["operator"].as_str().unwrap()).collect();
    assert!(loops.iter().any(|l| l.trim_start_matches('-') == "IYXZYXZI"), "{loops:?}");
    let bigons: std::collections::BTreeSet<&str> = v["loops"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|l| l["kind"] != "square")
        .map(|l| l["operator"].as_str().unwrap())
        .collect();
    assert_eq!(bigons, ["-IYXZ", "-IYYX", "-XZZI", "-YXZI"].into_iter().collect());
}

#[test]
fn encode_small_torus_counts() {
    let v = stdout_json(&gse(&["encode", "--rows", "2", "--cols", "2", "--topology", "torus"]));
    assert_eq!(v["vertices"].as_array().unwrap().len(), 4);
    assert_eq!(v["edges"].as_array().unwrap().len(), 8);
    assert_eq!(v["loops"].as_array().unwrap().len(), 4);
}

#[test]
fn invalid_dimensions_exit_with_usage_error() {
    let out = gse(&["encode", "--rows", "3", "--cols", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("even"));
    let out = gse(&["encode", "--topology", "klein"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_passes_on_planar_lattice() {
    let out = gse(&["verify", "--rows", "4", "--cols", "4"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["verdict"], "PASS");
    assert_eq!(v["undetectable_logical"], 0);
}

#[test]
fn verify_without_native_gates_lists_exceptions() {
    let out = gse(&["verify", "--rows", "2", "--cols", "2", "--no-native", "--connectivity", "full"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["verdict"], "PASS-with-exceptions");
    let ex = v["evolved_operator_exceptions"].as_array().unwrap();
    assert!(!ex.is_empty());
    assert!(ex.iter().all(|e| e["at_central_evolution"] == true));
}

#[test]
fn verify_fails_on_smallest_torus() {
    // Half of any plaquette loop is a logical operator on the 2x2 torus, so a
    // mid-measurement ancilla fault slips through.
    let out = gse(&["verify", "--rows", "2", "--cols", "2", "--topology", "torus", "--connectivity", "full"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["verdict"], "FAIL");
}

#[test]
fn verify_writes_fault_lines() {
    let dir = scratch("faults");
    let path = dir.join("faults.jsonl");
    let out = gse(&["verify", "--rows", "2", "--cols", "2", "--faults-out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert!(first["verdict"].is_string() && first["gadget"].is_string());
}

#[test]
fn cost_table_csv() {
    let out = gse(&["tables", "--which", "cost", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("m,n,zero_state_gates,zero_state_depth,ansatz_gates,ansatz_depth,vqe_gates,vqe_depth,error_detected_gates,error_detected_depth"));
    assert!(lines.next().unwrap().starts_with("4,4,170,10,1144,67,2458,144,2692,158"));
    assert!(lines.next().unwrap().starts_with("8,8,650,10,5200,67,11050,144,11956,158"));
    assert!(lines.next().unwrap().starts_with("16,16,2570,10,22048,67,46666,144,50260,158"));
}

#[test]
fn threshold_and_budget_tables() {
    let text = String::from_utf8(gse(&["tables", "--which", "thresholds", "--format", "csv"]).stdout).unwrap();
    assert!(text.contains("4,4,0.999544,0.106224,0.952029,0.046584,0.993882"));
    let text = String::from_utf8(gse(&["tables", "--which", "budget", "--format", "csv"]).stdout).unwrap();
    assert_eq!(text.lines().count(), 13);
    assert!(text.contains("8,8,191/192,906,0.99999,262873"));
    let md = String::from_utf8(gse(&["tables", "--which", "optimistic", "--format", "markdown"]).stdout).unwrap();
    assert!(md.contains("| 16 | 16 | 767/768 |"));
}

#[test]
fn montecarlo_is_deterministic() {
    let args = ["montecarlo", "--rows", "2", "--cols", "2", "--s", "0.999", "--trials", "2000", "--seed", "5"];
    let a = gse(&args);
    let b = gse(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn montecarlo_without_noise_detects_nothing() {
    let v = stdout_json(&gse(&["montecarlo", "--rows", "2", "--cols", "2", "--s", "1", "--trials", "500"]));
    assert_eq!(v["stats"]["detected"], 0);
    assert_eq!(v["stats"]["fault_free"], 500);
}

#[test]
fn config_file_supplies_defaults() {
    let dir = scratch("config");
    let cfg = dir.join("gse.conf");
    std::fs::write(&cfg, "# lattice\nrows = 2\ncols = 2\ntrials = 300\nseed = 9\n").unwrap();
    let a = gse(&["montecarlo", "--config", cfg.to_str().unwrap()]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let v = stdout_json(&a);
    assert_eq!((v["rows"].as_u64(), v["trials"].as_u64(), v["seed"].as_u64()), (Some(2), Some(300), Some(9)));
    // Command-line flags take precedence.
    let v = stdout_json(&gse(&["montecarlo", "--config", cfg.to_str().unwrap(), "--seed", "4"]));
    assert_eq!(v["seed"].as_u64(), Some(4));
}

#[test]
fn output_directory_from_environment() {
    let dir = scratch("out");
    let out = Command::new(env!("CARGO_BIN_EXE_gse"))
        .args(["tables", "--which", "budget", "--format", "csv"])
        .env("GSE_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let files: Vec<_> = std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert!(!files.is_empty());
    let text = std::fs::read_to_string(dir.join(&files[0])).unwrap();
    assert!(text.starts_with("m,n,p_a,d,s,d_b"));
}

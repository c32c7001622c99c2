use std::path::Path;
use std::process::{Command, Output};

use mopf_cli::{CliError, EXIT_ABORTED, EXIT_CAP, EXIT_INVALID, EXIT_MISMATCH};

fn mopf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mopf")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

fn gen_random(dir: &Path, name: &str, s: usize, a: usize, d: usize, seed: u64) -> String {
    let path = p(dir, name);
    let out = mopf(&[
        "gen",
        "random",
        "--states",
        &s.to_string(),
        "--actions",
        &a.to_string(),
        "--objectives",
        &d.to_string(),
        "--seed",
        &seed.to_string(),
        "-o",
        &path,
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    path
}

#[test]
fn gen_is_deterministic_and_valid() {
    let dir = tempfile::tempdir().unwrap();
    let a = gen_random(dir.path(), "a.json", 5, 5, 3, 0);
    let b = gen_random(dir.path(), "b.json", 5, 5, 3, 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let (mdp, _) = mopf_cli::load_mdp(Path::new(&a)).unwrap();
    assert_eq!((mdp.num_states(), mdp.num_actions()), (5, 5));
}

#[test]
fn gen_grid_shape() {
    let dir = tempfile::tempdir().unwrap();
    let path = p(dir.path(), "g.json");
    let out = mopf(&["gen", "grid", "--rows", "3", "--cols", "3", "--objectives", "3", "--seed", "1", "-o", &path]);
    assert_eq!(code(&out), 0);
    let (mdp, _) = mopf_cli::load_mdp(Path::new(&path)).unwrap();
    assert_eq!((mdp.num_states(), mdp.num_actions()), (9, 4));
}

#[test]
fn solve_and_oracle_agree() {
    let dir = tempfile::tempdir().unwrap();
    let m = gen_random(dir.path(), "m.json", 4, 3, 3, 0);
    let (s, o) = (p(dir.path(), "s.json"), p(dir.path(), "o.json"));
    let out = mopf(&["solve", "-i", &m, "-o", &s]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("planner_calls=1"));
    assert_eq!(code(&mopf(&["oracle", "-i", &m, "-o", &o])), 0);
    assert_eq!(code(&mopf(&["compare", &s, &o])), 0);
    let json = mopf(&["compare", &s, &o, "--json"]);
    let report: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(report["vertex_match"], true);
    assert_eq!(code(&mopf(&["verify", "--mdp", &m, "--front", &s, "--samples", "11"])), 0);
}

#[test]
fn oracle_reports_policy_count_and_cap() {
    let dir = tempfile::tempdir().unwrap();
    let m = gen_random(dir.path(), "m.json", 5, 5, 3, 0);
    let o = p(dir.path(), "o.json");
    let out = mopf(&["oracle", "-i", &m, "-o", &o]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("policies_evaluated=3125"));
    assert_eq!(code(&mopf(&["oracle", "-i", &m, "-o", &o, "--cap", "100"])), EXIT_CAP);
}

#[test]
fn invalid_mdp_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let m = gen_random(dir.path(), "m.json", 2, 2, 2, 0);
    let text = std::fs::read_to_string(&m).unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    doc["mu"][0] = serde_json::json!(0.0);
    doc["P"][1][0][0] = serde_json::json!(0.9);
    std::fs::write(&m, serde_json::to_string(&doc).unwrap()).unwrap();
    let out = mopf(&["solve", "-i", &m, "-o", &p(dir.path(), "s.json")]);
    assert_eq!(code(&out), EXIT_INVALID);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("mu[0] not > 0"), "{err}");
    assert!(err.contains("sums to"), "{err}");
}

#[test]
fn malformed_file_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let m = p(dir.path(), "bad.json");
    std::fs::write(&m, "{\"states\": 2}").unwrap();
    assert_eq!(code(&mopf(&["solve", "-i", &m, "-o", &p(dir.path(), "s.json")])), EXIT_INVALID);
}

#[test]
fn error_kinds_map_to_exit_codes() {
    assert_eq!(CliError::from(mopf::Error::SearchAborted("x".into())).code, EXIT_ABORTED);
    assert_eq!(CliError::from(mopf::Error::CapExceeded { count: 2, cap: 1 }).code, EXIT_CAP);
    assert_eq!(CliError::from(mopf::Error::InvalidMdp(vec![])).code, EXIT_INVALID);
}

#[test]
fn perturbed_front_mismatches() {
    let dir = tempfile::tempdir().unwrap();
    let m = gen_random(dir.path(), "m.json", 4, 3, 3, 2);
    let s = p(dir.path(), "s.json");
    assert_eq!(code(&mopf(&["solve", "-i", &m, "-o", &s])), 0);
    assert_eq!(code(&mopf(&["compare", &s, &s])), 0);
    let mut doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&s).unwrap()).unwrap();
    let x = doc["vertices"][0]["return"][0].as_f64().unwrap();
    doc["vertices"][0]["return"][0] = serde_json::json!(x + 1e-3);
    let moved = p(dir.path(), "moved.json");
    std::fs::write(&moved, serde_json::to_string(&doc).unwrap()).unwrap();
    assert_eq!(code(&mopf(&["compare", &s, &moved])), EXIT_MISMATCH);
}

#[test]
fn single_objective_front() {
    let dir = tempfile::tempdir().unwrap();
    let m = gen_random(dir.path(), "m.json", 4, 3, 1, 0);
    let s = p(dir.path(), "s.json");
    let out = mopf(&["solve", "-i", &m, "-o", &s]);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("vertices=1 faces=0"));
}

#[test]
fn solve_output_is_stable_across_threads() {
    let dir = tempfile::tempdir().unwrap();
    let m = gen_random(dir.path(), "m.json", 5, 3, 3, 4);
    let mut outputs = Vec::new();
    for threads in ["1", "4", "1"] {
        let s = p(dir.path(), &format!("s{threads}.json"));
        let out = Command::new(env!("CARGO_BIN_EXE_mopf"))
            .args(["solve", "-i", &m, "-o", &s])
            .env("MOPF_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(code(&out), 0);
        outputs.push(std::fs::read(&s).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn export_formats() {
    let dir = tempfile::tempdir().unwrap();
    let m3 = gen_random(dir.path(), "m3.json", 4, 3, 3, 0);
    let s3 = p(dir.path(), "s3.json");
    assert_eq!(code(&mopf(&["solve", "-i", &m3, "-o", &s3])), 0);
    for fmt in ["json", "csv", "off"] {
        let out = p(dir.path(), &format!("front.{fmt}"));
        assert_eq!(code(&mopf(&["export", "--front", &s3, "--format", fmt, "-o", &out])), 0, "{fmt}");
    }
    assert!(std::fs::read_to_string(p(dir.path(), "front.off")).unwrap().starts_with("OFF\n"));

    let m4 = gen_random(dir.path(), "m4.json", 3, 3, 4, 0);
    let s4 = p(dir.path(), "s4.json");
    assert_eq!(code(&mopf(&["solve", "-i", &m4, "-o", &s4])), 0);
    let out = mopf(&["export", "--front", &s4, "--format", "off", "-o", &p(dir.path(), "x.off")]);
    assert_ne!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("OFF requires D=3"));
}

#[test]
fn bench_writes_one_row_per_instance_and_solver() {
    let dir = tempfile::tempdir().unwrap();
    let csv = p(dir.path(), "bench.csv");
    let out = mopf(&["bench", "--states", "3", "--actions", "3,4", "--seeds", "2", "-o", &csv]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 2 * 2);
    assert!(text.starts_with("states,actions,objectives,seed,solver,vertices,faces,policies_evaluated,seconds"));
}

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn algturan(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_algturan"))
        .current_dir(dir)
        .env_remove("ALGTURAN_OUT")
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn summary(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

fn suite_path() -> String {
    format!("{}/suites/acceptance.toml", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    assert_eq!(code(&algturan(d, &["params", "--q", "7", "--c", "7", "--out", "ok"])), 0);
    assert_eq!(code(&algturan(d, &["params", "--no-such-flag"])), 2);
    assert_eq!(code(&algturan(d, &["params", "--q", "6", "--c", "7", "--out", "bad-q"])), 2);
    assert_eq!(code(&algturan(d, &["params", "--sizes", "2", "--pattern", "K3,3,3", "--c", "7", "--out", "bad-h"])), 2);
    let budget = algturan(d, &["construct", "--q", "25", "--c", "7", "--max-vertices", "100", "--out", "big"]);
    assert_eq!(code(&budget), 3, "{}", String::from_utf8_lossy(&budget.stderr));
    let z = algturan(d, &["lemma2-mc", "--q", "7", "--trials", "2000", "--z-max", "0.01", "--out", "z"]);
    assert_eq!(code(&z), 1);
    assert!(d.join("z/summary.json").exists());
}

#[test]
fn output_dir_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_algturan"))
        .current_dir(tmp.path())
        .env("ALGTURAN_OUT", tmp.path().join("env"))
        .args(["turan-exact", "--n", "4", "--forbid", "K3"])
        .output()
        .unwrap()
        .status;
    assert!(status.success());
    assert_eq!(summary(&tmp.path().join("env/turan-exact"))["max_count"], 4);

    assert_eq!(code(&algturan(tmp.path(), &["turan-exact", "--n", "4", "--forbid", "K3"])), 0);
    assert!(tmp.path().join("runs/turan-exact/summary.json").exists());
}

#[test]
fn flags_override_config() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    std::fs::write(d.join("cfg.toml"), "q = 11\nc = 9\n[params]\nq = 7\n").unwrap();
    assert_eq!(code(&algturan(d, &["--config", "cfg.toml", "params", "--out", "a"])), 0);
    let a = summary(&d.join("a"));
    assert_eq!((a["q"].as_u64(), a["threshold"]["c"].as_u64()), (Some(7), Some(9)));
    assert_eq!(code(&algturan(d, &["--config", "cfg.toml", "params", "--q", "5", "--out", "b"])), 0);
    assert_eq!(summary(&d.join("b"))["q"], 5);
}

#[test]
fn budget_table_in_config() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("cfg.toml"), "[budget]\nmax_vertices = 10\n").unwrap();
    let out = algturan(tmp.path(), &["--config", "cfg.toml", "construct", "--q", "5", "--c", "7"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn summaries_are_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    for (out, workers) in [("r1", "1"), ("r2", "2")] {
        let args = ["--workers", workers, "construct", "--q", "5", "--c", "6", "--seed", "9", "--out", out];
        assert_eq!(code(&algturan(d, &args)), 0);
    }
    for file in ["summary.json", "g_prime.hg", "polynomial.txt", "bad_sequences.csv"] {
        assert_eq!(std::fs::read(d.join("r1").join(file)).unwrap(), std::fs::read(d.join("r2").join(file)).unwrap(), "{file}");
    }
    let manifest: Value = serde_json::from_str(&std::fs::read_to_string(d.join("r2/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["workers"], 2);
    assert_eq!(manifest["config"]["seed"], 9);

    // The recorded config alone reproduces the summary.
    let budget = serde_json::from_value(manifest["budget"].clone()).unwrap();
    let replay = algturan::cli::execute("construct", &manifest["config"], &budget, &d.join("replay")).unwrap();
    assert_eq!(Value::Object(replay.summary), summary(&d.join("r1")));
}

#[test]
fn construct_writes_loadable_graph() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(code(&algturan(tmp.path(), &["construct", "--q", "4", "--c", "3", "--seed", "1", "--out", "c"])), 0);
    let dir = tmp.path().join("c");
    let s = summary(&dir);
    let g = algturan::Hypergraph::from_text(&std::fs::read_to_string(dir.join("g_prime.hg")).unwrap()).unwrap();
    assert_eq!(g.vertex_count() as u64, s["vertices_after"].as_u64().unwrap());
    assert_eq!(g.edge_count() as u64, s["edges_after"].as_u64().unwrap());
    let bad_rows = std::fs::read_to_string(dir.join("bad_sequences.csv")).unwrap().lines().count();
    assert_eq!(bad_rows.saturating_sub(1) as u64, s["bad_sequences"].as_u64().unwrap());

    assert_eq!(code(&algturan(tmp.path(), &["count", "--graph", "c/g_prime.hg", "--pattern", "edge", "--out", "n"])), 0);
    assert_eq!(summary(&tmp.path().join("n"))["unordered_copies"], s["edges_after"]);
}

#[test]
fn regress_suites() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let ok = algturan(d, &["regress", "--suite", &suite_path(), "--out", "ok"]);
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stdout));

    std::fs::write(d.join("empty.toml"), "").unwrap();
    assert_eq!(code(&algturan(d, &["regress", "--suite", "empty.toml", "--out", "e"])), 0);
    assert_eq!(summary(&d.join("e"))["cases"], 0);

    let tampered = std::fs::read_to_string(suite_path()).unwrap().replace("max_count = 7", "max_count = 8");
    std::fs::write(d.join("tampered.toml"), tampered).unwrap();
    let bad = algturan(d, &["regress", "--suite", "tampered.toml", "--out", "t"]);
    assert_eq!(code(&bad), 1);
    let stdout = String::from_utf8_lossy(&bad.stdout);
    assert!(stdout.contains("c4-free-6: FAIL") && stdout.contains("mantel-5: pass"), "{stdout}");

    std::fs::write(d.join("nobase.toml"), "[[case]]\nname = \"x\"\ncommand = \"params\"\n").unwrap();
    let missing = algturan(d, &["regress", "--suite", "nobase.toml", "--out", "m"]);
    assert_eq!(code(&missing), 1);
    assert!(String::from_utf8_lossy(&missing.stderr).contains("MissingBaseline"));
}

//! End-to-end runs of the `gausslocal` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gausslocal_cli::config::DEFAULT_CONFIG;
use gausslocal_cli::report::CSV_COLUMNS;
use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_gausslocal"));
    c.env("SOURCE_DATE_EPOCH", "1700000000");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON bundle")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn config_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

#[test]
fn same_seed_gives_identical_bytes() {
    let a = run(&["op", "--format", "json"]);
    let b = run(&["op", "--format", "json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["timestamp"], 1_700_000_000);
}

#[test]
fn seed_flag_changes_hash_and_sites() {
    let a = json(&run(&["op", "--format", "json"]));
    let b = json(&run(&["op", "--format", "json", "--seed", "99"]));
    assert_eq!(b["seed"], 99);
    assert_ne!(a["config_hash"], b["config_hash"]);
    // explicit sites stay, seeded ones move
    let x = |v: &Value, i: usize| v["records"][i]["detail"]["x"].clone();
    assert_eq!(x(&a, 0), x(&b, 0));
    assert_ne!(x(&a, 3), x(&b, 3));
}

#[test]
fn every_record_carries_the_config_hash() {
    let v = json(&run(&["weights", "--format", "json"]));
    let hash = v["config_hash"].as_str().unwrap();
    assert_eq!(hash.len(), 64);
    assert_eq!(v["schema_version"], 1);
    for r in v["records"].as_array().unwrap() {
        assert_eq!(r["config_hash"], hash);
    }
}

#[test]
fn malformed_config_exits_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("reports");
    for (name, text) in [
        ("syntax.toml", "seed = \n[space"),
        (
            "unknown.toml",
            &DEFAULT_CONFIG.replace("[measure]", "[measure]\nbogus = 1"),
        ),
        (
            "dangling.toml",
            &DEFAULT_CONFIG.replace("nu = \"flat\"", "nu = \"missing\""),
        ),
        ("badspace.toml", &DEFAULT_CONFIG.replace("n = 64", "n = 7")),
    ] {
        let cfg = write(dir.path(), name, text);
        let o = run(&[
            "measure",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(
            o.status.code(),
            Some(2),
            "{name}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        assert!(
            String::from_utf8_lossy(&o.stderr).contains("config error"),
            "{name}"
        );
        assert!(!out.exists(), "{name} left output behind");
    }
}

#[test]
fn invalid_flags_are_rejected() {
    assert_eq!(run(&["measure", "--dim", "3"]).status.code(), Some(2));
    // the default battery declares one-dimensional fixtures
    assert_eq!(run(&["measure", "--dim", "2"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--n-grid", "4"]).status.code(), Some(2));
}

#[test]
fn empty_selection_is_an_empty_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "empty.toml",
        "seed = 3\n[space]\ndim = 1\na = 1.0\nn = 64\n",
    );
    for cmd in ["weights", "op", "verify"] {
        let o = run(&[cmd, "--config", cfg.to_str().unwrap(), "--format", "json"]);
        assert_eq!(o.status.code(), Some(0), "{cmd}");
        let v = json(&o);
        assert_eq!(v["records"].as_array().unwrap().len(), 0, "{cmd}");
        assert_eq!(v["summary"]["records"], 0);
    }
}

#[test]
fn tiny_a_keeps_measure_checks_green() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "small_a.toml",
        &DEFAULT_CONFIG.replace("a = 1.0", "a = 0.01"),
    );
    let o = run(&[
        "measure",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v = json(&o);
    for r in v["records"].as_array().unwrap() {
        assert_eq!(r["status"], "pass", "{}", r["name"]);
        if r["kind"] == "halo" {
            let (lo, hi) = (
                r["detail"]["lo"].as_f64().unwrap(),
                r["detail"]["hi"].as_f64().unwrap(),
            );
            assert!(lo > 0.85 && hi < 1.12, "band ({lo}, {hi})");
        }
    }
}

#[test]
fn flat_weight_constants_are_one() {
    let dir = tempfile::tempdir().unwrap();
    let text = "seed = 5\n[space]\ndim = 1\na = 1.0\nn = 64\n\
        [weights.flat]\nkind = \"constant\"\nvalue = 3.0\n\
        [weight_checks]\nballs = 200\n\
        [[weight_checks.apa]]\nweight = \"flat\"\np = 2.0\nexhaustive = true\n\
        [[weight_checks.apqa]]\nweight = \"flat\"\np = 1.5\nq = 3.0\n\
        [[weight_checks.multi]]\nweights = [\"flat\", \"flat\"]\nexponents = [2.0, 2.0]\n\
        [[weight_checks.reverse_holder]]\nweight = \"flat\"\np = 2.0\nr = 1.5\n";
    let cfg = write(dir.path(), "flat.toml", text);
    let o = run(&[
        "weights",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v = json(&o);
    for r in v["records"].as_array().unwrap() {
        let val = r["value"].as_f64().unwrap();
        match r["kind"].as_str().unwrap() {
            "apa_exhaustive" => assert!(val < 1e-12, "{r}"),
            _ => assert!((val - 1.0).abs() < 1e-12, "{r}"),
        }
    }
}

#[test]
fn default_verify_passes_with_evidence() {
    let o = run(&["verify", "--format", "json"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v = json(&o);
    assert_eq!(v["summary"]["fail"], 0);
    assert_eq!(v["summary"]["numerical_error"], 0);
    let evidence_gate = v["records"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["kind"] == "refinement_gate" && r["status"] == "evidence")
        .expect("out-of-class gate present");
    assert_eq!(evidence_gate["detail"]["monotone_growth"], true);
}

#[test]
fn csv_columns_and_report_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run(&[
        "measure",
        "--out",
        out.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let json_path = out.join("measure.json");
    assert!(json_path.exists());

    let csv_direct = run(&["measure", "--format", "csv"]);
    let text = String::from_utf8(csv_direct.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), CSV_COLUMNS.join(","));
    assert_eq!(lines.count(), 12);

    let converted = run(&["report", json_path.to_str().unwrap()]);
    assert_eq!(converted.status.code(), Some(0));
    assert_eq!(String::from_utf8(converted.stdout).unwrap(), text);
}

#[test]
fn bundled_two_dimensional_config_runs() {
    let cfg = config_dir().join("d2.toml");
    let o = run(&[
        "measure",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v = json(&o);
    assert!(v["records"]
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r["status"] == "pass"));
}

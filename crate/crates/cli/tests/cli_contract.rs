//! End-to-end contract of the `susy-chain` binary: exit codes, file
//! formats, bit-exact round-trips, stdout purity.

use std::path::{Path, PathBuf};
use std::process::Output;
use susy_chain::{BacklundChain, SeedSpec};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_susy-chain")
}

fn run_in(dir: &Path, args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = std::process::Command::new(bin());
    cmd.args(args).current_dir(dir);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary must run")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no exit code")
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn default_config_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/default.json")
}

const R_SEED_CONFIG: &str = r#"{
  "seeds": [{ "family": "R", "kappa": 1.0, "shift": 0.0 }],
  "grid": { "x_min": -10.0, "x_max": 10.0, "samples": 2001 },
  "output": { "format": "csv", "path": "r-seed.csv" }
}"#;

#[test]
fn criterion_8_cli_contract() {
    let start = std::time::Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();

    // generate: round-trip against the library, bit for bit
    let cfg = write_config(dir, "r.json", R_SEED_CONFIG);
    let out = run_in(dir, &["generate", "--config", cfg.to_str().unwrap()], &[]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.join("r-seed.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,V_n,is_singular,pole_kind"));
    let seed = SeedSpec::regular(1.0, 0.0).unwrap();
    let chain = BacklundChain::new(vec![seed]).unwrap();
    let mut rows = 0usize;
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 4);
        let x: f64 = cols[0].parse().unwrap();
        let v: f64 = cols[1].parse().unwrap();
        assert_eq!(cols[2], "false");
        assert_eq!(cols[3], "none");
        let expected = chain.eval_potential(x).unwrap();
        assert_eq!(
            v.to_bits(),
            expected.to_bits(),
            "round-trip not bit-exact at x = {x}"
        );
        rows += 1;
    }
    assert_eq!(rows, 2001);
    // the center row carries the well bottom -kappa^2
    assert!(csv.lines().any(|l| l.starts_with("0,-1,")));
    // sidecar: no poles, one well of depth -1
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("r-seed.meta.json")).unwrap())
            .unwrap();
    assert_eq!(meta["pole_count"], 0);
    assert_eq!(meta["wells"].as_array().unwrap().len(), 1);
    assert!((meta["wells"][0]["depth"].as_f64().unwrap() + 1.0).abs() < 1e-9);
    assert_eq!(meta["energies"][0].as_f64().unwrap(), -0.5);

    // verify on the default config: exit 0, every check green
    let default_cfg = default_config_path();
    let out = run_in(
        dir,
        &["verify", "--config", default_cfg.to_str().unwrap()],
        &[],
    );
    assert_eq!(exit_code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("stdout must be the JSON report");
    assert_eq!(report["all_pass"], true);
    let names: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    for expected in ["riccati", "oracle", "scattering", "spectrum", "poles"] {
        assert!(names.contains(&expected), "missing check {expected}");
    }
    assert!(report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["pass"] == true && c["skipped"] == false));

    println!(
        "[PASS] criterion 8 - CLI contract (round-trip bit-exact, default verify green; {:.2} s)",
        start.elapsed().as_secs_f64()
    );
}

#[test]
fn exit_code_contract() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();

    // empty seed list: config error
    let cfg = write_config(
        dir,
        "empty.json",
        r#"{ "seeds": [], "grid": { "x_min": -1.0, "x_max": 1.0, "samples": 10 } }"#,
    );
    let out = run_in(dir, &["generate", "--config", cfg.to_str().unwrap()], &[]);
    assert_eq!(exit_code(&out), 2);

    // duplicate factorization energies: config error
    let cfg = write_config(
        dir,
        "dup.json",
        r#"{
          "seeds": [
            { "family": "S", "kappa": 1.0, "shift": 0.0 },
            { "family": "R", "kappa": 1.0, "shift": 2.0 }
          ],
          "grid": { "x_min": -1.0, "x_max": 1.0, "samples": 10 },
          "output": { "path": "x.csv" }
        }"#,
    );
    let out = run_in(dir, &["generate", "--config", cfg.to_str().unwrap()], &[]);
    assert_eq!(exit_code(&out), 2);

    // unreadable config / malformed JSON: config error
    let out = run_in(dir, &["generate", "--config", "missing.json"], &[]);
    assert_eq!(exit_code(&out), 2);
    let cfg = write_config(dir, "bad.json", "{ not json");
    let out = run_in(dir, &["generate", "--config", cfg.to_str().unwrap()], &[]);
    assert_eq!(exit_code(&out), 2);

    // every point inside the pole guard: all-singular grid
    let cfg = write_config(
        dir,
        "allsing.json",
        r#"{
          "seeds": [{ "family": "N", "kappa": 0.0, "shift": 0.0 }],
          "grid": { "x_min": -5e-9, "x_max": 5e-9, "samples": 3 },
          "output": { "path": "allsing.csv" }
        }"#,
    );
    let out = run_in(dir, &["generate", "--config", cfg.to_str().unwrap()], &[]);
    assert_eq!(exit_code(&out), 3);

    // failed verification check: exit 1, singular potential reported
    let singular = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/singular.json");
    let out = run_in(dir, &["verify", "--config", singular.to_str().unwrap()], &[]);
    assert_eq!(exit_code(&out), 1);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let scattering = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "scattering")
        .expect("scattering check present");
    assert_eq!(scattering["pass"], false);
    assert!(scattering["note"]
        .as_str()
        .unwrap()
        .contains("singular inside the integration box"));

    // bad thread cap: config error
    let cfg = write_config(dir, "r2.json", R_SEED_CONFIG);
    let out = run_in(
        dir,
        &["generate", "--config", cfg.to_str().unwrap()],
        &[("SUSY_CHAIN_THREADS", "many")],
    );
    assert_eq!(exit_code(&out), 2);
    let out = run_in(
        dir,
        &["generate", "--config", cfg.to_str().unwrap()],
        &[("SUSY_CHAIN_THREADS", "2")],
    );
    assert_eq!(exit_code(&out), 0);
}

#[test]
fn stdout_carries_only_data() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();
    let cfg = write_config(dir, "r.json", R_SEED_CONFIG);

    let out = run_in(
        dir,
        &["generate", "--config", cfg.to_str().unwrap(), "--stdout"],
        &[],
    );
    assert_eq!(exit_code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,V_n,is_singular,pole_kind"));
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 4, "non-data line on stdout: {line:?}");
        cols[0].parse::<f64>().unwrap();
        cols[1].parse::<f64>().unwrap();
    }
    // --stdout writes no files
    assert!(!dir.join("r-seed.csv").exists());
    assert!(!dir.join("r-seed.meta.json").exists());
}

#[test]
fn singular_chain_sidecar_lists_pole_near_center() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();
    // kappa2 > kappa1 with R centered at x = a = 3
    let cfg = write_config(
        dir,
        "sing.json",
        r#"{
          "seeds": [
            { "family": "S", "kappa": 0.5, "shift": -3.0 },
            { "family": "R", "kappa": 5.0, "shift": -3.0 }
          ],
          "grid": { "x_min": -15.0, "x_max": 15.0, "samples": 2001 },
          "output": { "format": "csv", "path": "sing.csv" }
        }"#,
    );
    let out = run_in(dir, &["generate", "--config", cfg.to_str().unwrap()], &[]);
    assert_eq!(exit_code(&out), 0);
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("sing.meta.json")).unwrap())
            .unwrap();
    let poles = meta["poles"].as_array().unwrap();
    assert!(poles
        .iter()
        .any(|p| p["removable"] == false && (p["x"].as_f64().unwrap() - 3.0).abs() < 0.05));
}

#[test]
fn riccati_check_passes_for_every_family() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();
    for (name, seed) in [
        ("s", r#"{ "family": "S", "kappa": 1.0, "shift": 0.5 }"#),
        ("r", r#"{ "family": "R", "kappa": 1.0, "shift": 0.5 }"#),
        ("p", r#"{ "family": "P", "kappa": 1.0, "shift": 0.5 }"#),
        ("n", r#"{ "family": "N", "kappa": 0.0, "shift": 0.5 }"#),
    ] {
        let cfg = write_config(
            dir,
            &format!("{name}.json"),
            &format!(
                r#"{{
                  "seeds": [{seed}],
                  "grid": {{ "x_min": -10.0, "x_max": 10.0, "samples": 2001 }},
                  "verify": {{ "riccati": true, "oracle": false, "scattering": false, "spectrum": false, "poles": true }}
                }}"#
            ),
        );
        let out = run_in(dir, &["verify", "--config", cfg.to_str().unwrap()], &[]);
        assert_eq!(
            exit_code(&out),
            0,
            "family {name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn json_format_and_census() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();
    // S seed: a genuine pole at x = 1 sits on this grid
    let cfg = write_config(
        dir,
        "s.json",
        r#"{
          "seeds": [{ "family": "S", "kappa": 1.0, "shift": 1.0 }],
          "grid": { "x_min": -4.0, "x_max": 6.0, "samples": 501 },
          "output": { "format": "json", "path": "s.json.out" }
        }"#,
    );
    let out = run_in(dir, &["generate", "--config", cfg.to_str().unwrap()], &[]);
    assert_eq!(exit_code(&out), 0);
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("s.json.out")).unwrap()).unwrap();
    let points = doc["points"].as_array().unwrap();
    assert_eq!(points.len(), 501);
    let singular: Vec<&serde_json::Value> = points
        .iter()
        .filter(|p| p["is_singular"] == true)
        .collect();
    assert_eq!(singular.len(), 1);
    assert_eq!(singular[0]["x"].as_f64().unwrap(), 1.0);
    assert!(singular[0]["v"].is_null());
    assert_eq!(singular[0]["pole_kind"], "seed_pole");
    assert_eq!(doc["pole_count"], 1);

    // census subcommand reports the same structure on stdout
    let out = run_in(dir, &["census", "--config", cfg.to_str().unwrap(), "--stdout"], &[]);
    assert_eq!(exit_code(&out), 0);
    let census: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(census["pole_count"], 1);
    assert_eq!(census["pole_locations"][0].as_f64().unwrap(), 1.0);
    assert!(census.get("points").is_none());
}

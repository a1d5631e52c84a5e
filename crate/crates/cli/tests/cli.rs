use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn datev(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_datev")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.toml");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const SMALL: &str = "mode = \"synthetic\"\nhorizon = 300\nseeds = [1, 2]\npolicies = [\"datev\", \"oracle\", \"random\"]\n";

#[test]
fn run_writes_episode_files_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let out = dir.path().join("out");
    let res = datev(&["run", "--config", &config, "--out", out.to_str().unwrap(), "--seeds", "4,5"]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    for policy in ["datev", "oracle", "random"] {
        for seed in [4, 5] {
            assert!(out.join(format!("episodes_{policy}_{seed}.csv")).exists());
        }
    }
    assert!(!out.join("episodes_datev_1.csv").exists());
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + 6);
    let stdout = String::from_utf8_lossy(&res.stdout);
    assert!(stdout.contains("oracle"));

    fs::remove_file(out.join("summary.csv")).unwrap();
    let res = datev(&["summarize", "--in", out.to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    assert_eq!(fs::read_to_string(out.join("summary.csv")).unwrap(), summary);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        assert!(datev(&["run", "--config", &config, "--out", d.to_str().unwrap()]).status.success());
    }
    for name in ["episodes_datev_1.csv", "episodes_random_2.csv", "summary.csv"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn validate_config_lists_all_errors() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "mode = \"synthetic\"\nhorizon = 0\nseeds = []\n[learner]\neta = 2.0\n");
    let res = datev(&["validate-config", "--config", &config]);
    assert!(!res.status.success());
    let stderr = String::from_utf8_lossy(&res.stderr);
    for needle in ["horizon", "seeds", "eta"] {
        assert!(stderr.contains(needle), "{stderr}");
    }

    let good = write_config(dir.path(), SMALL);
    let res = datev(&["validate-config", "--config", &good]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    assert!(String::from_utf8_lossy(&res.stdout).contains("ok"));
}

#[test]
fn unknown_keys_and_modes_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &format!("{SMALL}colour = \"red\"\n"));
    let res = datev(&["validate-config", "--config", &config]);
    assert!(!res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("colour"));

    let config = write_config(dir.path(), SMALL);
    let res = datev(&["run", "--config", &config, "--out", "x", "--mode", "lunar"]);
    assert!(!res.status.success());
}

#[test]
fn mode_override_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let out = dir.path().join("out");
    let res = datev(&["run", "--config", &config, "--out", out.to_str().unwrap(), "--mode", "trace"]);
    assert!(!res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("trace.manifest"));
}

#[test]
fn shipped_configs_validate() {
    for name in ["synthetic.toml", "trace.toml"] {
        let path = format!("{}/../../configs/{name}", env!("CARGO_MANIFEST_DIR"));
        let res = datev(&["validate-config", "--config", &path]);
        assert!(res.status.success(), "{name}: {}", String::from_utf8_lossy(&res.stderr));
    }
}

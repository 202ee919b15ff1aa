use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_movpatch"))
}

// small heterogeneous compare run that forms no shock
fn small_config(n: usize, out: &Path) -> String {
    format!(
        r#"{{
  "domain": [0.0, 1.0],
  "d": 0.004,
  "heterogeneity": {{ "eps": [0.01, 0.02, 0.015], "gam": [0.9, 1.2, 1.0], "eps_target": 0.01 }},
  "patches": {{ "count": 6, "n": {n} }},
  "Gamma": 2,
  "motion": {{ "tau": 1.0, "beta": 1.0 }},
  "ic": {{ "kind": "sine_series", "terms": [{{ "amplitude": 0.2, "wavenumber": 3.14159 }}] }},
  "bc": {{ "kind": "zero" }},
  "t_end": 0.02,
  "snapshot_dt": 0.01,
  "output": {{ "dir": "{}" }},
  "mode": "compare"
}}"#,
        out.display()
    )
}

const OUTPUTS: [&str; 5] = ["snapshots_full.csv", "snapshots_patches.csv", "metrics.csv", "merges.csv", "manifest.json"];

#[test]
fn run_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, small_config(6, &a)).unwrap();

    let status = bin().arg("run").arg(&cfg).status().unwrap();
    assert!(status.success());
    let status = bin().arg("run").arg(&cfg).arg("--out-dir").arg(&b).status().unwrap();
    assert!(status.success());
    for name in OUTPUTS {
        let x = std::fs::read(a.join(name)).unwrap();
        let y = std::fs::read(b.join(name)).unwrap();
        assert!(!x.is_empty(), "{name} is empty");
        assert_eq!(x, y, "{name} differs between runs");
    }
}

#[test]
fn output_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, small_config(6, &out)).unwrap();
    assert!(bin().arg("run").arg(&cfg).status().unwrap().success());

    let patches = std::fs::read_to_string(out.join("snapshots_patches.csv")).unwrap();
    let mut lines = patches.lines();
    assert_eq!(lines.next(), Some("t,patch,kind,x,u"));
    let kinds: std::collections::BTreeSet<&str> = lines.map(|l| l.split(',').nth(2).unwrap()).collect();
    assert!(kinds.contains("micro") && kinds.contains("center"));

    let full = std::fs::read_to_string(out.join("snapshots_full.csv")).unwrap();
    assert_eq!(full.lines().next(), Some("t,patch,kind,x,u"));
    assert!(full.lines().skip(1).all(|l| l.split(',').nth(2) == Some("full")));
    // 17 significant digits
    let first_u = full.lines().nth(2).unwrap().rsplit(',').next().unwrap();
    let mantissa = first_u.split('e').next().unwrap().trim_start_matches('-');
    assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17, "{first_u}");

    let metrics = std::fs::read_to_string(out.join("metrics.csv")).unwrap();
    let mut lines = metrics.lines();
    assert_eq!(lines.next(), Some("t,macro_rmse,micro_rmse,l2_rel_err"));
    let mut last_t = -1.0;
    for l in lines {
        let v: Vec<f64> = l.split(',').map(|s| s.parse().unwrap()).collect();
        assert!(v[0] > last_t);
        last_t = v[0];
        assert!(v[1..].iter().all(|x| x.is_finite() && *x >= 0.0));
    }

    let merges = std::fs::read_to_string(out.join("merges.csv")).unwrap();
    assert_eq!(merges.lines().next(), Some("t,x,s,n_left,n_right"));

    let manifest: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["name"], "movpatch");
    assert!(manifest["version"].is_string());
    assert_eq!(manifest["config"]["patches"]["count"], 6);
}

#[test]
fn validate_reports_period_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, small_config(4, dir.path())).unwrap();
    let out = bin().arg("validate").arg(&cfg).output().unwrap();
    assert!(!out.status.success());
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("not a multiple of the heterogeneity period"), "{msg}");

    let good = dir.path().join("good.json");
    std::fs::write(&good, small_config(6, dir.path())).unwrap();
    assert!(bin().arg("validate").arg(&good).status().unwrap().success());
}

#[test]
fn unknown_fields_and_subcommands_fail() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("typo.json");
    let text = small_config(6, dir.path()).replace("\"t_end\"", "\"t_final\"");
    std::fs::write(&cfg, text).unwrap();
    let out = bin().arg("validate").arg(&cfg).output().unwrap();
    assert!(!out.status.success());
    assert!(!out.stderr.is_empty());

    assert!(!bin().arg("frobnicate").status().unwrap().success());
    assert!(!bin().args(["example", "4"]).status().unwrap().success());
}

#[test]
fn missing_config_is_an_error() {
    let out = bin().args(["run", "/nonexistent/config.json"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

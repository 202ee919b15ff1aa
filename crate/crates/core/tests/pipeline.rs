use movpatch::geometry::Patch;
use movpatch::harness::{simulate, RunConfig, RunOptions};

// heterogeneous sine-to-shock run, coarse enough for a debug build
fn shock_config() -> RunConfig {
    RunConfig::from_json(
        r#"{
  "domain": [-3.141592653589793, 3.141592653589793],
  "d": 0.01,
  "heterogeneity": { "eps": [0.012, 0.008, 0.010], "gam": [1.1, 0.9, 1.0], "eps_target": 0.01 },
  "patches": { "count": 26, "n": 6 },
  "coupling_order": 2,
  "motion": { "tau": 1.0, "beta": 1.0 },
  "ic": { "kind": "sine_series", "terms": [{ "amplitude": -1.0, "wavenumber": 1.0 }] },
  "bc": { "kind": "zero" },
  "t_end": 1.0,
  "snapshot_dt": 0.1,
  "mode": "compare"
}"#,
    )
    .unwrap()
}

#[test]
fn shock_run_merges_consistently() {
    let cfg = shock_config();
    let outcome = simulate(&cfg, &RunOptions::default()).unwrap();
    let run = outcome.patches.as_ref().unwrap();
    assert!(!run.merges.is_empty(), "no merges by t = 1");

    let initial: usize = run.snapshots[0].patches.iter().map(Patch::points).sum();
    let d = outcome.lattice.d;
    for snap in &run.snapshots {
        let merged = run.merges.iter().filter(|m| m.t <= snap.t).count();
        let points: usize = snap.patches.iter().map(Patch::points).sum();
        assert_eq!(points, initial - merged, "point count at t = {}", snap.t);
        assert_eq!(snap.patches.len(), 26 - merged);
        for p in &snap.patches {
            assert!(p.u.iter().all(|u| u.is_finite()));
            assert!((p.d - d).abs() < 1e-15);
            if p.is_meso() {
                let n = p.n as isize;
                assert!(-n < p.node_l && p.node_l < p.node_r && p.node_r < n);
            }
        }
        for w in snap.patches.windows(2) {
            assert!(w[1].left_edge() - w[0].right_edge() >= -1e-9 * d, "overlap at t = {}", snap.t);
        }
        let first = &snap.patches[0];
        let last = snap.patches.last().unwrap();
        assert!((first.left_edge() - cfg.domain[0]).abs() < 1e-12);
        assert!((last.right_edge() - cfg.domain[1]).abs() < 1e-12);
    }
    for m in &run.merges {
        assert!(m.x.abs() < 1.0, "merge away from the shock at x = {}", m.x);
    }

    // before the shock the patches track the full lattice closely
    let metrics = outcome.metrics.as_ref().unwrap();
    for row in metrics.rows.iter().filter(|r| r.t <= 0.3 + 1e-12) {
        assert!(row.macro_rmse < 5e-3, "macro rmse {} at t = {}", row.macro_rmse, row.t);
        assert!(row.l2_rel_err < 0.02, "l2 {} at t = {}", row.l2_rel_err, row.t);
    }
    assert!(metrics.rows.iter().all(|r| r.macro_rmse.is_finite() && r.micro_rmse >= 0.0));
}

#[test]
fn simulate_is_reproducible() {
    let mut cfg = shock_config();
    cfg.t_end = 0.2;
    let a = simulate(&cfg, &RunOptions::default()).unwrap();
    let b = simulate(&cfg, &RunOptions::default()).unwrap();
    assert_eq!(a.patches, b.patches);
    assert_eq!(a.full, b.full);
}

#[test]
fn config_round_trips_through_json() {
    let cfg = shock_config();
    let back = RunConfig::from_json(&cfg.to_json().unwrap()).unwrap();
    assert_eq!(cfg, back);
}

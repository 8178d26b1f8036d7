//! Output files read back against the in-memory trajectory.

use chis::output::{emit_snapshot, emit_timeseries, read_snapshot, read_table, TIMESERIES_HEADER};
use chis::scenario::ScenarioConfig;
use chis::suite::simulate;
use chis::Profile;

fn short_run(snapshot_stride: usize) -> (ScenarioConfig, chis::Trajectory) {
    let mut cfg = ScenarioConfig::default();
    cfg.domain.nx = 32;
    cfg.model.t_final = 0.5;
    cfg.numerics.dt = 1e-3;
    cfg.numerics.diagnostic_stride = 25;
    cfg.numerics.snapshot_stride = snapshot_stride;
    let traj = simulate(&cfg).unwrap();
    (cfg, traj)
}

#[test]
fn timeseries_has_fixed_schema_and_monotone_cumulatives() {
    let (_, traj) = short_run(0);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ts.csv");
    emit_timeseries(&traj, &path).unwrap();
    let table = read_table(&path).unwrap();
    assert_eq!(table.header, TIMESERIES_HEADER);
    assert_eq!(table.rows.len(), traj.samples.len());
    let cum = table.column("cum_vw").unwrap();
    assert!(cum.windows(2).all(|w| w[1] >= w[0]));
    // 17 significant digits reproduce every value exactly
    let t = table.column("t").unwrap();
    for (a, r) in t.iter().zip(&traj.samples) {
        assert_eq!(a.to_bits(), r.t.to_bits());
    }
}

#[test]
fn two_sample_trajectory_gives_two_rows() {
    let mut cfg = ScenarioConfig::default();
    cfg.domain.nx = 16;
    cfg.model.t_final = 0.01;
    cfg.numerics.dt = 1e-3;
    cfg.numerics.diagnostic_stride = 0;
    let traj = simulate(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ts.csv");
    emit_timeseries(&traj, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn dist_w_recomputed_from_snapshots_matches_csv() {
    let (cfg, traj) = short_run(25);
    let dir = tempfile::tempdir().unwrap();
    let ts = dir.path().join("ts.csv");
    emit_timeseries(&traj, &ts).unwrap();
    let table = read_table(&ts).unwrap();
    let times = table.column("t").unwrap();
    let dist_w = table.column("dist_w").unwrap();
    let w_eq = traj.config.mean_u0 / cfg.model.delta;
    for (k, (t, d)) in times.iter().zip(&dist_w).enumerate() {
        let snap = traj.snapshot_at(*t).expect("snapshot at every sample");
        let path = dir.path().join(format!("s{k}.bin"));
        emit_snapshot(snap, &path).unwrap();
        let back = read_snapshot(&path).unwrap();
        let recomputed = back
            .w
            .values()
            .iter()
            .fold(0.0f64, |m, x| m.max((x - w_eq).abs()));
        assert!(
            (recomputed - d).abs() <= 1e-12,
            "t={t}: {recomputed} vs {d}"
        );
    }
}

#[test]
fn initial_snapshot_equals_generated_data() {
    let (cfg, traj) = short_run(0);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("init.csv");
    emit_snapshot(&traj.snapshots[0], &path).unwrap();
    let back = read_snapshot(&path).unwrap();
    let fresh = cfg.params().unwrap().initial_state().unwrap();
    assert_eq!(back.u.values(), fresh.u.values());
    assert_eq!(back.v.values(), fresh.v.values());
    assert_eq!(back.w.values(), fresh.w.values());
    assert_eq!(back.t, 0.0);
}

#[test]
fn restart_from_snapshot_profile() {
    let (mut cfg, traj) = short_run(0);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("final.bin");
    emit_snapshot(&traj.final_state, &path).unwrap();
    for (p, role) in [
        (&mut cfg.initial.u, "u"),
        (&mut cfg.initial.v, "v"),
        (&mut cfg.initial.w, "w"),
    ] {
        *p = Profile::FromFile {
            path: path.clone(),
            field: Some(role.into()),
        };
    }
    let s = cfg.params().unwrap().initial_state().unwrap();
    assert_eq!(s.u.values(), traj.final_state.u.values());
    assert_eq!(s.w.values(), traj.final_state.w.values());
}

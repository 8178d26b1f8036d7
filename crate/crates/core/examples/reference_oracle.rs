//! Fine-grid reference run of the default scenario (nx = 1024, dt = 1e-4).
//!
//! Writes the final distances and cumulative integrals that pin the
//! equilibrium targets to `data/oracle_default.csv`. Takes about a minute
//! in release mode.
//!
//! ```text
//! cargo run --release --example reference_oracle [output.csv]
//! ```

use std::time::Instant;

use chis::scenario::ScenarioConfig;
use chis::suite::simulate;

fn main() -> chis::Result<()> {
    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/oracle_default.csv").into());
    let mut cfg = ScenarioConfig {
        name: "oracle".into(),
        ..Default::default()
    };
    cfg.domain.nx = 1024;
    cfg.numerics.dt = 1e-4;
    cfg.numerics.diagnostic_stride = 10_000;

    let start = Instant::now();
    let traj = simulate(&cfg)?;
    let last = traj.samples.last().expect("final sample");
    let rows: Vec<(&str, f64)> = vec![
        ("nx", cfg.domain.nx as f64),
        ("dt", cfg.numerics.dt),
        ("t_final", last.t),
        ("steps", traj.steps as f64),
        ("dist_u", last.dist_u),
        ("dist_v", last.dist_v),
        ("dist_w", last.dist_w),
        ("max_mass_drift", traj.extremes.max_mass_drift),
        ("cum_vw", traj.totals.cross_vw),
        ("v0_integral", traj.initial.v_integral),
        ("cum_grad_v_sq", traj.totals.grad_v_sq),
        ("cum_fisher", traj.totals.fisher),
        ("lyapunov_final", last.lyapunov),
    ];

    let mut w = csv::Writer::from_path(&out)?;
    w.write_record(["quantity", "value"])?;
    for (k, v) in &rows {
        w.write_record([k.to_string(), chis::output::fmt17(*v)])?;
        println!("{k:>16} = {v:.6e}");
    }
    w.flush()?;
    println!("wrote {out} in {:.1} s", start.elapsed().as_secs_f64());
    Ok(())
}

//! Integrates the default scenario and writes its time series.
//!
//! ```text
//! cargo run --release --example simulate_default [t_final] [out_dir]
//! ```

use chis::output::{emit_snapshot, emit_timeseries};
use chis::scenario::ScenarioConfig;
use chis::stepper::{run, State};
use chis::DiagnosticsRecord;

fn main() -> chis::Result<()> {
    let mut args = std::env::args().skip(1);
    let mut cfg = ScenarioConfig::default();
    if let Some(t) = args.next() {
        cfg.model.t_final = t.parse().expect("t_final");
    }
    let out = std::path::PathBuf::from(args.next().unwrap_or_else(|| "runs/default".into()));
    std::fs::create_dir_all(&out)?;

    // print every 1000th sample while the run progresses
    let mut seen = 0usize;
    let mut progress = |_: &State, r: &DiagnosticsRecord| {
        if seen.is_multiple_of(1000) {
            println!(
                "t = {:>6.2}  mass = {:.15}  ||v||_inf = {:.3e}  E_p = {:.12}",
                r.t, r.mass, r.v_linf, r.lyapunov
            );
        }
        seen += 1;
    };
    let traj = run(
        &cfg.params()?,
        &cfg.step_config(),
        cfg.model.t_final,
        &cfg.run_options(),
        &mut [&mut progress],
    )?;

    emit_timeseries(&traj, out.join("timeseries.csv"))?;
    emit_snapshot(&traj.final_state, out.join("final.bin"))?;
    let last = traj.samples.last().expect("final sample");
    println!(
        "{} steps; final distances u {:.2e}, v {:.2e}, w {:.2e}; outputs in {}",
        traj.steps,
        last.dist_u,
        last.dist_v,
        last.dist_w,
        out.display()
    );
    Ok(())
}

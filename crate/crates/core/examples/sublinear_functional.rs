//! The sublinear functional needs no smallness of the signal.
//!
//! Prints the admissible exponent `p0(M)` for a range of signal heights,
//! then checks monotonicity and the dissipation budget at `M = 1`.

use chis::functionals::compute_p0;
use chis::scenario::ScenarioConfig;
use chis::suite::simulate;
use chis::verifier::{check_sublinear, Slack};

fn main() -> chis::Result<()> {
    println!("{:>8} {:>12}", "M", "p0(M)");
    for m in [0.0, 0.1, 0.5, 1.0, 2.0, 5.0] {
        match compute_p0(m) {
            Ok(p) => println!("{m:>8} {p:>12.6}"),
            Err(e) => println!("{m:>8} {e}"),
        }
    }

    let mut cfg = ScenarioConfig::with_signal_amplitude(1.0);
    cfg.name = "sublinear".into();
    cfg.model.t_final = 20.0;
    let traj = simulate(&cfg)?;
    let [mono, budget] = check_sublinear(&traj, Slack::default());
    let first = traj.samples.first().expect("samples").sublinear;
    let last = traj.samples.last().expect("samples").sublinear;
    println!(
        "F_p from {first:.10} to {last:.10} (p = {:?})",
        traj.config.sublinear_p
    );
    for r in [mono, budget] {
        println!("{:<20} {:<5} {}", r.check_id, r.verdict().name(), r.notes);
    }
    Ok(())
}

//! Cumulative space-time integrals against their bounds in terms of the
//! initial data, and their convergence under step refinement.

use chis::scenario::ScenarioConfig;
use chis::suite::simulate;
use chis::verifier::check_dissipation;

fn main() -> chis::Result<()> {
    for dt in [4e-3, 2e-3, 1e-3] {
        let mut cfg = ScenarioConfig::default();
        cfg.domain.nx = 128;
        cfg.model.t_final = 10.0;
        cfg.numerics.dt = dt;
        let traj = simulate(&cfg)?;
        let r = check_dissipation(&traj);
        let i = &traj.initial;
        println!(
            "dt = {dt:.0e}: int v0 - int int vw = {:+.3e}, int int |grad v|^2 = {:.6e}, fisher = {:.6e}  [{}]",
            i.v_integral - traj.totals.cross_vw,
            traj.totals.grad_v_sq,
            traj.totals.fisher,
            r.verdict().name()
        );
    }
    Ok(())
}

//! Exponential-weight functional below and above the smallness threshold.
//!
//! For each signal height the run reports whether `int u^p e^{gamma v^2}`
//! decays and the largest cellwise value of `g_phi(v)`; below
//! `1 / (3 max{2, n})` both must behave, above it nothing is promised.

use chis::scenario::ScenarioConfig;
use chis::suite::simulate;
use chis::verifier::{check_lyapunov, check_lyapunov_g_sign, lyapunov_threshold, Slack};

fn main() -> chis::Result<()> {
    println!("threshold in 1D: {:.6}", lyapunov_threshold(1));
    for a in [0.05, 1.0 / 6.0, 0.3, 0.6] {
        let mut cfg = ScenarioConfig::with_signal_amplitude(a);
        cfg.name = format!("a={a:.4}");
        cfg.domain.nx = 128;
        cfg.model.t_final = 10.0;
        cfg.numerics.dt = 1e-3;
        let traj = simulate(&cfg)?;
        let mono = check_lyapunov(&traj, Slack::default());
        let g = check_lyapunov_g_sign(&traj);
        println!(
            "{:<10} lyapunov {:<4} (excess {:.2e})  g-sign {:<4} {}",
            cfg.name,
            mono.verdict().name(),
            mono.max_violation,
            g.verdict().name(),
            g.notes
        );
    }
    Ok(())
}

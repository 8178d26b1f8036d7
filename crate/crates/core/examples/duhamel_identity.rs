//! The stored `w` against two quadratures of its variation-of-constants
//! formula: the exponential one telescopes exactly, the trapezoid one
//! converges at first order because `u` is frozen over each step.

use chis::scenario::ScenarioConfig;
use chis::study::duhamel_refinement;

fn main() -> chis::Result<()> {
    let mut cfg = ScenarioConfig::default();
    cfg.domain.nx = 64;
    cfg.model.t_final = 1.0;
    for dt in [4e-3, 2e-3, 1e-3] {
        cfg.numerics.dt = dt;
        let d = duhamel_refinement(&cfg)?;
        println!(
            "dt = {dt:.0e}: exact-weight residual {:.2e}, trapezoid gap {:.3e} -> {:.3e} at dt/2 (ratio {:.3})",
            d.residual, d.gap, d.gap_half, d.ratio
        );
    }
    Ok(())
}

//! Deliberately broken schemes that the checks must catch: transport in
//! non-divergence form loses mass, and explicit absorption with a large
//! step drives the signal negative.

use chis::scenario::load_config_file;
use chis::suite::run_checks;
use chis::verifier::format_text;

fn main() -> chis::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/suite");
    for file in [
        "control_nonconservative.toml",
        "control_explicit_absorption.toml",
    ] {
        let cfg = load_config_file(format!("{dir}/{file}"))?;
        println!("{} ({})", cfg.name, cfg.numerics.variant.name());
        print!("{}", format_text(&run_checks(&cfg).reports));
    }
    Ok(())
}

//! Signal-height sweep across the Lyapunov threshold in one and two
//! dimensions; prints the aggregated CSV.

use chis::scenario::load_config_file;
use chis::study::{sweep, write_sweep_csv, SweepParam};

fn main() -> chis::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/studies");
    let values = [0.05, 1.0 / 6.0, 0.5, 2.0];
    for file in ["sweep_line.toml", "sweep_square.toml"] {
        let cfg = load_config_file(format!("{dir}/{file}"))?;
        let rows = sweep(&cfg, SweepParam::V0max, &values);
        println!("\n{}", cfg.name);
        write_sweep_csv(SweepParam::V0max, &rows, std::io::stdout())?;
    }
    Ok(())
}

//! Observed convergence orders in space and time.
//!
//! ```text
//! cargo run --release --example order_study [levels]
//! ```

use chis::scenario::load_config_file;
use chis::study::{order_study, write_order_csv, RefineAxis};

fn main() -> chis::Result<()> {
    let levels: usize = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("levels"))
        .unwrap_or(4);
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/studies");
    for (file, axis) in [
        ("heat.toml", RefineAxis::Space),
        ("smooth_space.toml", RefineAxis::Space),
        ("smooth_time.toml", RefineAxis::Time),
    ] {
        let cfg = load_config_file(format!("{dir}/{file}"))?;
        let table = order_study(&cfg, axis, levels)?;
        println!("\n{} ({axis:?})", cfg.name);
        write_order_csv(&table, std::io::stdout())?;
    }
    Ok(())
}

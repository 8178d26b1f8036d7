//! Runs every scenario in a directory and prints the report, the
//! observational quantities and the traceability table.
//!
//! ```text
//! cargo run --release --example verify_suite [dir]
//! ```

use chis::suite::{load_suite, run_suite};
use chis::verifier::{format_text, traceability_table};

fn main() -> chis::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/suite").into());
    let report = run_suite(&load_suite(&dir)?);
    print!("{}", format_text(&report.reports));
    for (name, o) in &report.observations {
        println!("{name}: {o:?}");
    }
    print!("\n{}", traceability_table());
    println!(
        "\nsuite {}",
        if report.success() { "passed" } else { "FAILED" }
    );
    Ok(())
}

//! Command-line driver.
//!
//! Exit codes: 0 on success, 1 when a check fails (or a run aborts), 2 on
//! usage errors and unreadable scenarios.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::error::Result;
use crate::output::{emit_snapshot, emit_timeseries, run_dir};
use crate::scenario::{dump, load_config_file, ScenarioConfig};
use crate::study::{order_study, sweep, write_order_csv, write_sweep_csv, RefineAxis, SweepParam};
use crate::suite::{checks_on, load_suite, run_suite, simulate};
use crate::verifier::{self, format_text, traceability_table, write_report_csv};

#[derive(Debug, Parser)]
#[command(
    name = "chis",
    version,
    about = "Chemotaxis with indirect signal absorption: simulate and verify"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate a scenario and write its time series and snapshots.
    Run {
        config: PathBuf,
        /// Root directory; outputs go to `<out>/<scenario name>/`.
        #[arg(long, default_value = "runs")]
        out: PathBuf,
    },
    /// Run the checks of a scenario file or of every `*.toml` in a directory.
    Verify {
        path: PathBuf,
        /// Also write the report as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Rerun a scenario for each parameter value and aggregate the outcomes.
    Sweep {
        config: PathBuf,
        #[arg(long, value_parser = parse_param)]
        param: SweepParam,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        values: Vec<f64>,
        /// CSV destination; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Observed convergence orders under repeated halving of h or dt.
    OrderStudy {
        config: PathBuf,
        #[arg(long, value_parser = parse_axis)]
        refine: RefineAxis,
        #[arg(long, default_value_t = 4)]
        levels: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the full default scenario.
    Defaults,
}

fn parse_param(s: &str) -> std::result::Result<SweepParam, String> {
    s.parse().map_err(|e: crate::Error| e.to_string())
}

fn parse_axis(s: &str) -> std::result::Result<RefineAxis, String> {
    s.parse().map_err(|e: crate::Error| e.to_string())
}

/// Parses `args` (program name first) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match execute(cli.command, &mut out) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

enum Failure {
    Usage(String),
    Run(String),
}

fn load(path: &Path) -> std::result::Result<ScenarioConfig, Failure> {
    load_config_file(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn run_err(e: crate::Error) -> Failure {
    Failure::Run(e.to_string())
}

fn io_err(e: io::Error) -> Failure {
    Failure::Run(e.to_string())
}

fn execute(cmd: Command, out: &mut impl Write) -> std::result::Result<i32, Failure> {
    match cmd {
        Command::Defaults => {
            write!(out, "{}", dump(&ScenarioConfig::default())).map_err(io_err)?;
            Ok(0)
        }
        Command::Run { config, out: root } => {
            let cfg = load(&config)?;
            let traj = simulate(&cfg).map_err(run_err)?;
            let dir = run_dir(&root, &cfg.name).map_err(run_err)?;
            write_run(&cfg, &traj, &dir).map_err(run_err)?;
            let reports = checks_on(&cfg, &traj);
            write!(out, "{}", format_text(&reports)).map_err(io_err)?;
            writeln!(out, "outputs in {}", dir.display()).map_err(io_err)?;
            Ok(i32::from(verifier::any_failure(&reports)))
        }
        Command::Verify { path, csv } => {
            let entries = load_suite(&path)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            let report = run_suite(&entries);
            writeln!(out, "{}", format_text(&report.reports)).map_err(io_err)?;
            for (name, o) in &report.observations {
                writeln!(
                    out,
                    "observed {name}: decay rates u={:.4} v={:.4} w={:.4}; GN ratio in [{:.4}, {:.4}]; max |grad v|^theta integral {:.4e}",
                    o.decay_rate_u, o.decay_rate_v, o.decay_rate_w, o.gn_ratio_min, o.gn_ratio_max, o.grad_v_theta_max
                )
                .map_err(io_err)?;
            }
            writeln!(out, "\ntraceability\n{}", traceability_table()).map_err(io_err)?;
            if let Some(p) = csv {
                let f = File::create(&p).map_err(io_err)?;
                write_report_csv(&report.reports, f).map_err(run_err)?;
            }
            let failures = report
                .reports
                .iter()
                .filter(|r| r.verdict().is_failure())
                .count();
            writeln!(
                out,
                "{} checks, {} failures",
                report.reports.len(),
                failures
            )
            .map_err(io_err)?;
            Ok(i32::from(!report.success()))
        }
        Command::Sweep {
            config,
            param,
            values,
            out: dest,
        } => {
            let cfg = load(&config)?;
            let rows = sweep(&cfg, param, &values);
            match dest {
                Some(p) => write_sweep_csv(param, &rows, File::create(p).map_err(io_err)?),
                None => write_sweep_csv(param, &rows, &mut *out),
            }
            .map_err(run_err)?;
            Ok(0)
        }
        Command::OrderStudy {
            config,
            refine,
            levels,
            out: dest,
        } => {
            let cfg = load(&config)?;
            let table = order_study(&cfg, refine, levels).map_err(|e| match e {
                crate::Error::InvalidParameter { .. } => Failure::Usage(e.to_string()),
                other => run_err(other),
            })?;
            match dest {
                Some(p) => write_order_csv(&table, File::create(p).map_err(io_err)?),
                None => write_order_csv(&table, &mut *out),
            }
            .map_err(run_err)?;
            if table.monotone.iter().any(|m| !m) {
                eprintln!(
                    "warning: non-monotone error sequence (u, v, w) = {:?}",
                    table.monotone
                );
            }
            Ok(0)
        }
    }
}

/// `timeseries.csv`, `initial.bin`, `final.bin` and the resolved `scenario.toml`.
fn write_run(cfg: &ScenarioConfig, traj: &crate::Trajectory, dir: &Path) -> Result<()> {
    emit_timeseries(traj, dir.join("timeseries.csv"))?;
    if let Some(first) = traj.snapshots.first() {
        emit_snapshot(first, dir.join("initial.bin"))?;
    }
    emit_snapshot(&traj.final_state, dir.join("final.bin"))?;
    std::fs::write(dir.join("scenario.toml"), dump(cfg))?;
    Ok(())
}

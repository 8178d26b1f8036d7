//! Runs scenarios and the checks they enable.

use std::path::Path;

use rayon::prelude::*;

use crate::error::Result;
use crate::functionals::Trajectory;
use crate::scenario::{load_config_file, suite_files, ScenarioConfig};
use crate::stepper::run;
use crate::verifier::{self, CheckReport, Observations, Slack};

/// Rayon pool capped by `CHIS_THREADS`, machine parallelism otherwise.
pub fn thread_pool() -> rayon::ThreadPool {
    let n = std::env::var("CHIS_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .unwrap_or(0);
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .expect("thread pool")
}

/// Integrates a scenario with its own numerics.
pub fn simulate(cfg: &ScenarioConfig) -> Result<Trajectory> {
    run(
        &cfg.params()?,
        &cfg.step_config(),
        cfg.model.t_final,
        &cfg.run_options(),
        &mut [],
    )
}

/// The same scenario at `dt / 2`, sampled at the same times.
pub fn simulate_half_dt(cfg: &ScenarioConfig) -> Result<Trajectory> {
    let mut fine = cfg.clone();
    fine.numerics.dt *= 0.5;
    fine.numerics.diagnostic_stride *= 2;
    fine.numerics.snapshot_stride *= 2;
    simulate(&fine)
}

#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub name: String,
    pub reports: Vec<CheckReport>,
    pub observations: Option<Observations>,
}

/// Runs `cfg` and every check it enables; run failures become a failed
/// report instead of an error.
pub fn run_checks(cfg: &ScenarioConfig) -> ScenarioOutcome {
    match simulate(cfg) {
        Ok(traj) => {
            let reports = checks_on(cfg, &traj);
            ScenarioOutcome {
                name: cfg.name.clone(),
                reports,
                observations: Some(verifier::observe(&traj)),
            }
        }
        Err(e) => ScenarioOutcome {
            name: cfg.name.clone(),
            reports: vec![CheckReport::scenario_error(
                "scenario_run",
                &cfg.name,
                e.to_string(),
            )],
            observations: None,
        },
    }
}

/// Evaluates the enabled checks on a completed trajectory of `cfg`.
pub fn checks_on(cfg: &ScenarioConfig, traj: &Trajectory) -> Vec<CheckReport> {
    let on = |id: &str| cfg.is_enabled(id);
    let mut fine: Option<Result<Trajectory>> = None;
    let mut reports = Vec::new();

    if on("mass_conservation") {
        reports.push(verifier::check_mass(traj));
    }
    if on("comparison_principles") {
        reports.push(verifier::check_comparison_principles(traj));
    }
    if on("lyapunov_small_v0") {
        let slack = slack_for(cfg, traj, verifier::lyapunov_series, &mut fine);
        reports.push(match slack {
            Ok(s) => verifier::check_lyapunov(traj, s),
            Err(e) => CheckReport::scenario_error("lyapunov_small_v0", &cfg.name, e.to_string()),
        });
    }
    if on("lyapunov_g_sign") {
        reports.push(verifier::check_lyapunov_g_sign(traj));
    }
    if on("sublinear_monotone") || on("sublinear_budget") {
        let slack = if traj.config.sublinear_p.is_some() {
            slack_for(cfg, traj, verifier::sublinear_series, &mut fine)
        } else {
            Ok(Slack::default())
        };
        match slack {
            Ok(s) => {
                let [mono, budget] = verifier::check_sublinear(traj, s);
                if on("sublinear_monotone") {
                    reports.push(mono);
                }
                if on("sublinear_budget") {
                    reports.push(budget);
                }
            }
            Err(e) => reports.push(CheckReport::scenario_error(
                "sublinear_monotone",
                &cfg.name,
                e.to_string(),
            )),
        }
    }
    if on("explicit_w_bounds") {
        reports.push(verifier::check_explicit_w_bounds(traj));
    }
    if on("dissipation_bounds") {
        reports.push(verifier::check_dissipation(traj));
    }
    if on("equilibrium") {
        reports.push(verifier::check_equilibrium(traj, cfg.checks.equilibrium));
    }
    if on("shifted_w_bound") {
        reports.push(verifier::check_shifted_w(traj));
    }
    if on("duhamel_identity") {
        reports.push(verifier::check_duhamel(traj));
    }

    for r in &mut reports {
        if let Some(tol) = cfg.tolerance(&r.check_id) {
            *r = r.clone().with_tolerance(tol);
        }
        r.expected_fail = cfg.expects_failure(&r.check_id);
    }
    reports
}

/// Calibrates `c` by a `dt / 2` rerun when the series shows any excess;
/// without excess `c` is zero whatever the rerun gives.
fn slack_for(
    cfg: &ScenarioConfig,
    traj: &Trajectory,
    series: fn(&Trajectory) -> Vec<f64>,
    fine: &mut Option<Result<Trajectory>>,
) -> Result<Slack> {
    let mut slack = Slack::default();
    let coarse = series(traj);
    let raw = verifier::monotone_excess(&coarse, slack, traj.dt);
    if raw == 0.0 || !cfg.checks.calibrate_slack {
        return Ok(slack);
    }
    let fine = fine.get_or_insert_with(|| simulate_half_dt(cfg));
    match fine {
        Ok(f) => {
            slack.c = verifier::calibrate_c(&coarse, &series(f), traj.dt, slack.rel);
            Ok(slack)
        }
        Err(e) => Err(crate::Error::param("calibration", e.to_string())),
    }
}

/// A scenario file that loaded, or the reason it did not.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum SuiteEntry {
    Loaded(ScenarioConfig),
    Failed { name: String, reason: String },
}

/// Loads `path` (a scenario file or a directory of them). Files that fail
/// to parse become [`SuiteEntry::Failed`] without affecting the others.
pub fn load_suite(path: impl AsRef<Path>) -> Result<Vec<SuiteEntry>> {
    Ok(suite_files(path)?
        .into_iter()
        .map(|p| match load_config_file(&p) {
            Ok(c) => SuiteEntry::Loaded(c),
            Err(e) => SuiteEntry::Failed {
                name: p.display().to_string(),
                reason: e.to_string(),
            },
        })
        .collect())
}

#[derive(Debug, Clone, Default)]
pub struct SuiteReport {
    /// Sorted by check id, then scenario.
    pub reports: Vec<CheckReport>,
    pub observations: Vec<(String, Observations)>,
}

impl SuiteReport {
    pub fn success(&self) -> bool {
        !verifier::any_failure(&self.reports)
    }
}

/// Runs all entries concurrently and aggregates after the join.
pub fn run_suite(entries: &[SuiteEntry]) -> SuiteReport {
    let outcomes: Vec<ScenarioOutcome> = thread_pool().install(|| {
        entries
            .par_iter()
            .map(|e| match e {
                SuiteEntry::Loaded(cfg) => run_checks(cfg),
                SuiteEntry::Failed { name, reason } => ScenarioOutcome {
                    name: name.clone(),
                    reports: vec![CheckReport::scenario_error(
                        "scenario_load",
                        name,
                        reason.clone(),
                    )],
                    observations: None,
                },
            })
            .collect()
    });
    let mut report = SuiteReport::default();
    for o in outcomes {
        report.reports.extend(o.reports);
        if let Some(obs) = o.observations {
            report.observations.push((o.name, obs));
        }
    }
    verifier::sort_reports(&mut report.reports);
    report.observations.sort_by(|a, b| a.0.cmp(&b.0));
    report
}

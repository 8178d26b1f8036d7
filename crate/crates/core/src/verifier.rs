//! Executable checks over completed trajectories.
//!
//! Each check turns one structural statement about the continuous system
//! into a measured violation and a tolerance. Reports carry the statement
//! verbatim in [`CheckReport::anchor`] so a failing line is traceable
//! without reading the source.

use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::functionals::{duhamel_w_residual, Trajectory, Weight};

/// Relative floor used when a bound's right-hand side vanishes.
const TINY: f64 = 1e-300;

/// Stable identifiers and the statement each one checks.
pub const CHECKS: &[(&str, &str)] = &[
    ("comparison_principles", "u > 0, v ≥ 0, v ≤ ‖v_0‖_{L^∞(Ω)}, w > 0"),
    ("dissipation_bounds", "∫_0^T ∫_Ω v w ≤ ∫_Ω v_0; ∫_0^T ∫_Ω |∇v|^2 ≤ ½∫_Ω v_0^2; ∫_1^T ∫_Ω |∇u|^2/u^2 ≤ 2m − 2 log inf u(x,1)·|Ω| + ½∫_Ω v_0^2"),
    ("duhamel_identity", "w(·, t) = e^{-δt} w_0 + ∫_0^t e^{-δ(t-s)} u(·, s) ds"),
    ("equilibrium", "u(·,t) → \\overline u_0, v(·,t) → 0, w(·,t) → \\frac{\\overline u_0}{\\delta}"),
    ("explicit_w_bounds", "C := max{\\frac{1}{\\delta}, \\|w_0\\|_X}; C := max{\\|w_0\\|_{L^p(Ω)}, (\\delta p')^{-1/p'}}"),
    ("lyapunov_g_sign", "g_\\varphi(v) ≤ 0 for s \\mapsto e^{\\gamma s^2}"),
    ("lyapunov_small_v0", "If v_0 ≤ \\frac{1}{3\\max\\{2, n\\}}, then d/dt ∫_Ω u^p φ(v) ≤ 0"),
    ("mass_conservation", "∫_Ω u(·, t) = ∫_Ω u_0"),
    ("shifted_w_bound", "w(x, t) - \\frac{\\overline u_0}{\\delta} [1 - e^{-\\delta t}]"),
    ("sublinear_budget", "C := \\frac{3}{(1-p)p}\\|\\varphi\\|_{L^\\infty(I)} m^p |\\Omega|^{1-p}"),
    ("sublinear_monotone", "φ(s) = 1 + \\|v_0\\|_{L^\\infty(\\Omega)}^2 - s^2; there exists p_0 ∈ (0,1) such that g_p(s) ≤ 0"),
];

pub fn anchor(check_id: &str) -> &'static str {
    CHECKS
        .iter()
        .find(|(id, _)| *id == check_id)
        .map(|(_, a)| *a)
        .unwrap_or("")
}

pub fn is_known(check_id: &str) -> bool {
    CHECKS.iter().any(|(id, _)| *id == check_id)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Expected to fail and did.
    ExpectedFail,
    /// Expected to fail but passed.
    UnexpectedPass,
    NotApplicable,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "FAIL",
            Verdict::ExpectedFail => "expected-fail",
            Verdict::UnexpectedPass => "UNEXPECTED-PASS",
            Verdict::NotApplicable => "n/a",
        }
    }

    pub fn is_failure(&self) -> bool {
        matches!(self, Verdict::Fail | Verdict::UnexpectedPass)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_id: String,
    pub anchor: String,
    pub scenario: String,
    /// `dim=1 nx=256` style grid description.
    pub grid: String,
    pub dt: f64,
    pub applicable: bool,
    /// `max_violation <= tolerance`; false when not applicable.
    pub passed: bool,
    pub max_violation: f64,
    pub tolerance: f64,
    pub expected_fail: bool,
    pub notes: String,
}

impl CheckReport {
    fn new(
        check_id: &str,
        traj: &Trajectory,
        max_violation: f64,
        tolerance: f64,
        notes: String,
    ) -> Self {
        let mut r = Self::blank(check_id, &traj.name, grid_label(traj), traj.dt);
        r.applicable = true;
        r.max_violation = max_violation;
        r.tolerance = tolerance;
        r.passed = max_violation <= tolerance;
        r.notes = notes;
        r
    }

    fn not_applicable(check_id: &str, traj: &Trajectory, tolerance: f64, notes: String) -> Self {
        let mut r = Self::blank(check_id, &traj.name, grid_label(traj), traj.dt);
        r.tolerance = tolerance;
        r.notes = notes;
        r
    }

    /// Failed report for a scenario that could not be loaded or run.
    pub fn scenario_error(check_id: &str, scenario: &str, reason: String) -> Self {
        let mut r = Self::blank(check_id, scenario, String::new(), f64::NAN);
        r.applicable = true;
        r.max_violation = f64::INFINITY;
        r.notes = reason;
        r
    }

    fn blank(check_id: &str, scenario: &str, grid: String, dt: f64) -> Self {
        Self {
            check_id: check_id.to_string(),
            anchor: anchor(check_id).to_string(),
            scenario: scenario.to_string(),
            grid,
            dt,
            applicable: false,
            passed: false,
            max_violation: 0.0,
            tolerance: 0.0,
            expected_fail: false,
            notes: String::new(),
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.passed = self.applicable && self.max_violation <= tolerance;
        self
    }

    pub fn verdict(&self) -> Verdict {
        match (self.applicable, self.passed, self.expected_fail) {
            (false, _, _) => Verdict::NotApplicable,
            (true, true, false) => Verdict::Pass,
            (true, false, false) => Verdict::Fail,
            (true, false, true) => Verdict::ExpectedFail,
            (true, true, true) => Verdict::UnexpectedPass,
        }
    }
}

fn grid_label(traj: &Trajectory) -> String {
    let g = &traj.grid;
    if g.dim() == 1 {
        format!("dim=1 nx={}", g.nx())
    } else {
        format!("dim=2 nx={} ny={}", g.nx(), g.ny())
    }
}

/// Slack `rel * |E_k| + c * dt^2` allowed per sample interval in the
/// monotonicity checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Slack {
    pub rel: f64,
    pub c: f64,
}

impl Default for Slack {
    fn default() -> Self {
        Self { rel: 1e-8, c: 0.0 }
    }
}

/// Largest `(E_{k+1} - E_k - rel |E_k| - c dt^2)_+` over consecutive samples.
pub fn monotone_excess(series: &[f64], slack: Slack, dt: f64) -> f64 {
    series
        .windows(2)
        .map(|w| w[1] - w[0] - slack.rel * w[0].abs() - slack.c * dt * dt)
        .fold(0.0, f64::max)
}

/// `c` from a run at `dt` and a rerun at `dt / 2` sampled at the same
/// times: an `O(dt^2)` excess shrinks fourfold and is absorbed, a
/// step-independent one cancels.
pub fn calibrate_c(coarse: &[f64], fine: &[f64], dt: f64, rel: f64) -> f64 {
    let raw = Slack { rel, c: 0.0 };
    let e1 = monotone_excess(coarse, raw, dt);
    let e2 = monotone_excess(fine, raw, 0.5 * dt);
    (4.0 / 3.0) * (e1 - e2).max(0.0) / (dt * dt)
}

/// Series checked by [`check_lyapunov`]: `E_p` at every sample.
pub fn lyapunov_series(traj: &Trajectory) -> Vec<f64> {
    traj.samples.iter().map(|r| r.lyapunov).collect()
}

/// Series checked by [`check_sublinear`]: the Lyapunov form `-F_p / p`.
pub fn sublinear_series(traj: &Trajectory) -> Vec<f64> {
    let p = traj.config.sublinear_p.unwrap_or(f64::NAN);
    traj.samples.iter().map(|r| -r.sublinear / p).collect()
}

/// Threshold on `||v0||_inf` below which the exponential weight is a
/// Lyapunov functional.
pub fn lyapunov_threshold(dim: usize) -> f64 {
    1.0 / (3.0 * (dim as f64).max(2.0))
}

pub fn check_mass(traj: &Trajectory) -> CheckReport {
    let m0 = traj.initial.mass;
    let sampled = traj
        .samples
        .iter()
        .map(|r| ((r.mass - m0) / m0).abs())
        .fold(0.0, f64::max);
    let drift = sampled.max(traj.extremes.max_mass_drift);
    CheckReport::new(
        "mass_conservation",
        traj,
        drift,
        1e-10,
        format!("m0={m0:.17e}"),
    )
}

pub fn check_comparison_principles(traj: &Trajectory) -> CheckReport {
    let e = traj.extremes;
    let s = traj.samples.iter();
    let min_u = s.clone().map(|r| r.u_min).fold(e.min_u, f64::min);
    let min_v = s.clone().map(|r| r.v_min).fold(e.min_v, f64::min);
    let max_v = s.clone().map(|r| r.v_max).fold(e.max_v, f64::max);
    let min_w = s.map(|r| r.w_min).fold(e.min_w, f64::min);
    let v0 = traj.initial.v_linf;
    let violation = [
        (-min_u).max(0.0),
        (-min_v).max(0.0),
        (max_v - v0).max(0.0),
        (-min_w).max(0.0),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    CheckReport::new(
        "comparison_principles",
        traj,
        violation,
        10.0 * traj.linear_tol,
        format!(
            "min_u={min_u:e} min_v={min_v:e} max_v-v0max={:e} min_w={min_w:e}",
            max_v - v0
        ),
    )
}

/// Monotone decay of `int u^p e^{gamma v^2}` under the smallness condition.
pub fn check_lyapunov(traj: &Trajectory, slack: Slack) -> CheckReport {
    let id = "lyapunov_small_v0";
    let v0 = traj.config.v0max;
    let bound = lyapunov_threshold(traj.grid.dim());
    if v0 > bound * (1.0 + 1e-12) {
        return CheckReport::not_applicable(
            id,
            traj,
            slack.rel,
            format!("v0max={v0} exceeds {bound}"),
        );
    }
    let excess = relative_excess(&lyapunov_series(traj), slack, traj.dt);
    CheckReport::new(
        id,
        traj,
        excess,
        slack.rel,
        format!("p={} c={:e} v0max={v0}", traj.config.lyapunov_p, slack.c),
    )
}

/// Cellwise sign of `g_phi(v)` for the exponential weight at every sample.
pub fn check_lyapunov_g_sign(traj: &Trajectory) -> CheckReport {
    let id = "lyapunov_g_sign";
    let v0 = traj.config.v0max;
    let g_max = traj
        .samples
        .iter()
        .map(|r| r.g_exp_max)
        .fold(f64::NEG_INFINITY, f64::max);
    let bound = lyapunov_threshold(traj.grid.dim());
    if v0 > bound * (1.0 + 1e-12) {
        return CheckReport::not_applicable(
            id,
            traj,
            0.0,
            format!("v0max={v0} exceeds {bound}; max g={g_max:e}"),
        );
    }
    CheckReport::new(id, traj, g_max.max(0.0), 0.0, format!("max g={g_max:e}"))
}

/// `(E_{k+1} - E_k - c dt^2)_+ / |E_k|`, compared against `slack.rel`.
pub fn relative_excess(series: &[f64], slack: Slack, dt: f64) -> f64 {
    series
        .windows(2)
        .map(|w| (w[1] - w[0] - slack.c * dt * dt) / w[0].abs().max(TINY))
        .fold(0.0, f64::max)
}

/// The sublinear functional and its dissipation budget; no smallness needed.
pub fn check_sublinear(traj: &Trajectory, slack: Slack) -> [CheckReport; 2] {
    let Some(p) = traj.config.sublinear_p else {
        let why = format!("no admissible exponent for v0max={}", traj.config.v0max);
        return [
            CheckReport::not_applicable("sublinear_monotone", traj, slack.rel, why.clone()),
            CheckReport::not_applicable("sublinear_budget", traj, 1e-6, why),
        ];
    };
    let excess = relative_excess(&sublinear_series(traj), slack, traj.dt);
    let monotone = CheckReport::new(
        "sublinear_monotone",
        traj,
        excess,
        slack.rel,
        format!("p={p} c={:e}", slack.c),
    );

    let phi_sup = Weight::Quadratic {
        v0max: traj.config.v0max,
    }
    .eval(0.0)
    .0;
    let i = &traj.initial;
    let rhs = 3.0 / ((1.0 - p) * p) * phi_sup * i.mass.powf(p) * i.volume.powf(1.0 - p);
    let lhs = traj.totals.sublinear_dissipation;
    let f_gain =
        traj.samples.last().map(|r| r.sublinear).unwrap_or(0.0) - traj.samples[0].sublinear;
    let budget = CheckReport::new(
        "sublinear_budget",
        traj,
        ((lhs - rhs) / rhs).max(0.0),
        1e-6,
        format!(
            "cum={lhs:e} bound={rhs:e} p(1-p)/3*cum={:e} F(T)-F(0)={f_gain:e}",
            p * (1.0 - p) / 3.0 * lhs
        ),
    );
    [monotone, budget]
}

/// Sup and `L^2` bounds of `w` in terms of `w0` and the history of `u`.
pub fn check_explicit_w_bounds(traj: &Trajectory) -> CheckReport {
    let i = &traj.initial;
    let delta = traj.delta;
    let mut worst_inf: f64 = 0.0;
    let mut worst_two: f64 = 0.0;
    for r in &traj.samples {
        let rhs_inf = i.w_linf + r.cumulative.sup_u_linf / delta;
        worst_inf = worst_inf.max((r.w_linf - rhs_inf) / rhs_inf.max(TINY));
        let rhs_two = i.w_l2 + (2.0 * delta).powf(-0.5) * r.cumulative.u_sq.sqrt();
        worst_two = worst_two.max((r.w_l2 - rhs_two) / rhs_two.max(TINY));
    }
    CheckReport::new(
        "explicit_w_bounds",
        traj,
        worst_inf.max(worst_two).max(0.0),
        1e-8,
        format!("rel excess inf={worst_inf:e} l2={worst_two:e}"),
    )
}

/// Cumulative space-time bounds on `v w`, `|grad v|^2` and `|grad u|^2/u^2`.
pub fn check_dissipation(traj: &Trajectory) -> CheckReport {
    let i = &traj.initial;
    let vw_rhs = i.v_integral;
    let gv_rhs = 0.5 * i.v_sq_integral;
    let fisher_rhs = traj
        .u_min_at_one
        .map(|m1| 2.0 * i.mass - 2.0 * i.volume * m1.ln() + 0.5 * i.v_sq_integral);
    let rel = |lhs: f64, rhs: f64| (lhs - rhs) / rhs.abs().max(TINY);
    let mut worst = [f64::NEG_INFINITY; 3];
    for r in &traj.samples {
        let c = &r.cumulative;
        worst[0] = worst[0].max(rel(c.cross_vw, vw_rhs));
        worst[1] = worst[1].max(rel(c.grad_v_sq, gv_rhs));
        if let (Some(rhs), true) = (fisher_rhs, r.t >= 1.0) {
            worst[2] = worst[2].max(rel(c.fisher, rhs));
        }
    }
    let t = &traj.totals;
    let mut notes = format!(
        "vw {:e}<={vw_rhs:e}; gradv {:e}<={gv_rhs:e}",
        t.cross_vw, t.grad_v_sq
    );
    match fisher_rhs {
        Some(rhs) => {
            let _ = write!(notes, "; fisher {:e}<={rhs:e}", t.fisher);
        }
        None => notes.push_str("; fisher skipped (T < 1)"),
    }
    let violation = worst.into_iter().fold(0.0, f64::max);
    CheckReport::new("dissipation_bounds", traj, violation, 1e-6, notes)
}

/// Final-state distances to the constant equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquilibriumTargets {
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

impl Default for EquilibriumTargets {
    fn default() -> Self {
        Self {
            u: 1e-3,
            v: 1e-4,
            w: 1e-3,
        }
    }
}

/// Reported violation is `max_i dist_i / target_i`, passing at `<= 1`.
pub fn check_equilibrium(traj: &Trajectory, targets: EquilibriumTargets) -> CheckReport {
    let last = traj.samples.last().expect("trajectory has a final sample");
    let ratio = (last.dist_u / targets.u)
        .max(last.dist_v / targets.v)
        .max(last.dist_w / targets.w);
    CheckReport::new(
        "equilibrium",
        traj,
        ratio,
        1.0,
        format!(
            "T={} dist_u={:e} dist_v={:e} dist_w={:e}",
            last.t, last.dist_u, last.dist_v, last.dist_w
        ),
    )
}

/// `||w - (mean u0/delta)(1 - e^{-delta t})||_inf` against the relaxation
/// of `w0` plus the weighted history of `||u - mean u0||_inf`.
///
/// The shifted variable is a difference of `O(||w||_inf)` quantities, so the
/// excess is measured relative to `max(bound, ||w||_inf)`; near equilibrium
/// the bound itself falls below the rounding of `w`.
pub fn check_shifted_w(traj: &Trajectory) -> CheckReport {
    let w0 = traj.initial.w_linf;
    let worst = traj
        .samples
        .iter()
        .map(|r| {
            let rhs = (-traj.delta * r.t).exp() * w0 + r.cumulative.w_tilde_bound;
            (r.w_tilde_linf - rhs) / rhs.max(r.w_linf).max(TINY)
        })
        .fold(0.0, f64::max);
    let last = traj.samples.last().expect("final sample");
    CheckReport::new(
        "shifted_w_bound",
        traj,
        worst,
        1e-8,
        format!(
            "final |w~|={:e} bound={:e}",
            last.w_tilde_linf, last.cumulative.w_tilde_bound
        ),
    )
}

/// Stored `w(T)` against the exponential quadrature of its Duhamel formula;
/// needs every step stored.
pub fn check_duhamel(traj: &Trajectory) -> CheckReport {
    let id = "duhamel_identity";
    let t = traj.final_state.t;
    match duhamel_w_residual(traj, traj.delta, t) {
        Ok(res) => CheckReport::new(id, traj, res, 1e-12, format!("T={t} steps={}", traj.steps)),
        Err(e) => CheckReport::not_applicable(id, traj, 1e-12, e.to_string()),
    }
}

/// Quantities with no falsifiable threshold, recorded for inspection only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observations {
    /// Least-squares slope of `-ln dist_v` over the second half of the run.
    pub decay_rate_v: f64,
    pub decay_rate_u: f64,
    pub decay_rate_w: f64,
    /// Range of the Gagliardo-Nirenberg ratio over all samples.
    pub gn_ratio_min: f64,
    pub gn_ratio_max: f64,
    pub grad_v_theta_max: f64,
    pub u_linf_max: f64,
}

pub fn observe(traj: &Trajectory) -> Observations {
    let s = &traj.samples;
    let tail = &s[s.len() / 2..];
    let rate = |f: fn(&crate::functionals::DiagnosticsRecord) -> f64| {
        let pts: Vec<(f64, f64)> = tail
            .iter()
            .filter(|r| f(r) > 1e-14)
            .map(|r| (r.t, f(r).ln()))
            .collect();
        -fit_slope(&pts)
    };
    let finite = |x: f64| x.is_finite();
    Observations {
        decay_rate_v: rate(|r| r.dist_v),
        decay_rate_u: rate(|r| r.dist_u),
        decay_rate_w: rate(|r| r.dist_w),
        gn_ratio_min: s
            .iter()
            .map(|r| r.gn_ratio)
            .filter(|x| finite(*x))
            .fold(f64::INFINITY, f64::min),
        gn_ratio_max: s
            .iter()
            .map(|r| r.gn_ratio)
            .filter(|x| finite(*x))
            .fold(f64::NEG_INFINITY, f64::max),
        grad_v_theta_max: s.iter().map(|r| r.grad_v_theta).fold(0.0, f64::max),
        u_linf_max: s.iter().map(|r| r.u_linf).fold(0.0, f64::max),
    }
}

fn fit_slope(pts: &[(f64, f64)]) -> f64 {
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let (mx, my) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| {
        (a + (x - mx) * (y - my), b + (x - mx) * (x - mx))
    });
    if sxx == 0.0 {
        f64::NAN
    } else {
        sxy / sxx
    }
}

/// Sorts by check id, then scenario, so emission order does not depend on
/// scheduling.
pub fn sort_reports(reports: &mut [CheckReport]) {
    reports.sort_by(|a, b| (&a.check_id, &a.scenario).cmp(&(&b.check_id, &b.scenario)));
}

pub fn any_failure(reports: &[CheckReport]) -> bool {
    reports.iter().any(|r| r.verdict().is_failure())
}

pub fn format_text(reports: &[CheckReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<24} {:<28} {:<16} {:>13} {:>11}  notes",
        "check_id", "scenario", "verdict", "violation", "tolerance"
    );
    for r in reports {
        let _ = writeln!(
            out,
            "{:<24} {:<28} {:<16} {:>13.4e} {:>11.1e}  {}",
            r.check_id,
            r.scenario,
            r.verdict().name(),
            r.max_violation,
            r.tolerance,
            r.notes
        );
    }
    out
}

/// `check_id | statement` for every known check.
pub fn traceability_table() -> String {
    let mut out = String::new();
    for (id, a) in CHECKS {
        let _ = writeln!(out, "{id:<24} | {a}");
    }
    out
}

pub const REPORT_HEADER: [&str; 9] = [
    "check_id",
    "scenario",
    "passed",
    "max_violation",
    "tolerance",
    "anchor",
    "verdict",
    "applicable",
    "expected_fail",
];

pub fn write_report_csv<W: Write>(reports: &[CheckReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(REPORT_HEADER)?;
    for r in reports {
        w.write_record([
            r.check_id.clone(),
            r.scenario.clone(),
            r.passed.to_string(),
            crate::output::fmt17(r.max_violation),
            crate::output::fmt17(r.tolerance),
            r.anchor.clone(),
            r.verdict().name().to_string(),
            r.applicable.to_string(),
            r.expected_fail.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::profile::Profile;
    use crate::stepper::{run, InitialData, ModelParams, RunOptions, StepConfig};

    fn traj(u: Profile, v: Profile, w: Profile, t: f64, dt: f64) -> Trajectory {
        let g = GridSpec::line(1.0, 32).unwrap();
        let p = ModelParams::new(1.0, g, InitialData { u, v, w }).unwrap();
        let cfg = StepConfig {
            dt,
            ..Default::default()
        };
        let opts = RunOptions {
            diagnostic_stride: 10,
            snapshot_stride: 1,
            ..Default::default()
        };
        run(&p, &cfg, t, &opts, &mut []).unwrap()
    }

    #[test]
    fn every_check_has_an_anchor_and_ids_are_sorted() {
        for w in CHECKS.windows(2) {
            assert!(w[0].0 < w[1].0);
        }
        assert!(CHECKS.iter().all(|(_, a)| !a.is_empty()));
    }

    #[test]
    fn constant_state_has_zero_mass_violation() {
        let t = traj(
            Profile::constant(1.0),
            Profile::constant(0.0),
            Profile::constant(1.0),
            1.0,
            0.01,
        );
        let r = check_mass(&t);
        assert_eq!(r.max_violation, 0.0);
        assert!(r.passed);
    }

    #[test]
    fn zero_signal_stays_zero() {
        let t = traj(
            Profile::cosine(1, 0.5, 1.0),
            Profile::constant(0.0),
            Profile::constant(0.1),
            1.0,
            0.01,
        );
        assert_eq!(t.extremes.max_v, 0.0);
        assert_eq!(t.extremes.min_v, 0.0);
        let r = check_comparison_principles(&t);
        assert_eq!(r.max_violation, 0.0);
        // int u^2 decays under pure diffusion
        let l = check_lyapunov(&t, Slack::default());
        assert!(l.applicable && l.passed, "{l:?}");
    }

    #[test]
    fn lyapunov_not_applicable_above_threshold() {
        let t = traj(
            Profile::cosine(1, 0.5, 1.0),
            Profile::cosine(1, 0.25, 0.25),
            Profile::constant(0.1),
            0.2,
            0.01,
        );
        let r = check_lyapunov(&t, Slack::default());
        assert!(!r.applicable);
        assert_eq!(r.verdict(), Verdict::NotApplicable);
        assert!(!r.verdict().is_failure());
    }

    #[test]
    fn w_bounds_for_constant_density() {
        // w = (m / delta)(1 - e^{-delta t}) <= m / delta
        let t = traj(
            Profile::constant(2.0),
            Profile::constant(0.0),
            Profile::constant(0.0),
            3.0,
            0.01,
        );
        let r = check_explicit_w_bounds(&t);
        assert!(r.passed, "{r:?}");
        let w = t.final_state.w.values()[0];
        assert!((w - 2.0 * (1.0 - (-3.0f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn dissipation_trivial_without_signal() {
        let t = traj(
            Profile::cosine(1, 0.5, 1.0),
            Profile::constant(0.0),
            Profile::constant(0.0),
            1.5,
            0.01,
        );
        let r = check_dissipation(&t);
        assert!(r.passed, "{r:?}");
        assert_eq!(t.totals.cross_vw, 0.0);
        assert_eq!(t.totals.grad_v_sq, 0.0);
    }

    #[test]
    fn homogeneous_state_relaxes_to_equilibrium() {
        let t = traj(
            Profile::constant(1.0),
            Profile::constant(0.0),
            Profile::constant(0.5),
            30.0,
            0.05,
        );
        let r = check_equilibrium(
            &t,
            EquilibriumTargets {
                u: 1e-12,
                v: 1e-12,
                w: 1e-12,
            },
        );
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn duhamel_and_shifted_w_hold_on_short_run() {
        let t = traj(
            Profile::cosine(1, 0.5, 1.0),
            Profile::cosine(1, 0.05, 0.05),
            Profile::constant(0.1),
            0.5,
            1e-3,
        );
        assert!(check_duhamel(&t).passed);
        assert!(check_shifted_w(&t).passed);
    }

    #[test]
    fn calibration_absorbs_quadratic_but_not_constant_excess() {
        let dt = 0.1;
        let coarse = [1.0, 1.0 + 0.5 * dt * dt, 1.0 + dt * dt];
        let fine = [1.0, 1.0 + 0.125 * dt * dt, 1.0 + 0.25 * dt * dt];
        let c = calibrate_c(&coarse, &fine, dt, 0.0);
        let slack = Slack { rel: 0.0, c };
        assert!(monotone_excess(&coarse, slack, dt) <= 1e-15);
        let constant = [1.0, 1.1, 1.2];
        let c = calibrate_c(&constant, &constant, dt, 0.0);
        assert_eq!(c, 0.0);
        assert!(monotone_excess(&constant, Slack { rel: 0.0, c }, dt) > 0.09);
    }

    #[test]
    fn verdicts_follow_expectation() {
        let t = traj(
            Profile::constant(1.0),
            Profile::constant(0.0),
            Profile::constant(1.0),
            0.1,
            0.01,
        );
        let mut r = check_mass(&t);
        assert_eq!(r.verdict(), Verdict::Pass);
        r.expected_fail = true;
        assert_eq!(r.verdict(), Verdict::UnexpectedPass);
        let r = r.with_tolerance(-1.0);
        assert_eq!(r.verdict(), Verdict::ExpectedFail);
        assert!(!any_failure(&[r]));
    }

    #[test]
    fn report_csv_has_fixed_header() {
        let t = traj(
            Profile::constant(1.0),
            Profile::constant(0.0),
            Profile::constant(1.0),
            0.1,
            0.01,
        );
        let mut buf = Vec::new();
        write_report_csv(&[check_mass(&t)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("check_id,scenario,passed,max_violation,tolerance,anchor"));
        assert_eq!(text.lines().count(), 2);
    }
}

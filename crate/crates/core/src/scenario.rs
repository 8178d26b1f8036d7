//! Scenario files.
//!
//! A scenario is a TOML document with the sections `[domain]`, `[model]`,
//! `[initial]`, `[numerics]` and `[checks]`. Only the domain, `delta` and
//! `t_final` are required; everything else falls back to the default
//! scenario. Unknown keys are rejected.
//!
//! ```toml
//! name = "default"
//!
//! [domain]
//! dim = 1
//! extents = [1.0]
//! nx = 256
//!
//! [model]
//! delta = 1.0
//! t_final = 50.0
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::ops::{AdvectionScheme, StencilConfig};
use crate::profile::Profile;
use crate::stepper::{InitialData, ModelParams, RunOptions, SchemeVariant, StepConfig};
use crate::verifier::{self, EquilibriumTargets};

/// Amplitude `a` of the default signal `v0 = a (1 + cos pi x) / 2`.
pub const DEFAULT_SIGNAL_AMPLITUDE: f64 = 1.0 / 6.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_name")]
    pub name: String,
    pub domain: Domain,
    pub model: Model,
    #[serde(default)]
    pub initial: Initial,
    #[serde(default)]
    pub numerics: Numerics,
    #[serde(default)]
    pub checks: Checks,
}

fn default_name() -> String {
    "scenario".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Domain {
    #[serde(default = "one")]
    pub dim: usize,
    pub extents: Vec<f64>,
    pub nx: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ny: Option<usize>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Model {
    pub delta: f64,
    pub t_final: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Initial {
    #[serde(default = "default_u")]
    pub u: Profile,
    #[serde(default = "default_v")]
    pub v: Profile,
    #[serde(default = "default_w")]
    pub w: Profile,
}

fn default_u() -> Profile {
    Profile::cosine(1, 0.5, 1.0)
}

fn default_v() -> Profile {
    let a = DEFAULT_SIGNAL_AMPLITUDE;
    Profile::cosine(1, 0.5 * a, 0.5 * a)
}

fn default_w() -> Profile {
    Profile::constant(0.1)
}

impl Default for Initial {
    fn default() -> Self {
        Self {
            u: default_u(),
            v: default_v(),
            w: default_w(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Numerics {
    pub dt: f64,
    pub cfl_safety: f64,
    pub advection_scheme: AdvectionScheme,
    pub linear_tol: f64,
    pub max_linear_iters: usize,
    pub dt_max: f64,
    pub amplification_factor: f64,
    pub variant: SchemeVariant,
    pub snapshot_stride: usize,
    pub diagnostic_stride: usize,
}

impl Default for Numerics {
    fn default() -> Self {
        let s = StepConfig::default();
        let r = RunOptions::default();
        Self {
            dt: s.dt,
            cfl_safety: s.cfl_safety,
            advection_scheme: s.stencil.advection_scheme,
            linear_tol: s.linear_tol,
            max_linear_iters: s.max_linear_iters,
            dt_max: s.dt_max,
            amplification_factor: s.amplification_factor,
            variant: s.variant,
            snapshot_stride: r.snapshot_stride,
            diagnostic_stride: r.diagnostic_stride,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Checks {
    /// Check ids to run.
    pub enabled: Vec<String>,
    /// Check ids this scenario is built to fail.
    pub expected_fail: Vec<String>,
    /// Per-check tolerance overrides.
    pub tolerance: BTreeMap<String, f64>,
    pub equilibrium: EquilibriumTargets,
    /// Exponent of the exponential-weight functional; `max{2, n}` if absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lyapunov_p: Option<f64>,
    /// Exponent of the sublinear functional; `p0 / 2` if absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sublinear_p: Option<f64>,
    /// Rerun at `dt / 2` to calibrate the `c dt^2` slack when needed.
    pub calibrate_slack: bool,
}

impl Default for Checks {
    fn default() -> Self {
        Self {
            enabled: verifier::CHECKS
                .iter()
                .map(|(id, _)| id.to_string())
                .collect(),
            expected_fail: Vec::new(),
            tolerance: BTreeMap::new(),
            equilibrium: EquilibriumTargets::default(),
            lyapunov_p: None,
            sublinear_p: None,
            calibrate_slack: true,
        }
    }
}

impl Default for ScenarioConfig {
    /// The reference scenario on the unit interval.
    fn default() -> Self {
        Self {
            name: "default".into(),
            domain: Domain {
                dim: 1,
                extents: vec![1.0],
                nx: 256,
                ny: None,
            },
            model: Model {
                delta: 1.0,
                t_final: 50.0,
            },
            initial: Initial::default(),
            numerics: Numerics::default(),
            checks: Checks::default(),
        }
    }
}

impl ScenarioConfig {
    /// Default scenario with signal amplitude `a`.
    pub fn with_signal_amplitude(a: f64) -> Self {
        let mut c = Self::default();
        c.initial.v = Profile::cosine(1, 0.5 * a, 0.5 * a);
        c
    }

    pub fn grid(&self) -> Result<GridSpec> {
        let d = &self.domain;
        match d.dim {
            1 => GridSpec::line(d.extents[0], d.nx),
            _ => GridSpec::rect(d.extents[0], d.extents[1], d.nx, d.ny.unwrap_or(0)),
        }
    }

    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(
            self.model.delta,
            self.grid()?,
            InitialData {
                u: self.initial.u.clone(),
                v: self.initial.v.clone(),
                w: self.initial.w.clone(),
            },
        )
    }

    pub fn step_config(&self) -> StepConfig {
        let n = &self.numerics;
        StepConfig {
            dt: n.dt,
            stencil: StencilConfig {
                advection_scheme: n.advection_scheme,
            },
            linear_tol: n.linear_tol,
            max_linear_iters: n.max_linear_iters,
            cfl_safety: n.cfl_safety,
            dt_max: n.dt_max,
            amplification_factor: n.amplification_factor,
            variant: n.variant,
        }
    }

    pub fn run_options(&self) -> RunOptions {
        RunOptions {
            name: self.name.clone(),
            diagnostic_stride: self.numerics.diagnostic_stride,
            snapshot_stride: self.numerics.snapshot_stride,
            lyapunov_p: self.checks.lyapunov_p,
            sublinear_p: self.checks.sublinear_p,
        }
    }

    pub fn tolerance(&self, check_id: &str) -> Option<f64> {
        self.checks.tolerance.get(check_id).copied()
    }

    pub fn is_enabled(&self, check_id: &str) -> bool {
        self.checks.enabled.iter().any(|c| c == check_id)
    }

    pub fn expects_failure(&self, check_id: &str) -> bool {
        self.checks.expected_fail.iter().any(|c| c == check_id)
    }

    /// Resolves relative snapshot paths against `base`.
    fn rebase(&mut self, base: &Path) {
        for p in [
            &mut self.initial.u,
            &mut self.initial.v,
            &mut self.initial.w,
        ] {
            if let Profile::FromFile { path, .. } = p {
                if path.is_relative() {
                    *path = base.join(&*path);
                }
            }
        }
    }
}

/// Parses and validates a scenario; relative snapshot paths resolve
/// against the working directory.
pub fn load_config(text: &str) -> Result<ScenarioConfig> {
    let cfg = parse(text)?;
    validate(text, &cfg)?;
    Ok(cfg)
}

/// Like [`load_config`], resolving relative snapshot paths against the
/// file's directory.
pub fn load_config_file(path: impl AsRef<Path>) -> Result<ScenarioConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let mut cfg = parse(&text)?;
    cfg.rebase(path.parent().unwrap_or(Path::new(".")));
    validate(&text, &cfg)?;
    Ok(cfg)
}

/// TOML text that [`load_config`] reads back to the same config.
pub fn dump(cfg: &ScenarioConfig) -> String {
    toml::to_string(cfg).expect("scenario config serializes")
}

fn parse(text: &str) -> Result<ScenarioConfig> {
    toml::from_str(text).map_err(|e| {
        let line = e.span().map(|s| line_at(text, s.start)).unwrap_or(0);
        let msg = e.message().trim().to_string();
        let key = backticked(&msg)
            .or_else(|| key_on_line(text, line))
            .unwrap_or_default();
        Error::Config {
            line,
            key,
            reason: msg,
        }
    })
}

fn line_at(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn backticked(msg: &str) -> Option<String> {
    let start = msg.find('`')? + 1;
    let len = msg[start..].find('`')?;
    Some(msg[start..start + len].to_string())
}

fn key_on_line(text: &str, line: usize) -> Option<String> {
    let l = text.lines().nth(line.checked_sub(1)?)?;
    let (k, _) = l.split_once('=')?;
    Some(k.trim().to_string())
}

/// Line of `key` inside `[section]`, 0 when the key was defaulted.
fn locate(text: &str, section: &str, key: &str) -> usize {
    let mut current = String::new();
    for (i, raw) in text.lines().enumerate() {
        let l = raw.trim();
        if let Some(h) = l.strip_prefix('[').and_then(|h| h.strip_suffix(']')) {
            current = h.trim().to_string();
            // dotted headers such as [initial.u] belong to the key `u` of [initial]
            if current == format!("{section}.{key}") || (section.is_empty() && current == key) {
                return i + 1;
            }
            continue;
        }
        if let Some((k, _)) = l.split_once('=') {
            if current == section && k.trim() == key {
                return i + 1;
            }
        }
    }
    0
}

fn validate(text: &str, cfg: &ScenarioConfig) -> Result<()> {
    let fail = |section: &str, key: &str, reason: String| Error::Config {
        line: locate(text, section, key),
        key: if section.is_empty() {
            key.to_string()
        } else {
            format!("{section}.{key}")
        },
        reason,
    };
    let d = &cfg.domain;
    if !(d.dim == 1 || d.dim == 2) {
        return Err(fail(
            "domain",
            "dim",
            format!("must be 1 or 2, got {}", d.dim),
        ));
    }
    if d.extents.len() != d.dim {
        return Err(fail(
            "domain",
            "extents",
            format!("expected {} extents, got {}", d.dim, d.extents.len()),
        ));
    }
    if d.dim == 2 && d.ny.is_none() {
        return Err(fail("domain", "ny", "required in two dimensions".into()));
    }
    if d.dim == 1 && d.ny.is_some() {
        return Err(fail("domain", "ny", "only valid in two dimensions".into()));
    }
    cfg.grid()
        .map_err(|e| fail("domain", "nx", e.to_string()))?;

    let m = &cfg.model;
    if !(m.delta > 0.0 && m.delta.is_finite()) {
        return Err(fail(
            "model",
            "delta",
            format!("must be positive, got {}", m.delta),
        ));
    }
    if !(m.t_final > 0.0 && m.t_final.is_finite()) {
        return Err(fail(
            "model",
            "t_final",
            format!("must be positive, got {}", m.t_final),
        ));
    }

    if let Err(Error::InvalidParameter { name, reason }) = cfg.step_config().validate() {
        return Err(fail("numerics", name, reason));
    }

    let c = &cfg.checks;
    for (key, ids) in [("enabled", &c.enabled), ("expected_fail", &c.expected_fail)] {
        if let Some(bad) = ids.iter().find(|id| !verifier::is_known(id)) {
            return Err(fail("checks", key, format!("unknown check id `{bad}`")));
        }
    }
    for (id, tol) in &c.tolerance {
        if !verifier::is_known(id) {
            return Err(fail(
                "checks.tolerance",
                id,
                format!("unknown check id `{id}`"),
            ));
        }
        if !(*tol >= 0.0) {
            return Err(fail(
                "checks.tolerance",
                id,
                format!("must be nonnegative, got {tol}"),
            ));
        }
    }
    let e = &c.equilibrium;
    for (key, v) in [("u", e.u), ("v", e.v), ("w", e.w)] {
        if !(v > 0.0) {
            return Err(fail(
                "checks.equilibrium",
                key,
                format!("must be positive, got {v}"),
            ));
        }
    }
    if let Some(p) = c.lyapunov_p {
        if !(p > 1.0) {
            return Err(fail(
                "checks",
                "lyapunov_p",
                format!("must exceed 1, got {p}"),
            ));
        }
    }
    if let Some(p) = c.sublinear_p {
        if !(p > 0.0 && p < 1.0) {
            return Err(fail(
                "checks",
                "sublinear_p",
                format!("must lie in (0, 1), got {p}"),
            ));
        }
    }

    let grid = cfg.grid()?;
    for (key, p) in [
        ("u", &cfg.initial.u),
        ("v", &cfg.initial.v),
        ("w", &cfg.initial.w),
    ] {
        let f = p
            .generate(grid, key)
            .map_err(|e| fail("initial", key, e.to_string()))?;
        if key == "u" && !(f.integrate() > 0.0) {
            return Err(fail(
                "initial",
                key,
                "initial density must have positive mass".into(),
            ));
        }
    }
    Ok(())
}

/// Scenario files of a suite: `path` itself, or every `*.toml` inside it
/// in name order.
pub fn suite_files(path: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let path = path.as_ref();
    if !path.is_dir() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files = Vec::new();
    for entry in std::fs::read_dir(path)? {
        let p = entry?.path();
        if p.extension().is_some_and(|e| e == "toml") {
            files.push(p);
        }
    }
    files.sort();
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str =
        "[domain]\nextents = [1.0]\nnx = 64\n\n[model]\ndelta = 1.0\nt_final = 2.0\n";

    #[test]
    fn minimal_config_gets_defaults() {
        let c = load_config(MINIMAL).unwrap();
        assert_eq!(c.domain.dim, 1);
        assert_eq!(c.numerics, Numerics::default());
        assert_eq!(c.initial, Initial::default());
        assert_eq!(c.checks.enabled.len(), verifier::CHECKS.len());
        assert_eq!(c.step_config().dt, 2e-4);
    }

    #[test]
    fn negative_delta_names_key_and_line() {
        let text = MINIMAL.replace("delta = 1.0", "delta = -1.0");
        match load_config(&text) {
            Err(Error::Config { line, key, .. }) => {
                assert_eq!(key, "model.delta");
                assert_eq!(line, 6);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_key_is_rejected_with_line() {
        let text = format!("{MINIMAL}\n[numerics]\ndt = 1e-3\nbogus = 3\n");
        match load_config(&text) {
            Err(Error::Config { line, key, .. }) => {
                assert_eq!(key, "bogus");
                assert_eq!(line, 11);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_check_id_is_rejected() {
        let text = format!("{MINIMAL}\n[checks]\nexpected_fail = [\"nope\"]\n");
        let err = load_config(&text).unwrap_err().to_string();
        assert!(
            err.contains("checks.expected_fail") && err.contains("nope"),
            "{err}"
        );
    }

    #[test]
    fn profile_errors_point_at_initial_section() {
        let text = format!("{MINIMAL}\n[initial.v]\nkind = \"cosine_mode\"\nk = 1\namplitude = 2.0\nbaseline = 1.0\n");
        match load_config(&text) {
            Err(Error::Config { line, key, .. }) => {
                assert_eq!(key, "initial.v");
                assert_eq!(line, 9);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dump_round_trips() {
        for cfg in [ScenarioConfig::default(), load_config(MINIMAL).unwrap()] {
            let again = load_config(&dump(&cfg)).unwrap();
            assert_eq!(again, cfg);
        }
        let mut c = ScenarioConfig::default();
        c.domain = Domain {
            dim: 2,
            extents: vec![1.0, 0.5],
            nx: 16,
            ny: Some(8),
        };
        c.checks.tolerance.insert("mass_conservation".into(), 1e-9);
        c.checks.sublinear_p = Some(0.2);
        c.initial.u = Profile::Gaussian {
            center: vec![0.5, 0.25],
            width: 0.1,
            amplitude: 1.0,
            baseline: 0.5,
        };
        assert_eq!(load_config(&dump(&c)).unwrap(), c);
    }

    #[test]
    fn default_scenario_matches_reference_setup() {
        let c = ScenarioConfig::default();
        let s = c.params().unwrap().initial_state().unwrap();
        let [x, _] = s.u.grid().center(0);
        let a = DEFAULT_SIGNAL_AMPLITUDE;
        let expect = a * (1.0 + (std::f64::consts::PI * x).cos()) / 2.0;
        assert!((s.v.values()[0] - expect).abs() < 1e-16);
        assert_eq!(c.model.t_final, 50.0);
        assert_eq!(c.domain.nx, 256);
    }

    #[test]
    fn two_dimensional_domain_needs_ny() {
        let text = MINIMAL.replace("extents = [1.0]", "dim = 2\nextents = [1.0, 1.0]");
        let err = load_config(&text).unwrap_err().to_string();
        assert!(err.contains("domain.ny"), "{err}");
    }
}

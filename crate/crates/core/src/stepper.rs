//! IMEX time stepping.
//!
//! One step `t_n -> t_n + dt`:
//!
//! 1. `u* = u - dt div(u grad v)` explicitly, then `(I - dt Delta) u' = u*`;
//! 2. `(I - dt Delta + dt diag(w)) v' = v` with `w` frozen at `t_n`;
//! 3. `w' = e^{-delta dt} w + (1 - e^{-delta dt}) / delta * u`, the exact
//!    flow of `w_t = -delta w + u` with `u` frozen at `t_n`.
//!
//! Both elliptic solves use unpreconditioned conjugate gradients started
//! from the right-hand side. For the pure diffusion solve every Krylov
//! direction then has zero sum, so the total of `u` is carried over to
//! rounding.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{DiagnosticsRecord, StepContribution, Trajectory};
use crate::grid::{Field, GridSpec};
use crate::ops::{self, AdvectionScheme, StencilConfig};
use crate::profile::Profile;

/// Guard added to the slope in [`cfl_dt`].
const CFL_EPS: f64 = 1e-30;

/// Initial-data descriptors for the three components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialData {
    pub u: Profile,
    pub v: Profile,
    pub w: Profile,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    /// Decay rate of the absorbent `w`.
    pub delta: f64,
    pub grid: GridSpec,
    pub initial: InitialData,
}

impl ModelParams {
    pub fn new(delta: f64, grid: GridSpec, initial: InitialData) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::param(
                "delta",
                format!("must be positive, got {delta}"),
            ));
        }
        Ok(Self {
            delta,
            grid,
            initial,
        })
    }

    /// Generates `(u0, v0, w0)` at `t = 0`.
    pub fn initial_state(&self) -> Result<State> {
        let s = State::new(
            self.initial.u.generate(self.grid, "u")?,
            self.initial.v.generate(self.grid, "v")?,
            self.initial.w.generate(self.grid, "w")?,
        );
        if !(s.u.integrate() > 0.0) {
            return Err(Error::param(
                "u0",
                "initial density must have positive mass",
            ));
        }
        Ok(s)
    }
}

/// `(u, v, w)` at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub u: Field,
    pub v: Field,
    pub w: Field,
    pub t: f64,
}

impl State {
    pub fn new(u: Field, v: Field, w: Field) -> Self {
        Self { u, v, w, t: 0.0 }
    }

    pub fn at(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    pub fn grid(&self) -> &GridSpec {
        self.u.grid()
    }

    fn check(&self) -> Result<()> {
        self.u.same_grid(&self.v)?;
        self.u.same_grid(&self.w)?;
        if !(self.u.is_finite() && self.v.is_finite() && self.w.is_finite()) {
            return Err(Error::NonFinite("state"));
        }
        Ok(())
    }
}

/// Test doubles that break one structural property of the scheme on purpose.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeVariant {
    #[default]
    Standard,
    /// Transport in the non-divergence form `u Delta v + grad u . grad v`.
    NonConservativeTransport,
    /// Absorption `-v w` taken explicitly before the diffusion solve.
    ExplicitAbsorption,
}

impl SchemeVariant {
    pub fn name(&self) -> &'static str {
        match self {
            SchemeVariant::Standard => "standard",
            SchemeVariant::NonConservativeTransport => "non_conservative_transport",
            SchemeVariant::ExplicitAbsorption => "explicit_absorption",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepConfig {
    pub dt: f64,
    pub stencil: StencilConfig,
    /// Relative residual bound `||r||_2 <= tol ||rhs||_2` for each solve.
    pub linear_tol: f64,
    pub max_linear_iters: usize,
    pub cfl_safety: f64,
    /// Upper clamp for [`cfl_dt`] when the signal is flat.
    pub dt_max: f64,
    /// Abort a run once `||u||_inf` exceeds this multiple of its initial value.
    pub amplification_factor: f64,
    pub variant: SchemeVariant,
}

impl Default for StepConfig {
    fn default() -> Self {
        Self {
            dt: 2e-4,
            stencil: StencilConfig::default(),
            linear_tol: 1e-12,
            max_linear_iters: 10_000,
            cfl_safety: 0.9,
            dt_max: 1.0,
            amplification_factor: 1e6,
            variant: SchemeVariant::Standard,
        }
    }
}

impl StepConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::param(
                "dt",
                format!("must be positive, got {}", self.dt),
            ));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(Error::param(
                "cfl_safety",
                format!("must lie in (0, 1], got {}", self.cfl_safety),
            ));
        }
        if !(self.linear_tol > 0.0 && self.linear_tol < 1.0) {
            return Err(Error::param(
                "linear_tol",
                format!("must lie in (0, 1), got {}", self.linear_tol),
            ));
        }
        if self.max_linear_iters == 0 {
            return Err(Error::param("max_linear_iters", "must be positive"));
        }
        if !(self.dt_max > 0.0) {
            return Err(Error::param("dt_max", "must be positive"));
        }
        if !(self.amplification_factor > 1.0) {
            return Err(Error::param("amplification_factor", "must exceed 1"));
        }
        Ok(())
    }
}

/// `x -> (I - dt Delta + dt diag(a)) x`
struct Helmholtz<'a> {
    grid: &'a GridSpec,
    dt: f64,
    absorb: Option<&'a [f64]>,
}

impl Helmholtz<'_> {
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        ops::laplacian_into(self.grid, x, out);
        let dt = self.dt;
        match self.absorb {
            Some(a) => {
                for ((o, xi), ai) in out.iter_mut().zip(x).zip(a) {
                    *o = xi - dt * *o + dt * ai * xi;
                }
            }
            None => {
                for (o, xi) in out.iter_mut().zip(x) {
                    *o = xi - dt * *o;
                }
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `(I - dt Delta_h + dt diag(absorb)) x = rhs` by conjugate gradients.
pub fn solve_helmholtz(
    rhs: &Field,
    dt: f64,
    absorb: Option<&Field>,
    linear_tol: f64,
    max_iters: usize,
) -> Result<Field> {
    if let Some(a) = absorb {
        rhs.same_grid(a)?;
        if a.min() < 0.0 {
            return Err(Error::param("absorb", "must be nonnegative"));
        }
    }
    if !(dt >= 0.0) {
        return Err(Error::param("dt", format!("must be nonnegative, got {dt}")));
    }
    let op = Helmholtz {
        grid: rhs.grid(),
        dt,
        absorb: absorb.map(|a| a.values()),
    };
    let b = rhs.values();
    let n = b.len();
    let b_norm = dot(b, b).sqrt();
    if b_norm == 0.0 {
        return Ok(Field::zeros(*rhs.grid()));
    }
    let target = linear_tol * b_norm;

    let mut x = b.to_vec();
    let mut r = vec![0.0; n];
    let mut ap = vec![0.0; n];
    let mut iters = 0;
    // outer loop re-derives the true residual so recurrence drift cannot
    // report convergence that the iterate does not have
    loop {
        op.apply(&x, &mut ap);
        for ((ri, bi), ai) in r.iter_mut().zip(b).zip(&ap) {
            *ri = bi - ai;
        }
        let mut rr = dot(&r, &r);
        if rr.sqrt() <= target {
            return Ok(Field::from_raw(*rhs.grid(), x));
        }
        let mut p = r.clone();
        loop {
            if iters >= max_iters {
                return Err(Error::SolverDivergence {
                    iterations: iters,
                    residual: rr.sqrt() / b_norm,
                });
            }
            iters += 1;
            op.apply(&p, &mut ap);
            let alpha = rr / dot(&p, &ap);
            for ((xi, ri), (pi, ai)) in x.iter_mut().zip(r.iter_mut()).zip(p.iter().zip(&ap)) {
                *xi += alpha * pi;
                *ri -= alpha * ai;
            }
            let rr_new = dot(&r, &r);
            if rr_new.sqrt() <= target {
                break;
            }
            let beta = rr_new / rr;
            for (pi, ri) in p.iter_mut().zip(&r) {
                *pi = ri + beta * *pi;
            }
            rr = rr_new;
        }
    }
}

/// Positivity-safe step bound for the explicit transport,
/// `h / (2 dim max|grad v|_face + eps)`, clamped to `dt_max`.
pub fn cfl_dt(s: &State, dt_max: f64) -> f64 {
    let g = s.grid();
    let slope = ops::max_face_slope(&s.v);
    (g.spacing() / (2.0 * g.dim() as f64 * slope + CFL_EPS)).min(dt_max)
}

/// Non-divergence transport `u Delta v + grad u . grad v` with centred
/// differences; only used by [`SchemeVariant::NonConservativeTransport`].
fn nonconservative_transport(u: &Field, v: &Field) -> Field {
    let grid = u.grid();
    let (nx, ny, h) = (grid.nx(), grid.ny(), grid.spacing());
    let lap = ops::laplacian_neumann(v);
    let (uu, vv) = (u.values(), v.values());
    let mut out = vec![0.0; uu.len()];
    for j in 0..ny {
        for i in 0..nx {
            let k = j * nx + i;
            let mut dot = 0.0;
            let xm = if i > 0 { k - 1 } else { k };
            let xp = if i + 1 < nx { k + 1 } else { k };
            dot += (uu[xp] - uu[xm]) * (vv[xp] - vv[xm]);
            if grid.dim() == 2 {
                let ym = if j > 0 { k - nx } else { k };
                let yp = if j + 1 < ny { k + nx } else { k };
                dot += (uu[yp] - uu[ym]) * (vv[yp] - vv[ym]);
            }
            out[k] = uu[k] * lap.values()[k] + dot / (4.0 * h * h);
        }
    }
    Field::from_raw(*grid, out)
}

/// Advances `s` by `dt` without the step-size check.
fn advance(s: &State, delta: f64, cfg: &StepConfig, dt: f64) -> Result<State> {
    let grid = *s.grid();
    let transport = match cfg.variant {
        SchemeVariant::NonConservativeTransport => nonconservative_transport(&s.u, &s.v),
        _ => ops::chemotaxis_divergence(&s.u, &s.v, cfg.stencil)?,
    };
    let u_star = Field::from_raw(
        grid,
        s.u.values()
            .iter()
            .zip(transport.values())
            .map(|(u, d)| u - dt * d)
            .collect(),
    );
    let u = solve_helmholtz(&u_star, dt, None, cfg.linear_tol, cfg.max_linear_iters)?;

    let v = match cfg.variant {
        SchemeVariant::ExplicitAbsorption => {
            let rhs = s.v.zip_map(&s.w, |v, w| v - dt * v * w)?;
            solve_helmholtz(&rhs, dt, None, cfg.linear_tol, cfg.max_linear_iters)?
        }
        _ => solve_helmholtz(&s.v, dt, Some(&s.w), cfg.linear_tol, cfg.max_linear_iters)?,
    };

    let decay = (-delta * dt).exp();
    let gain = -(-delta * dt).exp_m1() / delta;
    let w = s.w.zip_map(&s.u, |w, u| decay * w + gain * u)?;

    let next = State {
        u,
        v,
        w,
        t: s.t + dt,
    };
    next.check()?;
    Ok(next)
}

/// One step of size `cfg.dt`; rejects steps beyond the transport bound.
pub fn step(s: &State, params: &ModelParams, cfg: &StepConfig) -> Result<State> {
    cfg.validate()?;
    s.check()?;
    let limit = cfl_dt(s, f64::INFINITY) * cfg.cfl_safety;
    if cfg.dt > limit * (1.0 + 1e-12) {
        return Err(Error::Cfl { dt: cfg.dt, limit });
    }
    advance(s, params.delta, cfg, cfg.dt)
}

/// Output cadence of [`run`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    pub name: String,
    /// Record diagnostics every this many steps; 0 records only both ends.
    pub diagnostic_stride: usize,
    /// Store full states every this many steps; 0 stores only both ends.
    pub snapshot_stride: usize,
    /// Overrides the exponent of the exponential-weight functional.
    #[serde(default)]
    pub lyapunov_p: Option<f64>,
    /// Overrides the exponent of the sublinear functional.
    #[serde(default)]
    pub sublinear_p: Option<f64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            name: "run".into(),
            diagnostic_stride: 50,
            snapshot_stride: 0,
            lyapunov_p: None,
            sublinear_p: None,
        }
    }
}

pub type Observer<'a> = &'a mut dyn FnMut(&State, &DiagnosticsRecord);

/// Integrates from the generated initial data to `t_final`.
pub fn run(
    params: &ModelParams,
    cfg: &StepConfig,
    t_final: f64,
    opts: &RunOptions,
    observers: &mut [Observer<'_>],
) -> Result<Trajectory> {
    run_from(
        params.initial_state()?,
        params.delta,
        cfg,
        t_final,
        opts,
        observers,
    )
}

/// Integrates from an explicit initial state.
pub fn run_from(
    initial: State,
    delta: f64,
    cfg: &StepConfig,
    t_final: f64,
    opts: &RunOptions,
    observers: &mut [Observer<'_>],
) -> Result<Trajectory> {
    cfg.validate()?;
    initial.check()?;
    if !(t_final > initial.t) {
        return Err(Error::param(
            "T",
            format!("final time {t_final} must exceed {}", initial.t),
        ));
    }
    if !(delta > 0.0) {
        return Err(Error::param(
            "delta",
            format!("must be positive, got {delta}"),
        ));
    }

    let mut traj = Trajectory::new(opts.name.clone(), &initial, delta, cfg.dt, cfg.linear_tol);
    traj.snapshot_stride = opts.snapshot_stride;
    if let Some(p) = opts.lyapunov_p {
        if !(p > 1.0) {
            return Err(Error::param(
                "lyapunov_p",
                format!("must exceed 1, got {p}"),
            ));
        }
        traj.config.lyapunov_p = p;
    }
    if let Some(p) = opts.sublinear_p {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::param(
                "sublinear_p",
                format!("must lie in (0, 1), got {p}"),
            ));
        }
        traj.config.sublinear_p = Some(p);
    }
    let u0_sup = initial.u.linf_norm();
    let mass0 = traj.initial.mass;

    let emit = |traj: &mut Trajectory, s: &State, step: usize, observers: &mut [Observer<'_>]| {
        let rec = *traj.record(s, step);
        for obs in observers.iter_mut() {
            obs(s, &rec);
        }
    };

    emit(&mut traj, &initial, 0, observers);
    traj.snapshots.push(initial.clone());

    let mut state = initial;
    let mut n = 0usize;
    loop {
        let remaining = t_final - state.t;
        let mut dt = cfg.dt.min(cfl_dt(&state, cfg.dt_max) * cfg.cfl_safety);
        // absorbs the rounding drift of the accumulated time
        let last = remaining <= dt * (1.0 + 1e-6);
        if last {
            dt = remaining;
        }
        let mut next = advance(&state, delta, cfg, dt)?;
        if last {
            next.t = t_final;
        }
        n += 1;

        traj.accumulate(&StepContribution::evaluate(&state, &next, &traj.config));
        traj.extremes.observe(&next, mass0);
        if traj.u_min_at_one.is_none() && next.t >= 1.0 - 1e-12 {
            traj.u_min_at_one = Some(next.u.min());
        }

        let sup = next.u.linf_norm();
        if sup > cfg.amplification_factor * u0_sup {
            return Err(Error::Amplification {
                t: next.t,
                factor: sup / u0_sup,
            });
        }

        if last || (opts.diagnostic_stride > 0 && n.is_multiple_of(opts.diagnostic_stride)) {
            emit(&mut traj, &next, n, observers);
        }
        if last || (opts.snapshot_stride > 0 && n.is_multiple_of(opts.snapshot_stride)) {
            traj.snapshots.push(next.clone());
        }
        state = next;
        if last {
            break;
        }
    }
    // the final sup also enters bounds that look at u up to T
    traj.totals.sup_u_linf = traj.totals.sup_u_linf.max(state.u.linf_norm());
    traj.steps = n;
    traj.final_state = state;
    Ok(traj)
}

impl AdvectionScheme {
    pub fn config(self) -> StencilConfig {
        StencilConfig {
            advection_scheme: self,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn line(nx: usize) -> GridSpec {
        GridSpec::line(1.0, nx).unwrap()
    }

    fn cfg(dt: f64) -> StepConfig {
        StepConfig {
            dt,
            ..Default::default()
        }
    }

    #[test]
    fn helmholtz_constant_rhs_is_fixed_point() {
        let g = line(20);
        let x = solve_helmholtz(&Field::constant(g, 2.5), 0.3, None, 1e-12, 100).unwrap();
        for v in x.values() {
            assert_relative_eq!(*v, 2.5, epsilon = 1e-13);
        }
    }

    #[test]
    fn helmholtz_eigenfield() {
        let (nx, len, dt) = (64, 2.0, 0.01);
        let g = GridSpec::line(len, nx).unwrap();
        let h = g.spacing();
        for k in [1, 3, 7] {
            let f = Field::from_fn(g, |x, _| (k as f64 * PI * x / len).cos());
            let lam = (4.0 / (h * h)) * (k as f64 * PI * h / (2.0 * len)).sin().powi(2);
            let x = solve_helmholtz(&f, dt, None, 1e-13, 1000).unwrap();
            for (a, b) in x.values().iter().zip(f.values()) {
                assert!((a - b / (1.0 + dt * lam)).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn helmholtz_constant_absorption() {
        let g = GridSpec::rect(1.0, 1.0, 8, 8).unwrap();
        let a = 3.0;
        let dt = 0.05;
        let x = solve_helmholtz(
            &Field::constant(g, 1.0),
            dt,
            Some(&Field::constant(g, a)),
            1e-13,
            100,
        )
        .unwrap();
        for v in x.values() {
            assert_relative_eq!(*v, 1.0 / (1.0 + dt * a), epsilon = 1e-12);
        }
    }

    #[test]
    fn helmholtz_preserves_total_without_absorption() {
        let g = GridSpec::rect(1.0, 1.0, 16, 16).unwrap();
        let rhs = Field::from_fn(g, |x, y| 1.0 + (7.0 * x).sin() * y + x * x);
        let x = solve_helmholtz(&rhs, 0.1, None, 1e-12, 1000).unwrap();
        assert!((x.integrate() - rhs.integrate()).abs() <= 1e-14 * rhs.integrate().abs() * 10.0);
    }

    #[test]
    fn helmholtz_reports_non_convergence() {
        let g = line(64);
        let rhs = Field::from_fn(g, |x, _| (9.0 * x).sin());
        assert!(matches!(
            solve_helmholtz(&rhs, 10.0, None, 1e-14, 2),
            Err(Error::SolverDivergence { .. })
        ));
    }

    #[test]
    fn cfl_examples() {
        let g = GridSpec::line(1.0, 10).unwrap();
        let flat = State::new(
            Field::constant(g, 1.0),
            Field::constant(g, 0.4),
            Field::zeros(g),
        );
        assert_eq!(cfl_dt(&flat, 0.7), 0.7);
        // slope of v = x is 1 on every face
        let ramp = State::new(
            Field::constant(g, 1.0),
            Field::from_fn(g, |x, _| x),
            Field::zeros(g),
        );
        assert_relative_eq!(cfl_dt(&ramp, 1.0), 0.05, epsilon = 1e-12);
    }

    #[test]
    fn cfl_halves_when_signal_doubles() {
        let g = GridSpec::rect(1.0, 1.0, 12, 12).unwrap();
        let v = Field::from_fn(g, |x, y| (3.0 * x).sin() * (2.0 * y).cos() + 1.0);
        let s1 = State::new(Field::constant(g, 1.0), v.clone(), Field::zeros(g));
        let s2 = State::new(Field::constant(g, 1.0), v.map(|x| 2.0 * x), Field::zeros(g));
        assert_relative_eq!(
            cfl_dt(&s2, 10.0),
            0.5 * cfl_dt(&s1, 10.0),
            max_relative = 1e-12
        );
    }

    fn params(g: GridSpec, u: Profile, v: Profile, w: Profile, delta: f64) -> ModelParams {
        ModelParams::new(delta, g, InitialData { u, v, w }).unwrap()
    }

    #[test]
    fn constant_density_exponential_relaxation() {
        let g = line(16);
        let (c, wbar, delta, dt) = (1.5, 0.2, 0.7, 0.01);
        let p = params(
            g,
            Profile::constant(c),
            Profile::constant(0.0),
            Profile::constant(wbar),
            delta,
        );
        let mut s = p.initial_state().unwrap();
        for _ in 0..200 {
            s = step(&s, &p, &cfg(dt)).unwrap();
        }
        let expect = c / delta + (wbar - c / delta) * (-delta * 200.0 * dt).exp();
        for ((u, v), w) in s.u.values().iter().zip(s.v.values()).zip(s.w.values()) {
            assert_eq!(*u, c);
            assert_eq!(*v, 0.0);
            assert_relative_eq!(*w, expect, epsilon = 1e-13);
        }
    }

    #[test]
    fn step_conserves_mass() {
        let g = GridSpec::rect(1.0, 1.0, 24, 24).unwrap();
        let p = params(
            g,
            Profile::Gaussian {
                center: vec![0.3, 0.6],
                width: 0.1,
                amplitude: 3.0,
                baseline: 0.2,
            },
            Profile::cosine(2, 0.3, 0.4),
            Profile::constant(0.5),
            1.0,
        );
        let mut s = p.initial_state().unwrap();
        let m0 = s.u.integrate();
        for _ in 0..50 {
            let m = s.u.integrate();
            s = step(&s, &p, &cfg(1e-3)).unwrap();
            assert!(((s.u.integrate() - m) / m).abs() <= 1e-12);
        }
        assert!(((s.u.integrate() - m0) / m0).abs() <= 1e-12);
    }

    #[test]
    fn step_rejects_cfl_violation() {
        let g = line(10);
        let p = params(
            g,
            Profile::constant(1.0),
            Profile::cosine(1, 1.0, 1.0),
            Profile::constant(0.0),
            1.0,
        );
        let s = p.initial_state().unwrap();
        assert!(matches!(step(&s, &p, &cfg(1.0)), Err(Error::Cfl { .. })));
    }

    #[test]
    fn signal_stays_within_initial_range() {
        let g = line(64);
        let p = params(
            g,
            Profile::cosine(2, 0.8, 1.0),
            Profile::cosine(3, 0.3, 0.3),
            Profile::constant(2.0),
            1.0,
        );
        let mut s = p.initial_state().unwrap();
        let vmax = s.v.max();
        for _ in 0..100 {
            s = step(&s, &p, &cfg(2e-3)).unwrap();
            assert!(s.v.min() >= -1e-11 && s.v.max() <= vmax + 1e-11);
            assert!(s.w.min() > 0.0);
        }
    }

    #[test]
    fn run_constant_state_to_t10() {
        let g = line(8);
        let p = params(
            g,
            Profile::constant(1.0),
            Profile::constant(0.0),
            Profile::constant(0.0),
            1.0,
        );
        let opts = RunOptions {
            diagnostic_stride: 0,
            ..Default::default()
        };
        let traj = run(&p, &cfg(0.01), 10.0, &opts, &mut []).unwrap();
        assert_eq!(traj.final_state.t, 10.0);
        for w in traj.final_state.w.values() {
            assert_relative_eq!(*w, 1.0 - (-10.0f64).exp(), epsilon = 1e-13);
        }
        let times: Vec<f64> = traj.times().collect();
        assert_eq!(times, vec![0.0, 10.0]);
    }

    #[test]
    fn run_shortens_last_step_and_calls_observers() {
        let g = line(8);
        let p = params(
            g,
            Profile::constant(1.0),
            Profile::cosine(1, 0.1, 0.1),
            Profile::constant(0.0),
            1.0,
        );
        let opts = RunOptions {
            diagnostic_stride: 3,
            ..Default::default()
        };
        let mut seen = Vec::new();
        let mut obs = |s: &State, _r: &DiagnosticsRecord| seen.push(s.t);
        let traj = run(&p, &cfg(0.03), 0.1, &opts, &mut [&mut obs]).unwrap();
        assert_eq!(traj.steps, 4);
        assert_eq!(traj.final_state.t, 0.1);
        assert_eq!(seen.len(), 3);
        assert_eq!(*seen.last().unwrap(), 0.1);
    }

    #[test]
    fn run_flags_amplification() {
        let g = line(8);
        let p = params(
            g,
            Profile::cosine(1, 0.9, 1.0),
            Profile::constant(0.0),
            Profile::constant(0.0),
            1.0,
        );
        let c = StepConfig {
            amplification_factor: 1.0000001,
            variant: SchemeVariant::NonConservativeTransport,
            ..cfg(0.01)
        };
        // pure diffusion never grows the sup norm
        assert!(run(&p, &c, 0.1, &RunOptions::default(), &mut []).is_ok());
        let p = params(
            g,
            Profile::constant(1.0),
            Profile::Gaussian {
                center: vec![0.5],
                width: 0.1,
                amplitude: 1.0,
                baseline: 0.0,
            },
            Profile::constant(0.0),
            1.0,
        );
        let c = StepConfig {
            amplification_factor: 1.01,
            ..cfg(0.01)
        };
        assert!(matches!(
            run(&p, &c, 1.0, &RunOptions::default(), &mut []),
            Err(Error::Amplification { .. })
        ));
    }
}

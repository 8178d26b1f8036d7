//! Scalar functionals of `(u, v, w)`, per-sample diagnostics and the
//! trajectory record with its space-time accumulators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec};
use crate::ops::{gradient_sq, gradient_sq_into, power_field};
use crate::stepper::State;

/// Search window for the sublinear exponent.
const P0_LO: f64 = 1e-8;
const P0_HI: f64 = 1.0 - 1e-8;

/// `gamma = (p - 1) / (12 p M^2)`, or 0 when `M = 0` (the weight is then
/// never evaluated away from `s = 0`).
pub fn lyapunov_gamma(p: f64, v0max: f64) -> f64 {
    if v0max == 0.0 {
        0.0
    } else {
        (p - 1.0) / (12.0 * p * v0max * v0max)
    }
}

fn check_same(u: &Field, v: &Field) -> Result<()> {
    u.same_grid(v)
}

/// `int u^p exp(gamma v^2)` with `gamma = (p-1)/(12 p v0max^2)`.
pub fn lyapunov_exponential(u: &Field, v: &Field, p: f64, v0max: f64) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::param("p", format!("need p > 1, got {p}")));
    }
    if !(v0max > 0.0) {
        return Err(Error::param(
            "v0max",
            format!("need v0max > 0, got {v0max}"),
        ));
    }
    check_same(u, v)?;
    lyapunov_unchecked(u, v, p, lyapunov_gamma(p, v0max))
}

fn lyapunov_unchecked(u: &Field, v: &Field, p: f64, gamma: f64) -> Result<f64> {
    let up = power_field(u, p)?;
    let s: f64 = up
        .values()
        .iter()
        .zip(v.values())
        .map(|(a, s)| a * (gamma * s * s).exp())
        .sum();
    Ok(s * u.grid().cell_volume())
}

/// `int u^p (1 + v0max^2 - v^2)` for `p` in `(0, 1)`.
pub fn sublinear_functional(u: &Field, v: &Field, p: f64, v0max: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::param("p", format!("need 0 < p < 1, got {p}")));
    }
    check_same(u, v)?;
    let up = power_field(u, p)?;
    let c = 1.0 + v0max * v0max;
    let s: f64 = up
        .values()
        .iter()
        .zip(v.values())
        .map(|(a, s)| a * (c - s * s))
        .sum();
    Ok(s * u.grid().cell_volume())
}

/// Left side of the sufficient condition `g_p <= 0` for the quadratic weight
/// `1 + M^2 - s^2` with `eta1 = eta2 = 1/3`, using `|phi| <= 1 + M^2`,
/// `|phi'| <= 2M`, `phi >= 1` and `phi'' <= -1`.
pub fn p0_condition(p: f64, v0max: f64) -> f64 {
    let m = v0max;
    0.75 * (1.0 - p) * (1.0 + m * m) + 2.0 * m + 12.0 * m * m / (1.0 - p) - 1.0 / p
}

/// Largest `p` in `(0, 1)` with `p0_condition(p, v0max) <= 0`, to 1e-10.
///
/// The condition is strictly increasing in `p`, so bisection brackets the
/// unique crossing.
pub fn compute_p0(v0max: f64) -> Result<f64> {
    if !(v0max >= 0.0 && v0max.is_finite()) {
        return Err(Error::param(
            "v0max",
            format!("need v0max >= 0, got {v0max}"),
        ));
    }
    if p0_condition(P0_HI, v0max) <= 0.0 {
        return Ok(P0_HI);
    }
    if p0_condition(P0_LO, v0max) > 0.0 {
        return Err(Error::Infeasible { v0max });
    }
    let (mut lo, mut hi) = (P0_LO, P0_HI);
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if p0_condition(mid, v0max) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Weight functions `phi` used with the `u^p phi(v)` family of functionals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Weight {
    /// `exp(gamma s^2)`
    Exponential {
        gamma: f64,
    },
    /// `1 + M^2 - s^2`
    Quadratic {
        v0max: f64,
    },
    One,
}

impl Weight {
    /// `(phi, phi', phi'')` at `s`.
    pub fn eval(&self, s: f64) -> (f64, f64, f64) {
        match *self {
            Weight::Exponential { gamma } => {
                let e = (gamma * s * s).exp();
                let d = 2.0 * gamma * s;
                (e, d * e, (2.0 * gamma + d * d) * e)
            }
            Weight::Quadratic { v0max } => (1.0 + v0max * v0max - s * s, -2.0 * s, -2.0),
            Weight::One => (1.0, 0.0, 0.0),
        }
    }
}

/// Cellwise
/// `|p-1|/(4 eta2) phi + |phi'| + phi'^2 / (eta1 |p-1| phi) - sign(p-1)/p phi''`.
pub fn g_phi_field(v: &Field, p: f64, eta1: f64, eta2: f64, phi: Weight) -> Result<Field> {
    if p == 1.0 || !(p > 0.0) {
        return Err(Error::param("p", format!("need p > 0 and p != 1, got {p}")));
    }
    if !(eta1 > 0.0 && eta2 > 0.0) {
        return Err(Error::param("eta", "eta1 and eta2 must be positive"));
    }
    let upper = v.max().max(0.0);
    // phi is monotone on [0, upper] for every supported weight
    if phi.eval(0.0).0 <= 0.0 || phi.eval(upper).0 <= 0.0 {
        return Err(Error::NonpositiveWeight { upper });
    }
    let q = (p - 1.0).abs();
    let sigma = (p - 1.0).signum();
    Ok(v.map(|s| {
        let (f, d1, d2) = phi.eval(s);
        q / (4.0 * eta2) * f + d1.abs() + d1 * d1 / (eta1 * q * f) - sigma / p * d2
    }))
}

/// `int |grad u^{p/2}|^2`.
pub fn dirichlet_p(u: &Field, p: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 2.0) {
        return Err(Error::param("p", format!("need 0 < p <= 2, got {p}")));
    }
    Ok(gradient_sq(&power_field(u, p / 2.0)?).integrate())
}

/// `int |grad u|^2 / u^2` with the gradient collocated at cells.
pub fn fisher_information(u: &Field, floor: f64) -> Result<f64> {
    if let Some((cell, &value)) = u.values().iter().enumerate().find(|(_, x)| **x <= 0.0) {
        return Err(Error::Nonpositive { cell, value });
    }
    Ok(fisher_floored(u, floor))
}

fn fisher_floored(u: &Field, floor: f64) -> f64 {
    let g = gradient_sq(u);
    g.values()
        .iter()
        .zip(u.values())
        .map(|(g, x)| {
            let d = x.max(floor);
            g / (d * d)
        })
        .sum::<f64>()
        * u.grid().cell_volume()
}

pub const FISHER_FLOOR: f64 = 1e-300;

/// `int u^{2/n + p} / (1 + int |grad u^{p/2}|^2)`.
pub fn gn_ratio(u: &Field, p: f64, n: usize) -> Result<f64> {
    if u.values().iter().all(|x| *x == 0.0) {
        return Err(Error::param("u", "identically zero"));
    }
    if n == 0 {
        return Err(Error::param("n", "dimension must be positive"));
    }
    let num = power_field(u, 2.0 / n as f64 + p)?.integrate();
    Ok(num / (1.0 + dirichlet_p(u, p)?))
}

/// `int |grad v|^theta`, with `|grad v|` the square root of [`gradient_sq`].
pub fn grad_theta(v: &Field, theta: f64) -> f64 {
    gradient_sq(v)
        .values()
        .iter()
        .map(|g| g.powf(0.5 * theta))
        .sum::<f64>()
        * v.grid().cell_volume()
}

/// Exponents and reference values the diagnostics are evaluated with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsConfig {
    /// Exponent of the exponential-weight functional, `max{2, n}` by default.
    pub lyapunov_p: f64,
    /// Exponent of the sublinear functional, `compute_p0(v0max) / 2`;
    /// absent when the smallness bound is infeasible.
    pub sublinear_p: Option<f64>,
    /// Exponent of the `int |grad v|^theta` diagnostic, `theta > n`.
    pub theta: f64,
    pub v0max: f64,
    pub mean_u0: f64,
    pub delta: f64,
    pub dim: usize,
}

impl DiagnosticsConfig {
    pub fn for_initial(initial: &State, delta: f64) -> Self {
        let dim = initial.u.grid().dim();
        let v0max = initial.v.linf_norm();
        Self {
            lyapunov_p: (dim as f64).max(2.0),
            sublinear_p: compute_p0(v0max).ok().map(|p0| 0.5 * p0),
            theta: dim as f64 + 1.0,
            v0max,
            mean_u0: initial.u.mean(),
            delta,
            dim,
        }
    }

    pub fn lyapunov_weight(&self) -> Weight {
        Weight::Exponential {
            gamma: lyapunov_gamma(self.lyapunov_p, self.v0max),
        }
    }

    pub fn sublinear_weight(&self) -> Weight {
        Weight::Quadratic { v0max: self.v0max }
    }
}

/// Cumulative space-time integrals, advanced once per step by a rectangle rule.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Accumulators {
    /// `int int v w`, absorption term as removed by the step.
    pub cross_vw: f64,
    /// `int int |grad v|^2`
    pub grad_v_sq: f64,
    /// `int_1^t int |grad u|^2 / u^2`
    pub fisher: f64,
    /// `int int |grad u^{p/2}|^2`, sublinear exponent
    pub dirichlet_p: f64,
    /// `int int u^{p-2} |grad u|^2 phi(v)`, sublinear exponent and weight
    pub sublinear_dissipation: f64,
    /// `int int u^2`
    pub u_sq: f64,
    /// `sup ||u||_inf` over all steps so far
    pub sup_u_linf: f64,
    /// `int_0^t e^{-delta (t - s)} ||u(s) - mean u0||_inf ds`, same
    /// quadrature as the `w` update
    pub w_tilde_bound: f64,
}

/// Integrand values of one step `t_n -> t_n + dt`.
///
/// Terms driven by `u` are frozen at `t_n`. The `v` terms use the implicit
/// end-of-step `v^{n+1}` against the frozen `w^n`, which is exactly what
/// the backward-Euler absorption and diffusion of `v` remove.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepContribution {
    pub t_start: f64,
    pub dt: f64,
    pub cross_vw: f64,
    pub grad_v_sq: f64,
    pub fisher: f64,
    pub dirichlet_p: f64,
    pub sublinear_dissipation: f64,
    pub u_sq: f64,
    pub u_linf: f64,
    /// `||u - mean u0||_inf`
    pub u_dev_linf: f64,
}

impl StepContribution {
    pub fn evaluate(before: &State, after: &State, cfg: &DiagnosticsConfig) -> Self {
        let grid = *before.u.grid();
        let vol = grid.cell_volume();
        let (u, v, w) = (before.u.values(), before.v.values(), before.w.values());
        let v1 = after.v.values();
        let mut scratch = vec![0.0; u.len()];

        let cross_vw = v1.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() * vol;
        gradient_sq_into(&grid, v1, &mut scratch);
        let grad_v_sq = scratch.iter().sum::<f64>() * vol;

        gradient_sq_into(&grid, u, &mut scratch);
        let fisher = if before.t >= 1.0 - 1e-12 {
            scratch
                .iter()
                .zip(u)
                .map(|(g, x)| {
                    let d = x.max(FISHER_FLOOR);
                    g / (d * d)
                })
                .sum::<f64>()
                * vol
        } else {
            0.0
        };

        let (dirichlet, sublinear_dissipation) = match cfg.sublinear_p {
            Some(p) => {
                let weight = cfg.sublinear_weight();
                let s: f64 = scratch
                    .iter()
                    .zip(u)
                    .zip(v)
                    .map(|((g, x), s)| {
                        let x = x.max(FISHER_FLOOR);
                        g * x.powf(p - 2.0) * weight.eval(*s).0
                    })
                    .sum();
                let up =
                    power_field(&before.u.map(|x| x.max(0.0)), 0.5 * p).expect("nonnegative base");
                gradient_sq_into(&grid, up.values(), &mut scratch);
                (scratch.iter().sum::<f64>() * vol, s * vol)
            }
            None => (0.0, 0.0),
        };

        Self {
            t_start: before.t,
            dt: after.t - before.t,
            cross_vw,
            grad_v_sq,
            fisher,
            dirichlet_p: dirichlet,
            sublinear_dissipation,
            u_sq: u.iter().map(|x| x * x).sum::<f64>() * vol,
            u_linf: before.u.linf_norm(),
            u_dev_linf: u.iter().fold(0.0, |m, x| m.max((x - cfg.mean_u0).abs())),
        }
    }
}

/// Functional values at one sample time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub step: usize,
    pub mass: f64,
    pub u_linf: f64,
    pub v_linf: f64,
    pub w_linf: f64,
    pub u_l2: f64,
    pub v_l2: f64,
    pub w_l2: f64,
    pub u_min: f64,
    pub v_min: f64,
    pub v_max: f64,
    pub w_min: f64,
    /// `int u^p exp(gamma v^2)`
    pub lyapunov: f64,
    /// `int u^p (1 + v0max^2 - v^2)`, 0 when no sublinear exponent exists
    pub sublinear: f64,
    pub dirichlet_p: f64,
    pub fisher: f64,
    pub cross_vw: f64,
    pub grad_v_sq: f64,
    pub grad_v_theta: f64,
    pub gn_ratio: f64,
    /// Largest cellwise `g_phi(v)` for the exponential weight, `eta = 1/2`.
    pub g_exp_max: f64,
    /// Largest cellwise `g_phi(v)` for the quadratic weight, `eta = 1/3`.
    pub g_quad_max: f64,
    pub dist_u: f64,
    pub dist_v: f64,
    pub dist_w: f64,
    /// `||w - (mean u0 / delta)(1 - e^{-delta t})||_inf`
    pub w_tilde_linf: f64,
    pub cumulative: Accumulators,
}

impl DiagnosticsRecord {
    pub fn evaluate(
        state: &State,
        step: usize,
        cfg: &DiagnosticsConfig,
        acc: Accumulators,
    ) -> Self {
        let (u, v, w) = (&state.u, &state.v, &state.w);
        let l2 = |f: &Field| f.lp_norm(2.0).expect("p = 2");
        let u_pos = u.map(|x| x.max(0.0));
        let v_pos = v.map(|x| x.max(0.0));
        let lyapunov = lyapunov_unchecked(
            &u_pos,
            &v_pos,
            cfg.lyapunov_p,
            lyapunov_gamma(cfg.lyapunov_p, cfg.v0max),
        )
        .unwrap_or(f64::NAN);
        let (sublinear, dirichlet, gn, g_quad_max) = match cfg.sublinear_p {
            Some(p) => (
                sublinear_functional(&u_pos, &v_pos, p, cfg.v0max).unwrap_or(f64::NAN),
                dirichlet_p(&u_pos, p).unwrap_or(f64::NAN),
                gn_ratio(&u_pos, p, cfg.dim).unwrap_or(f64::NAN),
                g_phi_field(&v_pos, p, 1.0 / 3.0, 1.0 / 3.0, cfg.sublinear_weight())
                    .map(|g| g.max())
                    .unwrap_or(f64::NAN),
            ),
            None => (0.0, 0.0, 0.0, 0.0),
        };
        let g_exp_max = if cfg.v0max > 0.0 {
            g_phi_field(&v_pos, cfg.lyapunov_p, 0.5, 0.5, cfg.lyapunov_weight())
                .map(|g| g.max())
                .unwrap_or(f64::NAN)
        } else {
            // grad v = 0 for all time; the sign condition is vacuous
            0.0
        };
        let w_eq = cfg.mean_u0 / cfg.delta;
        let w_ramp = w_eq * -(-cfg.delta * state.t).exp_m1();
        Self {
            t: state.t,
            step,
            mass: u.integrate(),
            u_linf: u.linf_norm(),
            v_linf: v.linf_norm(),
            w_linf: w.linf_norm(),
            u_l2: l2(u),
            v_l2: l2(v),
            w_l2: l2(w),
            u_min: u.min(),
            v_min: v.min(),
            v_max: v.max(),
            w_min: w.min(),
            lyapunov,
            sublinear,
            dirichlet_p: dirichlet,
            fisher: fisher_floored(u, FISHER_FLOOR),
            cross_vw: v.dot(w).expect("same grid"),
            grad_v_sq: gradient_sq(v).integrate(),
            grad_v_theta: grad_theta(v, cfg.theta),
            gn_ratio: gn,
            g_exp_max,
            g_quad_max,
            dist_u: u
                .values()
                .iter()
                .fold(0.0, |m, x| m.max((x - cfg.mean_u0).abs())),
            dist_v: v.linf_norm(),
            dist_w: w.values().iter().fold(0.0, |m, x| m.max((x - w_eq).abs())),
            w_tilde_linf: w
                .values()
                .iter()
                .fold(0.0, |m, x| m.max((x - w_ramp).abs())),
            cumulative: acc,
        }
    }
}

/// Running extremes over every post-initial step, not only samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremes {
    pub min_u: f64,
    pub min_v: f64,
    pub max_v: f64,
    pub min_w: f64,
    pub max_mass_drift: f64,
}

impl Default for Extremes {
    fn default() -> Self {
        Self {
            min_u: f64::INFINITY,
            min_v: f64::INFINITY,
            max_v: f64::NEG_INFINITY,
            min_w: f64::INFINITY,
            max_mass_drift: 0.0,
        }
    }
}

impl Extremes {
    pub fn observe(&mut self, s: &State, initial_mass: f64) {
        self.min_u = self.min_u.min(s.u.min());
        self.min_v = self.min_v.min(s.v.min());
        self.max_v = self.max_v.max(s.v.max());
        self.min_w = self.min_w.min(s.w.min());
        let drift = ((s.u.integrate() - initial_mass) / initial_mass).abs();
        self.max_mass_drift = self.max_mass_drift.max(drift);
    }
}

/// Quantities of the initial data that bounds refer back to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialSummary {
    pub mass: f64,
    pub mean_u: f64,
    pub u_linf: f64,
    pub v_integral: f64,
    pub v_sq_integral: f64,
    pub v_linf: f64,
    pub w_linf: f64,
    pub w_l2: f64,
    pub volume: f64,
}

impl InitialSummary {
    pub fn of(s: &State) -> Self {
        Self {
            mass: s.u.integrate(),
            mean_u: s.u.mean(),
            u_linf: s.u.linf_norm(),
            v_integral: s.v.integrate(),
            v_sq_integral: s.v.dot(&s.v).expect("same grid"),
            v_linf: s.v.linf_norm(),
            w_linf: s.w.linf_norm(),
            w_l2: s.w.lp_norm(2.0).expect("p = 2"),
            volume: s.u.grid().volume(),
        }
    }
}

/// Record of a completed (or in-progress) run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub name: String,
    pub grid: GridSpec,
    pub delta: f64,
    pub dt: f64,
    pub linear_tol: f64,
    pub config: DiagnosticsConfig,
    pub initial: InitialSummary,
    pub samples: Vec<DiagnosticsRecord>,
    /// States at the snapshot stride, always including `t = 0` and the end.
    pub snapshots: Vec<State>,
    pub snapshot_stride: usize,
    pub totals: Accumulators,
    pub extremes: Extremes,
    /// `min u(., t)` at the first step time `t >= 1`.
    pub u_min_at_one: Option<f64>,
    pub steps: usize,
    pub final_state: State,
}

impl Trajectory {
    pub fn new(
        name: impl Into<String>,
        initial: &State,
        delta: f64,
        dt: f64,
        linear_tol: f64,
    ) -> Self {
        let config = DiagnosticsConfig::for_initial(initial, delta);
        let summary = InitialSummary::of(initial);
        let totals = Accumulators {
            sup_u_linf: 0.0,
            ..Default::default()
        };
        Self {
            name: name.into(),
            grid: *initial.u.grid(),
            delta,
            dt,
            linear_tol,
            config,
            initial: summary,
            samples: Vec::new(),
            snapshots: Vec::new(),
            snapshot_stride: 0,
            totals,
            extremes: Extremes::default(),
            u_min_at_one: if initial.t >= 1.0 {
                Some(initial.u.min())
            } else {
                None
            },
            steps: 0,
            final_state: initial.clone(),
        }
    }

    /// Advances the space-time accumulators by one rectangle-rule step.
    pub fn accumulate(&mut self, c: &StepContribution) {
        let a = &mut self.totals;
        a.cross_vw += c.dt * c.cross_vw;
        a.grad_v_sq += c.dt * c.grad_v_sq;
        a.fisher += c.dt * c.fisher;
        a.dirichlet_p += c.dt * c.dirichlet_p;
        a.sublinear_dissipation += c.dt * c.sublinear_dissipation;
        a.u_sq += c.dt * c.u_sq;
        a.sup_u_linf = a.sup_u_linf.max(c.u_linf);
        let decay = (-self.delta * c.dt).exp();
        let gain = -(-self.delta * c.dt).exp_m1() / self.delta;
        a.w_tilde_bound = decay * a.w_tilde_bound + gain * c.u_dev_linf;
    }

    pub fn record(&mut self, state: &State, step: usize) -> &DiagnosticsRecord {
        let r = DiagnosticsRecord::evaluate(state, step, &self.config, self.totals);
        self.samples.push(r);
        self.samples.last().expect("just pushed")
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.t)
    }

    /// Snapshot closest to `t` within `1e-9 * max(1, t)`.
    pub fn snapshot_at(&self, t: f64) -> Option<&State> {
        let tol = 1e-9 * t.abs().max(1.0);
        self.snapshots.iter().find(|s| (s.t - t).abs() <= tol)
    }

    /// Snapshots of every step up to `t`, or the first missing step index.
    fn every_step_until(&self, t: f64) -> Result<&[State]> {
        let tol = 1e-9 * t.abs().max(1.0);
        let end = self
            .snapshots
            .iter()
            .position(|s| (s.t - t).abs() <= tol)
            .ok_or(Error::MissingSnapshots { step: self.steps })?;
        if self.snapshot_stride != 1 {
            return Err(Error::MissingSnapshots { step: 1 });
        }
        Ok(&self.snapshots[..=end])
    }
}

/// `|| w(t) - [e^{-delta t} w0 + sum_k K_k u(t_k)] ||_inf` with the exact
/// exponential weights `K_k = int_{t_k}^{t_{k+1}} e^{-delta (t - s)} ds` and
/// `u` frozen at the left node of each interval.
pub fn duhamel_w_residual(traj: &Trajectory, delta: f64, t: f64) -> Result<f64> {
    let states = traj.every_step_until(t)?;
    let last = states.last().expect("nonempty");
    let tn = last.t;
    let mut acc: Vec<f64> = states[0]
        .w
        .values()
        .iter()
        .map(|w| (-delta * tn).exp() * w)
        .collect();
    for pair in states.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let weight = (-delta * (tn - b.t)).exp() * -(-delta * (b.t - a.t)).exp_m1() / delta;
        for (s, u) in acc.iter_mut().zip(a.u.values()) {
            *s += weight * u;
        }
    }
    Ok(max_gap(last.w.values(), &acc))
}

/// Same as [`duhamel_w_residual`] but against an independent trapezoid
/// quadrature of the convolution integral.
pub fn duhamel_w_trapezoid_gap(traj: &Trajectory, delta: f64, t: f64) -> Result<f64> {
    let states = traj.every_step_until(t)?;
    let last = states.last().expect("nonempty");
    let tn = last.t;
    let mut acc: Vec<f64> = states[0]
        .w
        .values()
        .iter()
        .map(|w| (-delta * tn).exp() * w)
        .collect();
    for pair in states.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let h = b.t - a.t;
        let (ka, kb) = ((-delta * (tn - a.t)).exp(), (-delta * (tn - b.t)).exp());
        for ((s, ua), ub) in acc.iter_mut().zip(a.u.values()).zip(b.u.values()) {
            *s += 0.5 * h * (ka * ua + kb * ub);
        }
    }
    Ok(max_gap(last.w.values(), &acc))
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

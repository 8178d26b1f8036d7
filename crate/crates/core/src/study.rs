//! Parameter sweeps and refinement studies.

use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{duhamel_w_trapezoid_gap, Trajectory};
use crate::grid::{Field, GridSpec};
use crate::output::fmt17;
use crate::scenario::ScenarioConfig;
use crate::stepper::{run_from, State};
use crate::suite::{simulate, thread_pool};
use crate::verifier::{self, Slack};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    /// `||v0||_inf`, reached by rescaling the configured signal profile.
    V0max,
    Delta,
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "v0max" => Ok(SweepParam::V0max),
            "delta" => Ok(SweepParam::Delta),
            other => Err(Error::param(
                "param",
                format!("expected v0max or delta, got `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub dim: usize,
    pub dist_u: f64,
    pub dist_v: f64,
    pub dist_w: f64,
    /// The run stopped on the amplification guard.
    pub amplified: bool,
    /// `E_p` nonincreasing sample to sample within `1e-8 E_p`.
    pub lyapunov_monotone: bool,
    /// `v0max` lies below the smallness threshold.
    pub lyapunov_applicable: bool,
    pub max_u_linf: f64,
    /// Any other failure of the run.
    pub error: String,
}

/// Initial state of `cfg` with `param` set to `value`, plus the decay rate.
fn prepared(cfg: &ScenarioConfig, param: SweepParam, value: f64) -> Result<(State, f64)> {
    let params = cfg.params()?;
    let mut s = params.initial_state()?;
    match param {
        SweepParam::V0max => {
            let m = s.v.linf_norm();
            if !(m > 0.0) {
                return Err(Error::param("v0max", "cannot rescale a vanishing signal"));
            }
            if !(value >= 0.0) {
                return Err(Error::param(
                    "v0max",
                    format!("must be nonnegative, got {value}"),
                ));
            }
            // exact maximum, not a rounded rescale of it
            let v = s.v.map(|x| if x == m { value } else { x * (value / m) });
            s = State::new(s.u, v, s.w);
            Ok((s, cfg.model.delta))
        }
        SweepParam::Delta => Ok((s, value)),
    }
}

fn sweep_one(cfg: &ScenarioConfig, param: SweepParam, value: f64) -> SweepRow {
    let dim = cfg.domain.dim;
    let blank = |amplified: bool, error: String| SweepRow {
        value,
        dim,
        dist_u: f64::NAN,
        dist_v: f64::NAN,
        dist_w: f64::NAN,
        amplified,
        lyapunov_monotone: false,
        lyapunov_applicable: false,
        max_u_linf: f64::NAN,
        error,
    };
    let traj = prepared(cfg, param, value).and_then(|(s, delta)| {
        let mut opts = cfg.run_options();
        opts.name = format!("{}-{value}", cfg.name);
        run_from(
            s,
            delta,
            &cfg.step_config(),
            cfg.model.t_final,
            &opts,
            &mut [],
        )
    });
    match traj {
        Ok(t) => {
            let last = t.samples.last().expect("final sample");
            let excess =
                verifier::relative_excess(&verifier::lyapunov_series(&t), Slack::default(), t.dt);
            SweepRow {
                value,
                dim,
                dist_u: last.dist_u,
                dist_v: last.dist_v,
                dist_w: last.dist_w,
                amplified: false,
                lyapunov_monotone: excess <= Slack::default().rel,
                lyapunov_applicable: t.config.v0max
                    <= verifier::lyapunov_threshold(dim) * (1.0 + 1e-12),
                max_u_linf: t.samples.iter().map(|r| r.u_linf).fold(0.0, f64::max),
                error: String::new(),
            }
        }
        Err(e @ Error::Amplification { .. }) => blank(true, e.to_string()),
        Err(e) => blank(false, e.to_string()),
    }
}

/// One run per value, executed concurrently; rows come back in input order.
pub fn sweep(cfg: &ScenarioConfig, param: SweepParam, values: &[f64]) -> Vec<SweepRow> {
    thread_pool().install(|| {
        values
            .par_iter()
            .map(|v| sweep_one(cfg, param, *v))
            .collect()
    })
}

pub const SWEEP_HEADER: [&str; 11] = [
    "value",
    "dim",
    "dist_u",
    "dist_v",
    "dist_w",
    "amplified",
    "lyapunov_monotone",
    "lyapunov_applicable",
    "max_u_linf",
    "param",
    "error",
];

pub fn write_sweep_csv<W: Write>(param: SweepParam, rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    let name = match param {
        SweepParam::V0max => "v0max",
        SweepParam::Delta => "delta",
    };
    for r in rows {
        w.write_record([
            fmt17(r.value),
            r.dim.to_string(),
            fmt17(r.dist_u),
            fmt17(r.dist_v),
            fmt17(r.dist_w),
            r.amplified.to_string(),
            r.lyapunov_monotone.to_string(),
            r.lyapunov_applicable.to_string(),
            fmt17(r.max_u_linf),
            name.to_string(),
            r.error.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RefineAxis {
    Space,
    Time,
}

impl FromStr for RefineAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "space" => Ok(RefineAxis::Space),
            "time" => Ok(RefineAxis::Time),
            other => Err(Error::param(
                "refine",
                format!("expected space or time, got `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderRow {
    pub level: usize,
    pub nx: usize,
    pub dt: f64,
    /// `L^2` distance of `(u, v, w)` to the finest level, on this level's grid.
    pub errors: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderTable {
    pub axis: RefineAxis,
    /// All levels but the finest, coarse to fine.
    pub rows: Vec<OrderRow>,
    /// Orders between consecutive rows, corrected for the finite reference.
    pub orders: Vec<[f64; 3]>,
    /// Plain `log2` of consecutive error ratios.
    pub raw_orders: Vec<[f64; 3]>,
    /// Errors strictly decrease per field; fields with zero error count as monotone.
    pub monotone: [bool; 3],
}

impl OrderTable {
    /// Smallest corrected order of `field` over all pairs.
    pub fn min_order(&self, field: usize) -> f64 {
        self.orders
            .iter()
            .map(|o| o[field])
            .fold(f64::INFINITY, f64::min)
    }
}

/// Runs `levels` refinements of `cfg` along `axis` (factor 2 each) and
/// measures every coarser level against the finest.
pub fn order_study(cfg: &ScenarioConfig, axis: RefineAxis, levels: usize) -> Result<OrderTable> {
    if levels < 3 {
        return Err(Error::param(
            "levels",
            format!("need at least 3, got {levels}"),
        ));
    }
    let configs: Vec<ScenarioConfig> = (0..levels)
        .map(|l| {
            let mut c = cfg.clone();
            c.name = format!("{}-level{l}", cfg.name);
            c.numerics.diagnostic_stride = 0;
            c.numerics.snapshot_stride = 0;
            let k = 1usize << l;
            match axis {
                RefineAxis::Space => {
                    c.domain.nx *= k;
                    c.domain.ny = c.domain.ny.map(|n| n * k);
                }
                RefineAxis::Time => c.numerics.dt /= k as f64,
            }
            c
        })
        .collect();
    let finals: Vec<State> = thread_pool().install(|| {
        configs
            .par_iter()
            .map(|c| simulate(c).map(|t| t.final_state))
            .collect::<Result<Vec<_>>>()
    })?;
    let reference = finals.last().expect("levels >= 3");

    let mut rows = Vec::new();
    for (l, (s, c)) in finals.iter().zip(&configs).enumerate().take(levels - 1) {
        let ratio = reference.grid().nx() / s.grid().nx();
        let mut errors = [0.0; 3];
        for (e, (coarse, fine)) in errors.iter_mut().zip([
            (&s.u, &reference.u),
            (&s.v, &reference.v),
            (&s.w, &reference.w),
        ]) {
            let fine = restrict(fine, *coarse.grid(), ratio);
            let diff = coarse.zip_map(&fine, |a, b| a - b)?;
            *e = diff.lp_norm(2.0)?;
        }
        rows.push(OrderRow {
            level: l,
            nx: c.domain.nx,
            dt: c.numerics.dt,
            errors,
        });
    }

    let last = levels - 1;
    let mut orders = Vec::new();
    let mut raw_orders = Vec::new();
    let mut monotone = [true; 3];
    for (i, pair) in rows.windows(2).enumerate() {
        let mut o = [f64::NAN; 3];
        let mut r = [f64::NAN; 3];
        for f in 0..3 {
            let (a, b) = (pair[0].errors[f], pair[1].errors[f]);
            if a == 0.0 && b == 0.0 {
                continue;
            }
            if !(b < a) {
                monotone[f] = false;
            }
            r[f] = (a / b).log2();
            o[f] = richardson_order(a / b, last - i);
        }
        orders.push(o);
        raw_orders.push(r);
    }
    Ok(OrderTable {
        axis,
        rows,
        orders,
        raw_orders,
        monotone,
    })
}

/// Solves `(2^{p k} - 1) / (2^{p (k - 1)} - 1) = ratio` for `p`, the
/// error ratio of levels `k` and `k - 1` steps below the reference.
pub fn richardson_order(ratio: f64, k: usize) -> f64 {
    let k = k as f64;
    let model = |p: f64| ((p * k).exp2() - 1.0) / ((p * (k - 1.0)).exp2() - 1.0);
    // increasing in p, from k / (k - 1) at p -> 0 to about 2^p
    if k <= 1.0 || !ratio.is_finite() || ratio <= 1.0 {
        return f64::NAN;
    }
    let (mut lo, mut hi) = (1e-6, 20.0);
    if ratio <= model(lo) {
        return 0.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if model(mid) < ratio {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Block averages of `fine` onto `coarse`, `ratio` fine cells per axis.
fn restrict(fine: &Field, coarse: GridSpec, ratio: usize) -> Field {
    if ratio == 1 {
        return fine.clone();
    }
    let fg = fine.grid();
    let (fnx, r) = (fg.nx(), ratio);
    let ry = if coarse.dim() == 2 { r } else { 1 };
    let scale = 1.0 / (r * ry) as f64;
    let fv = fine.values();
    let values = (0..coarse.len())
        .map(|idx| {
            let (i, j) = (idx % coarse.nx(), idx / coarse.nx());
            let mut s = 0.0;
            for b in 0..ry {
                for a in 0..r {
                    s += fv[(j * ry + b) * fnx + i * r + a];
                }
            }
            s * scale
        })
        .collect();
    Field::from_raw(coarse, values)
}

pub fn write_order_csv<W: Write>(table: &OrderTable, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "level",
        "nx",
        "dt",
        "err_u",
        "err_v",
        "err_w",
        "order_u",
        "order_v",
        "order_w",
        "raw_order_u",
        "raw_order_v",
        "raw_order_w",
    ])?;
    for (l, row) in table.rows.iter().enumerate() {
        let mut rec = vec![row.level.to_string(), row.nx.to_string(), fmt17(row.dt)];
        rec.extend(row.errors.iter().map(|e| fmt17(*e)));
        // orders belong to the pair ending at this row
        let o = l
            .checked_sub(1)
            .map(|k| table.orders[k])
            .unwrap_or([f64::NAN; 3]);
        let r = l
            .checked_sub(1)
            .map(|k| table.raw_orders[k])
            .unwrap_or([f64::NAN; 3]);
        rec.extend(o.iter().chain(&r).map(|x| fmt17(*x)));
        w.write_record(rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Trapezoid-quadrature gaps of the `w` Duhamel formula at `dt` and `dt / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DuhamelRefinement {
    pub residual: f64,
    pub gap: f64,
    pub gap_half: f64,
    pub ratio: f64,
}

/// Runs `cfg` with every step stored, at its `dt` and at `dt / 2`.
pub fn duhamel_refinement(cfg: &ScenarioConfig) -> Result<DuhamelRefinement> {
    let run_at = |dt: f64| -> Result<Trajectory> {
        let mut c = cfg.clone();
        c.numerics.dt = dt;
        c.numerics.snapshot_stride = 1;
        c.numerics.diagnostic_stride = 0;
        simulate(&c)
    };
    let coarse = run_at(cfg.numerics.dt)?;
    let fine = run_at(0.5 * cfg.numerics.dt)?;
    let t = cfg.model.t_final;
    let residual = crate::functionals::duhamel_w_residual(&coarse, cfg.model.delta, t)?;
    let gap = duhamel_w_trapezoid_gap(&coarse, cfg.model.delta, t)?;
    let gap_half = duhamel_w_trapezoid_gap(&fine, cfg.model.delta, t)?;
    Ok(DuhamelRefinement {
        residual,
        gap,
        gap_half,
        ratio: gap / gap_half,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn richardson_order_inverts_model() {
        for p in [0.5, 1.0, 2.0, 3.3] {
            for k in 2..6usize {
                let ratio = ((p * k as f64).exp2() - 1.0) / ((p * (k - 1) as f64).exp2() - 1.0);
                assert_relative_eq!(richardson_order(ratio, k), p, epsilon = 1e-9);
            }
        }
        assert!(richardson_order(0.9, 3).is_nan());
    }

    #[test]
    fn restriction_preserves_integral() {
        let fine = GridSpec::rect(1.0, 1.0, 16, 16).unwrap();
        let coarse = GridSpec::rect(1.0, 1.0, 4, 4).unwrap();
        let f = Field::from_fn(fine, |x, y| (3.0 * x).sin() + y * y);
        let r = restrict(&f, coarse, 4);
        assert_relative_eq!(r.integrate(), f.integrate(), epsilon = 1e-14);
    }

    #[test]
    fn sweep_rescales_signal_maximum_exactly() {
        let mut c = ScenarioConfig::default();
        c.domain.nx = 16;
        let (s, _) = prepared(&c, SweepParam::V0max, 0.5).unwrap();
        assert_eq!(s.v.linf_norm(), 0.5);
    }

    #[test]
    fn order_study_needs_three_levels() {
        assert!(order_study(&ScenarioConfig::default(), RefineAxis::Space, 2).is_err());
    }

    #[test]
    fn parse_axes_and_params() {
        assert_eq!("time".parse::<RefineAxis>().unwrap(), RefineAxis::Time);
        assert!("both".parse::<RefineAxis>().is_err());
        assert_eq!("v0max".parse::<SweepParam>().unwrap(), SweepParam::V0max);
    }
}

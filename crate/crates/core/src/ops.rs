//! Flux-form stencils on cell-centered grids with zero-flux (mirrored ghost)
//! boundaries.
//!
//! Every divergence here is assembled from face fluxes, each face touched
//! exactly once and added to one cell while subtracted from its neighbour.
//! Boundary faces carry zero flux. Summing a result over cells therefore
//! telescopes to zero up to rounding.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec};

/// Face reconstruction for the transport term `div(u grad v)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdvectionScheme {
    /// Arithmetic face mean of `u`.
    #[default]
    Central,
    /// Donor cell picked by the sign of the face slope of `v`.
    Upwind,
}

impl AdvectionScheme {
    pub fn name(&self) -> &'static str {
        match self {
            AdvectionScheme::Central => "central",
            AdvectionScheme::Upwind => "upwind",
        }
    }
}

impl std::str::FromStr for AdvectionScheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "central" => Ok(Self::Central),
            "upwind" => Ok(Self::Upwind),
            other => Err(format!(
                "unknown advection scheme `{other}` (expected central|upwind)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StencilConfig {
    pub advection_scheme: AdvectionScheme,
}

/// Visits every interior face once as `(left, right)` cell indices, x-faces first.
#[inline]
pub(crate) fn for_each_face(grid: &GridSpec, mut visit: impl FnMut(usize, usize)) {
    let (nx, ny) = (grid.nx(), grid.ny());
    for j in 0..ny {
        let row = j * nx;
        for i in 0..nx - 1 {
            visit(row + i, row + i + 1);
        }
    }
    if grid.dim() == 2 {
        for j in 0..ny - 1 {
            for i in 0..nx {
                visit(j * nx + i, (j + 1) * nx + i);
            }
        }
    }
}

/// Writes `div F` where `F` is produced per face by `flux(left, right)`.
/// `flux` returns the flux from `left` to `right` already divided by `h`.
#[inline]
pub(crate) fn divergence_into(
    grid: &GridSpec,
    out: &mut [f64],
    mut flux: impl FnMut(usize, usize) -> f64,
) {
    out.iter_mut().for_each(|o| *o = 0.0);
    let inv_h = 1.0 / grid.spacing();
    for_each_face(grid, |l, r| {
        let f = flux(l, r) * inv_h;
        out[l] += f;
        out[r] -= f;
    });
}

/// `out = Delta_h x`, the mirrored-ghost 3-point (1D) or 5-point (2D) stencil.
pub(crate) fn laplacian_into(grid: &GridSpec, x: &[f64], out: &mut [f64]) {
    let inv_h = 1.0 / grid.spacing();
    divergence_into(grid, out, |l, r| (x[r] - x[l]) * inv_h);
}

/// Discrete Neumann Laplacian.
pub fn laplacian_neumann(f: &Field) -> Field {
    let mut out = vec![0.0; f.values().len()];
    laplacian_into(f.grid(), f.values(), &mut out);
    Field::from_raw(*f.grid(), out)
}

/// Face-based chemotactic flux divergence `div(u grad v)`.
pub fn chemotaxis_divergence(u: &Field, v: &Field, cfg: StencilConfig) -> Result<Field> {
    u.same_grid(v)?;
    let mut out = vec![0.0; u.values().len()];
    chemotaxis_into(
        u.grid(),
        u.values(),
        v.values(),
        cfg.advection_scheme,
        &mut out,
    );
    Ok(Field::from_raw(*u.grid(), out))
}

pub(crate) fn chemotaxis_into(
    grid: &GridSpec,
    u: &[f64],
    v: &[f64],
    scheme: AdvectionScheme,
    out: &mut [f64],
) {
    let inv_h = 1.0 / grid.spacing();
    match scheme {
        AdvectionScheme::Central => divergence_into(grid, out, |l, r| {
            0.5 * (u[l] + u[r]) * ((v[r] - v[l]) * inv_h)
        }),
        AdvectionScheme::Upwind => divergence_into(grid, out, |l, r| {
            let slope = (v[r] - v[l]) * inv_h;
            let donor = if slope > 0.0 { u[l] } else { u[r] };
            donor * slope
        }),
    }
}

/// Largest face slope `|v_R - v_L| / h` over interior faces.
pub fn max_face_slope(v: &Field) -> f64 {
    let inv_h = 1.0 / v.grid().spacing();
    let x = v.values();
    let mut m = 0.0f64;
    for_each_face(v.grid(), |l, r| m = m.max(((x[r] - x[l]) * inv_h).abs()));
    m
}

/// Cellwise `|grad f|^2`: per axis, the mean of the two squared face slopes
/// adjacent to the cell, with boundary faces counted as zero.
pub fn gradient_sq(f: &Field) -> Field {
    let mut out = vec![0.0; f.values().len()];
    gradient_sq_into(f.grid(), f.values(), &mut out);
    Field::from_raw(*f.grid(), out)
}

pub(crate) fn gradient_sq_into(grid: &GridSpec, x: &[f64], out: &mut [f64]) {
    out.iter_mut().for_each(|o| *o = 0.0);
    let inv_h = 1.0 / grid.spacing();
    for_each_face(grid, |l, r| {
        let g = (x[r] - x[l]) * inv_h;
        let half = 0.5 * g * g;
        out[l] += half;
        out[r] += half;
    });
}

/// Cellwise power `f^q`, with `0^q = 0` for `q > 0`.
pub fn power_field(f: &Field, q: f64) -> Result<Field> {
    if q == 0.0 || !q.is_finite() {
        return Err(Error::param(
            "q",
            format!("exponent must be finite and nonzero, got {q}"),
        ));
    }
    let integer = q.fract() == 0.0 && q.abs() < i32::MAX as f64;
    let mut out = Vec::with_capacity(f.values().len());
    for (cell, &x) in f.values().iter().enumerate() {
        let y = if integer {
            x.powi(q as i32)
        } else if x < 0.0 {
            return Err(Error::NegativeBase {
                cell,
                value: x,
                exponent: q,
            });
        } else if x == 0.0 && q > 0.0 {
            0.0
        } else {
            x.powf(q)
        };
        if !y.is_finite() {
            return Err(Error::NonFinite("power_field result"));
        }
        out.push(y);
    }
    Ok(Field::from_raw(*f.grid(), out))
}

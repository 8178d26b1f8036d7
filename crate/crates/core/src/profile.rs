//! Initial-data generators.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec};

/// Descriptor of a nonnegative initial profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    Constant {
        value: f64,
    },
    /// `baseline + amplitude * exp(-|x - center|^2 / (2 width^2))`
    Gaussian {
        center: Vec<f64>,
        width: f64,
        amplitude: f64,
        baseline: f64,
    },
    /// `baseline + amplitude * prod_axes cos(k pi x_i / L_i)`
    CosineMode {
        k: u32,
        amplitude: f64,
        baseline: f64,
    },
    /// One field of a snapshot file; `field` defaults to the role (`u`, `v`, `w`).
    FromFile {
        path: PathBuf,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        field: Option<String>,
    },
    /// Explicit cell values in row-major order.
    Cells {
        values: Vec<f64>,
    },
}

impl Profile {
    pub fn constant(value: f64) -> Self {
        Profile::Constant { value }
    }

    pub fn cosine(k: u32, amplitude: f64, baseline: f64) -> Self {
        Profile::CosineMode {
            k,
            amplitude,
            baseline,
        }
    }

    /// Samples the profile at cell centers. Values are clamped at zero from
    /// below to absorb rounding; genuinely negative profiles are rejected.
    pub fn generate(&self, grid: GridSpec, role: &str) -> Result<Field> {
        let bad = |reason: String| {
            Err(Error::InvalidParameter {
                name: "initial profile",
                reason: format!("{role}: {reason}"),
            })
        };
        let field = match self {
            Profile::Constant { value } => {
                if !(*value >= 0.0) {
                    return bad(format!("constant {value} is negative"));
                }
                Field::constant(grid, *value)
            }
            Profile::Gaussian {
                center,
                width,
                amplitude,
                baseline,
            } => {
                if center.len() != grid.dim() {
                    return bad(format!(
                        "center has {} coordinates, grid has dimension {}",
                        center.len(),
                        grid.dim()
                    ));
                }
                if !(*width > 0.0) {
                    return bad(format!("width {width} must be positive"));
                }
                if !(*baseline >= 0.0) || baseline + amplitude.min(0.0) < 0.0 {
                    return bad(format!(
                        "amplitude {amplitude} drives baseline {baseline} negative"
                    ));
                }
                let (cx, cy) = (center[0], center.get(1).copied().unwrap_or(0.0));
                let s2 = 2.0 * width * width;
                Field::from_fn(grid, |x, y| {
                    let r2 = (x - cx).powi(2)
                        + if grid.dim() == 2 {
                            (y - cy).powi(2)
                        } else {
                            0.0
                        };
                    (baseline + amplitude * (-r2 / s2).exp()).max(0.0)
                })
            }
            Profile::CosineMode {
                k,
                amplitude,
                baseline,
            } => {
                if !(*baseline >= 0.0) || amplitude.abs() > *baseline {
                    return bad(format!("amplitude {amplitude} exceeds baseline {baseline}"));
                }
                let (lx, ly) = grid.extents();
                let kpi = *k as f64 * std::f64::consts::PI;
                Field::from_fn(grid, |x, y| {
                    let mut c = (kpi * x / lx).cos();
                    if grid.dim() == 2 {
                        c *= (kpi * y / ly).cos();
                    }
                    (baseline + amplitude * c).max(0.0)
                })
            }
            Profile::FromFile { path, field } => {
                let snap = crate::output::read_snapshot_on(path, &grid)?;
                match field.as_deref().unwrap_or(role) {
                    "u" => snap.u,
                    "v" => snap.v,
                    "w" => snap.w,
                    other => return bad(format!("unknown snapshot field `{other}`")),
                }
            }
            Profile::Cells { values } => Field::new(grid, values.clone())?,
        };
        if let Some(x) = field.values().iter().find(|x| **x < 0.0) {
            return bad(format!("negative value {x}"));
        }
        Ok(field)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_profile_matches_formula() {
        let g = GridSpec::line(1.0, 8).unwrap();
        let f = Profile::cosine(1, 0.5, 1.0).generate(g, "u").unwrap();
        let [x, _] = g.center(3);
        assert_eq!(f.values()[3], 1.0 + 0.5 * (std::f64::consts::PI * x).cos());
    }

    #[test]
    fn rejects_negative_profiles() {
        let g = GridSpec::line(1.0, 8).unwrap();
        assert!(Profile::cosine(1, 2.0, 1.0).generate(g, "v").is_err());
        assert!(Profile::constant(-1.0).generate(g, "w").is_err());
        let gauss = Profile::Gaussian {
            center: vec![0.5],
            width: 0.1,
            amplitude: -2.0,
            baseline: 1.0,
        };
        assert!(gauss.generate(g, "u").is_err());
        assert!(Profile::Cells {
            values: vec![1.0; 7]
        }
        .generate(g, "u")
        .is_err());
    }

    #[test]
    fn cosine_with_equal_amplitude_is_clamped_nonnegative() {
        let g = GridSpec::rect(1.0, 1.0, 16, 16).unwrap();
        let f = Profile::cosine(3, 0.25, 0.25).generate(g, "v").unwrap();
        assert!(f.min() >= 0.0);
    }
}

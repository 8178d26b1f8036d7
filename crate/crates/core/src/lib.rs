//! Finite-volume simulation of chemotaxis with indirect signal absorption,
//!
//! ```text
//! u_t = Delta u - div(u grad v)
//! v_t = Delta v - v w
//! w_t = -delta w + u
//! ```
//!
//! on boxes in one or two dimensions with zero-flux boundaries, together
//! with the functionals and checks that verify its structural invariants
//! along computed trajectories.

// `!(x > 0.0)` is the idiom used throughout to reject NaN alongside
// out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![cfg_attr(test, allow(clippy::field_reassign_with_default))]

pub mod cli;
pub mod error;
pub mod functionals;
pub mod grid;
pub mod ops;
pub mod output;
pub mod profile;
pub mod scenario;
pub mod stepper;
pub mod study;
pub mod suite;
pub mod verifier;

pub use error::{Error, Result};
pub use functionals::{DiagnosticsRecord, Trajectory};
pub use grid::{Field, GridSpec};
pub use ops::{AdvectionScheme, StencilConfig};
pub use profile::Profile;
pub use stepper::{
    run, run_from, step, InitialData, ModelParams, RunOptions, SchemeVariant, State, StepConfig,
};

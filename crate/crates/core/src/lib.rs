//! Closed-form stress fields, slip lines, velocity fields and Lie point
//! symmetries of plane perfect plasticity, with independent residual checks.
//!
//! Stress states use the Lévy variables: mean stress `sigma` and slip angle
//! `theta`, with `sigma_x = sigma - k sin 2theta`, `sigma_y = sigma + k sin 2theta`,
//! `tau_xy = k cos 2theta`.

// `!(a < b)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod characteristics;
pub mod error;
pub mod numeric;
pub mod plane;
pub mod residuals;
pub mod symmetry;
pub mod velocity;
pub mod verify;

pub use error::{Error, Result};

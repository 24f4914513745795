//! Numerical engine for the elasto-perfectly-plastic oscillator driven by
//! white noise.
//!
//! The oscillator is written as a constrained system for the velocity `y`
//! and the elastic component `z`, `|z| <= Y`:
//!
//! ```text
//! dy = -(c0 y + k z) dt + dw,    dz = y dt  while |z| < Y
//! ```
//!
//! with `z` held at `±Y` while the velocity pushes outward. The plastic
//! deformation is the part of the displacement accumulated while pinned.
//!
//! The asymptotic growth rate of `Var x(t) / t` is computed two ways:
//!
//! * [`sde`], [`cycles`] and [`estimators`]: Monte Carlo, either directly over
//!   a long horizon or as a ratio of long-cycle moments;
//! * [`pde`]: nonlocal boundary value problems for the cycle moments, solved
//!   on a truncated grid.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cycles;
pub mod error;
pub mod estimators;
pub mod pde;
pub mod quadrature;
pub mod sde;

pub use error::{Error, Result};
pub use sde::{OscillatorParams, Regime, State};

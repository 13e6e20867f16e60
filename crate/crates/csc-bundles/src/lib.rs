//! Constant scalar curvature metrics on sphere bundles.
//!
//! Three layers:
//!
//! * [`elliptic`]: Jacobi elliptic functions and the quarter period, the
//!   special functions everything else is built from.
//! * [`curvature`] and [`join`]: doubly warped scalar curvature over a
//!   fiber interval, the one-parameter families of warped metrics with
//!   constant scalar curvature, and an independent residual check that the
//!   constructed metrics really are solutions.
//! * [`yamabe`]: counting constant-scalar-curvature metrics inside a
//!   conformal class on a round sphere by shooting for radial solutions of
//!   the subcritical conformal equation, on top of the embedded adaptive
//!   integrator in [`ode`].
//!
//! The `csc-bundles` binary exposes the same operations as a CLI with JSON
//! and CSV reports; see [`report`].

pub mod curvature;
pub mod elliptic;
mod error;
pub mod join;
pub mod ode;
pub mod report;
pub mod yamabe;

pub use error::{Error, Result};

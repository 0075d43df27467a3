//! Seeded, lossy SU(1,1) nonlinear interferometer.
//!
//! Two two-mode squeezers (OPA A and OPA B) act on the signal/idler pair
//! `(a1, a2)`. Between them each arm passes a beam splitter modelling internal
//! loss, and after OPA B mode `a1` is detected with finite efficiency. Either
//! input mode may be seeded with a number or coherent state.
//!
//! - [`interferometer`]: parameter types and the Heisenberg transfer coefficients.
//! - [`analytic`]: closed-form observables at detector D1.
//! - [`oracle`]: independent brute-force engines used for cross-checking.
//! - [`sweep`]: parameter sweeps that reproduce the reference figures.
//! - [`cli`]: command-line front end.

// `!(x > 0.0)` guards are deliberate: they reject NaN along with the bad range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod cli;
pub mod config;
pub mod error;
pub mod interferometer;
pub mod minimize;
pub mod oracle;
pub mod sweep;

pub use error::{Error, Result};

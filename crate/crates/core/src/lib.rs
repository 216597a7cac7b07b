//! Truncation sampling and basis-aware threshold (BAT) sampling for
//! autoregressive token generation, plus a desk-scale lab that checks the
//! bounds the methods rest on (overestimation bound, low-rank residuals,
//! rank saturation under truncation).
//!
//! Modules:
//! - [`prob`]: softmax, entropy, categorical sampling, delta/tau conversion.
//! - [`truncation`]: epsilon / eta / nucleus / top-k / fixed thresholds.
//! - [`linprog`]: bounded-variable feasibility simplex + exact oracle.
//! - [`bat`]: SVD constraint reduction and the BAT rejection sampler.
//! - [`lab`]: synthetic ground truth, hidden-state fitting, EYM residuals,
//!   rank experiments.
//! - [`sampler`], [`toy`], [`eval`], [`io`]: toy models, generation,
//!   rejection-rate evaluation, parameter matching, file formats.

pub mod error;
pub mod linalg;
pub mod linprog;
pub mod par;
pub mod prob;
pub mod rng;
pub mod truncation;

pub use error::{Error, Result};

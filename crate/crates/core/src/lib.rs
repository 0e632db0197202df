//! Gamma process laboratory.
//!
//! Shot-noise (H-series) simulation of the Gamma subordinator, exact
//! transforms and moments of Gamma integrals `Γf`, modular integrability
//! tests, a deterministic calculus of pure-jump paths, the exponential and
//! polynomial martingale fields, and a Monte Carlo harness checking the
//! closed forms against simulation.

// `!(x > 0.0)` is the NaN-rejecting form used for argument checks.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod analytic;
pub mod error;
pub mod extended;
pub mod harness;
pub mod integrand;
pub mod jumpcalc;
pub mod martingales;
pub mod modular;
pub mod par;
pub mod quad;
pub mod rng;
pub mod sim;
pub mod specfun;

pub use error::{Error, Result};
pub use extended::Extended;
pub use integrand::Integrand;
pub use jumpcalc::{InverseFn, JumpPath};
pub use par::Exec;
pub use rng::{SeedPolicy, Stream};

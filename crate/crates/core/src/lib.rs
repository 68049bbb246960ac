//! Downlink coverage probability of a Poisson cellular network whose desired
//! link sees double shadowed fading (lognormal times κ-μ shadowed with
//! integer μ and m).
//!
//! The crate provides
//!
//! - [`mathkit`]: Γ, lower incomplete Γ, Gauss-Hermite / Gauss-Laguerre rules
//!   and an adaptive semi-infinite integrator,
//! - [`fading`]: the κ-μ shadowed Gamma mixture, the exact and
//!   Gauss-Hermite double shadowed densities, and samplers,
//! - [`partitions`]: the integer-partition index sets used by the
//!   Faà di Bruno expansion of the coverage expression,
//! - [`interference`]: interferer fading models and the expectation
//!   functionals that summarise them,
//! - [`coverage`]: the closed-form coverage probability and a radial
//!   integral cross-check,
//! - [`simulator`]: a Monte Carlo PPP simulator used as ground truth,
//! - [`validation`]: the acceptance checks, shared by the test suite and the
//!   `pppcov validate` command.
//!
//! ```
//! use std::sync::Arc;
//! use pppcov_core::coverage::{coverage_closed_form, CoverageQuery, NetworkConfig};
//! use pppcov_core::fading::{DoubleShadowedParams, KappaMuShadowedParams};
//! use pppcov_core::interference::Rayleigh;
//!
//! let net = NetworkConfig::new(1e-7, 4.0, 1.0).unwrap();
//! let desired = DoubleShadowedParams::new(KappaMuShadowedParams::new(1.0, 1, 1).unwrap(), 0.0).unwrap();
//! let query = CoverageQuery::new(1.0, desired, Arc::new(Rayleigh), 32).unwrap();
//! let pc = coverage_closed_form(&net, &query).unwrap();
//! assert!((pc - 1.0 / (1.0 + std::f64::consts::FRAC_PI_4)).abs() < 1e-9);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coverage;
pub mod error;
pub mod fading;
pub mod interference;
pub mod mathkit;
pub mod partitions;
pub mod simulator;
pub mod validation;

pub use error::{Error, Result};

/// Converts a ratio in decibels to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Natural-log standard deviation of a lognormal whose SD is given in dB.
pub fn db_sigma_to_neper(sigma_db: f64) -> f64 {
    sigma_db * std::f64::consts::LN_10 / 10.0
}

pub(crate) use fading::gamma_kernel as fading_kernel;

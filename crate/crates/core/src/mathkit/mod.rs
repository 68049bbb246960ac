//! Special functions and quadrature primitives.
//!
//! Everything here is a pure function of its inputs and safe to call from
//! any number of threads.

mod adaptive;
mod rules;
mod special;

pub use adaptive::{
    integrate_interval, integrate_real_line, integrate_semi_infinite, integrate_semi_infinite_with,
    Integral, QuadSettings,
};
pub use rules::{gauss_hermite_rule, gauss_laguerre_rule, QuadratureRule, MAX_RULE_ORDER};
pub use special::{binomial, factorial, gamma_fn, ln_gamma, lower_incomplete_gamma, NeumaierSum};

//! κ-μ shadowed and double shadowed (lognormal × κ-μ shadowed) fading.
//!
//! For integer μ and m the κ-μ shadowed power distribution is a finite,
//! possibly signed, mixture of Gamma densities ([`GammaMixture`]).
//! Multiplying by an independent lognormal gain and applying Gauss-Hermite
//! quadrature to the lognormal integral gives a finite scale mixture of
//! those densities ([`GhqMixture`]).

mod double;
mod mixture;
mod params;
mod sampling;

pub use double::{
    build_ghq_mixture, double_shadowed_pdf_exact, GhqMixture, GhqTerm, DEFAULT_GHQ_ORDER,
};
pub use mixture::{build_gamma_mixture, GammaComponent, GammaMixture};
pub use params::{DoubleShadowedParams, KappaMuShadowedParams, MAX_FADING_INTEGER};
pub use sampling::{sample_double_shadowed, sample_kms, DoubleShadowedSampler, KmsSampler};

/// Absolute slack below zero (or above one, for a CCDF) that is attributed to
/// rounding and clamped; larger excursions are reported as inconsistencies.
/// Scaled by the magnitude of the summed terms.
pub(crate) const CLAMP_SLACK: f64 = 1e-12;

/// x^{k−1} e^{−x} for x ≥ 0 and integer k ≥ 1, without overflow for large x.
pub fn gamma_kernel(x: f64, shape: u32) -> f64 {
    if shape == 1 {
        return (-x).exp();
    }
    if x == 0.0 {
        return 0.0;
    }
    if !(1e-200..=600.0).contains(&x) {
        ((shape as f64 - 1.0) * x.ln() - x).exp()
    } else {
        x.powi(shape as i32 - 1) * (-x).exp()
    }
}

/// Σ_{j<k} x^j / j! · e^{−x}, the Gamma(k, 1) survival function for integer k.
pub(crate) fn gamma_survival(x: f64, shape: u32) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    if x.is_infinite() {
        return 0.0;
    }
    if x > 600.0 {
        // Terms are increasing in j for x > k; sum in log space.
        let ln_x = x.ln();
        let mut ln_fact = 0.0;
        let mut total = 0.0;
        for j in 0..shape {
            if j > 0 {
                ln_fact += (j as f64).ln();
            }
            total += (j as f64 * ln_x - ln_fact - x).exp();
        }
        return total;
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 1..shape {
        term *= x / j as f64;
        sum += term;
    }
    sum * (-x).exp()
}

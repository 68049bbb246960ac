use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::mathkit::{
    factorial, gauss_hermite_rule, integrate_real_line, NeumaierSum, QuadSettings,
};

use super::mixture::{check_power, clamp_density, clamp_probability};
use super::{build_gamma_mixture, DoubleShadowedParams, GammaMixture};

/// Gauss-Hermite order used unless the caller picks another.
pub const DEFAULT_GHQ_ORDER: usize = 32;

/// Weight aₗ and scale bₗ of one lognormal quadrature node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhqTerm {
    pub weight: f64,
    pub scale: f64,
}

/// Double shadowed fading as the scale mixture Σₗ aₗ · (bₗ · H_S).
#[derive(Debug, Clone, PartialEq)]
pub struct GhqMixture {
    terms: Vec<GhqTerm>,
    base: GammaMixture,
    ghq_order: usize,
}

/// aₗ = wₗ / Σw and bₗ = exp(√2 σ̃ tₗ) over the Gauss-Hermite rule of the
/// given order.
pub fn build_ghq_mixture(params: &DoubleShadowedParams, ghq_order: usize) -> Result<GhqMixture> {
    let rule = gauss_hermite_rule(ghq_order)?;
    let total: f64 = rule.weights().iter().sum();
    let sigma = params.sigma_tilde();
    let terms = rule
        .iter()
        .map(|(t, w)| GhqTerm {
            weight: w / total,
            scale: (SQRT_2 * sigma * t).exp(),
        })
        .collect();
    Ok(GhqMixture {
        terms,
        base: build_gamma_mixture(params.base())?,
        ghq_order,
    })
}

impl GhqMixture {
    /// A mixture with explicit terms, e.g. the single (a = 1, b = 1) term that
    /// reduces to the plain κ-μ shadowed law.
    pub fn from_terms(base: GammaMixture, terms: Vec<GhqTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::invalid("a scale mixture needs at least one term"));
        }
        if terms.iter().any(|t| !(t.weight > 0.0) || !(t.scale > 0.0)) {
            return Err(Error::invalid(
                "scale mixture weights and scales must be positive",
            ));
        }
        let ghq_order = terms.len();
        Ok(Self {
            terms,
            base,
            ghq_order,
        })
    }

    pub fn terms(&self) -> &[GhqTerm] {
        &self.terms
    }

    pub fn base(&self) -> &GammaMixture {
        &self.base
    }

    pub fn ghq_order(&self) -> usize {
        self.ghq_order
    }

    /// Density Σₗ (aₗ/bₗ) f_S(h/bₗ). The 1/bₗ factor is the Jacobian of the
    /// scaled variable; without it the density would not integrate to one.
    pub fn pdf(&self, h: f64) -> Result<f64> {
        check_power(h)?;
        let mut sum = NeumaierSum::new();
        let mut magnitude = 0.0;
        for t in &self.terms {
            let (v, mag) = self.base.pdf_sum(h / t.scale);
            let k = t.weight / t.scale;
            sum.add(k * v);
            magnitude += k * mag;
        }
        clamp_density(sum.value(), magnitude, h)
    }

    /// P(H > h) = Σₗ aₗ F̄_S(h/bₗ).
    pub fn ccdf(&self, h: f64) -> Result<f64> {
        check_power(h)?;
        let mut sum = NeumaierSum::new();
        let mut magnitude = 0.0;
        for t in &self.terms {
            let (v, mag) = self.base.ccdf_sum(h / t.scale);
            sum.add(t.weight * v);
            magnitude += t.weight * mag;
        }
        clamp_probability(sum.value(), magnitude, h)
    }
}

/// Exact double shadowed density at `h`, evaluating the lognormal smoothing
/// integral of each Gamma component numerically.
///
/// With y = h·e^{σ̃z} the component integral becomes
/// ∫ exp(mᵢ(ln h + σ̃z) − h e^{σ̃z}/Ωᵢ − z²/2) dz over the real line.
/// `tol` is the absolute tolerance on the returned density.
pub fn double_shadowed_pdf_exact(params: &DoubleShadowedParams, h: f64, tol: f64) -> Result<f64> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::domain(format!(
            "exact double shadowed PDF needs finite h > 0, got {h}"
        )));
    }
    let mixture = build_gamma_mixture(params.base())?;
    let sigma = params.sigma_tilde();
    if sigma == 0.0 {
        return mixture.pdf(h);
    }
    let ln_h = h.ln();
    let n = mixture.components().len() as f64;
    let mut sum = NeumaierSum::new();
    let mut magnitude = 0.0;
    for c in mixture.components() {
        let shape = c.shape as f64;
        let norm = (2.0 * std::f64::consts::PI).sqrt()
            * factorial(c.shape - 1)
            * c.scale.powi(c.shape as i32)
            * h;
        let settings = QuadSettings::new(tol * norm / (c.weight.abs() * n), 1e-12);
        let integral = integrate_real_line(
            |z| {
                let y = h * (sigma * z).exp();
                (shape * (ln_h + sigma * z) - y / c.scale - 0.5 * z * z).exp()
            },
            &settings,
        )?;
        let term = c.weight * integral.value / norm;
        sum.add(term);
        magnitude += term.abs();
    }
    clamp_density(sum.value(), magnitude, h)
}

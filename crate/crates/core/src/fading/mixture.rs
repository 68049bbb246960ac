use crate::error::{Error, Result};
use crate::mathkit::{binomial, factorial, NeumaierSum};

use super::{gamma_kernel, gamma_survival, KappaMuShadowedParams, CLAMP_SLACK};

/// One Gamma term C · Gamma(shape, scale) of a signed mixture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaComponent {
    pub weight: f64,
    pub shape: u32,
    pub scale: f64,
}

impl GammaComponent {
    fn pdf_term(&self, h: f64) -> f64 {
        let x = h / self.scale;
        self.weight * gamma_kernel(x, self.shape) / (factorial(self.shape - 1) * self.scale)
    }

    fn ccdf_term(&self, h: f64) -> f64 {
        self.weight * gamma_survival(h / self.scale, self.shape)
    }
}

/// The κ-μ shadowed power distribution written as Σᵢ Cᵢ · Gamma(mᵢ, Ωᵢ).
///
/// Weights may be negative when μ > m. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaMixture {
    components: Vec<GammaComponent>,
}

/// Builds the Gamma mixture of a κ-μ shadowed distribution.
pub fn build_gamma_mixture(params: &KappaMuShadowedParams) -> Result<GammaMixture> {
    GammaMixture::from_params(params)
}

impl GammaMixture {
    pub fn from_params(params: &KappaMuShadowedParams) -> Result<Self> {
        let (w1, w2, w3) = params.omegas();
        let mu = params.mu() as i64;
        let m = params.m() as i64;
        let mut components = Vec::new();
        if mu > m {
            if params.kappa() == 0.0 {
                return Err(Error::domain(
                    "kappa must be > 0 when mu > m (the mixture weights involve negative powers of κμ/(κμ+m))",
                ));
            }
            for i in 1..=(mu - m) {
                components.push(GammaComponent {
                    weight: binomial((m + i - 2) as u64, i - 1)
                        * (-w1).powi(m as i32)
                        * w2.powi((1 - m - i) as i32),
                    shape: (mu - m - i + 1) as u32,
                    scale: w3,
                });
            }
            for i in (mu - m + 1)..=mu {
                components.push(GammaComponent {
                    weight: binomial((i - 2) as u64, i - mu + m - 1)
                        * (-w1).powi((i - mu + m - 1) as i32)
                        * w2.powi((1 - i) as i32),
                    shape: (mu - i + 1) as u32,
                    scale: w3 / w1,
                });
            }
        } else {
            for i in 0..=(m - mu) {
                let weight =
                    binomial((m - mu) as u64, i) * w1.powi(i as i32) * w2.powi((m - mu - i) as i32);
                if weight == 0.0 {
                    // κ = 0 collapses the mixture onto the i = m − μ term.
                    continue;
                }
                components.push(GammaComponent {
                    weight,
                    shape: (m - i) as u32,
                    scale: w3 / w1,
                });
            }
        }
        Ok(Self { components })
    }

    /// A mixture from explicit components; used for tests and custom models.
    pub fn from_components(components: Vec<GammaComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::invalid(
                "a Gamma mixture needs at least one component",
            ));
        }
        for c in &components {
            if c.shape == 0 || !(c.scale > 0.0) || !c.weight.is_finite() {
                return Err(Error::invalid(format!("invalid Gamma component {c:?}")));
            }
        }
        Ok(Self { components })
    }

    pub fn components(&self) -> &[GammaComponent] {
        &self.components
    }

    pub fn max_shape(&self) -> u32 {
        self.components.iter().map(|c| c.shape).max().unwrap_or(1)
    }

    /// Σ Cᵢ (should be one).
    pub fn total_weight(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.weight)
            .collect::<NeumaierSum>()
            .value()
    }

    /// Σ Cᵢ mᵢ Ωᵢ, the mean power (should be one).
    pub fn mean(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.weight * c.shape as f64 * c.scale)
            .collect::<NeumaierSum>()
            .value()
    }

    /// Unclamped density sum and the magnitude Σ|terms| it was formed from.
    pub(crate) fn pdf_sum(&self, h: f64) -> (f64, f64) {
        let mut sum = NeumaierSum::new();
        let mut magnitude = 0.0;
        for c in &self.components {
            let t = c.pdf_term(h);
            sum.add(t);
            magnitude += t.abs();
        }
        (sum.value(), magnitude)
    }

    pub(crate) fn ccdf_sum(&self, h: f64) -> (f64, f64) {
        let mut sum = NeumaierSum::new();
        let mut magnitude = 0.0;
        for c in &self.components {
            let t = c.ccdf_term(h);
            sum.add(t);
            magnitude += t.abs();
        }
        (sum.value(), magnitude)
    }

    /// Density of the κ-μ shadowed power at `h`.
    pub fn pdf(&self, h: f64) -> Result<f64> {
        check_power(h)?;
        let (value, magnitude) = self.pdf_sum(h);
        clamp_density(value, magnitude, h)
    }

    /// P(H > h).
    pub fn ccdf(&self, h: f64) -> Result<f64> {
        check_power(h)?;
        let (value, magnitude) = self.ccdf_sum(h);
        clamp_probability(value, magnitude, h)
    }
}

pub(crate) fn check_power(h: f64) -> Result<()> {
    if !(h >= 0.0) {
        return Err(Error::domain(format!(
            "power argument must be >= 0, got {h}"
        )));
    }
    Ok(())
}

pub(crate) fn clamp_density(value: f64, magnitude: f64, h: f64) -> Result<f64> {
    if value < -CLAMP_SLACK * magnitude.max(1.0) {
        return Err(Error::Inconsistency(format!(
            "density {value:e} < 0 at h = {h}"
        )));
    }
    Ok(value.max(0.0))
}

pub(crate) fn clamp_probability(value: f64, magnitude: f64, h: f64) -> Result<f64> {
    let slack = CLAMP_SLACK * magnitude.max(1.0);
    if value < -slack || value > 1.0 + slack {
        return Err(Error::Inconsistency(format!(
            "CCDF {value} outside [0, 1] at h = {h}"
        )));
    }
    Ok(value.clamp(0.0, 1.0))
}

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use super::{DoubleShadowedParams, KappaMuShadowedParams};

/// Draws κ-μ shadowed power with the physical cluster model: 2μ Gaussian
/// in-phase/quadrature components with a common Nakagami-m shadowed
/// line-of-sight amplitude ξ, normalised to unit mean power.
#[derive(Debug, Clone)]
pub struct KmsSampler {
    dimensions: u32,
    los_per_dimension: f64,
    scatter_sd: f64,
    shadowing: Gamma<f64>,
}

impl KmsSampler {
    pub fn new(params: &KappaMuShadowedParams) -> Self {
        let kappa = params.kappa();
        let dimensions = 2 * params.mu();
        let m = params.m() as f64;
        // d² = κ/(1+κ) split evenly over the 2μ dimensions.
        let los_power = kappa / (1.0 + kappa);
        let los_per_dimension = (los_power / dimensions as f64).sqrt();
        let scatter_sd = (1.0 / (dimensions as f64 * (1.0 + kappa))).sqrt();
        // ξ² ~ Gamma(m, 1/m): unit-mean shadowing of the dominant component.
        let shadowing = Gamma::new(m, 1.0 / m).expect("m >= 1 gives a valid Gamma");
        Self {
            dimensions,
            los_per_dimension,
            scatter_sd,
            shadowing,
        }
    }
}

impl Distribution<f64> for KmsSampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let xi = self.shadowing.sample(rng).sqrt();
        let mean = xi * self.los_per_dimension;
        (0..self.dimensions)
            .map(|_| {
                let z: f64 = StandardNormal.sample(rng);
                let x = mean + self.scatter_sd * z;
                x * x
            })
            .sum()
    }
}

/// Draws lognormal × κ-μ shadowed power. The lognormal factor is e^{σ̃Z}
/// with median one, so the mean power is e^{σ̃²/2}.
#[derive(Debug, Clone)]
pub struct DoubleShadowedSampler {
    kms: KmsSampler,
    sigma_tilde: f64,
}

impl DoubleShadowedSampler {
    pub fn new(params: &DoubleShadowedParams) -> Self {
        Self {
            kms: KmsSampler::new(params.base()),
            sigma_tilde: params.sigma_tilde(),
        }
    }
}

impl Distribution<f64> for DoubleShadowedSampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let h = self.kms.sample(rng);
        if self.sigma_tilde == 0.0 {
            return h;
        }
        let z: f64 = StandardNormal.sample(rng);
        h * (self.sigma_tilde * z).exp()
    }
}

pub fn sample_kms<R: Rng + ?Sized>(params: &KappaMuShadowedParams, rng: &mut R) -> f64 {
    KmsSampler::new(params).sample(rng)
}

pub fn sample_double_shadowed<R: Rng + ?Sized>(params: &DoubleShadowedParams, rng: &mut R) -> f64 {
    DoubleShadowedSampler::new(params).sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unit_mean_power() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (kappa, mu, m) in [(1.0, 2, 1), (0.0, 3, 3), (5.3, 1, 4)] {
            let s = KmsSampler::new(&KappaMuShadowedParams::new(kappa, mu, m).unwrap());
            let n = 1_000_000;
            let mean = (0..n).map(|_| s.sample(&mut rng)).sum::<f64>() / n as f64;
            assert!((mean - 1.0).abs() < 0.005, "({kappa},{mu},{m}) mean {mean}");
        }
    }

    #[test]
    fn exponential_median() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s = KmsSampler::new(&KappaMuShadowedParams::new(3.0, 1, 1).unwrap());
        let n = 1_000_000;
        let above = (0..n)
            .filter(|_| s.sample(&mut rng) > std::f64::consts::LN_2)
            .count();
        let frac = above as f64 / n as f64;
        assert!((frac - 0.5).abs() < 0.002, "{frac}");
    }

    #[test]
    fn zero_sigma_is_identical_in_law() {
        let p =
            DoubleShadowedParams::new(KappaMuShadowedParams::new(1.0, 2, 1).unwrap(), 0.0).unwrap();
        let a: Vec<f64> = {
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            (0..100)
                .map(|_| sample_double_shadowed(&p, &mut rng))
                .collect()
        };
        let b: Vec<f64> = {
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            (0..100).map(|_| sample_kms(p.base(), &mut rng)).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn lognormal_mean_factor() {
        let p =
            DoubleShadowedParams::new(KappaMuShadowedParams::new(1.0, 2, 1).unwrap(), 4.0).unwrap();
        let s = DoubleShadowedSampler::new(&p);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 1_000_000;
        let mean = (0..n).map(|_| s.sample(&mut rng)).sum::<f64>() / n as f64;
        let expected = (0.5 * p.sigma_tilde().powi(2)).exp();
        assert!((mean / expected - 1.0).abs() < 0.01, "{mean} vs {expected}");
    }
}

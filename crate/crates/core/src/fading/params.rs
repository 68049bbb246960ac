use crate::error::{Error, Result};

/// Largest μ or m accepted. Keeps every Gamma shape within the partition
/// range used by the coverage expansion.
pub const MAX_FADING_INTEGER: u32 = 31;

/// κ-μ shadowed power fading parameters with integer μ and m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaMuShadowedParams {
    kappa: f64,
    mu: u32,
    m: u32,
}

impl KappaMuShadowedParams {
    pub fn new(kappa: f64, mu: u32, m: u32) -> Result<Self> {
        if !(kappa >= 0.0) || !kappa.is_finite() {
            return Err(Error::invalid(format!(
                "kappa must be finite and >= 0, got {kappa}"
            )));
        }
        if mu == 0 || m == 0 {
            return Err(Error::invalid(format!(
                "mu and m must be >= 1, got mu={mu}, m={m}"
            )));
        }
        if mu > MAX_FADING_INTEGER || m > MAX_FADING_INTEGER {
            return Err(Error::invalid(format!(
                "mu and m must be <= {MAX_FADING_INTEGER}, got mu={mu}, m={m}"
            )));
        }
        Ok(Self { kappa, mu, m })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn mu(&self) -> u32 {
        self.mu
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// (ω₁, ω₂, ω₃) = (m/(κμ+m), κμ/(κμ+m), 1/(μ(κ+1))).
    pub fn omegas(&self) -> (f64, f64, f64) {
        let mu = self.mu as f64;
        let m = self.m as f64;
        let denom = self.kappa * mu + m;
        (
            m / denom,
            self.kappa * mu / denom,
            1.0 / (mu * (self.kappa + 1.0)),
        )
    }
}

/// Double shadowed fading: a lognormal gain with SD `sigma_s_db` (dB) times
/// a κ-μ shadowed gain. The lognormal factor has median one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleShadowedParams {
    base: KappaMuShadowedParams,
    sigma_s_db: f64,
}

impl DoubleShadowedParams {
    pub fn new(base: KappaMuShadowedParams, sigma_s_db: f64) -> Result<Self> {
        if !(sigma_s_db >= 0.0) || !sigma_s_db.is_finite() {
            return Err(Error::invalid(format!(
                "sigma_s_db must be finite and >= 0, got {sigma_s_db}"
            )));
        }
        Ok(Self { base, sigma_s_db })
    }

    pub fn base(&self) -> &KappaMuShadowedParams {
        &self.base
    }

    pub fn sigma_s_db(&self) -> f64 {
        self.sigma_s_db
    }

    /// σ̃ = σ_S ln(10) / 10, the SD of the natural log of the lognormal gain.
    pub fn sigma_tilde(&self) -> f64 {
        crate::db_sigma_to_neper(self.sigma_s_db)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omegas_partition_unity() {
        for &kappa in &[0.0, 0.5, 1.0, 5.3] {
            for mu in 1..=6 {
                for m in 1..=6 {
                    let p = KappaMuShadowedParams::new(kappa, mu, m).unwrap();
                    let (w1, w2, w3) = p.omegas();
                    assert!((w1 + w2 - 1.0).abs() < 1e-15);
                    assert!(w1 > 0.0 && w1 <= 1.0 && (0.0..1.0).contains(&w2));
                    assert!(w3 > 0.0 && w3 <= 1.0);
                    assert_eq!(w2 == 0.0, kappa == 0.0);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_params() {
        assert!(KappaMuShadowedParams::new(-0.1, 1, 1).is_err());
        assert!(KappaMuShadowedParams::new(f64::NAN, 1, 1).is_err());
        assert!(KappaMuShadowedParams::new(1.0, 0, 1).is_err());
        assert!(KappaMuShadowedParams::new(1.0, 1, 0).is_err());
        let base = KappaMuShadowedParams::new(1.0, 1, 1).unwrap();
        assert!(DoubleShadowedParams::new(base, -1.0).is_err());
    }

    #[test]
    fn sigma_tilde_conversion() {
        let base = KappaMuShadowedParams::new(1.0, 2, 1).unwrap();
        let p = DoubleShadowedParams::new(base, 4.0).unwrap();
        assert_eq!(p.sigma_tilde(), 4.0 * std::f64::consts::LN_10 / 10.0);
        assert_eq!(
            DoubleShadowedParams::new(base, 0.0).unwrap().sigma_tilde(),
            0.0
        );
    }
}

//! Downlink coverage probability P(SIR > θ) of the typical user.
//!
//! The desired gain is written as Σₗ aₗ Σᵢ Cᵢ Gamma(mᵢ, Ωᵢbₗ); every integer
//! shape mᵢ contributes a finite sum over partitions of j < mᵢ, and the
//! interferers enter only through E_h0 and E_hq.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fading::{build_ghq_mixture, DoubleShadowedParams, GhqMixture};
use crate::interference::{e_h0, e_hq, FadingModel};
use crate::mathkit::{factorial, integrate_semi_infinite_with, NeumaierSum, QuadSettings};
use crate::partitions::{enumerate_tj, PartitionVector};

/// Pre-clamp slack tolerated on a coverage probability.
pub const CONSISTENCY_SLACK: f64 = 1e-6;

/// Default absolute tolerance for the interference functionals.
pub const DEFAULT_TOLERANCE: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkConfig {
    density: f64,
    path_loss_exponent: f64,
    tx_power: f64,
}

impl NetworkConfig {
    pub fn new(density: f64, path_loss_exponent: f64, tx_power: f64) -> Result<Self> {
        if !(density > 0.0) || !density.is_finite() {
            return Err(Error::invalid(format!(
                "density must be finite and > 0, got {density}"
            )));
        }
        if !(path_loss_exponent > 2.0) || !path_loss_exponent.is_finite() {
            return Err(Error::invalid(format!(
                "path_loss_exponent must exceed 2, got {path_loss_exponent}"
            )));
        }
        if !(tx_power > 0.0) || !tx_power.is_finite() {
            return Err(Error::invalid(format!(
                "tx_power must be finite and > 0, got {tx_power}"
            )));
        }
        Ok(Self {
            density,
            path_loss_exponent,
            tx_power,
        })
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    pub fn path_loss_exponent(&self) -> f64 {
        self.path_loss_exponent
    }

    pub fn tx_power(&self) -> f64 {
        self.tx_power
    }
}

/// SIR threshold (linear), desired link fading and interferer fading.
#[derive(Clone)]
pub struct CoverageQuery {
    theta: f64,
    desired: DoubleShadowedParams,
    interferer: Arc<dyn FadingModel>,
    ghq_order: usize,
}

impl fmt::Debug for CoverageQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoverageQuery")
            .field("theta", &self.theta)
            .field("desired", &self.desired)
            .field("interferer", &self.interferer.name())
            .field("ghq_order", &self.ghq_order)
            .finish()
    }
}

impl CoverageQuery {
    pub fn new(
        theta: f64,
        desired: DoubleShadowedParams,
        interferer: Arc<dyn FadingModel>,
        ghq_order: usize,
    ) -> Result<Self> {
        check_theta(theta)?;
        if ghq_order == 0 {
            return Err(Error::invalid("ghq_order must be >= 1"));
        }
        Ok(Self {
            theta,
            desired,
            interferer,
            ghq_order,
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn desired(&self) -> &DoubleShadowedParams {
        &self.desired
    }

    pub fn interferer(&self) -> &Arc<dyn FadingModel> {
        &self.interferer
    }

    pub fn ghq_order(&self) -> usize {
        self.ghq_order
    }

    /// Same query at another threshold.
    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        check_theta(theta)?;
        Ok(Self {
            theta,
            ..self.clone()
        })
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(Error::invalid(format!(
            "theta must be finite and > 0, got {theta}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageOptions {
    /// Absolute tolerance handed to E_h0 / E_hq.
    pub tol: f64,
}

impl Default for CoverageOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOLERANCE,
        }
    }
}

/// E_h0 and E_1..E_{j_max} at one value of s = θ/(Ωᵢbₗ).
struct Functionals {
    /// s^{2/α}
    sc: f64,
    e0: f64,
    eq: Vec<f64>,
}

/// Memo of the interference functionals keyed by s, local to one evaluation.
struct FunctionalCache<'a> {
    interferer: &'a dyn FadingModel,
    alpha: f64,
    tol: f64,
    entries: HashMap<u64, Functionals>,
}

impl<'a> FunctionalCache<'a> {
    fn new(interferer: &'a dyn FadingModel, alpha: f64, tol: f64) -> Self {
        Self {
            interferer,
            alpha,
            tol,
            entries: HashMap::new(),
        }
    }

    fn get(&mut self, s: f64, j_max: usize) -> Result<&Functionals> {
        let entry = match self.entries.entry(s.to_bits()) {
            std::collections::hash_map::Entry::Occupied(o) => o.into_mut(),
            std::collections::hash_map::Entry::Vacant(v) => {
                let sc = s.powf(2.0 / self.alpha);
                let e0 = e_h0(self.interferer, 1.0 / sc, self.alpha, self.tol)?;
                v.insert(Functionals {
                    sc,
                    e0,
                    eq: Vec::new(),
                })
            }
        };
        while entry.eq.len() < j_max {
            let q = entry.eq.len() as u32 + 1;
            entry
                .eq
                .push(e_hq(self.interferer, q, s, self.alpha, self.tol)?);
        }
        Ok(entry)
    }
}

fn partitions_up_to(max_shape: u32) -> Result<Vec<Vec<PartitionVector>>> {
    (0..max_shape as usize).map(enumerate_tj).collect()
}

fn finish(sum: &NeumaierSum) -> Result<f64> {
    let p = sum.value();
    if !(-CONSISTENCY_SLACK..=1.0 + CONSISTENCY_SLACK).contains(&p) {
        return Err(Error::Inconsistency(format!(
            "coverage probability {p} outside [0, 1]"
        )));
    }
    Ok(p.clamp(0.0, 1.0))
}

/// Closed-form coverage probability.
///
/// Does not depend on the density or the transmit power, which cancel in the
/// interference-limited SIR.
pub fn coverage_closed_form(net: &NetworkConfig, q: &CoverageQuery) -> Result<f64> {
    coverage_closed_form_with(net, q, &CoverageOptions::default())
}

pub fn coverage_closed_form_with(
    net: &NetworkConfig,
    q: &CoverageQuery,
    opts: &CoverageOptions,
) -> Result<f64> {
    let mixture = build_ghq_mixture(&q.desired, q.ghq_order)?;
    coverage_closed_form_mixture(net, &mixture, q.theta, q.interferer.as_ref(), opts)
}

/// Closed form for an explicit scale mixture of the desired gain.
pub fn coverage_closed_form_mixture(
    net: &NetworkConfig,
    mixture: &GhqMixture,
    theta: f64,
    interferer: &dyn FadingModel,
    opts: &CoverageOptions,
) -> Result<f64> {
    check_theta(theta)?;
    let alpha = net.path_loss_exponent;
    let partitions = partitions_up_to(mixture.base().max_shape())?;
    let mut cache = FunctionalCache::new(interferer, alpha, opts.tol);
    let mut total = NeumaierSum::new();
    for term in mixture.terms() {
        for c in mixture.base().components() {
            let s = theta / (c.scale * term.scale);
            let f = cache.get(s, c.shape as usize - 1)?;
            let g = 1.0 + f.sc * f.e0;
            let factor_scale = 2.0 * f.sc / alpha;
            let mut inner = NeumaierSum::new();
            for tj in &partitions[..c.shape as usize] {
                for t in tj {
                    // (−1)^j cancels against the (−1)^q factors inside A.
                    let sign = if t.order().is_multiple_of(2) {
                        1.0
                    } else {
                        -1.0
                    };
                    let b = t.b_coefficient() as i32;
                    inner.add(
                        sign * t.a_coefficient(&f.eq, factor_scale) * factorial(b as u32 - 1)
                            / g.powi(b),
                    );
                }
            }
            total.add(term.weight * c.weight * inner.value());
        }
    }
    finish(&total)
}

/// Coverage conditioned on the serving distance r.
pub fn conditional_coverage(net: &NetworkConfig, q: &CoverageQuery, r: f64) -> Result<f64> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::invalid(format!(
            "serving distance must be finite and >= 0, got {r}"
        )));
    }
    let mixture = build_ghq_mixture(&q.desired, q.ghq_order)?;
    let partitions = partitions_up_to(mixture.base().max_shape())?;
    let mut cache = FunctionalCache::new(
        q.interferer.as_ref(),
        net.path_loss_exponent,
        DEFAULT_TOLERANCE,
    );
    let value = conditional_sum(net, &mixture, &partitions, &mut cache, q.theta, r)?;
    finish(&std::iter::once(value).collect())
}

fn conditional_sum(
    net: &NetworkConfig,
    mixture: &GhqMixture,
    partitions: &[Vec<PartitionVector>],
    cache: &mut FunctionalCache<'_>,
    theta: f64,
    r: f64,
) -> Result<f64> {
    let alpha = net.path_loss_exponent;
    let area = std::f64::consts::PI * net.density * r * r;
    let mut total = NeumaierSum::new();
    for term in mixture.terms() {
        for c in mixture.base().components() {
            let s = theta / (c.scale * term.scale);
            let f = cache.get(s, c.shape as usize - 1)?;
            let laplace = (-area * f.sc * f.e0).exp();
            let w_scale = 2.0 * area * f.sc / alpha;
            let mut w = NeumaierSum::new();
            for tj in &partitions[..c.shape as usize] {
                for t in tj {
                    let sign = if t.order().is_multiple_of(2) {
                        1.0
                    } else {
                        -1.0
                    };
                    w.add(sign * t.a_coefficient(&f.eq, w_scale));
                }
            }
            total.add(term.weight * c.weight * laplace * w.value());
        }
    }
    Ok(total.value())
}

/// Coverage obtained by integrating the conditional coverage against the
/// serving-distance density 2πλr e^{−πλr²} numerically.
pub fn coverage_radial_integral(net: &NetworkConfig, q: &CoverageQuery, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tolerance must be > 0, got {tol}")));
    }
    let mixture = build_ghq_mixture(&q.desired, q.ghq_order)?;
    let partitions = partitions_up_to(mixture.base().max_shape())?;
    let mut cache = FunctionalCache::new(
        q.interferer.as_ref(),
        net.path_loss_exponent,
        DEFAULT_TOLERANCE,
    );
    // Warm the cache so the integrand below cannot fail.
    conditional_sum(net, &mixture, &partitions, &mut cache, q.theta, 0.0)?;
    let scale = (std::f64::consts::PI * net.density).sqrt();
    let integral = integrate_semi_infinite_with(
        // u = πλr²
        |u| {
            let r = u.sqrt() / scale;
            let v = conditional_sum(net, &mixture, &partitions, &mut cache, q.theta, r)
                .unwrap_or(f64::NAN);
            (-u).exp() * v
        },
        0.0,
        &QuadSettings::new(0.1 * tol, 0.1 * tol),
    )?;
    finish(&std::iter::once(integral.value).collect())
}

/// Closed form at each threshold, evaluated in parallel; order follows `thetas`.
pub fn coverage_sweep(net: &NetworkConfig, q: &CoverageQuery, thetas: &[f64]) -> Result<Vec<f64>> {
    thetas
        .par_iter()
        .map(|&theta| coverage_closed_form(net, &q.with_theta(theta)?))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::db_to_linear;
    use crate::fading::{GhqTerm, KappaMuShadowedParams};
    use crate::interference::{parse_model, Rayleigh, RayleighLognormal};
    use std::f64::consts::FRAC_PI_4;

    fn net() -> NetworkConfig {
        NetworkConfig::new(1e-7, 4.0, 1.0).unwrap()
    }

    fn query(
        theta: f64,
        kappa: f64,
        mu: u32,
        m: u32,
        sigma_db: f64,
        interferer: Arc<dyn FadingModel>,
    ) -> CoverageQuery {
        let desired =
            DoubleShadowedParams::new(KappaMuShadowedParams::new(kappa, mu, m).unwrap(), sigma_db)
                .unwrap();
        CoverageQuery::new(theta, desired, interferer, 32).unwrap()
    }

    fn rayleigh_baseline(theta: f64) -> f64 {
        1.0 / (1.0 + theta.sqrt() * (std::f64::consts::FRAC_PI_2 - theta.sqrt().recip().atan()))
    }

    #[test]
    fn rayleigh_baseline_matches() {
        for &kappa in &[0.5, 1.0, 3.0] {
            let pc =
                coverage_closed_form(&net(), &query(1.0, kappa, 1, 1, 0.0, Arc::new(Rayleigh)))
                    .unwrap();
            assert!((pc - 1.0 / (1.0 + FRAC_PI_4)).abs() < 1e-9, "{pc}");
        }
        for &theta_db in &[-10.0, -3.0, 7.0, 15.0] {
            let theta = db_to_linear(theta_db);
            let pc =
                coverage_closed_form(&net(), &query(theta, 1.0, 1, 1, 0.0, Arc::new(Rayleigh)))
                    .unwrap();
            assert!(
                (pc - rayleigh_baseline(theta)).abs() < 1e-9,
                "{theta_db}: {pc}"
            );
        }
    }

    #[test]
    fn threshold_limits() {
        let low =
            coverage_closed_form(&net(), &query(1e-6, 1.0, 2, 1, 4.0, Arc::new(Rayleigh))).unwrap();
        let high =
            coverage_closed_form(&net(), &query(1e6, 1.0, 2, 1, 4.0, Arc::new(Rayleigh))).unwrap();
        assert!(low >= 0.999, "{low}");
        assert!(high <= 1e-2, "{high}");
    }

    #[test]
    fn density_and_power_cancel() {
        let q = query(2.0, 1.0, 2, 3, 4.0, Arc::new(Rayleigh));
        let base = coverage_closed_form(&net(), &q).unwrap();
        for (lambda, p) in [(1e-6, 1.0), (1e-7, 10.0), (3e-3, 0.2)] {
            let other = NetworkConfig::new(lambda, 4.0, p).unwrap();
            assert_eq!(coverage_closed_form(&other, &q).unwrap(), base);
        }
    }

    #[test]
    fn radial_integral_matches_rayleigh() {
        let q = query(1.0, 1.0, 1, 1, 0.0, Arc::new(Rayleigh));
        let radial = coverage_radial_integral(&net(), &q, 1e-10).unwrap();
        assert!((radial - 1.0 / (1.0 + FRAC_PI_4)).abs() < 1e-8, "{radial}");
    }

    #[test]
    fn radial_integral_matches_closed_form() {
        let q = query(1.0, 1.0, 2, 1, 4.0, Arc::new(Rayleigh));
        let closed = coverage_closed_form(&net(), &q).unwrap();
        for lambda in [1e-7, 1e-6] {
            let n = NetworkConfig::new(lambda, 4.0, 1.0).unwrap();
            let radial = coverage_radial_integral(&n, &q, 1e-10).unwrap();
            assert!((radial - closed).abs() < 1e-8, "{radial} vs {closed}");
        }
    }

    #[test]
    fn equivalence_grid() {
        let interferers: [Arc<dyn FadingModel>; 3] = [
            Arc::new(Rayleigh),
            parse_model("nakagami:m=2").unwrap(),
            Arc::new(RayleighLognormal::new(4.0).unwrap()),
        ];
        let n = NetworkConfig::new(1e-7, 3.5, 1.0).unwrap();
        for (kappa, mu, m) in [(1.0, 2, 1), (1.0, 1, 2), (2.0, 3, 3)] {
            for sigma in [0.0, 2.0, 6.0] {
                for theta_db in [-5.0, 3.0, 12.0] {
                    let i = &interferers[(mu as usize + m as usize) % 3];
                    let q = query(db_to_linear(theta_db), kappa, mu, m, sigma, i.clone());
                    let closed = coverage_closed_form(&n, &q).unwrap();
                    let radial = coverage_radial_integral(&n, &q, 1e-10).unwrap();
                    assert!(
                        (closed - radial).abs() < 1e-8,
                        "({kappa},{mu},{m}) σ={sigma} θ={theta_db}: {closed} vs {radial}"
                    );
                }
            }
        }
    }

    #[test]
    fn zero_shadowing_reduces_to_single_term() {
        for (kappa, mu, m) in [(1.0, 2, 1), (1.0, 1, 2), (0.5, 3, 5)] {
            let q = query(1.0, kappa, mu, m, 0.0, Arc::new(Rayleigh));
            let full = coverage_closed_form(&net(), &q).unwrap();
            let base = build_ghq_mixture(q.desired(), 1).unwrap().base().clone();
            let single = GhqMixture::from_terms(
                base,
                vec![GhqTerm {
                    weight: 1.0,
                    scale: 1.0,
                }],
            )
            .unwrap();
            let reduced = coverage_closed_form_mixture(
                &net(),
                &single,
                1.0,
                &Rayleigh,
                &CoverageOptions::default(),
            )
            .unwrap();
            assert!((full - reduced).abs() < 1e-12, "{full} vs {reduced}");
        }
    }

    #[test]
    fn trends() {
        let pc = |kappa, mu, m, sigma| {
            coverage_closed_form(&net(), &query(1.0, kappa, mu, m, sigma, Arc::new(Rayleigh)))
                .unwrap()
        };
        assert!(pc(1.0, 2, 4, 4.0) > pc(1.0, 2, 1, 4.0));
        assert!(pc(1.0, 3, 2, 4.0) > pc(1.0, 1, 2, 4.0));
        assert!(pc(1.0, 2, 1, 8.0) < pc(1.0, 2, 1, 2.0));
    }

    #[test]
    fn sweep_is_nonincreasing() {
        let q = query(
            1.0,
            1.0,
            2,
            3,
            4.0,
            Arc::new(RayleighLognormal::new(4.0).unwrap()),
        );
        let thetas: Vec<f64> = (-10..=20).map(|d| db_to_linear(d as f64)).collect();
        let pcs = coverage_sweep(&net(), &q, &thetas).unwrap();
        for w in pcs.windows(2) {
            assert!(w[1] <= w[0], "{pcs:?}");
        }
    }

    #[test]
    fn conditional_coverage_limits() {
        let q = query(1.0, 1.0, 2, 1, 4.0, Arc::new(Rayleigh));
        assert!((conditional_coverage(&net(), &q, 0.0).unwrap() - 1.0).abs() < 1e-12);
        assert!(conditional_coverage(&net(), &q, 1e5).unwrap() < 1e-6);
    }

    #[test]
    fn rejects_bad_inputs() {
        let err = NetworkConfig::new(1e-7, 1.5, 1.0).unwrap_err();
        assert!(err.to_string().contains("path_loss_exponent must exceed 2"));
        assert!(NetworkConfig::new(0.0, 4.0, 1.0).is_err());
        assert!(NetworkConfig::new(1e-7, 4.0, -1.0).is_err());
        let d =
            DoubleShadowedParams::new(KappaMuShadowedParams::new(1.0, 1, 1).unwrap(), 0.0).unwrap();
        assert!(CoverageQuery::new(0.0, d, Arc::new(Rayleigh), 32).is_err());
        assert!(CoverageQuery::new(1.0, d, Arc::new(Rayleigh), 0).is_err());
    }
}

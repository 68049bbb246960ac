//! Monte Carlo estimate of the coverage probability over a truncated PPP.
//!
//! Realization i reads ChaCha8 stream i under the user seed, and stations
//! are drawn outward from the typical user at the origin. The estimate
//! therefore depends only on (seed, realizations), never on the worker
//! count, and two runs that differ only in window size share every station
//! of the smaller window. Workers pick up fixed blocks of [`BLOCK_SIZE`].

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;

use crate::coverage::{CoverageQuery, NetworkConfig};
use crate::error::{Error, Result};
use crate::fading::DoubleShadowedSampler;

pub const BLOCK_SIZE: u64 = 1000;
pub const DEFAULT_WINDOW_FACTOR: f64 = 15.0;
pub const MIN_WINDOW_FACTOR: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    realizations: u64,
    window_radius_factor: f64,
    seed: u64,
    workers: usize,
}

impl SimConfig {
    pub fn new(
        realizations: u64,
        window_radius_factor: f64,
        seed: u64,
        workers: usize,
    ) -> Result<Self> {
        if realizations == 0 {
            return Err(Error::invalid("realizations must be >= 1"));
        }
        if !(window_radius_factor >= MIN_WINDOW_FACTOR) || !window_radius_factor.is_finite() {
            return Err(Error::invalid(format!(
                "window_radius_factor must be >= {MIN_WINDOW_FACTOR}, got {window_radius_factor}"
            )));
        }
        if workers == 0 {
            return Err(Error::invalid("workers must be >= 1"));
        }
        Ok(Self {
            realizations,
            window_radius_factor,
            seed,
            workers,
        })
    }

    /// Default window, one worker per available core.
    pub fn with_defaults(realizations: u64, seed: u64) -> Result<Self> {
        let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
        Self::new(realizations, DEFAULT_WINDOW_FACTOR, seed, workers)
    }

    pub fn realizations(&self) -> u64 {
        self.realizations
    }

    pub fn window_radius_factor(&self) -> f64 {
        self.window_radius_factor
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// Window radius factor/√(πλ).
    pub fn window_radius(&self, net: &NetworkConfig) -> f64 {
        self.window_radius_factor / (PI * net.density()).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageEstimate {
    pub p_hat: f64,
    /// 1.96·√(p̂(1 − p̂)/n).
    pub half_width_95: f64,
    pub realizations_used: u64,
}

impl CoverageEstimate {
    pub fn from_counts(successes: u64, realizations: u64) -> Self {
        let n = realizations as f64;
        let p_hat = successes as f64 / n;
        Self {
            p_hat,
            half_width_95: 1.96 * (p_hat * (1.0 - p_hat) / n).sqrt(),
            realizations_used: realizations,
        }
    }
}

/// One simulated network seen from the typical user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Realization {
    pub serving_distance: f64,
    /// +∞ when the serving station is alone in the window.
    pub sir: f64,
}

/// SIR for explicit (distance, gain) pairs; `interferers` may be empty.
pub fn sir_from_geometry(
    power: f64,
    alpha: f64,
    serving: (f64, f64),
    interferers: &[(f64, f64)],
) -> f64 {
    let signal = power * serving.1 * serving.0.powf(-alpha);
    let interference: f64 = interferers
        .iter()
        .map(|&(r, h)| power * h * r.powf(-alpha))
        .sum();
    if interference == 0.0 {
        f64::INFINITY
    } else {
        signal / interference
    }
}

struct Simulation<'a> {
    net: &'a NetworkConfig,
    q: &'a CoverageQuery,
    /// λπR², the mean number of stations in the window.
    window_mass: f64,
    desired: DoubleShadowedSampler,
}

impl<'a> Simulation<'a> {
    fn new(net: &'a NetworkConfig, q: &'a CoverageQuery, sim: &SimConfig) -> Self {
        Self {
            net,
            q,
            window_mass: sim.window_radius_factor * sim.window_radius_factor,
            desired: DoubleShadowedSampler::new(q.desired()),
        }
    }

    /// Stations are generated outward from the user: λπr² of successive
    /// points are the arrival times of a unit-rate Poisson process, which
    /// gives the same law as a Poisson count of uniform points in the disk.
    /// The first point is the serving station.
    fn realize(&self, rng: &mut ChaCha8Rng) -> Realization {
        let to_r2 = 1.0 / (PI * self.net.density());
        let first = loop {
            let t: f64 = Exp1.sample(rng);
            if t <= self.window_mass {
                break t;
            }
        };
        let alpha = self.net.path_loss_exponent();
        let half_alpha = 0.5 * alpha;
        let power = self.net.tx_power();
        let serving_distance = (first * to_r2).sqrt();
        let signal = power * self.desired.sample(rng) * serving_distance.powf(-alpha);
        let mut interference = 0.0;
        let mut t = first;
        loop {
            t += Distribution::<f64>::sample(&Exp1, rng);
            if t > self.window_mass {
                break;
            }
            interference += power * self.q.interferer().sample(rng) * (t * to_r2).powf(-half_alpha);
        }
        let sir = if interference == 0.0 {
            f64::INFINITY
        } else {
            signal / interference
        };
        Realization {
            serving_distance,
            sir,
        }
    }

    fn successes(&self, base: &ChaCha8Rng, range: std::ops::Range<u64>) -> u64 {
        let theta = self.q.theta();
        range
            .filter(|&i| self.realize(&mut realization_rng(base, i)).sir > theta)
            .count() as u64
    }
}

/// Realization i always reads ChaCha stream i under the user seed.
fn realization_rng(base: &ChaCha8Rng, index: u64) -> ChaCha8Rng {
    let mut rng = base.clone();
    rng.set_stream(index);
    rng.set_word_pos(0);
    rng
}

/// Draws one realization from `rng`.
pub fn sample_realization(
    net: &NetworkConfig,
    q: &CoverageQuery,
    sim: &SimConfig,
    rng: &mut ChaCha8Rng,
) -> Realization {
    Simulation::new(net, q, sim).realize(rng)
}

pub fn sample_sir(
    net: &NetworkConfig,
    q: &CoverageQuery,
    sim: &SimConfig,
    rng: &mut ChaCha8Rng,
) -> f64 {
    sample_realization(net, q, sim, rng).sir
}

/// Serving distances of the first `n` realizations.
pub fn sample_serving_distances(
    net: &NetworkConfig,
    q: &CoverageQuery,
    sim: &SimConfig,
    n: usize,
) -> Vec<f64> {
    let simulation = Simulation::new(net, q, sim);
    let base = ChaCha8Rng::seed_from_u64(sim.seed);
    (0..n as u64)
        .map(|i| {
            simulation
                .realize(&mut realization_rng(&base, i))
                .serving_distance
        })
        .collect()
}

/// Fraction of realizations with SIR > θ.
pub fn simulate_coverage(
    net: &NetworkConfig,
    q: &CoverageQuery,
    sim: &SimConfig,
) -> Result<CoverageEstimate> {
    let simulation = Simulation::new(net, q, sim);
    let blocks = sim.realizations.div_ceil(BLOCK_SIZE);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(sim.workers)
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    let base = ChaCha8Rng::seed_from_u64(sim.seed);
    let successes: u64 = pool.install(|| {
        (0..blocks)
            .into_par_iter()
            .map(|b| {
                let end = sim.realizations.min((b + 1) * BLOCK_SIZE);
                simulation.successes(&base, b * BLOCK_SIZE..end)
            })
            .sum()
    });
    Ok(CoverageEstimate::from_counts(successes, sim.realizations))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coverage::coverage_closed_form;
    use crate::fading::{DoubleShadowedParams, KappaMuShadowedParams};
    use crate::interference::{Rayleigh, UnitGain};
    use std::sync::Arc;

    fn net() -> NetworkConfig {
        NetworkConfig::new(1e-7, 4.0, 1.0).unwrap()
    }

    fn rayleigh_query(theta: f64) -> CoverageQuery {
        let d =
            DoubleShadowedParams::new(KappaMuShadowedParams::new(1.0, 1, 1).unwrap(), 0.0).unwrap();
        CoverageQuery::new(theta, d, Arc::new(Rayleigh), 32).unwrap()
    }

    #[test]
    fn geometry_hook() {
        let sir = sir_from_geometry(1.0, 4.0, (2.0, 1.0), &[(5.0, 1.0)]);
        assert!((sir - (5.0f64 / 2.0).powi(4)).abs() < 1e-12);
        assert_eq!(sir_from_geometry(3.0, 4.0, (2.0, 0.7), &[]), f64::INFINITY);
        // An interference-free realization covers any finite threshold.
        assert!(sir_from_geometry(3.0, 4.0, (2.0, 0.7), &[]) > 1e300);
    }

    #[test]
    fn serving_distance_law() {
        let sim = SimConfig::new(1, DEFAULT_WINDOW_FACTOR, 11, 1).unwrap();
        let n = 100_000;
        let mut r = sample_serving_distances(&net(), &rayleigh_query(1.0), &sim, n);
        r.sort_by(f64::total_cmp);
        let ks = r
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let cdf = -(-PI * 1e-7 * x * x).exp_m1();
                (cdf - i as f64 / n as f64)
                    .abs()
                    .max((cdf - (i + 1) as f64 / n as f64).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks <= 0.01, "{ks}");
    }

    #[test]
    fn deterministic_across_workers() {
        let q = rayleigh_query(1.0);
        let runs: Vec<_> = [1, 3, 8]
            .iter()
            .map(|&w| {
                simulate_coverage(&net(), &q, &SimConfig::new(12_345, 10.0, 42, w).unwrap())
                    .unwrap()
            })
            .collect();
        assert_eq!(runs[0], runs[1]);
        assert_eq!(runs[0], runs[2]);
        assert_eq!(runs[0].realizations_used, 12_345);
    }

    #[test]
    fn rayleigh_baseline() {
        let est = simulate_coverage(
            &net(),
            &rayleigh_query(1.0),
            &SimConfig::with_defaults(100_000, 1).unwrap(),
        )
        .unwrap();
        assert!((est.p_hat - 0.5601).abs() < 0.01, "{est:?}");
        let hw = 1.96 * (est.p_hat * (1.0 - est.p_hat) / 1e5).sqrt();
        assert_eq!(est.half_width_95, hw);
    }

    #[test]
    fn vanishing_threshold() {
        let est = simulate_coverage(
            &net(),
            &rayleigh_query(1e-9),
            &SimConfig::with_defaults(10_000, 3).unwrap(),
        )
        .unwrap();
        assert!(est.p_hat >= 0.999, "{est:?}");
    }

    #[test]
    fn matches_closed_form() {
        let d =
            DoubleShadowedParams::new(KappaMuShadowedParams::new(1.0, 2, 1).unwrap(), 4.0).unwrap();
        let q = CoverageQuery::new(1.0, d, Arc::new(Rayleigh), 32).unwrap();
        let est =
            simulate_coverage(&net(), &q, &SimConfig::with_defaults(100_000, 5).unwrap()).unwrap();
        let pc = coverage_closed_form(&net(), &q).unwrap();
        assert!(
            (est.p_hat - pc).abs() <= 0.01f64.max(3.0 * est.half_width_95),
            "{est:?} vs {pc}"
        );
    }

    #[test]
    fn unit_gains_give_finite_sir() {
        let d =
            DoubleShadowedParams::new(KappaMuShadowedParams::new(1.0, 1, 1).unwrap(), 0.0).unwrap();
        let q = CoverageQuery::new(1.0, d, Arc::new(UnitGain), 32).unwrap();
        let sim = SimConfig::new(1, 5.0, 9, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let sir = sample_sir(&net(), &q, &sim, &mut rng);
        assert!(sir.is_finite() && sir > 0.0);
    }

    #[test]
    fn rejects_bad_config() {
        assert!(SimConfig::new(0, 15.0, 1, 1).is_err());
        assert!(SimConfig::new(10, 4.0, 1, 1).is_err());
        assert!(SimConfig::new(10, 15.0, 1, 0).is_err());
    }
}

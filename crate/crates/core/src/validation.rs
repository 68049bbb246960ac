//! Acceptance checks shared by the test suite and `pppcov validate`.
//!
//! Each check returns a [`CriterionOutcome`] instead of panicking, so a
//! caller can report every criterion even when some fail.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;

use crate::coverage::{
    coverage_closed_form, coverage_closed_form_mixture, coverage_radial_integral, CoverageOptions,
    CoverageQuery, NetworkConfig,
};
use crate::db_to_linear;
use crate::error::Result;
use crate::fading::{
    build_gamma_mixture, build_ghq_mixture, double_shadowed_pdf_exact, DoubleShadowedParams,
    DoubleShadowedSampler, GhqMixture, GhqTerm, KappaMuShadowedParams, KmsSampler,
    DEFAULT_GHQ_ORDER,
};
use crate::interference::{FadingModel, Rayleigh, RayleighLognormal};
use crate::mathkit::{integrate_semi_infinite_with, QuadSettings};
use crate::simulator::{simulate_coverage, CoverageEstimate, SimConfig, DEFAULT_WINDOW_FACTOR};

#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl CriterionOutcome {
    /// `PASS name (detail) [1.23 s]`
    pub fn line(&self) -> String {
        format!(
            "{} {} ({}) [{:.2} s]",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ValidationOptions {
    /// Skip the Monte Carlo criteria.
    pub quick: bool,
    pub seed: u64,
    pub workers: usize,
    pub mc_realizations: u64,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self {
            quick: false,
            seed: 1,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            mc_realizations: 100_000,
        }
    }
}

/// A named check; `Ok((passed, detail))` or an error, which counts as failed.
pub struct Criterion {
    pub name: &'static str,
    pub monte_carlo: bool,
    check: fn(&ValidationOptions) -> Result<(bool, String)>,
}

impl Criterion {
    pub fn run(&self, opts: &ValidationOptions) -> CriterionOutcome {
        let start = Instant::now();
        let (passed, detail) = match (self.check)(opts) {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        CriterionOutcome {
            name: self.name,
            passed,
            detail,
            elapsed: start.elapsed(),
        }
    }
}

pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion {
            name: "mixture identities",
            monte_carlo: false,
            check: mixture_identities,
        },
        Criterion {
            name: "distribution consistency",
            monte_carlo: false,
            check: distribution_consistency,
        },
        Criterion {
            name: "ghq fidelity",
            monte_carlo: false,
            check: ghq_fidelity,
        },
        Criterion {
            name: "sampler correctness",
            monte_carlo: false,
            check: sampler_correctness,
        },
        Criterion {
            name: "rayleigh baseline",
            monte_carlo: false,
            check: rayleigh_baseline,
        },
        Criterion {
            name: "internal equivalence",
            monte_carlo: false,
            check: internal_equivalence,
        },
        Criterion {
            name: "closed form vs monte carlo",
            monte_carlo: true,
            check: closed_form_vs_monte_carlo,
        },
        Criterion {
            name: "zero shadowing reduction",
            monte_carlo: false,
            check: zero_shadowing_reduction,
        },
        Criterion {
            name: "qualitative trends",
            monte_carlo: false,
            check: qualitative_trends,
        },
        Criterion {
            name: "density and power invariance",
            monte_carlo: false,
            check: density_power_invariance,
        },
    ]
}

pub fn find(name: &str) -> Option<Criterion> {
    criteria().into_iter().find(|c| c.name == name)
}

/// Runs every criterion in order. Quick mode skips the Monte Carlo ones and
/// the Monte Carlo half of the invariance check.
pub fn run_all(opts: &ValidationOptions) -> Vec<CriterionOutcome> {
    criteria()
        .iter()
        .filter(|c| !(opts.quick && c.monte_carlo))
        .map(|c| c.run(opts))
        .collect()
}

const KAPPAS: [f64; 4] = [0.5, 1.0, 2.0, 5.3];

fn grid() -> Result<Vec<KappaMuShadowedParams>> {
    let mut out = Vec::new();
    for &kappa in &KAPPAS {
        for mu in 1..=6 {
            for m in 1..=6 {
                out.push(KappaMuShadowedParams::new(kappa, mu, m)?);
            }
        }
    }
    Ok(out)
}

fn label(p: &KappaMuShadowedParams) -> String {
    format!("({},{},{})", p.kappa(), p.mu(), p.m())
}

/// Tracks the worst value seen and where it happened.
struct Worst {
    value: f64,
    at: String,
}

impl Worst {
    fn new() -> Self {
        Self {
            value: f64::NEG_INFINITY,
            at: String::new(),
        }
    }

    /// NaN is kept once seen so that it fails the bound.
    fn update(&mut self, value: f64, at: impl FnOnce() -> String) {
        if self.value.is_nan() {
            return;
        }
        if value.is_nan() || value > self.value {
            self.value = value;
            self.at = at();
        }
    }

    fn within(&self, bound: f64, what: &str) -> (bool, String) {
        (
            self.value <= bound,
            format!(
                "max {what} {:.3e} at {} (bound {bound:e})",
                self.value, self.at
            ),
        )
    }
}

fn mixture_identities(_: &ValidationOptions) -> Result<(bool, String)> {
    let mut worst = Worst::new();
    for p in grid()? {
        let mix = build_gamma_mixture(&p)?;
        let total: f64 = mix.components().iter().map(|c| c.weight).sum();
        let mean: f64 = mix
            .components()
            .iter()
            .map(|c| c.weight * c.shape as f64 * c.scale)
            .sum();
        worst.update((total - 1.0).abs().max((mean - 1.0).abs()), || label(&p));
    }
    Ok(worst.within(1e-10, "identity error"))
}

fn distribution_consistency(_: &ValidationOptions) -> Result<(bool, String)> {
    let mut worst = Worst::new();
    let settings = QuadSettings::new(1e-12, 1e-12);
    for p in grid()? {
        let mix = build_gamma_mixture(&p)?;
        for &h in &[0.5, 1.0, 2.0, 5.0] {
            let tail =
                integrate_semi_infinite_with(|x| mix.pdf(x).unwrap_or(f64::NAN), h, &settings)?;
            worst.update((tail.value - mix.ccdf(h)?).abs(), || {
                format!("{} h={h}", label(&p))
            });
        }
    }
    Ok(worst.within(1e-8, "|ccdf - ∫pdf|"))
}

fn ghq_fidelity(_: &ValidationOptions) -> Result<(bool, String)> {
    let mut worst = Worst::new();
    let points = 400;
    for (kappa, mu, m) in [(1.0, 2, 1), (2.0, 2, 4)] {
        for sigma_db in [2.0, 4.0, 8.0] {
            let params =
                DoubleShadowedParams::new(KappaMuShadowedParams::new(kappa, mu, m)?, sigma_db)?;
            let ghq = build_ghq_mixture(&params, DEFAULT_GHQ_ORDER)?;
            for k in 0..points {
                let h = 0.01 + (20.0 - 0.01) * k as f64 / (points - 1) as f64;
                let err = (ghq.pdf(h)? - double_shadowed_pdf_exact(&params, h, 1e-10)?).abs();
                worst.update(err, || {
                    format!("({kappa},{mu},{m}) σ={sigma_db} dB h={h:.3}")
                });
            }
        }
    }
    Ok(worst.within(1e-3, "|pdf_ghq - pdf_exact|"))
}

/// Kolmogorov-Smirnov distance of `samples` from `cdf`; sorts in place.
pub fn ks_distance(samples: &mut [f64], cdf: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x)?;
        d = d
            .max((f - i as f64 / n).abs())
            .max((f - (i + 1) as f64 / n).abs());
    }
    Ok(d)
}

fn sampler_correctness(opts: &ValidationOptions) -> Result<(bool, String)> {
    let n = 1_000_000;
    let mut worst = Worst::new();
    for (k, (kappa, mu, m)) in [(1.0, 2, 1), (1.0, 1, 2)].into_iter().enumerate() {
        let params = KappaMuShadowedParams::new(kappa, mu, m)?;
        let mix = build_gamma_mixture(&params)?;
        let sampler = KmsSampler::new(&params);
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(k as u64));
        let mut xs: Vec<f64> = (0..n).map(|_| sampler.sample(&mut rng)).collect();
        let d = ks_distance(&mut xs, |h| Ok(1.0 - mix.ccdf(h)?))?;
        worst.update(d, || format!("κ-μ shadowed ({kappa},{mu},{m})"));

        let ds = DoubleShadowedParams::new(params, 4.0)?;
        let ghq = build_ghq_mixture(&ds, DEFAULT_GHQ_ORDER)?;
        let sampler = DoubleShadowedSampler::new(&ds);
        let mut xs: Vec<f64> = (0..n).map(|_| sampler.sample(&mut rng)).collect();
        let d = ks_distance(&mut xs, |h| Ok(1.0 - ghq.ccdf(h)?))?;
        worst.update(d, || format!("double shadowed ({kappa},{mu},{m}) σ=4 dB"));
    }
    Ok(worst.within(0.002, "KS distance"))
}

fn reference_network() -> Result<NetworkConfig> {
    NetworkConfig::new(1e-7, 4.0, 1.0)
}

fn query(
    theta_db: f64,
    kappa: f64,
    mu: u32,
    m: u32,
    sigma_db: f64,
    i: Arc<dyn FadingModel>,
) -> Result<CoverageQuery> {
    let desired = DoubleShadowedParams::new(KappaMuShadowedParams::new(kappa, mu, m)?, sigma_db)?;
    CoverageQuery::new(db_to_linear(theta_db), desired, i, DEFAULT_GHQ_ORDER)
}

fn rayleigh_baseline(_: &ValidationOptions) -> Result<(bool, String)> {
    let expected = 1.0 / (1.0 + std::f64::consts::FRAC_PI_4);
    let mut worst = Worst::new();
    for kappa in [0.5, 1.0, 5.3] {
        let pc = coverage_closed_form(
            &reference_network()?,
            &query(0.0, kappa, 1, 1, 0.0, Arc::new(Rayleigh))?,
        )?;
        worst.update((pc - expected).abs(), || format!("κ={kappa} p_c={pc:.8}"));
    }
    Ok(worst.within(1e-6, "|p_c - 1/(1+π/4)|"))
}

/// θ ∈ {−5, 0, 5, 10} dB × desired {(1,2,1), (1,1,2)} × σ_S {0, 4 dB} ×
/// interferers {Rayleigh, Rayleigh×Lognormal(4 dB)}.
fn equivalence_grid() -> Result<Vec<(String, CoverageQuery)>> {
    let interferers: [Arc<dyn FadingModel>; 2] =
        [Arc::new(Rayleigh), Arc::new(RayleighLognormal::new(4.0)?)];
    let mut out = Vec::new();
    for theta_db in [-5.0, 0.0, 5.0, 10.0] {
        for (kappa, mu, m) in [(1.0, 2, 1), (1.0, 1, 2)] {
            for sigma in [0.0, 4.0] {
                for i in &interferers {
                    let name = format!(
                        "θ={theta_db} dB ({kappa},{mu},{m}) σ={sigma} dB {}",
                        i.name()
                    );
                    out.push((name, query(theta_db, kappa, mu, m, sigma, i.clone())?));
                }
            }
        }
    }
    Ok(out)
}

fn internal_equivalence(_: &ValidationOptions) -> Result<(bool, String)> {
    let net = reference_network()?;
    let mut worst = Worst::new();
    for (name, q) in equivalence_grid()? {
        let diff =
            (coverage_closed_form(&net, &q)? - coverage_radial_integral(&net, &q, 1e-10)?).abs();
        worst.update(diff, || name);
    }
    Ok(worst.within(1e-8, "|closed - radial|"))
}

fn estimate(
    net: &NetworkConfig,
    q: &CoverageQuery,
    opts: &ValidationOptions,
) -> Result<CoverageEstimate> {
    let sim = SimConfig::new(
        opts.mc_realizations,
        DEFAULT_WINDOW_FACTOR,
        opts.seed,
        opts.workers,
    )?;
    simulate_coverage(net, q, &sim)
}

fn closed_form_vs_monte_carlo(opts: &ValidationOptions) -> Result<(bool, String)> {
    let net = reference_network()?;
    let mut failures = 0;
    let mut worst = Worst::new();
    for (name, q) in equivalence_grid()? {
        let pc = coverage_closed_form(&net, &q)?;
        let est = estimate(&net, &q, opts)?;
        let bound = 0.01f64.max(3.0 * est.half_width_95);
        let diff = (pc - est.p_hat).abs();
        if diff > bound {
            failures += 1;
        }
        worst.update(diff / bound, || {
            format!("{name}: closed {pc:.5} mc {:.5}", est.p_hat)
        });
    }
    Ok((
        failures == 0,
        format!(
            "{failures} of 32 outside max(0.01, 3·hw); worst ratio {:.3} at {}",
            worst.value, worst.at
        ),
    ))
}

fn zero_shadowing_reduction(_: &ValidationOptions) -> Result<(bool, String)> {
    let net = reference_network()?;
    let mut worst = Worst::new();
    for (kappa, mu, m) in [(1.0, 2, 1), (1.0, 1, 2), (2.0, 2, 4), (0.5, 4, 3)] {
        for theta_db in [-5.0, 0.0, 10.0] {
            let q = query(theta_db, kappa, mu, m, 0.0, Arc::new(Rayleigh))?;
            let full = coverage_closed_form(&net, &q)?;
            let base = build_gamma_mixture(q.desired().base())?;
            let single = GhqMixture::from_terms(
                base,
                vec![GhqTerm {
                    weight: 1.0,
                    scale: 1.0,
                }],
            )?;
            let reduced = coverage_closed_form_mixture(
                &net,
                &single,
                q.theta(),
                &Rayleigh,
                &CoverageOptions::default(),
            )?;
            worst.update((full - reduced).abs(), || {
                format!("({kappa},{mu},{m}) θ={theta_db} dB")
            });
        }
    }
    Ok(worst.within(1e-12, "|p_c(σ=0) - single term|"))
}

fn qualitative_trends(_: &ValidationOptions) -> Result<(bool, String)> {
    let net = reference_network()?;
    let pc = |kappa, mu, m, sigma| {
        coverage_closed_form(&net, &query(0.0, kappa, mu, m, sigma, Arc::new(Rayleigh))?)
    };
    let in_m = (1..=4)
        .map(|m| pc(1.0, 2, m, 4.0))
        .collect::<Result<Vec<_>>>()?;
    let in_mu = (1..=3)
        .map(|mu| pc(1.0, mu, 2, 4.0))
        .collect::<Result<Vec<_>>>()?;
    let in_sigma = [2.0, 4.0, 6.0, 8.0]
        .iter()
        .map(|&s| pc(1.0, 2, 1, s))
        .collect::<Result<Vec<_>>>()?;
    let increasing = |v: &[f64]| v.windows(2).all(|w| w[1] > w[0]);
    let decreasing = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
    let fmt = |v: &[f64]| {
        v.iter()
            .map(|x| format!("{x:.4}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    Ok((
        increasing(&in_m) && increasing(&in_mu) && decreasing(&in_sigma),
        format!(
            "m 1..4: {}; μ 1..3: {}; σ 2..8 dB: {}",
            fmt(&in_m),
            fmt(&in_mu),
            fmt(&in_sigma)
        ),
    ))
}

fn density_power_invariance(opts: &ValidationOptions) -> Result<(bool, String)> {
    let q = query(0.0, 1.0, 2, 1, 4.0, Arc::new(Rayleigh))?;
    let mut values = Vec::new();
    for lambda in [1e-7, 1e-6] {
        for power in [1.0, 10.0] {
            values.push(coverage_closed_form(
                &NetworkConfig::new(lambda, 4.0, power)?,
                &q,
            )?);
        }
    }
    let identical = values.iter().all(|&v| v == values[0]);
    let mut detail = format!(
        "closed form {} over λ, P",
        if identical { "identical" } else { "differs" }
    );
    if opts.quick {
        detail.push_str("; Monte Carlo part skipped");
        return Ok((identical, detail));
    }
    let a = estimate(&NetworkConfig::new(1e-7, 4.0, 1.0)?, &q, opts)?;
    let b = estimate(&NetworkConfig::new(1e-6, 4.0, 1.0)?, &q, opts)?;
    let mc_ok = (a.p_hat - b.p_hat).abs() < a.half_width_95 + b.half_width_95;
    detail.push_str(&format!(
        "; MC λ=1e-7 {:.5} vs λ=1e-6 {:.5}",
        a.p_hat, b.p_hat
    ));
    Ok((identical && mc_ok, detail))
}

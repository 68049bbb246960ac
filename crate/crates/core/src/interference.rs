//! Interfering-link fading models and the two expectation functionals that
//! carry their entire effect on coverage:
//!
//! - E_h0(a) = E[∫_a^∞ (1 − e^{−h t^{−α/2}}) dt]
//! - E_hq(s) = E[h^{2/α} γ(q − 2/α, s·h)]

use std::cell::RefCell;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

use rand::RngCore;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};

use crate::error::{Error, Result};
use crate::fading::{
    build_gamma_mixture, DoubleShadowedParams, GammaMixture, KappaMuShadowedParams, KmsSampler,
};
use crate::mathkit::{
    factorial, gauss_hermite_rule, gauss_laguerre_rule, integrate_real_line,
    integrate_semi_infinite_with, lower_incomplete_gamma, NeumaierSum, QuadSettings,
    QuadratureRule,
};

/// Order of the fixed rules behind [`FadingModel::expect`]; each evaluation
/// is checked against the rule of half this order.
pub const EXPECT_ORDER: usize = 64;

/// Fading power distribution of the interfering links.
pub trait FadingModel: Send + Sync + fmt::Debug {
    /// Model description in the CLI grammar, e.g. `nakagami:m=2`.
    fn name(&self) -> String;

    /// E[H].
    fn mean(&self) -> f64;

    fn sample(&self, rng: &mut dyn RngCore) -> f64;

    /// E[g(H)] to absolute tolerance `tol`.
    fn expect(&self, g: &dyn Fn(f64) -> f64, tol: f64) -> Result<f64>;

    /// E[1 − e^{−xH}]. Models with a closed-form Laplace transform override this.
    fn laplace_complement(&self, x: f64, tol: f64) -> Result<f64> {
        self.expect(&|h| -(-x * h).exp_m1(), tol)
    }
}

fn laguerre_rules() -> &'static (QuadratureRule, QuadratureRule) {
    static RULES: OnceLock<(QuadratureRule, QuadratureRule)> = OnceLock::new();
    RULES.get_or_init(|| {
        (
            gauss_laguerre_rule(EXPECT_ORDER).expect("valid order"),
            gauss_laguerre_rule(EXPECT_ORDER / 2).expect("valid order"),
        )
    })
}

fn hermite_rules() -> &'static (QuadratureRule, QuadratureRule) {
    static RULES: OnceLock<(QuadratureRule, QuadratureRule)> = OnceLock::new();
    RULES.get_or_init(|| {
        (
            gauss_hermite_rule(EXPECT_ORDER).expect("valid order"),
            gauss_hermite_rule(EXPECT_ORDER / 2).expect("valid order"),
        )
    })
}

fn fallback_settings(tol: f64) -> QuadSettings {
    QuadSettings::new(tol, 1e-12)
}

/// E[g(X)] for X ~ Gamma(shape, scale) with integer shape.
fn expect_gamma(shape: u32, scale: f64, g: &dyn Fn(f64) -> f64, tol: f64) -> Result<f64> {
    let norm = factorial(shape - 1);
    let k = shape as i32 - 1;
    let (fine, coarse) = laguerre_rules();
    let f = |x: f64| x.powi(k) / norm * g(scale * x);
    let v_fine = fine.integrate(f);
    let v_coarse = coarse.integrate(f);
    if (v_fine - v_coarse).abs() <= tol {
        return Ok(v_fine);
    }
    let kernel = |x: f64| {
        let w = crate::fading_kernel(x, shape);
        if w == 0.0 {
            0.0
        } else {
            w / norm * g(scale * x)
        }
    };
    integrate_semi_infinite_with(kernel, 0.0, &fallback_settings(tol)).map(|r| r.value)
}

/// E[g(e^{σZ})] for standard normal Z.
fn expect_lognormal(sigma: f64, g: &dyn Fn(f64) -> f64, tol: f64) -> Result<f64> {
    if sigma == 0.0 {
        return Ok(g(1.0));
    }
    let (fine, coarse) = hermite_rules();
    let c = std::f64::consts::SQRT_2 * sigma;
    let f = |t: f64| g((c * t).exp());
    let v_fine = fine.integrate(f) / PI.sqrt();
    let v_coarse = coarse.integrate(f) / PI.sqrt();
    if (v_fine - v_coarse).abs() <= tol {
        return Ok(v_fine);
    }
    let density = |z: f64| {
        let w = (-0.5 * z * z).exp();
        if w == 0.0 {
            0.0
        } else {
            w / (2.0 * PI).sqrt() * g((sigma * z).exp())
        }
    };
    integrate_real_line(density, &fallback_settings(tol)).map(|r| r.value)
}

/// Runs `body` with a closure adaptor that records the first error raised
/// inside an `f64`-valued callback.
fn with_fallible<T>(body: impl FnOnce(&dyn Fn(Result<f64>) -> f64) -> Result<T>) -> Result<T> {
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let unwrap = |r: Result<f64>| match r {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let out = body(&unwrap);
    match failure.into_inner() {
        Some(e) => Err(e),
        None => out,
    }
}

/// Unit-mean exponential power.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rayleigh;

impl FadingModel for Rayleigh {
    fn name(&self) -> String {
        "rayleigh".into()
    }

    fn mean(&self) -> f64 {
        1.0
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        Exp1.sample(rng)
    }

    fn expect(&self, g: &dyn Fn(f64) -> f64, tol: f64) -> Result<f64> {
        expect_gamma(1, 1.0, g, tol)
    }

    fn laplace_complement(&self, x: f64, _tol: f64) -> Result<f64> {
        Ok(x / (1.0 + x))
    }
}

/// Unit-mean Gamma power with integer shape m.
#[derive(Debug, Clone)]
pub struct Nakagami {
    m: u32,
    sampler: Gamma<f64>,
}

impl Nakagami {
    pub fn new(m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("nakagami m must be >= 1"));
        }
        let sampler =
            Gamma::new(m as f64, 1.0 / m as f64).map_err(|e| Error::invalid(e.to_string()))?;
        Ok(Self { m, sampler })
    }
}

impl FadingModel for Nakagami {
    fn name(&self) -> String {
        format!("nakagami:m={}", self.m)
    }

    fn mean(&self) -> f64 {
        1.0
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        self.sampler.sample(rng)
    }

    fn expect(&self, g: &dyn Fn(f64) -> f64, tol: f64) -> Result<f64> {
        expect_gamma(self.m, 1.0 / self.m as f64, g, tol)
    }

    fn laplace_complement(&self, x: f64, _tol: f64) -> Result<f64> {
        let m = self.m as f64;
        Ok(-(-m * (x / m).ln_1p()).exp_m1())
    }
}

/// Median-one lognormal power e^{σ̃Z}.
#[derive(Debug, Clone, Copy)]
pub struct Lognormal {
    sigma_db: f64,
    sigma_tilde: f64,
}

fn check_sigma_db(sigma_db: f64) -> Result<f64> {
    if !(sigma_db >= 0.0) || !sigma_db.is_finite() {
        return Err(Error::invalid(format!(
            "sigma_db must be finite and >= 0, got {sigma_db}"
        )));
    }
    Ok(crate::db_sigma_to_neper(sigma_db))
}

impl Lognormal {
    pub fn new(sigma_db: f64) -> Result<Self> {
        Ok(Self {
            sigma_db,
            sigma_tilde: check_sigma_db(sigma_db)?,
        })
    }
}

impl FadingModel for Lognormal {
    fn name(&self) -> String {
        format!("lognormal:sigma_db={}", self.sigma_db)
    }

    fn mean(&self) -> f64 {
        (0.5 * self.sigma_tilde * self.sigma_tilde).exp()
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        (self.sigma_tilde * z).exp()
    }

    fn expect(&self, g: &dyn Fn(f64) -> f64, tol: f64) -> Result<f64> {
        expect_lognormal(self.sigma_tilde, g, tol)
    }
}

/// Product of independent unit-mean exponential and median-one lognormal powers.
#[derive(Debug, Clone, Copy)]
pub struct RayleighLognormal {
    sigma_db: f64,
    sigma_tilde: f64,
}

impl RayleighLognormal {
    pub fn new(sigma_db: f64) -> Result<Self> {
        Ok(Self {
            sigma_db,
            sigma_tilde: check_sigma_db(sigma_db)?,
        })
    }
}

impl FadingModel for RayleighLognormal {
    fn name(&self) -> String {
        format!("rayleigh*lognormal:sigma_db={}", self.sigma_db)
    }

    fn mean(&self) -> f64 {
        (0.5 * self.sigma_tilde * self.sigma_tilde).exp()
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        let h: f64 = Exp1.sample(rng);
        let z: f64 = StandardNormal.sample(rng);
        h * (self.sigma_tilde * z).exp()
    }

    fn expect(&self, g: &dyn Fn(f64) -> f64, tol: f64) -> Result<f64> {
        with_fallible(|unwrap| {
            expect_lognormal(
                self.sigma_tilde,
                &|l| unwrap(expect_gamma(1, l, g, tol)),
                tol,
            )
        })
    }

    fn laplace_complement(&self, x: f64, tol: f64) -> Result<f64> {
        expect_lognormal(self.sigma_tilde, &|l| x * l / (1.0 + x * l), tol)
    }
}

/// κ-μ shadowed interferers (unit mean).
#[derive(Debug, Clone)]
pub struct KappaMuShadowedModel {
    params: KappaMuShadowedParams,
    mixture: GammaMixture,
    sampler: KmsSampler,
}

impl KappaMuShadowedModel {
    pub fn new(params: KappaMuShadowedParams) -> Result<Self> {
        Ok(Self {
            params,
            mixture: build_gamma_mixture(&params)?,
            sampler: KmsSampler::new(&params),
        })
    }
}

impl FadingModel for KappaMuShadowedModel {
    fn name(&self) -> String {
        format!(
            "kms:kappa={},mu={},m={}",
            self.params.kappa(),
            self.params.mu(),
            self.params.m()
        )
    }

    fn mean(&self) -> f64 {
        1.0
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        self.sampler.sample(rng)
    }

    fn expect(&self, g: &dyn Fn(f64) -> f64, tol: f64) -> Result<f64> {
        let n = self.mixture.components().len() as f64;
        let mut sum = NeumaierSum::new();
        for c in self.mixture.components() {
            sum.add(
                c.weight * expect_gamma(c.shape, c.scale, g, tol / (n * c.weight.abs().max(1.0)))?,
            );
        }
        Ok(sum.value())
    }

    fn laplace_complement(&self, x: f64, _tol: f64) -> Result<f64> {
        Ok(self
            .mixture
            .components()
            .iter()
            .map(|c| c.weight * -(-(c.shape as f64) * (x * c.scale).ln_1p()).exp_m1())
            .collect::<NeumaierSum>()
            .value())
    }
}

/// Deterministic unit power (no fading).
#[derive(Debug, Clone, Copy, Default)]
pub struct UnitGain;

impl FadingModel for UnitGain {
    fn name(&self) -> String {
        "unit".into()
    }

    fn mean(&self) -> f64 {
        1.0
    }

    fn sample(&self, _rng: &mut dyn RngCore) -> f64 {
        1.0
    }

    fn expect(&self, g: &dyn Fn(f64) -> f64, _tol: f64) -> Result<f64> {
        Ok(g(1.0))
    }
}

/// Parses `key=value,key=value` into pairs.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|kv| {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("expected key=value, got '{kv}'")))?;
            Ok((k.trim().to_string(), v.trim().to_string()))
        })
        .collect()
}

pub(crate) fn take_param<T: std::str::FromStr>(
    pairs: &[(String, String)],
    key: &str,
    spec: &str,
) -> Result<T> {
    let raw = pairs
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v)
        .ok_or_else(|| Error::invalid(format!("'{spec}' is missing '{key}'")))?;
    raw.parse()
        .map_err(|_| Error::invalid(format!("'{spec}': cannot parse {key}='{raw}'")))
}

pub(crate) fn reject_unknown(
    pairs: &[(String, String)],
    allowed: &[&str],
    spec: &str,
) -> Result<()> {
    match pairs.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
        Some((k, _)) => Err(Error::invalid(format!("'{spec}': unknown parameter '{k}'"))),
        None => Ok(()),
    }
}

/// Parses an interferer model description:
/// `rayleigh`, `nakagami:m=<int>`, `lognormal:sigma_db=<real>`,
/// `rayleigh*lognormal:sigma_db=<real>` or `kms:kappa=<real>,mu=<int>,m=<int>`.
pub fn parse_model(spec: &str) -> Result<Arc<dyn FadingModel>> {
    let spec = spec.trim();
    let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let pairs = parse_key_values(rest)?;
    let model: Arc<dyn FadingModel> = match kind.trim().to_ascii_lowercase().as_str() {
        "rayleigh" => {
            reject_unknown(&pairs, &[], spec)?;
            Arc::new(Rayleigh)
        }
        "nakagami" => {
            reject_unknown(&pairs, &["m"], spec)?;
            Arc::new(Nakagami::new(take_param(&pairs, "m", spec)?)?)
        }
        "lognormal" => {
            reject_unknown(&pairs, &["sigma_db"], spec)?;
            Arc::new(Lognormal::new(take_param(&pairs, "sigma_db", spec)?)?)
        }
        "rayleigh*lognormal" => {
            reject_unknown(&pairs, &["sigma_db"], spec)?;
            Arc::new(RayleighLognormal::new(take_param(
                &pairs, "sigma_db", spec,
            )?)?)
        }
        "kms" => {
            reject_unknown(&pairs, &["kappa", "mu", "m"], spec)?;
            let params = KappaMuShadowedParams::new(
                take_param(&pairs, "kappa", spec)?,
                take_param(&pairs, "mu", spec)?,
                take_param(&pairs, "m", spec)?,
            )?;
            Arc::new(KappaMuShadowedModel::new(params)?)
        }
        other => return Err(Error::invalid(format!("unknown fading model '{other}'"))),
    };
    Ok(model)
}

/// Parses a desired-link description
/// `kms:kappa=<real>,mu=<int>,m=<int>[,sigma_db=<real>]`; σ_S defaults to 0.
pub fn parse_desired(spec: &str) -> Result<DoubleShadowedParams> {
    let spec = spec.trim();
    let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
    if !kind.trim().eq_ignore_ascii_case("kms") {
        return Err(Error::invalid(format!(
            "desired link must be 'kms:...', got '{spec}'"
        )));
    }
    let pairs = parse_key_values(rest)?;
    reject_unknown(&pairs, &["kappa", "mu", "m", "sigma_db"], spec)?;
    let base = KappaMuShadowedParams::new(
        take_param(&pairs, "kappa", spec)?,
        take_param(&pairs, "mu", spec)?,
        take_param(&pairs, "m", spec)?,
    )?;
    let sigma_db = if pairs.iter().any(|(k, _)| k == "sigma_db") {
        take_param(&pairs, "sigma_db", spec)?
    } else {
        0.0
    };
    DoubleShadowedParams::new(base, sigma_db)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 2.0) || !alpha.is_finite() {
        return Err(Error::domain(format!(
            "path-loss exponent must exceed 2 for finite mean interference, got {alpha}"
        )));
    }
    Ok(())
}

/// E_h0 with the lower limit `a`, using the model's Laplace complement.
///
/// The outer integral is taken over v with t = a(1 + v)^{2/(α−2)}, which
/// makes the integrand decay like (1 + v)^{−2} for every α > 2.
pub fn e_h0(model: &dyn FadingModel, a: f64, alpha: f64, tol: f64) -> Result<f64> {
    e_h0_with(a, alpha, tol, |x| model.laplace_complement(x, tol * 1e-3))
}

/// E_h0 computed through [`FadingModel::expect`] only, bypassing any
/// closed-form Laplace transform.
pub fn e_h0_generic(model: &dyn FadingModel, a: f64, alpha: f64, tol: f64) -> Result<f64> {
    e_h0_with(a, alpha, tol, |x| {
        model.expect(&|h| -(-x * h).exp_m1(), tol * 1e-3)
    })
}

fn e_h0_with(a: f64, alpha: f64, tol: f64, complement: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    check_alpha(alpha)?;
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::domain(format!(
            "E_h0 lower limit must be finite and > 0, got {a}"
        )));
    }
    let p = 2.0 / (alpha - 2.0);
    let half_alpha = 0.5 * alpha;
    let ln_a = a.ln();
    let value = with_fallible(|unwrap| {
        integrate_semi_infinite_with(
            |v| {
                let ln_1v = v.ln_1p();
                // x = t^{−α/2}
                let x = (-half_alpha * (ln_a + p * ln_1v)).exp();
                let jacobian = a * p * ((p - 1.0) * ln_1v).exp();
                jacobian * unwrap(complement(x))
            },
            0.0,
            &QuadSettings::new(tol, tol),
        )
    })?;
    Ok(value.value.max(0.0))
}

/// E_hq = E[h^{2/α} γ(q − 2/α, s·h)].
pub fn e_hq(model: &dyn FadingModel, q: u32, s: f64, alpha: f64, tol: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if q == 0 {
        return Err(Error::domain("E_hq needs q >= 1"));
    }
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::domain(format!("E_hq needs finite s > 0, got {s}")));
    }
    let beta = 2.0 / alpha;
    let shape = q as f64 - beta;
    let value = with_fallible(|unwrap| {
        model.expect(
            &|h| {
                if h == 0.0 {
                    return 0.0;
                }
                h.powf(beta) * unwrap(lower_incomplete_gamma(shape, s * h))
            },
            tol,
        )
    })?;
    Ok(value.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn rayleigh_e_h0_example() {
        let v = e_h0(&Rayleigh, 1.0, 4.0, 1e-12).unwrap();
        assert!((v - PI / 4.0).abs() < 1e-11, "{v}");
    }

    #[test]
    fn rayleigh_e_h0_arctan() {
        for &a in &[0.25, 1.0, 4.0] {
            let expected = FRAC_PI_2 - f64::atan(a);
            let fast = e_h0(&Rayleigh, a, 4.0, 1e-12).unwrap();
            let generic = e_h0_generic(&Rayleigh, a, 4.0, 1e-12).unwrap();
            assert!((fast - expected).abs() < 1e-9, "a={a}: {fast}");
            assert!((generic - expected).abs() < 1e-9, "a={a}: {generic}");
        }
    }

    #[test]
    fn e_h0_vanishes_for_large_lower_limit() {
        assert!(e_h0(&Rayleigh, 1e6, 4.0, 1e-12).unwrap() <= 1e-3);
    }

    #[test]
    fn unit_gain_e_h0() {
        // ∫_1^∞ (1 − e^{−t^{−2}}) dt, computed with mpmath to 30 digits.
        let v = e_h0(&UnitGain, 1.0, 4.0, 1e-12).unwrap();
        assert!((v - 0.861_527_706_796_296_4).abs() < 1e-10, "{v}");
    }

    #[test]
    fn alpha_must_exceed_two() {
        assert!(matches!(
            e_h0(&Rayleigh, 1.0, 2.0, 1e-8),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            e_hq(&Rayleigh, 1, 1.0, 1.5, 1e-8),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn rayleigh_e_hq_reference() {
        // 1/2 + π/4 in closed form; mpmath quadrature agrees.
        let v = e_hq(&Rayleigh, 1, 1.0, 4.0, 1e-12).unwrap();
        assert!((v - (0.5 + PI / 4.0)).abs() < 1e-8, "{v}");
        let v = e_hq(&Rayleigh, 2, 2.0, 4.0, 1e-12).unwrap();
        assert!((v - 0.556_225_729_194_093_3).abs() < 1e-8, "{v}");
    }

    #[test]
    fn e_hq_small_s() {
        // γ(1/2, x) ≈ 2√x, so E_h1 ≈ 2√s·E[h].
        let s = 1e-8;
        let v = e_hq(&Rayleigh, 1, s, 4.0, 1e-14).unwrap();
        assert!((v / (2.0 * s.sqrt()) - 1.0).abs() < 1e-6, "{v}");
    }

    #[test]
    fn grammar() {
        for spec in [
            "rayleigh",
            "nakagami:m=3",
            "lognormal:sigma_db=4",
            "rayleigh*lognormal:sigma_db=4",
            "kms:kappa=1.5,mu=2,m=3",
        ] {
            let m = parse_model(spec).unwrap();
            assert_eq!(parse_model(&m.name()).unwrap().name(), m.name());
        }
        assert!(parse_model("rician:k=3").is_err());
        assert!(parse_model("nakagami").is_err());
        assert!(parse_model("nakagami:m=2,x=1").is_err());
        assert!(parse_model("kms:kappa=0,mu=3,m=1").is_err());
        assert!(parse_model("lognormal:sigma_db=-1").is_err());
        let d = parse_desired("kms:kappa=1.5,mu=2,m=3,sigma_db=4").unwrap();
        assert_eq!(
            (
                d.base().kappa(),
                d.base().mu(),
                d.base().m(),
                d.sigma_s_db()
            ),
            (1.5, 2, 3, 4.0)
        );
        assert_eq!(
            parse_desired("kms:kappa=1,mu=1,m=1").unwrap().sigma_s_db(),
            0.0
        );
        assert!(parse_desired("rayleigh").is_err());
        assert!(parse_desired("kms:kappa=1,mu=1").is_err());
    }

    fn models() -> Vec<Arc<dyn FadingModel>> {
        [
            "rayleigh",
            "nakagami:m=3",
            "lognormal:sigma_db=4",
            "rayleigh*lognormal:sigma_db=4",
            "kms:kappa=1,mu=2,m=1",
            "kms:kappa=1,mu=1,m=2",
        ]
        .iter()
        .map(|s| parse_model(s).unwrap())
        .chain(std::iter::once(Arc::new(UnitGain) as Arc<dyn FadingModel>))
        .collect()
    }

    #[test]
    fn expectation_normalized_and_mean() {
        for m in models() {
            let one = m.expect(&|_| 1.0, 1e-12).unwrap();
            let mean = m.expect(&|h| h, 1e-12).unwrap();
            assert!((one - 1.0).abs() < 1e-10, "{}: {one}", m.name());
            assert!((mean - m.mean()).abs() < 1e-8, "{}: {mean}", m.name());
        }
    }

    #[test]
    fn sample_mean_matches() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for m in models() {
            let n = 1_000_000;
            let avg = (0..n).map(|_| m.sample(&mut rng)).sum::<f64>() / n as f64;
            assert!((avg / m.mean() - 1.0).abs() < 0.01, "{}: {avg}", m.name());
        }
    }

    #[test]
    fn closed_form_laplace_matches_generic() {
        for m in models() {
            for &x in &[1e-3, 0.3, 1.0, 7.0] {
                let fast = m.laplace_complement(x, 1e-12).unwrap();
                let slow = m.expect(&|h| -(-x * h).exp_m1(), 1e-12).unwrap();
                assert!(
                    (fast - slow).abs() < 1e-7,
                    "{} x={x}: {fast} vs {slow}",
                    m.name()
                );
            }
        }
    }

    #[test]
    fn e_h0_fast_matches_generic() {
        for m in models() {
            let fast = e_h0(m.as_ref(), 0.7, 3.5, 1e-10).unwrap();
            let slow = e_h0_generic(m.as_ref(), 0.7, 3.5, 1e-10).unwrap();
            assert!((fast - slow).abs() < 1e-7, "{}: {fast} vs {slow}", m.name());
        }
    }

    #[test]
    fn e_hq_increases_with_s() {
        for m in models() {
            let mut prev = 0.0;
            for &s in &[0.1, 0.5, 1.0, 3.0, 10.0] {
                let v = e_hq(m.as_ref(), 2, s, 4.0, 1e-12).unwrap();
                assert!(v > prev, "{} s={s}", m.name());
                prev = v;
            }
        }
    }
}

use crate::error::{Error, Result};

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

fn lanczos_sum(x: f64) -> f64 {
    // x is the shifted argument (Γ(x + 1) form).
    let mut sum = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        sum += c / (x + i as f64);
    }
    sum
}

/// n! as a real. Exact up to 22!, correctly rounded product beyond.
pub fn factorial(n: u32) -> f64 {
    (2..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// The Gamma function for positive real arguments.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!(
            "gamma_fn requires a finite x > 0, got {x}"
        )));
    }
    if x.fract() == 0.0 && x <= 171.0 {
        return Ok(factorial(x as u32 - 1));
    }
    if x < 0.5 {
        // Γ(x) = Γ(x + 1) / x keeps the Lanczos argument away from zero.
        return Ok(gamma_pos(x + 1.0) / x);
    }
    Ok(gamma_pos(x))
}

fn gamma_pos(x: f64) -> f64 {
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    (2.0 * std::f64::consts::PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * lanczos_sum(z)
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!(
            "ln_gamma requires a finite x > 0, got {x}"
        )));
    }
    if x < 0.5 {
        return Ok(ln_gamma_pos(x + 1.0) - x.ln());
    }
    Ok(ln_gamma_pos(x))
}

fn ln_gamma_pos(x: f64) -> f64 {
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln()
}

const MAX_ITER: usize = 10_000;

/// Lower incomplete Gamma function γ(a, x) = ∫₀ˣ t^{a−1} e^{−t} dt (not regularised).
///
/// Series expansion below x = a + 1, Lentz continued fraction for the upper
/// tail above it.
pub fn lower_incomplete_gamma(a: f64, x: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::domain(format!(
            "lower_incomplete_gamma requires a > 0, got a = {a}"
        )));
    }
    if !(x >= 0.0) {
        return Err(Error::domain(format!(
            "lower_incomplete_gamma requires x >= 0, got x = {x}"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let full = gamma_fn(a)?;
    if x.is_infinite() {
        return Ok(full);
    }
    let log_prefactor = a * x.ln() - x;
    if x < a + 1.0 {
        let mut ap = a;
        let mut term = 1.0 / a;
        let mut sum = term;
        for _ in 0..MAX_ITER {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * 1e-17 {
                return Ok(sum * log_prefactor.exp());
            }
        }
        Err(Error::Convergence {
            estimate: sum * log_prefactor.exp(),
            error_bound: term.abs(),
            evaluations: MAX_ITER,
        })
    } else if log_prefactor < -750.0 {
        Ok(full)
    } else {
        let upper = upper_gamma_cf(a, x)? * log_prefactor.exp();
        Ok((full - upper).max(0.0))
    }
}

/// Continued fraction for Γ(a, x) e^{x} x^{−a}, valid for x > a + 1.
fn upper_gamma_cf(a: f64, x: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() <= 4.0 * f64::EPSILON {
            return Ok(h);
        }
    }
    Err(Error::Convergence {
        estimate: h,
        error_bound: f64::NAN,
        evaluations: MAX_ITER,
    })
}

/// Binomial coefficient C(n, k) as a real; zero for k < 0 or k > n.
///
/// Computed in exact integer arithmetic and rounded once, so it is exact
/// whenever the value is representable (and correctly rounded up to n = 60).
pub fn binomial(n: u64, k: i64) -> f64 {
    if k < 0 || k as u64 > n {
        return 0.0;
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as f64
}

/// Neumaier-compensated accumulator for sums with cancellation.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

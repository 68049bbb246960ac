//! Adaptive Gauss-Kronrod (7/15) integration on finite and semi-infinite
//! ranges.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances and budget for adaptive integration.
///
/// Refinement stops once the summed error estimate is at most
/// `max(abs_tol, rel_tol · |estimate|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSettings {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evals: usize,
}

impl QuadSettings {
    pub const DEFAULT_MAX_EVALS: usize = 1_000_000;

    pub fn absolute(tol: f64) -> Self {
        Self {
            abs_tol: tol,
            rel_tol: 0.0,
            max_evals: Self::DEFAULT_MAX_EVALS,
        }
    }

    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            max_evals: Self::DEFAULT_MAX_EVALS,
        }
    }

    pub fn with_max_evals(mut self, max_evals: usize) -> Self {
        self.max_evals = max_evals;
        self
    }

    fn target(&self, estimate: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * estimate.abs())
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = (fc * WGK[7]).abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    if !res_k.is_finite() {
        return Err(Error::domain(format!(
            "integrand is not finite on [{a:e}, {b:e}]"
        )));
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let width = half.abs();
    res_abs *= width;
    res_asc *= width;
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Segment {
        a,
        b,
        value: res_k * half,
        error: err,
    })
}

/// Adaptive integration of `f` over the finite interval [a, b].
pub fn integrate_interval<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    settings: &QuadSettings,
) -> Result<Integral> {
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::invalid("integrate_interval needs finite limits"));
    }
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let first = kronrod15(&mut f, a, b)?;
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    // Segments too narrow to split any further.
    let mut frozen_value = 0.0;
    let mut frozen_error = 0.0;
    let mut total_value = first.value;
    let mut total_error = first.error;
    heap.push(first);

    loop {
        if total_error <= settings.target(total_value) {
            break;
        }
        let Some(worst) = heap.pop() else {
            return Err(Error::Convergence {
                estimate: total_value,
                error_bound: total_error,
                evaluations,
            });
        };
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) || (worst.b - worst.a).abs() < 1e-14 * mid.abs() {
            frozen_value += worst.value;
            frozen_error += worst.error;
            continue;
        }
        if evaluations + 30 > settings.max_evals {
            return Err(Error::Convergence {
                estimate: total_value,
                error_bound: total_error,
                evaluations,
            });
        }
        let left = kronrod15(&mut f, worst.a, mid)?;
        let right = kronrod15(&mut f, mid, worst.b)?;
        evaluations += 30;
        total_value += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);

        // Resum occasionally so the running totals do not drift.
        if evaluations % 3000 == 0 {
            total_value = frozen_value + heap.iter().map(|s| s.value).sum::<f64>();
            total_error = frozen_error + heap.iter().map(|s| s.error).sum::<f64>();
        }
    }
    let value = frozen_value + heap.iter().map(|s| s.value).sum::<f64>();
    let error = frozen_error + heap.iter().map(|s| s.error).sum::<f64>();
    Ok(Integral {
        value,
        error,
        evaluations,
    })
}

/// ∫_lower^∞ f(t) dt via the map t = lower + u/(1 − u), u ∈ [0, 1), followed by
/// adaptive Gauss-Kronrod refinement.
pub fn integrate_semi_infinite_with<F: FnMut(f64) -> f64>(
    mut f: F,
    lower: f64,
    settings: &QuadSettings,
) -> Result<Integral> {
    if !lower.is_finite() {
        return Err(Error::invalid(
            "semi-infinite integral needs a finite lower limit",
        ));
    }
    let mapped = |u: f64| {
        let one_minus = 1.0 - u;
        let t = lower + u / one_minus;
        let v = f(t);
        if v == 0.0 {
            0.0
        } else {
            v / (one_minus * one_minus)
        }
    };
    integrate_interval(mapped, 0.0, 1.0, settings)
}

/// ∫_lower^∞ f(t) dt to absolute tolerance `tol`, with a 10⁶-evaluation budget.
pub fn integrate_semi_infinite<F: FnMut(f64) -> f64>(f: F, lower: f64, tol: f64) -> Result<f64> {
    integrate_semi_infinite_with(f, lower, &QuadSettings::absolute(tol)).map(|r| r.value)
}

/// ∫_{−∞}^{∞} f(t) dt, split at zero into two semi-infinite pieces.
pub fn integrate_real_line<F: FnMut(f64) -> f64>(
    mut f: F,
    settings: &QuadSettings,
) -> Result<Integral> {
    let half = QuadSettings {
        abs_tol: 0.5 * settings.abs_tol,
        ..*settings
    };
    let right = integrate_semi_infinite_with(&mut f, 0.0, &half)?;
    let left = integrate_semi_infinite_with(|t| f(-t), 0.0, &half)?;
    Ok(Integral {
        value: left.value + right.value,
        error: left.error + right.error,
        evaluations: left.evaluations + right.evaluations,
    })
}

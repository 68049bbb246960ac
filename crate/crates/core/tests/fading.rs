use pppcov_core::fading::{
    build_gamma_mixture, build_ghq_mixture, double_shadowed_pdf_exact, DoubleShadowedParams,
    DoubleShadowedSampler, KappaMuShadowedParams, KmsSampler,
};
use pppcov_core::mathkit::{integrate_semi_infinite_with, QuadSettings};
use pppcov_core::validation::ks_distance;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;
use statrs::distribution::{Continuous, Gamma};

fn kms(kappa: f64, mu: u32, m: u32) -> KappaMuShadowedParams {
    KappaMuShadowedParams::new(kappa, mu, m).unwrap()
}

fn ds(kappa: f64, mu: u32, m: u32, sigma_db: f64) -> DoubleShadowedParams {
    DoubleShadowedParams::new(kms(kappa, mu, m), sigma_db).unwrap()
}

#[test]
fn unit_shapes_give_exponential() {
    for kappa in [0.0, 0.3, 1.0, 7.5] {
        let mix = build_gamma_mixture(&kms(kappa, 1, 1)).unwrap();
        for h in [0.01, 0.5, 1.0, 3.0, 10.0] {
            assert!(
                (mix.pdf(h).unwrap() - (-h).exp()).abs() < 1e-13,
                "κ={kappa} h={h}"
            );
            assert!(
                (mix.ccdf(h).unwrap() - (-h).exp()).abs() < 1e-13,
                "κ={kappa} h={h}"
            );
        }
    }
}

#[test]
fn no_line_of_sight_gives_nakagami() {
    for (mu, m) in [(1, 3), (2, 2), (3, 5)] {
        let mix = build_gamma_mixture(&kms(0.0, mu, m)).unwrap();
        let g = Gamma::new(mu as f64, mu as f64).unwrap();
        for h in [0.05, 0.4, 1.0, 2.5] {
            assert!(
                (mix.pdf(h).unwrap() - g.pdf(h)).abs() < 1e-12,
                "μ={mu} m={m} h={h}"
            );
        }
    }
    assert!(KappaMuShadowedParams::new(0.0, 3, 1)
        .and_then(|p| build_gamma_mixture(&p))
        .is_err());
}

#[test]
fn ghq_converges_with_order() {
    let params = ds(1.0, 2, 1, 4.0);
    let grid: Vec<f64> = (1..=200).map(|k| 0.05 * k as f64).collect();
    let exact: Vec<f64> = grid
        .iter()
        .map(|&h| double_shadowed_pdf_exact(&params, h, 1e-12).unwrap())
        .collect();
    let max_err = |order| {
        let g = build_ghq_mixture(&params, order).unwrap();
        grid.iter()
            .zip(&exact)
            .map(|(&h, &e)| (g.pdf(h).unwrap() - e).abs())
            .fold(0.0, f64::max)
    };
    let (e8, e32) = (max_err(8), max_err(32));
    assert!(e32 <= e8, "{e32} vs {e8}");
    assert!(e32 < 1e-6, "{e32}");
}

#[test]
fn zero_shadowing_is_the_base_law() {
    let params = ds(2.0, 3, 2, 0.0);
    let base = build_gamma_mixture(params.base()).unwrap();
    let ghq = build_ghq_mixture(&params, 32).unwrap();
    for h in [0.1, 0.7, 1.5, 4.0] {
        assert!((ghq.pdf(h).unwrap() - base.pdf(h).unwrap()).abs() < 1e-13);
        assert!(
            (double_shadowed_pdf_exact(&params, h, 1e-12).unwrap() - base.pdf(h).unwrap()).abs()
                < 1e-15
        );
    }
}

#[test]
fn densities_are_normalized() {
    let params = ds(1.0, 1, 2, 4.0);
    let ghq = build_ghq_mixture(&params, 32).unwrap();
    let s = QuadSettings::new(1e-10, 1e-10);
    let total = integrate_semi_infinite_with(
        |h| if h == 0.0 { 0.0 } else { ghq.pdf(h).unwrap() },
        0.0,
        &s,
    )
    .unwrap();
    assert!((total.value - 1.0).abs() < 1e-8, "{}", total.value);
    let exact = integrate_semi_infinite_with(
        |h| {
            if h == 0.0 {
                0.0
            } else {
                double_shadowed_pdf_exact(&params, h, 1e-12).unwrap()
            }
        },
        0.0,
        &s,
    )
    .unwrap();
    assert!((exact.value - 1.0).abs() < 1e-7, "{}", exact.value);
}

#[test]
fn double_shadowed_sampler_ks() {
    let params = ds(2.0, 3, 2, 6.0);
    let ghq = build_ghq_mixture(&params, 32).unwrap();
    let sampler = DoubleShadowedSampler::new(&params);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut xs: Vec<f64> = (0..200_000).map(|_| sampler.sample(&mut rng)).collect();
    let d = ks_distance(&mut xs, |h| Ok(1.0 - ghq.ccdf(h)?)).unwrap();
    assert!(d < 0.005, "{d}");
}

#[test]
fn kms_sampler_ks_with_negative_weights() {
    let params = kms(3.0, 4, 2);
    assert!(build_gamma_mixture(&params)
        .unwrap()
        .components()
        .iter()
        .any(|c| c.weight < 0.0));
    let mix = build_gamma_mixture(&params).unwrap();
    let sampler = KmsSampler::new(&params);
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut xs: Vec<f64> = (0..200_000).map(|_| sampler.sample(&mut rng)).collect();
    let d = ks_distance(&mut xs, |h| Ok(1.0 - mix.ccdf(h)?)).unwrap();
    assert!(d < 0.005, "{d}");
}

proptest! {
    #[test]
    fn mixture_identities(kappa in 0.01f64..20.0, mu in 1u32..9, m in 1u32..9) {
        let mix = build_gamma_mixture(&kms(kappa, mu, m)).unwrap();
        let total: f64 = mix.components().iter().map(|c| c.weight).sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
        prop_assert!((mix.mean() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn ccdf_derivative_is_minus_pdf(kappa in 0.1f64..10.0, mu in 1u32..6, m in 1u32..6, h in 0.1f64..6.0) {
        let mix = build_gamma_mixture(&kms(kappa, mu, m)).unwrap();
        let step = 1e-4;
        let slope = (mix.ccdf(h + step).unwrap() - mix.ccdf(h - step).unwrap()) / (2.0 * step);
        prop_assert!((slope + mix.pdf(h).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn ghq_ccdf_is_a_survival_function(kappa in 0.1f64..10.0, mu in 1u32..5, m in 1u32..5, sigma in 0.0f64..8.0) {
        let ghq = build_ghq_mixture(&ds(kappa, mu, m, sigma), 32).unwrap();
        let mut prev = 1.0;
        for k in 1..40 {
            let c = ghq.ccdf(0.1 * k as f64).unwrap();
            prop_assert!((0.0..=1.0).contains(&c));
            prop_assert!(c <= prev + 1e-12);
            prev = c;
        }
    }
}

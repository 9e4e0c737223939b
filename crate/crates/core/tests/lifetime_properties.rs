use proptest::prelude::*;
use stochord::{
    Baseline, BaselineDistribution, GompertzMakeham, Lifetime, LifetimeModel, WeibullG,
};

/// Naive W-Exp cdf, used as an independent oracle.
fn wexp_cdf(a: f64, b: f64, g: f64, x: f64) -> f64 {
    1.0 - (-a * ((g * x).exp() - 1.0).powf(b)).exp()
}

fn gm_sf(a: f64, b: f64, l: f64, x: f64) -> f64 {
    (-l * x - a / b * ((b * x).exp() - 1.0)).exp()
}

#[derive(Debug)]
struct ExpBaseline;

impl BaselineDistribution for ExpBaseline {
    fn cdf(&self, t: f64) -> f64 {
        -(-t).exp_m1()
    }
    fn pdf(&self, t: f64) -> f64 {
        (-t).exp()
    }
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn wexp_cdf_matches_naive(a in 0.5..5.0f64, b in 0.5..4.0f64, g in 0.5..5.0f64, q in 0.05..0.95f64) {
        let w = WeibullG::exponential(a, b, g).unwrap();
        let x = w.quantile(q).unwrap();
        prop_assert!((w.cdf(x) - wexp_cdf(a, b, g, x)).abs() < 1e-12);
        prop_assert!((w.cdf(x) - q).abs() < 1e-10);
        prop_assert!((w.sf(x) + w.cdf(x) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn wexp_pdf_is_cdf_derivative(a in 0.5..5.0f64, b in 1.0..4.0f64, g in 0.5..5.0f64, q in 0.05..0.95f64) {
        let w = WeibullG::exponential(a, b, g).unwrap();
        let x = w.quantile(q).unwrap();
        let h = 1e-6 * x.max(1e-3);
        let fd = (wexp_cdf(a, b, g, x + h) - wexp_cdf(a, b, g, x - h)) / (2.0 * h);
        prop_assert!(rel_close(w.pdf(x), fd, 1e-5), "{} vs {}", w.pdf(x), fd);
        prop_assert!(rel_close(w.hazard(x), w.pdf(x) / w.sf(x), 1e-12));
        prop_assert!(rel_close(w.reversed_hazard(x).unwrap(), w.pdf(x) / w.cdf(x), 1e-12));
    }

    #[test]
    fn gm_matches_naive(a in 0.5..5.0f64, b in 0.5..5.0f64, l in 0.1..10.0f64, q in 0.01..0.99f64) {
        let m = GompertzMakeham::new(a, b, l).unwrap();
        let x = m.quantile(q).unwrap();
        prop_assert!(rel_close(m.sf(x), gm_sf(a, b, l, x), 1e-12));
        prop_assert!(rel_close(m.hazard(x), l + a * (b * x).exp(), 1e-13));
        prop_assert!((m.cdf(x) - q).abs() < 1e-10);
        let h = 1e-6 * x.max(1e-3);
        let fd = (gm_sf(a, b, l, x - h) - gm_sf(a, b, l, x + h)) / (2.0 * h);
        prop_assert!(rel_close(m.pdf(x), fd, 1e-5));
    }

    #[test]
    fn custom_exponential_baseline_agrees(a in 0.5..5.0f64, b in 2.0..4.0f64, g in 0.5..5.0f64, q in 0.05..0.95f64) {
        let builtin = WeibullG::exponential(a, b, g).unwrap();
        let custom = WeibullG::new(a, b, g, Baseline::custom(ExpBaseline)).unwrap();
        let x = builtin.quantile(q).unwrap();
        prop_assert!(rel_close(builtin.cdf(x), custom.cdf(x), 1e-12));
        prop_assert!(rel_close(builtin.hazard(x), custom.hazard(x), 1e-9));
        prop_assert!(rel_close(custom.quantile(q).unwrap(), x, 1e-9));
    }

    #[test]
    fn sf_is_monotone(a in 0.5..5.0f64, b in 0.5..5.0f64, l in 0.1..10.0f64, x in 0.0..3.0f64, dx in 0.0..1.0f64) {
        let m: LifetimeModel = GompertzMakeham::new(a, b, l).unwrap().into();
        prop_assert!(m.sf(x + dx) <= m.sf(x));
        prop_assert!(m.sf(x) >= 0.0 && m.sf(x) <= 1.0);
    }
}

#[test]
fn exponential_special_case() {
    // alpha = beta = gamma = 1: sf = exp(-(e^x - 1))
    let w = WeibullG::exponential(1.0, 1.0, 1.0).unwrap();
    for &x in &[0.01, 0.5, 1.0, 2.0] {
        assert!(rel_close(w.sf(x), (1.0 - f64::exp(x)).exp(), 1e-14));
    }
    assert!(rel_close(
        w.quantile(0.5).unwrap(),
        (1.0 + 2f64.ln()).ln(),
        1e-14
    ));
}

#[test]
fn deep_tail_stays_finite() {
    let w = WeibullG::exponential(4.8, 3.0, 2.5).unwrap();
    assert_eq!(w.sf(10.0), 0.0);
    assert!(w.log_sf(10.0).is_finite());
    assert!(w.hazard(10.0).is_finite());
    let g = GompertzMakeham::new(1.0, 1.0, 1.0).unwrap();
    assert!(g.hazard(50.0).is_finite());
    assert!(g.cdf(1e-300) > 0.0);
}

#[test]
fn invalid_parameters_rejected() {
    assert!(WeibullG::exponential(0.0, 1.0, 1.0).is_err());
    assert!(WeibullG::exponential(1.0, f64::NAN, 1.0).is_err());
    assert!(GompertzMakeham::new(1.0, -1.0, 1.0).is_err());
    let w = WeibullG::exponential(1.0, 1.0, 1.0).unwrap();
    assert!(w.quantile(1.0).is_err());
    assert!(w.quantile(0.0).is_err());
}

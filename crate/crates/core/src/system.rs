//! Series (smallest order statistic) and parallel (largest order statistic)
//! systems of independent heterogeneous components.

use std::fmt;

use crate::error::{Error, Result};
use crate::lifetime::{Baseline, Lifetime, LifetimeModel};
use crate::numeric::{exact_sum, exp_neg, log1mexp};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Structure {
    /// `X_{1:n}`: fails at the first component failure.
    Series,
    /// `X_{n:n}`: fails at the last component failure.
    Parallel,
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Structure::Series => "series",
            Structure::Parallel => "parallel",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SystemSpec {
    components: Vec<LifetimeModel>,
    structure: Structure,
}

impl SystemSpec {
    pub fn new(components: Vec<LifetimeModel>, structure: Structure) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidParameter(
                "a system needs at least one component".into(),
            ));
        }
        Ok(Self {
            components,
            structure,
        })
    }

    pub fn series(components: Vec<LifetimeModel>) -> Result<Self> {
        Self::new(components, Structure::Series)
    }

    pub fn parallel(components: Vec<LifetimeModel>) -> Result<Self> {
        Self::new(components, Structure::Parallel)
    }

    pub fn components(&self) -> &[LifetimeModel] {
        &self.components
    }

    pub fn structure(&self) -> Structure {
        self.structure
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    fn sum_cum_hazard(&self, x: f64) -> f64 {
        self.components.iter().map(|c| c.cum_hazard(x)).sum()
    }

    fn sum_log_cdf(&self, x: f64) -> f64 {
        self.components.iter().map(|c| c.log_cdf(x)).sum()
    }

    fn sum_hazard(&self, x: f64) -> f64 {
        self.components.iter().map(|c| c.hazard(x)).sum()
    }

    fn sum_reversed_hazard(&self, x: f64) -> Result<f64> {
        self.components.iter().map(|c| c.reversed_hazard(x)).sum()
    }

    /// Hazard of the series system. Homogeneous Weibull-G and
    /// Gompertz-Makeham systems go through their closed forms.
    pub fn series_hazard(&self, x: f64) -> Result<f64> {
        if self.structure != Structure::Series {
            return Err(Error::Usage(
                "series_hazard requires a series system".into(),
            ));
        }
        if let Some(wg) = self.wg_common_shape() {
            return Ok(wg_series_hazard(
                &wg.alphas,
                &wg.gammas,
                wg.beta,
                &wg.baseline,
                x,
            ));
        }
        if let Some((lambdas, alphas, betas)) = self.gm_columns() {
            return Ok(gm_series_hazard(&lambdas, &alphas, &betas, x));
        }
        Ok(self.sum_hazard(x))
    }

    /// Reversed hazard of the parallel system. A Weibull-G system with a
    /// common `beta`, `gamma` and baseline uses the factored form.
    pub fn parallel_reversed_hazard(&self, x: f64) -> Result<f64> {
        if self.structure != Structure::Parallel {
            return Err(Error::Usage(
                "parallel_reversed_hazard requires a parallel system".into(),
            ));
        }
        if self.sum_log_cdf(x) == f64::NEG_INFINITY {
            return Err(Error::Domain(format!(
                "reversed hazard undefined at x = {x}: system cdf is zero"
            )));
        }
        if let Some(wg) = self.wg_common_shape() {
            if let Some(gamma) = wg.common_gamma() {
                return Ok(wg_parallel_reversed_hazard(
                    &wg.alphas,
                    wg.beta,
                    gamma,
                    &wg.baseline,
                    x,
                ));
            }
        }
        self.sum_reversed_hazard(x)
    }

    /// Sum of component reversed hazards (the unfactored route).
    pub fn parallel_reversed_hazard_summed(&self, x: f64) -> Result<f64> {
        self.sum_reversed_hazard(x)
    }

    fn wg_common_shape(&self) -> Option<WgColumns> {
        let first = self.components[0].as_weibull_g()?;
        let mut cols = WgColumns {
            alphas: Vec::with_capacity(self.len()),
            gammas: Vec::with_capacity(self.len()),
            beta: first.beta(),
            baseline: first.baseline().clone(),
        };
        for c in &self.components {
            let m = c.as_weibull_g()?;
            if m.beta() != cols.beta || m.baseline() != &cols.baseline {
                return None;
            }
            cols.alphas.push(m.alpha());
            cols.gammas.push(m.gamma());
        }
        Some(cols)
    }

    fn gm_columns(&self) -> Option<(Vec<f64>, Vec<f64>, Vec<f64>)> {
        let mut lambdas = Vec::with_capacity(self.len());
        let mut alphas = Vec::with_capacity(self.len());
        let mut betas = Vec::with_capacity(self.len());
        for c in &self.components {
            let m = c.as_gompertz_makeham()?;
            lambdas.push(m.lambda());
            alphas.push(m.alpha());
            betas.push(m.beta());
        }
        Some((lambdas, alphas, betas))
    }
}

struct WgColumns {
    alphas: Vec<f64>,
    gammas: Vec<f64>,
    beta: f64,
    baseline: Baseline,
}

impl WgColumns {
    fn common_gamma(&self) -> Option<f64> {
        let g = self.gammas[0];
        self.gammas.iter().all(|&v| v == g).then_some(g)
    }
}

impl Lifetime for SystemSpec {
    fn log_sf(&self, x: f64) -> f64 {
        match self.structure {
            Structure::Series => -self.sum_cum_hazard(x),
            Structure::Parallel => log1mexp(self.sum_log_cdf(x)),
        }
    }

    fn log_cdf(&self, x: f64) -> f64 {
        match self.structure {
            Structure::Series => log1mexp(-self.sum_cum_hazard(x)),
            Structure::Parallel => self.sum_log_cdf(x),
        }
    }

    fn sf(&self, x: f64) -> f64 {
        match self.structure {
            Structure::Series => exp_neg(self.sum_cum_hazard(x)),
            Structure::Parallel => -self.sum_log_cdf(x).exp_m1(),
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        match self.structure {
            Structure::Series => {
                let h = self.sum_cum_hazard(x);
                if h == f64::INFINITY {
                    1.0
                } else {
                    -(-h).exp_m1()
                }
            }
            Structure::Parallel => self.sum_log_cdf(x).exp(),
        }
    }

    fn hazard(&self, x: f64) -> f64 {
        match self.structure {
            Structure::Series => self.sum_hazard(x),
            Structure::Parallel => {
                if self.len() == 1 {
                    return self.components[0].hazard(x);
                }
                let log_cdf = self.sum_log_cdf(x);
                if log_cdf == f64::NEG_INFINITY {
                    return 0.0;
                }
                let rh = self.sum_reversed_hazard(x).unwrap_or(0.0);
                (log_cdf - log1mexp(log_cdf)).exp() * rh
            }
        }
    }

    fn log_pdf(&self, x: f64) -> f64 {
        match self.structure {
            Structure::Series => -self.sum_cum_hazard(x) + self.sum_hazard(x).ln(),
            Structure::Parallel => {
                if self.len() == 1 {
                    return self.components[0].log_pdf(x);
                }
                let log_cdf = self.sum_log_cdf(x);
                if log_cdf == f64::NEG_INFINITY {
                    return f64::NEG_INFINITY;
                }
                log_cdf + self.sum_reversed_hazard(x).unwrap_or(0.0).ln()
            }
        }
    }

    fn reversed_hazard(&self, x: f64) -> Result<f64> {
        match self.structure {
            Structure::Series => {
                let h = self.sum_cum_hazard(x);
                if h <= 0.0 {
                    return Err(Error::Domain(format!(
                        "reversed hazard undefined at x = {x}: system cdf is zero"
                    )));
                }
                Ok((-h - log1mexp(-h)).exp() * self.sum_hazard(x))
            }
            Structure::Parallel => {
                if self.sum_log_cdf(x) == f64::NEG_INFINITY {
                    return Err(Error::Domain(format!(
                        "reversed hazard undefined at x = {x}: system cdf is zero"
                    )));
                }
                self.sum_reversed_hazard(x)
            }
        }
    }
}

/// Series hazard of Weibull-G components with a common shape:
/// `beta * sum_i alpha_i gamma_i w(gamma_i x)^{beta-1} w'(gamma_i x)`.
pub fn wg_series_hazard(
    alphas: &[f64],
    gammas: &[f64],
    beta: f64,
    baseline: &Baseline,
    x: f64,
) -> f64 {
    let odds = baseline.odds();
    alphas
        .iter()
        .zip(gammas)
        .map(|(&a, &g)| {
            let t = g * x;
            let power = if beta == 1.0 {
                0.0
            } else {
                (beta - 1.0) * odds.ln_w(t)
            };
            a * g * (power + odds.ln_dw(t)).exp()
        })
        .sum::<f64>()
        * beta
}

/// Series hazard of Gompertz-Makeham components:
/// `sum_i lambda_i + sum_i alpha_i e^{beta_i x}` (`n lambda + ...` for a
/// common Makeham term).
pub fn gm_series_hazard(lambdas: &[f64], alphas: &[f64], betas: &[f64], x: f64) -> f64 {
    let makeham: f64 = lambdas.iter().sum();
    let gompertz: f64 = alphas
        .iter()
        .zip(betas)
        .map(|(&a, &b)| a * (b * x).exp())
        .sum();
    makeham + gompertz
}

/// Factored reversed hazard of a parallel Weibull-G system with common
/// `beta` and `gamma`:
/// `beta gamma w(gamma x)^{beta-1} w'(gamma x) sum_i alpha_i / (e^{alpha_i z} - 1)`
/// with `z = w(gamma x)^beta`.
pub fn wg_parallel_reversed_hazard(
    alphas: &[f64],
    beta: f64,
    gamma: f64,
    baseline: &Baseline,
    x: f64,
) -> f64 {
    let odds = baseline.odds();
    let t = gamma * x;
    let lw = odds.ln_w(t);
    let z = (beta * lw).exp();
    let sum: f64 = alphas.iter().map(|&a| a / (a * z).exp_m1()).sum();
    if sum == 0.0 {
        return 0.0;
    }
    let power = if beta == 1.0 { 0.0 } else { (beta - 1.0) * lw };
    beta * gamma * (power + odds.ln_dw(t)).exp() * sum
}

/// Survival of a Gompertz-Makeham series system with common `alpha`, `beta`
/// and per-component Makeham terms:
/// `exp(-(sum lambda_i) x - n (alpha/beta)(e^{beta x} - 1))`.
///
/// The value depends on `lambdas` only through their exact sum.
pub fn lambda_aggregate_sf(lambdas: &[f64], alpha: f64, beta: f64, x: f64) -> f64 {
    let n = lambdas.len() as f64;
    let total = exact_sum(lambdas);
    exp_neg(total * x + n * alpha / beta * (beta * x).exp_m1())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lifetime::{GompertzMakeham, WeibullG};

    fn gm(a: f64, b: f64, l: f64) -> LifetimeModel {
        GompertzMakeham::new(a, b, l).unwrap().into()
    }

    fn wg(a: f64, b: f64, g: f64) -> LifetimeModel {
        WeibullG::exponential(a, b, g).unwrap().into()
    }

    #[test]
    fn empty_system_rejected() {
        assert!(SystemSpec::series(vec![]).is_err());
    }

    #[test]
    fn identical_components_power_law() {
        let c = wg(1.3, 2.0, 0.8);
        let s = SystemSpec::series(vec![c.clone(); 3]).unwrap();
        let p = SystemSpec::parallel(vec![c.clone(); 3]).unwrap();
        for &x in &[0.05, 0.3, 0.9, 1.4] {
            let sf = c.sf(x).powi(3);
            assert!((s.sf(x) - sf).abs() <= 1e-12 * sf);
            let cdf = c.cdf(x).powi(3);
            assert!((p.cdf(x) - cdf).abs() <= 1e-12 * cdf);
            let rh = 3.0 * c.reversed_hazard(x).unwrap();
            let got = p.parallel_reversed_hazard(x).unwrap();
            assert!((got - rh).abs() <= 1e-12 * rh);
        }
        assert_eq!(p.sf(0.0), 1.0);
    }

    #[test]
    fn gm_series_log_survival() {
        let s = SystemSpec::series(vec![gm(4.8, 2.5, 0.7), gm(3.4, 1.6, 0.7)]).unwrap();
        for &x in &[0.01f64, 0.2, 0.5, 1.0] {
            let oracle = 2.0 * 0.7 * x
                + 4.8 / 2.5 * ((2.5 * x).exp() - 1.0)
                + 3.4 / 1.6 * ((1.6 * x).exp() - 1.0);
            assert!((-s.sf(x).ln() - oracle).abs() < 1e-10);
        }
        assert!((s.series_hazard(0.0).unwrap() - (1.4 + 4.8 + 3.4)).abs() < 1e-14);
    }

    #[test]
    fn complement_holds() {
        let s = SystemSpec::series(vec![gm(1.0, 2.0, 0.3), wg(2.0, 3.0, 1.5)]).unwrap();
        for &x in &[0.0, 0.1, 0.4, 1.0] {
            assert!((s.sf(x) + s.cdf(x) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn structure_mismatch_is_usage_error() {
        let s = SystemSpec::series(vec![gm(1.0, 1.0, 1.0)]).unwrap();
        assert!(matches!(
            s.parallel_reversed_hazard(1.0),
            Err(Error::Usage(_))
        ));
        let p = SystemSpec::parallel(vec![gm(1.0, 1.0, 1.0)]).unwrap();
        assert!(matches!(p.series_hazard(1.0), Err(Error::Usage(_))));
        assert!(matches!(
            p.parallel_reversed_hazard(0.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn unit_wg_series_hazard_is_exp() {
        let s = SystemSpec::series(vec![wg(1.0, 1.0, 1.0)]).unwrap();
        for &x in &[0.1, 1.0, 3.0] {
            assert!((s.series_hazard(x).unwrap() - x.exp()).abs() < 1e-12 * x.exp());
        }
    }

    #[test]
    fn example_series_hazard_matches_formula() {
        let s = SystemSpec::series(vec![wg(4.8, 3.0, 2.5), wg(3.4, 3.0, 1.6)]).unwrap();
        let x = 0.4;
        let oracle: f64 = [(4.8, 2.5), (3.4, 1.6)]
            .iter()
            .map(|&(a, g): &(f64, f64)| a * g * ((g * x).exp() - 1.0).powi(2) * (g * x).exp())
            .sum::<f64>()
            * 3.0;
        let got = s.series_hazard(x).unwrap();
        assert!((got - oracle).abs() <= 1e-10 * oracle);
    }

    #[test]
    fn lambda_aggregate_depends_on_sum_only() {
        let a = lambda_aggregate_sf(&[1.0, 2.0], 1.0, 1.0, 1.0);
        let b = lambda_aggregate_sf(&[1.5, 1.5], 1.0, 1.0, 1.0);
        assert_eq!(a, b);
        let oracle = (-3.0 - 2.0 * (std::f64::consts::E - 1.0)).exp();
        assert!((a - oracle).abs() < 1e-15);
        assert!((a - 0.0016019019).abs() < 1e-10);
        let g = GompertzMakeham::new(0.7, 1.2, 0.4).unwrap();
        for &x in &[0.1, 0.8, 2.0] {
            let one = lambda_aggregate_sf(&[0.4], 0.7, 1.2, x);
            assert!((one - g.sf(x)).abs() <= 1e-15 * g.sf(x));
        }
    }
}

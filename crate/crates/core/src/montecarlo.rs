//! Inverse-transform sampling and Kolmogorov-Smirnov cross-checks of the
//! closed forms.
//!
//! Draws come from `ChaCha8Rng::seed_from_u64(seed)`. Component `k` of a
//! system reads stream `k` (`set_stream(k)`); a single model reads stream 0,
//! so a one-component system reproduces [`sample`] exactly.

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lifetime::{Lifetime, LifetimeModel};
use crate::system::{Structure, SystemSpec};

/// Smallest draw count accepted by [`empirical_system_check`].
pub const MIN_SYSTEM_DRAWS: usize = 1000;

#[derive(Clone, Debug, PartialEq)]
pub struct SampleBatch {
    pub model: LifetimeModel,
    pub seed: u64,
    /// Ascending.
    pub values: Vec<f64>,
}

impl SampleBatch {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn median(&self) -> f64 {
        let n = self.values.len();
        if n % 2 == 1 {
            self.values[n / 2]
        } else {
            0.5 * (self.values[n / 2 - 1] + self.values[n / 2])
        }
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn draw(model: &LifetimeModel, count: usize, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    (0..count)
        .map(|_| {
            let u: f64 = rng.sample(Open01);
            model.quantile(u)
        })
        .collect()
}

/// `count` i.i.d. lifetimes `quantile(u)`, `u ~ U(0, 1)`, sorted ascending.
pub fn sample(model: &LifetimeModel, count: usize, seed: u64) -> Result<SampleBatch> {
    if count == 0 {
        return Err(Error::Usage("sample count must be at least 1".into()));
    }
    let mut values = draw(model, count, &mut stream_rng(seed, 0))?;
    values.sort_by(f64::total_cmp);
    Ok(SampleBatch {
        model: model.clone(),
        seed,
        values,
    })
}

/// Sup-distance between the empirical cdf of `sorted` and `cdf`.
pub fn ks_statistic(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (((i + 1) as f64) / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

/// KS distance of a batch against any lifetime law.
pub fn ks_distance(batch: &SampleBatch, model: &dyn Lifetime) -> f64 {
    ks_statistic(&batch.values, |x| model.cdf(x))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SystemCheck {
    pub structure: Structure,
    pub components: usize,
    pub count: usize,
    pub seed: u64,
    pub ks: f64,
    /// Sorted system lifetimes.
    pub values: Vec<f64>,
}

/// Simulate every component, reduce by min (series) or max (parallel) and
/// compare the empirical cdf with the closed-form system cdf.
pub fn empirical_system_check(spec: &SystemSpec, count: usize, seed: u64) -> Result<SystemCheck> {
    if count < MIN_SYSTEM_DRAWS {
        return Err(Error::Usage(format!(
            "system check needs at least {MIN_SYSTEM_DRAWS} draws, got {count}"
        )));
    }
    let mut values: Option<Vec<f64>> = None;
    for (k, component) in spec.components().iter().enumerate() {
        let draws = draw(component, count, &mut stream_rng(seed, k as u64))?;
        values = Some(match values {
            None => draws,
            Some(acc) => acc
                .into_iter()
                .zip(draws)
                .map(|(a, b)| match spec.structure() {
                    Structure::Series => a.min(b),
                    Structure::Parallel => a.max(b),
                })
                .collect(),
        });
    }
    let mut values = values.expect("a system has at least one component");
    values.sort_by(f64::total_cmp);
    let ks = ks_statistic(&values, |x| spec.cdf(x));
    Ok(SystemCheck {
        structure: spec.structure(),
        components: spec.len(),
        count,
        seed,
        ks,
        values,
    })
}

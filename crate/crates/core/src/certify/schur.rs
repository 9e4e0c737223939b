//! Finite-difference Schur-condition checks and the auxiliary functions
//! `h1`, `h2` and `g(alpha) = alpha / (e^{alpha z} - 1)`.

use crate::error::{Error, Result};

/// `e^x - x e^x - 1`; non-positive for `x >= 0`.
pub fn h1(x: f64) -> f64 {
    if x.abs() < 0.5 {
        // -sum_{k>=2} (k-1) x^k / k!
        let mut term = x; // x^k / k! at k = 1
        let mut sum = 0.0;
        for k in 2..40 {
            term *= x / k as f64;
            let add = (k - 1) as f64 * term;
            sum += add;
            if add.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        -sum
    } else {
        x.exp_m1() - x * x.exp()
    }
}

/// `x e^x - 2 e^x + x + 2`; non-negative for `x >= 0`.
pub fn h2(x: f64) -> f64 {
    if x.abs() < 0.5 {
        // sum_{k>=3} (k-2) x^k / k!
        let mut term = x * x / 2.0;
        let mut sum = 0.0;
        for k in 3..40 {
            term *= x / k as f64;
            let add = (k - 2) as f64 * term;
            sum += add;
            if add.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        (x - 2.0) * x.exp_m1() + 2.0 * x
    }
}

/// `alpha / (e^{alpha z} - 1)`: decreasing and convex in `alpha > 0` for any
/// fixed `z > 0`.
pub fn g_alpha(alpha: f64, z: f64) -> f64 {
    alpha / (alpha * z).exp_m1()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchurClass {
    Convex,
    Concave,
    /// Every pair expression vanishes: both conditions hold with zero margin.
    Zero,
    Neither,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairDiagnostic {
    pub i: usize,
    pub j: usize,
    /// `(a_i - a_j)(∂_i ψ - ∂_j ψ)`, summed over rows for the matrix form.
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SchurDiagnostics {
    pub pairs: Vec<PairDiagnostic>,
    pub gradient: Vec<f64>,
    /// Band around zero treated as sign-neutral.
    pub zero_band: f64,
    pub convex_consistent: bool,
    pub concave_consistent: bool,
}

impl SchurDiagnostics {
    pub fn class(&self) -> SchurClass {
        match (self.convex_consistent, self.concave_consistent) {
            (true, true) => SchurClass::Zero,
            (true, false) => SchurClass::Convex,
            (false, true) => SchurClass::Concave,
            (false, false) => SchurClass::Neither,
        }
    }

    /// Smallest pair expression (negative means a convexity violation).
    pub fn min_value(&self) -> f64 {
        self.pairs
            .iter()
            .map(|p| p.value)
            .fold(f64::INFINITY, f64::min)
    }

    fn classify(pairs: Vec<PairDiagnostic>, gradient: Vec<f64>, zero_band: f64) -> Self {
        let convex_consistent = pairs.iter().all(|p| p.value >= -zero_band);
        let concave_consistent = pairs.iter().all(|p| p.value <= zero_band);
        Self {
            pairs,
            gradient,
            zero_band,
            convex_consistent,
            concave_consistent,
        }
    }
}

fn fd_step(a: f64) -> f64 {
    1e-6 * a.abs().max(1.0)
}

fn rotated(v: &[f64]) -> Vec<f64> {
    let mut r = v.to_vec();
    r.rotate_left(1);
    r
}

fn check_symmetric(base: f64, permuted: f64) -> Result<()> {
    if (base - permuted).abs() > 1e-9 * base.abs().max(permuted.abs()).max(1e-300) {
        return Err(Error::Usage(format!(
            "function is not symmetric: {base} vs {permuted} under a column rotation"
        )));
    }
    Ok(())
}

fn finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain(format!("{what} is not finite")))
    }
}

fn central_diff(psi: &dyn Fn(&[f64]) -> f64, point: &[f64], k: usize) -> Result<f64> {
    let h = fd_step(point[k]);
    let mut up = point.to_vec();
    let mut down = point.to_vec();
    up[k] += h;
    down[k] -= h;
    let d = (psi(&up) - psi(&down)) / (2.0 * h);
    finite(d, "finite-difference derivative")
}

/// Sign test `(a_i - a_j)(∂_i ψ - ∂_j ψ)` over all pairs at `sample`.
///
/// `ψ` must be symmetric; this is spot-checked with one column rotation.
pub fn schur_condition_check(
    psi: &dyn Fn(&[f64]) -> f64,
    sample: &[f64],
) -> Result<SchurDiagnostics> {
    let n = sample.len();
    if n < 2 {
        return Err(Error::Usage("need at least two coordinates".into()));
    }
    let base = finite(psi(sample), "psi at the sample")?;
    check_symmetric(base, psi(&rotated(sample)))?;

    let gradient = (0..n)
        .map(|k| central_diff(psi, sample, k))
        .collect::<Result<Vec<f64>>>()?;
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let value = (sample[i] - sample[j]) * (gradient[i] - gradient[j]);
            pairs.push(PairDiagnostic { i, j, value });
        }
    }
    Ok(SchurDiagnostics::classify(
        pairs,
        gradient,
        zero_band(base, sample),
    ))
}

fn zero_band(base: f64, entries: &[f64]) -> f64 {
    let spread = entries.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    1e-7 * base.abs().max(1.0) * spread.max(1.0)
}

/// Two-row variant: `sum_r (a_rj - a_rk)(∂ψ/∂a_rj - ∂ψ/∂a_rk)` for every
/// column pair `(j, k)`. `ψ` takes the two rows and must be invariant under
/// a common column permutation.
pub fn schur_condition_check_matrix(
    psi: &dyn Fn(&[f64], &[f64]) -> f64,
    top: &[f64],
    bottom: &[f64],
) -> Result<SchurDiagnostics> {
    let n = top.len();
    if n < 2 || bottom.len() != n {
        return Err(Error::Usage(
            "need two rows of equal length with at least two columns".into(),
        ));
    }
    let base = finite(psi(top, bottom), "psi at the sample")?;
    check_symmetric(base, psi(&rotated(top), &rotated(bottom)))?;

    let flat: Vec<f64> = top.iter().chain(bottom).copied().collect();
    let as_rows = |v: &[f64]| psi(&v[..n], &v[n..]);
    let gradient = (0..2 * n)
        .map(|k| central_diff(&as_rows, &flat, k))
        .collect::<Result<Vec<f64>>>()?;
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for j in 0..n {
        for k in (j + 1)..n {
            let value = (0..2)
                .map(|r| {
                    (flat[r * n + j] - flat[r * n + k])
                        * (gradient[r * n + j] - gradient[r * n + k])
                })
                .sum();
            pairs.push(PairDiagnostic { i: j, j: k, value });
        }
    }
    Ok(SchurDiagnostics::classify(
        pairs,
        gradient,
        zero_band(base, &flat),
    ))
}

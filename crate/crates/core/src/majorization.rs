//! Vector majorization, T-transforms, chain majorization of 2-row parameter
//! matrices, and the similarly-ordered set `P_n`.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Retry cap for randomized hypothesis generation.
pub const GENERATION_RETRIES: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MajorizationKind {
    /// `a ≺ b`: equal totals, ascending partial sums of `a` dominate.
    Plain,
    /// `a ≺_w b`: descending partial sums of `b` dominate those of `a`.
    WeakSub,
    /// `a ≺^w b`: ascending partial sums of `a` dominate those of `b`.
    WeakSuper,
}

fn sorted_ascending(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

fn partial_sum_tolerance(a: &[f64], b: &[f64]) -> f64 {
    let scale = a.iter().chain(b).fold(0.0_f64, |m, v| m.max(v.abs()));
    1e-12 * a.len() as f64 * scale
}

/// Decide `a ≺ b`, `a ≺_w b` or `a ≺^w b`.
pub fn majorize_check(a: &[f64], b: &[f64], kind: MajorizationKind) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::Usage(format!(
            "vectors differ in length ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::Usage("vectors must be non-empty".into()));
    }
    let tol = partial_sum_tolerance(a, b);
    let asc_a = sorted_ascending(a);
    let asc_b = sorted_ascending(b);
    let ascending_dominates = || {
        let (mut sa, mut sb) = (0.0, 0.0);
        asc_a.iter().zip(&asc_b).all(|(x, y)| {
            sa += x;
            sb += y;
            sa >= sb - tol
        })
    };
    Ok(match kind {
        MajorizationKind::Plain => {
            let total_a: f64 = asc_a.iter().sum();
            let total_b: f64 = asc_b.iter().sum();
            (total_a - total_b).abs() <= tol && ascending_dominates()
        }
        MajorizationKind::WeakSuper => ascending_dominates(),
        MajorizationKind::WeakSub => {
            let (mut sa, mut sb) = (0.0, 0.0);
            asc_a.iter().rev().zip(asc_b.iter().rev()).all(|(x, y)| {
                sa += x;
                sb += y;
                sa <= sb + tol
            })
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Implications {
    pub plain: bool,
    pub weak_sub: bool,
    pub weak_super: bool,
}

impl Implications {
    /// `a ≺ b` implies both weak forms.
    pub fn consistent(&self) -> bool {
        !self.plain || (self.weak_sub && self.weak_super)
    }
}

pub fn implication_suite(a: &[f64], b: &[f64]) -> Result<Implications> {
    let out = Implications {
        plain: majorize_check(a, b, MajorizationKind::Plain)?,
        weak_sub: majorize_check(a, b, MajorizationKind::WeakSub)?,
        weak_super: majorize_check(a, b, MajorizationKind::WeakSuper)?,
    };
    debug_assert!(out.consistent());
    Ok(out)
}

/// A 2×n matrix of positive paired parameters; columns are components.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamMatrix {
    rows: [Vec<f64>; 2],
}

impl ParamMatrix {
    pub fn new(top: Vec<f64>, bottom: Vec<f64>) -> Result<Self> {
        if top.len() != bottom.len() {
            return Err(Error::InvalidParameter(format!(
                "rows differ in length ({} vs {})",
                top.len(),
                bottom.len()
            )));
        }
        if top.len() < 2 {
            return Err(Error::InvalidParameter(
                "a parameter matrix needs at least two columns".into(),
            ));
        }
        if let Some(v) = top
            .iter()
            .chain(&bottom)
            .find(|v| !(v.is_finite() && **v > 0.0))
        {
            return Err(Error::InvalidParameter(format!(
                "matrix entries must be positive and finite, got {v}"
            )));
        }
        Ok(Self {
            rows: [top, bottom],
        })
    }

    pub fn from_rows(rows: [[f64; 2]; 2]) -> Result<Self> {
        Self::new(rows[0].to_vec(), rows[1].to_vec())
    }

    pub fn cols(&self) -> usize {
        self.rows[0].len()
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.rows[r]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.rows[r][c]
    }

    pub fn column(&self, c: usize) -> (f64, f64) {
        (self.rows[0][c], self.rows[1][c])
    }

    /// Apply the same column permutation to both rows.
    pub fn permute_columns(&self, perm: &[usize]) -> Self {
        let pick = |row: &Vec<f64>| perm.iter().map(|&k| row[k]).collect();
        Self {
            rows: [pick(&self.rows[0]), pick(&self.rows[1])],
        }
    }

    pub fn approx_eq(&self, other: &Self, rel_tol: f64) -> bool {
        self.cols() == other.cols()
            && self.rows.iter().zip(&other.rows).all(|(r, s)| {
                r.iter()
                    .zip(s)
                    .all(|(x, y)| (x - y).abs() <= rel_tol * x.abs().max(y.abs()))
            })
    }
}

/// `T^λ_{i,j} = λ I + (1 - λ) Π_{i,j}`, acting on columns from the right.
/// Column indices are zero-based.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TTransform {
    lambda: f64,
    i: usize,
    j: usize,
}

impl TTransform {
    pub fn new(lambda: f64, i: usize, j: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidParameter(format!(
                "T-transform weight must lie in [0, 1], got {lambda}"
            )));
        }
        if i == j {
            return Err(Error::InvalidParameter(
                "T-transform needs two distinct columns".into(),
            ));
        }
        Ok(Self { lambda, i, j })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn indices(&self) -> (usize, usize) {
        (self.i, self.j)
    }

    /// Dense n×n matrix form.
    pub fn to_matrix(&self, n: usize) -> Vec<Vec<f64>> {
        let mut m = vec![vec![0.0; n]; n];
        for (k, row) in m.iter_mut().enumerate() {
            row[k] = 1.0;
        }
        let (i, j, l) = (self.i, self.j, self.lambda);
        m[i][i] = l;
        m[j][j] = l;
        m[i][j] = 1.0 - l;
        m[j][i] = 1.0 - l;
        m
    }
}

/// `m · T`: columns `i`, `j` become their λ-convex combinations in both rows.
pub fn apply_t_transform(m: &ParamMatrix, t: &TTransform) -> Result<ParamMatrix> {
    let n = m.cols();
    if t.i >= n || t.j >= n {
        return Err(Error::Usage(format!(
            "T-transform indices ({}, {}) out of range for {n} columns",
            t.i, t.j
        )));
    }
    let mut out = m.clone();
    let l = t.lambda;
    for row in out.rows.iter_mut() {
        let (ci, cj) = (row[t.i], row[t.j]);
        row[t.i] = l * ci + (1.0 - l) * cj;
        row[t.j] = l * cj + (1.0 - l) * ci;
    }
    Ok(out)
}

pub fn apply_chain(m: &ParamMatrix, chain: &[TTransform]) -> Result<ParamMatrix> {
    chain
        .iter()
        .try_fold(m.clone(), |acc, t| apply_t_transform(&acc, t))
}

/// Find `λ ∈ [0, 1]` with `b = a · T^λ_{1,2}` for 2×2 matrices.
pub fn chain_majorize_solve_2x2(a: &ParamMatrix, b: &ParamMatrix) -> Option<f64> {
    const REL_TOL: f64 = 1e-9;
    if a.cols() != 2 || b.cols() != 2 {
        return None;
    }
    let close = |x: f64, y: f64| (x - y).abs() <= REL_TOL * x.abs().max(y.abs()).max(1e-300);

    // b_r1 = λ a_r1 + (1 - λ) a_r2, so λ = (b_r1 - a_r2) / (a_r1 - a_r2) on
    // any row whose columns differ; take the better-conditioned row.
    let spread = |r: usize| (a.get(r, 0) - a.get(r, 1)).abs();
    let r = if spread(0) >= spread(1) { 0 } else { 1 };
    let lambda = if spread(r) == 0.0 {
        1.0
    } else {
        (b.get(r, 0) - a.get(r, 1)) / (a.get(r, 0) - a.get(r, 1))
    };
    if !(-1e-12..=1.0 + 1e-12).contains(&lambda) {
        return None;
    }
    let lambda = lambda.clamp(0.0, 1.0);
    let t = TTransform::new(lambda, 0, 1).ok()?;
    let image = apply_t_transform(a, &t).ok()?;
    let matches = (0..2).all(|r| (0..2).all(|c| close(image.get(r, c), b.get(r, c))));
    matches.then_some(lambda)
}

/// Non-negative entries with unit row and column sums.
pub fn doubly_stochastic_check(q: &[Vec<f64>]) -> bool {
    let n = q.len();
    if n == 0 || q.iter().any(|r| r.len() != n) {
        return false;
    }
    if q.iter().flatten().any(|&v| v < -1e-12 || !v.is_finite()) {
        return false;
    }
    let rows_ok = q
        .iter()
        .all(|r| (r.iter().sum::<f64>() - 1.0).abs() <= 1e-10);
    let cols_ok = (0..n).all(|c| (q.iter().map(|r| r[c]).sum::<f64>() - 1.0).abs() <= 1e-10);
    rows_ok && cols_ok
}

pub fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..b.len()).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

/// Membership in `P_n`: `(a_i - a_j)(b_i - b_j) >= 0` for every column pair.
pub fn pn_membership(m: &ParamMatrix) -> bool {
    let (top, bottom) = (m.row(0), m.row(1));
    let n = m.cols();
    (0..n).all(|i| ((i + 1)..n).all(|j| (top[i] - top[j]) * (bottom[i] - bottom[j]) >= 0.0))
}

/// Whether columns `i` and `j` are similarly ordered.
pub fn similarly_ordered_pair(m: &ParamMatrix, i: usize, j: usize) -> bool {
    (m.get(0, i) - m.get(0, j)) * (m.get(1, i) - m.get(1, j)) >= 0.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HypothesisKind {
    /// `(A = B·T…T, B)` with `B` and every intermediate product in `P_n`.
    ChainViaTransforms,
    /// `(a, b)` with `a ≺_w b`.
    WeakSub,
    /// `(a, b)` with `a ≺^w b`.
    WeakSuper,
}

/// Parameters of the randomized instance generator.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorConfig {
    pub n: usize,
    pub kind: HypothesisKind,
    /// Sampling range of each matrix row; vectors use the first.
    pub ranges: [(f64, f64); 2],
    /// Inclusive range for the number of T-transforms.
    pub transforms: (usize, usize),
    /// Keep `B` and the intermediate products in `P_n`.
    pub enforce_pn: bool,
}

impl GeneratorConfig {
    pub fn new(n: usize, kind: HypothesisKind) -> Self {
        Self {
            n,
            kind,
            ranges: [(0.5, 5.0), (0.5, 5.0)],
            transforms: (1, 3),
            enforce_pn: true,
        }
    }

    pub fn with_ranges(mut self, top: (f64, f64), bottom: (f64, f64)) -> Self {
        self.ranges = [top, bottom];
        self
    }

    pub fn with_transforms(mut self, min: usize, max: usize) -> Self {
        self.transforms = (min, max);
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum HypothesisPair {
    Chain {
        /// `B · T_1 ⋯ T_k`.
        a: ParamMatrix,
        b: ParamMatrix,
        transforms: Vec<TTransform>,
    },
    Vectors {
        a: Vec<f64>,
        b: Vec<f64>,
        /// Same-total rearrangement `c ≺ b` the noise was applied to.
        pivot: Vec<f64>,
    },
}

/// Deterministic instance generator: the same config and seed always
/// produce the same pair.
pub fn generate_hypothesis_pair(cfg: &GeneratorConfig, seed: u64) -> Result<HypothesisPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    generate_with_rng(cfg, &mut rng)
}

pub fn generate_with_rng<R: Rng + ?Sized>(
    cfg: &GeneratorConfig,
    rng: &mut R,
) -> Result<HypothesisPair> {
    if cfg.n < 2 {
        return Err(Error::Generation("need n >= 2".into()));
    }
    if cfg.transforms.0 > cfg.transforms.1 {
        return Err(Error::Generation("empty transform-count range".into()));
    }
    for _ in 0..GENERATION_RETRIES {
        let candidate = match cfg.kind {
            HypothesisKind::ChainViaTransforms => try_chain(cfg, rng)?,
            HypothesisKind::WeakSub | HypothesisKind::WeakSuper => try_vectors(cfg, rng)?,
        };
        if let Some(pair) = candidate {
            return Ok(pair);
        }
    }
    Err(Error::Generation(format!(
        "no valid {:?} instance after {GENERATION_RETRIES} attempts",
        cfg.kind
    )))
}

fn sample_row<R: Rng + ?Sized>(rng: &mut R, n: usize, (lo, hi): (f64, f64)) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(lo..=hi)).collect()
}

fn sample_transform<R: Rng + ?Sized>(rng: &mut R, n: usize) -> TTransform {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.partial_shuffle(rng, 2);
    let lambda = rng.gen_range(0.0..=1.0);
    TTransform {
        lambda,
        i: idx[0],
        j: idx[1],
    }
}

fn try_chain<R: Rng + ?Sized>(
    cfg: &GeneratorConfig,
    rng: &mut R,
) -> Result<Option<HypothesisPair>> {
    let mut top = sample_row(rng, cfg.n, cfg.ranges[0]);
    let mut bottom = sample_row(rng, cfg.n, cfg.ranges[1]);
    if cfg.enforce_pn {
        top.sort_by(f64::total_cmp);
        bottom.sort_by(f64::total_cmp);
    }
    let b = ParamMatrix::new(top, bottom)?;
    let k = rng.gen_range(cfg.transforms.0..=cfg.transforms.1);
    let transforms: Vec<TTransform> = (0..k).map(|_| sample_transform(rng, cfg.n)).collect();

    let mut current = b.clone();
    for (step, t) in transforms.iter().enumerate() {
        if cfg.enforce_pn && step > 0 && !pn_membership(&current) {
            return Ok(None);
        }
        current = apply_t_transform(&current, t)?;
    }
    if cfg.enforce_pn && !pn_membership(&b) {
        return Ok(None);
    }
    Ok(Some(HypothesisPair::Chain {
        a: current,
        b,
        transforms,
    }))
}

fn try_vectors<R: Rng + ?Sized>(
    cfg: &GeneratorConfig,
    rng: &mut R,
) -> Result<Option<HypothesisPair>> {
    let b = sample_row(rng, cfg.n, cfg.ranges[0]);
    let k = rng.gen_range(cfg.transforms.0..=cfg.transforms.1);
    let mut c = b.clone();
    for _ in 0..k {
        let t = sample_transform(rng, cfg.n);
        let (ci, cj) = (c[t.i], c[t.j]);
        c[t.i] = t.lambda * ci + (1.0 - t.lambda) * cj;
        c[t.j] = t.lambda * cj + (1.0 - t.lambda) * ci;
    }
    let a: Vec<f64> = match cfg.kind {
        HypothesisKind::WeakSub => c
            .iter()
            .map(|&v| v * (1.0 - rng.gen_range(0.0..0.3)))
            .collect(),
        HypothesisKind::WeakSuper => c
            .iter()
            .map(|&v| v * (1.0 + rng.gen_range(0.0..0.3)))
            .collect(),
        HypothesisKind::ChainViaTransforms => unreachable!(),
    };
    let kind = match cfg.kind {
        HypothesisKind::WeakSub => MajorizationKind::WeakSub,
        _ => MajorizationKind::WeakSuper,
    };
    if !majorize_check(&a, &b, kind)? || !majorize_check(&c, &b, MajorizationKind::Plain)? {
        return Ok(None);
    }
    Ok(Some(HypothesisPair::Vectors { a, b, pivot: c }))
}
